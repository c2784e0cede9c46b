#include "ffgram/spaces.hpp"

#include <numeric>

namespace ffgram {

Subspace make_subspace(const Mat& spanning, const TolerancePolicy& tol) {
    Subspace s;
    s.ambient = spanning.rows();
    s.basis = orthonormal_basis(spanning, tol);
    return s;
}

Mat projection(const Subspace& s) {
    return s.basis * s.basis.adjoint();
}

Vec embed(const Subspace& s, const Vec& coeffs) {
    if (coeffs.size() != s.dim())
        throw DimensionError("coefficient vector does not match subspace dimension");
    return s.basis * coeffs;
}

Vec restrict_to(const Subspace& s, const Vec& x) {
    if (x.size() != s.ambient)
        throw DimensionError("vector does not live in the ambient space");
    return s.basis.adjoint() * x;
}

DirectSumSpace::DirectSumSpace(std::vector<Eigen::Index> dims)
    : block_dims(std::move(dims)) {
    offsets.reserve(block_dims.size());
    for (Eigen::Index d : block_dims) {
        if (d < 0) throw DimensionError("negative block dimension");
        offsets.push_back(total);
        total += d;
    }
}

bool operator==(const DirectSumSpace& a, const DirectSumSpace& b) {
    return a.block_dims == b.block_dims;
}

BlockOperator::BlockOperator(DirectSumSpace dom, DirectSumSpace cod)
    : domain(std::move(dom)),
      codomain(std::move(cod)),
      matrix(Mat::Zero(codomain.total, domain.total)) {}

BlockOperator::BlockOperator(DirectSumSpace dom, DirectSumSpace cod, Mat m)
    : domain(std::move(dom)), codomain(std::move(cod)), matrix(std::move(m)) {
    if (matrix.rows() != codomain.total || matrix.cols() != domain.total)
        throw DimensionError("block operator matrix does not match its direct sums");
}

Eigen::Block<Mat> BlockOperator::block(Eigen::Index j, Eigen::Index i) {
    if (j < 0 || j >= codomain.blocks() || i < 0 || i >= domain.blocks())
        throw DimensionError("block index out of range");
    return matrix.block(codomain.offsets[j], domain.offsets[i],
                        codomain.block_dims[j], domain.block_dims[i]);
}

Eigen::Block<const Mat> BlockOperator::block(Eigen::Index j, Eigen::Index i) const {
    if (j < 0 || j >= codomain.blocks() || i < 0 || i >= domain.blocks())
        throw DimensionError("block index out of range");
    return matrix.block(codomain.offsets[j], domain.offsets[i],
                        codomain.block_dims[j], domain.block_dims[i]);
}

Vec apply_block(const BlockOperator& op, const Vec& x) {
    if (x.size() != op.domain.total)
        throw DimensionError("vector does not match the operator domain");
    return op.matrix * x;
}

} // namespace ffgram
