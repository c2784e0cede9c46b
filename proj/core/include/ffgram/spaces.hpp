#ifndef FFGRAM_SPACES_HPP
#define FFGRAM_SPACES_HPP

#include <vector>

#include "ffgram/linalg.hpp"

namespace ffgram {

// A subspace of C^ambient, stored as an orthonormal column basis.
struct Subspace {
    Eigen::Index ambient = 0;
    Mat basis; // ambient x dim, orthonormal columns

    Eigen::Index dim() const { return basis.cols(); }
};

// Orthonormalizes the spanning columns; the stored basis is deterministic in
// the span. Throws AllZeroError on a numerically zero spanning set.
Subspace make_subspace(const Mat& spanning, const TolerancePolicy& tol = {});

// Orthogonal projection onto the subspace, ambient x ambient.
Mat projection(const Subspace& s);

// Coefficients -> ambient vector: basis * c.
Vec embed(const Subspace& s, const Vec& coeffs);

// Ambient vector -> coefficients of its projection: basis^* x.
Vec restrict_to(const Subspace& s, const Vec& x);

// The external direct sum of coefficient blocks: block i holds dim-many
// coordinates of the i-th subspace.
struct DirectSumSpace {
    std::vector<Eigen::Index> block_dims;
    std::vector<Eigen::Index> offsets; // offsets[i] = sum of dims before i
    Eigen::Index total = 0;

    DirectSumSpace() = default;
    explicit DirectSumSpace(std::vector<Eigen::Index> dims);

    Eigen::Index blocks() const { return static_cast<Eigen::Index>(block_dims.size()); }
};

bool operator==(const DirectSumSpace& a, const DirectSumSpace& b);

// An operator between direct sums, stored dense with tile views. Tile (j, i)
// maps block i of the domain into block j of the codomain.
struct BlockOperator {
    DirectSumSpace domain;
    DirectSumSpace codomain;
    Mat matrix; // codomain.total x domain.total

    BlockOperator() = default;
    BlockOperator(DirectSumSpace dom, DirectSumSpace cod);
    BlockOperator(DirectSumSpace dom, DirectSumSpace cod, Mat m);

    Eigen::Block<Mat> block(Eigen::Index j, Eigen::Index i);
    Eigen::Block<const Mat> block(Eigen::Index j, Eigen::Index i) const;
};

Vec apply_block(const BlockOperator& op, const Vec& x);

} // namespace ffgram

#endif
