#include "ffgram/linalg.hpp"

#include <cmath>

namespace ffgram {

void TolerancePolicy::validate() const {
    if (!(rank_rel > 0.0) || !(invert_rel > 0.0) || !(identity_abs > 0.0))
        throw Error("tolerances must be positive");
    if (rank_rel >= 1.0 || invert_rel >= 1.0)
        throw Error("relative tolerances must be < 1");
}

double frobenius(const Mat& m) {
    return m.norm();
}

void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite())
        throw Error(std::string(what) + " contains a non-finite entry");
}

RVec singular_values(const Mat& m) {
    check_finite(m);
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues();
}

double operator_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return singular_values(m)(0);
}

Eigen::Index numerical_rank(const Mat& m, const TolerancePolicy& tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    RVec sv = singular_values(m);
    const double cutoff = tol.rank_cutoff(sv(0), m.rows(), m.cols());
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    return r;
}

namespace {

// Rotate each column so its first entry of modulus > 1/(2*sqrt(rows)) lands on
// the positive real axis. A unit column always has one: if every entry had
// modulus <= 1/(2*sqrt(n)) the norm would be at most 1/2.
void fix_phases(Mat& q) {
    if (q.rows() == 0) return;
    const double floor = 0.5 / std::sqrt(static_cast<double>(q.rows()));
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            const Complex z = q(i, j);
            if (std::abs(z) > floor) {
                q.col(j) *= std::conj(z) / std::abs(z);
                break;
            }
        }
    }
}

} // namespace

Mat orthonormal_basis(const Mat& m, const TolerancePolicy& tol) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0)
        throw AllZeroError("cannot take the span of an empty matrix");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    const RVec& sv = svd.singularValues();
    if (sv(0) == 0.0)
        throw AllZeroError("matrix is exactly zero");
    const double cutoff = tol.rank_cutoff(sv(0), m.rows(), m.cols());
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    if (r == 0)
        throw AllZeroError("matrix has no numerical column span");
    Mat q = svd.matrixU().leftCols(r);
    fix_phases(q);
    return q;
}

Mat kernel_basis(const Mat& m, const TolerancePolicy& tol) {
    check_finite(m);
    if (m.cols() == 0) return Mat(0, 0);
    if (m.rows() == 0) {
        Mat id = Mat::Identity(m.cols(), m.cols());
        return id;
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    const double cutoff = sv(0) == 0.0 ? 0.0 : tol.rank_cutoff(sv(0), m.rows(), m.cols());
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    Mat q = svd.matrixV().rightCols(m.cols() - r);
    fix_phases(q);
    return q;
}

RVec hermitian_eigenvalues(const Mat& m, const TolerancePolicy& tol) {
    check_finite(m);
    if (m.rows() != m.cols())
        throw DimensionError("eigenvalues need a square matrix");
    if (frobenius(m - m.adjoint()) > tol.identity_abs)
        throw NotHermitianError("matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Mat pseudo_inverse(const Mat& m, const TolerancePolicy& tol) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) return Mat(m.cols(), m.rows());
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    if (sv(0) == 0.0) return Mat::Zero(m.cols(), m.rows());
    const double cutoff = tol.rank_cutoff(sv(0), m.rows(), m.cols());
    RVec inv = RVec::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

InverseResult inverse_checked(const Mat& m, const TolerancePolicy& tol) {
    check_finite(m);
    if (m.rows() != m.cols())
        throw DimensionError("inverse needs a square matrix");
    InverseResult out;
    if (m.rows() == 0) {
        out.inverse = Mat(0, 0);
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    out.sigma_max = sv(0);
    out.sigma_min = sv(sv.size() - 1);
    if (out.sigma_max > 0.0 && out.sigma_min / out.sigma_max > tol.invert_rel) {
        out.inverse = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    }
    return out;
}

double largest_principal_angle(const Mat& a, const Mat& b, const TolerancePolicy& tol) {
    if (a.rows() != b.rows())
        throw DimensionError("principal angles need a shared ambient space");
    const bool a_zero = a.cols() == 0 || operator_norm(a) == 0.0;
    const bool b_zero = b.cols() == 0 || operator_norm(b) == 0.0;
    if (a_zero && b_zero) return 0.0;
    if (a_zero || b_zero) return std::acos(0.0);
    Mat qa = orthonormal_basis(a, tol);
    Mat qb = orthonormal_basis(b, tol);
    if (qa.cols() != qb.cols())
        return std::acos(0.0);
    // cos of the largest angle is the smallest singular value of Qa^* Qb.
    RVec sv = singular_values(qa.adjoint() * qb);
    double c = sv(sv.size() - 1);
    c = std::min(1.0, std::max(-1.0, c));
    return std::acos(c);
}

} // namespace ffgram
