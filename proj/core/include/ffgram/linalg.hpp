#ifndef FFGRAM_LINALG_HPP
#define FFGRAM_LINALG_HPP

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "ffgram/errors.hpp"

namespace ffgram {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Thresholds used consistently across the library. rank_rel scales the largest
// singular value, invert_rel compares sigma_min/sigma_max, identity_abs is an
// absolute Frobenius budget for identities that should hold exactly.
struct TolerancePolicy {
    double rank_rel = 1e-12;
    double invert_rel = 1e-10;
    double identity_abs = 1e-9;

    // Cutoff below which a singular value counts as zero.
    double rank_cutoff(double sigma_max, Eigen::Index rows, Eigen::Index cols) const {
        return rank_rel * sigma_max * static_cast<double>(std::max(rows, cols));
    }

    void validate() const;
};

double frobenius(const Mat& m);

// Throws if any entry is NaN or infinite.
void check_finite(const Mat& m, const char* what = "matrix");

// Singular values in descending order.
RVec singular_values(const Mat& m);

double operator_norm(const Mat& m);

Eigen::Index numerical_rank(const Mat& m, const TolerancePolicy& tol = {});

// Orthonormal basis of the column span, via SVD. Columns come out in
// descending singular-value order; each column's first entry of modulus
// > 1/(2*sqrt(rows)) is rotated to the positive real axis so the basis is a
// deterministic function of the span, not of the input representation.
// Throws AllZeroError when the matrix has no numerical column span.
Mat orthonormal_basis(const Mat& m, const TolerancePolicy& tol = {});

// Orthonormal basis of the null space; columns follow the same phase
// convention. Empty (cols x 0) matrix when the kernel is trivial.
Mat kernel_basis(const Mat& m, const TolerancePolicy& tol = {});

// Eigenvalues in ascending order. Throws NotHermitianError when
// ||m - m^*||_F > tol.identity_abs.
RVec hermitian_eigenvalues(const Mat& m, const TolerancePolicy& tol = {});

Mat pseudo_inverse(const Mat& m, const TolerancePolicy& tol = {});

// Inversion as a measurement: inverse is absent when sigma_min/sigma_max falls
// at or below tol.invert_rel. Singularity is data here, not an error.
struct InverseResult {
    std::optional<Mat> inverse;
    double sigma_min = 0.0;
    double sigma_max = 0.0;

    bool invertible() const { return inverse.has_value(); }
    double sigma_ratio() const { return sigma_max > 0.0 ? sigma_min / sigma_max : 0.0; }
};

InverseResult inverse_checked(const Mat& m, const TolerancePolicy& tol = {});

// Largest principal angle between the column spans, in radians. Spans of equal
// dimension only; pass ambient-compatible matrices.
double largest_principal_angle(const Mat& a, const Mat& b, const TolerancePolicy& tol = {});

} // namespace ffgram

#endif
