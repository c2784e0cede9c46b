#include <doctest.h>

#include <cmath>
#include <limits>

#include "ffgram/corpus.hpp"
#include "ffgram/linalg.hpp"

using namespace ffgram;

namespace {
const Complex I_(0.0, 1.0);
}

TEST_CASE("frobenius norm of a hand matrix") {
    Mat m(2, 2);
    m << Complex(3, 0), Complex(0, 4), Complex(0, 0), Complex(0, 0);
    CHECK(frobenius(m) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("singular values of a diagonal matrix come out descending") {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = 4.0;
    RVec sv = singular_values(m);
    CHECK(sv(0) == doctest::Approx(4.0));
    CHECK(sv(1) == doctest::Approx(3.0));
    CHECK(operator_norm(m) == doctest::Approx(4.0));
}

TEST_CASE("numerical rank uses the relative cutoff") {
    Mat m = Mat::Identity(2, 2);
    CHECK(numerical_rank(m) == 2);
    m(1, 1) = 1e-20;
    CHECK(numerical_rank(m) == 1);
}

TEST_CASE("orthonormal basis phase convention lands on the positive real axis") {
    Mat span(2, 1);
    span << Complex(2, 0), Complex(0, 0);
    Mat q = orthonormal_basis(span);
    CHECK(q.cols() == 1);
    CHECK(std::abs(q(0, 0) - Complex(1, 0)) < 1e-14);

    // A purely imaginary spanning vector: the stored basis is still real.
    span << Complex(0, 0), Complex(0, 2);
    q = orthonormal_basis(span);
    CHECK(std::abs(q(0, 0)) < 1e-14);
    CHECK(std::abs(q(1, 0) - Complex(1, 0)) < 1e-14);
}

TEST_CASE("orthonormal basis depends on the span, not its presentation") {
    Mat a(2, 2);
    a << Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(-1, 0);
    Mat b(2, 2);
    b << Complex(2, 0), Complex(0, 0), Complex(0, 0), Complex(3, 0);
    Mat qa = orthonormal_basis(a);
    Mat qb = orthonormal_basis(b);
    // Both span C^2, so both projectors are the identity.
    CHECK(frobenius(qa * qa.adjoint() - Mat::Identity(2, 2)) < 1e-13);
    CHECK(frobenius(qb * qb.adjoint() - Mat::Identity(2, 2)) < 1e-13);
}

TEST_CASE("orthonormal basis rejects an all-zero span") {
    CHECK_THROWS_AS(orthonormal_basis(Mat::Zero(3, 2)), AllZeroError);
}

TEST_CASE("kernel basis of a rank-one projector") {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    Mat k = kernel_basis(m);
    REQUIRE(k.cols() == 1);
    CHECK(std::abs(k(0, 0)) < 1e-14);
    CHECK(std::abs(std::abs(k(1, 0)) - 1.0) < 1e-14);
    CHECK(kernel_basis(Mat::Identity(3, 3)).cols() == 0);
}

TEST_CASE("hermitian eigenvalues of a hand matrix, ascending") {
    Mat m(2, 2);
    m << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    RVec ev = hermitian_eigenvalues(m);
    CHECK(ev(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hermitian eigenvalues refuse a non-hermitian input") {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigenvalues(m), NotHermitianError);
}

TEST_CASE("pseudo-inverse of the nilpotent shift is its transpose") {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    Mat p = pseudo_inverse(m);
    Mat expected = Mat::Zero(2, 2);
    expected(1, 0) = 1.0;
    CHECK(frobenius(p - expected) < 1e-14);
}

TEST_CASE("pseudo-inverse satisfies all four Penrose identities") {
    Mat m = random_rank(31, 5, 3);
    Mat p = pseudo_inverse(m);
    CHECK(frobenius(m * p * m - m) < 1e-11 * frobenius(m));
    CHECK(frobenius(p * m * p - p) < 1e-11 * frobenius(p));
    CHECK(frobenius(Mat(m * p) - Mat((m * p).adjoint())) < 1e-11);
    CHECK(frobenius(Mat(p * m) - Mat((p * m).adjoint())) < 1e-11);
}

TEST_CASE("checked inversion treats singularity as data") {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    InverseResult r = inverse_checked(m);
    CHECK_FALSE(r.invertible());
    CHECK(r.sigma_ratio() == doctest::Approx(0.0));

    m(1, 1) = 2.0;
    r = inverse_checked(m);
    REQUIRE(r.invertible());
    CHECK(std::abs((*r.inverse)(1, 1) - Complex(0.5, 0)) < 1e-15);
    CHECK(r.sigma_min == doctest::Approx(1.0));
    CHECK(r.sigma_max == doctest::Approx(2.0));
}

TEST_CASE("largest principal angle between two lines equals the rotation") {
    const double t = 0.3;
    Mat a(2, 1), b(2, 1);
    a << Complex(1, 0), Complex(0, 0);
    b << Complex(std::cos(t), 0), Complex(std::sin(t), 0);
    CHECK(largest_principal_angle(a, b) == doctest::Approx(t).epsilon(1e-12));
    CHECK(largest_principal_angle(a, a) < 1e-8);
}

TEST_CASE("finiteness check rejects NaN") {
    Mat m = Mat::Zero(1, 1);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(check_finite(m), Error);
}

TEST_CASE("tolerance policy validates its fields") {
    TolerancePolicy tol;
    CHECK_NOTHROW(tol.validate());
    tol.rank_rel = -1.0;
    CHECK_THROWS_AS(tol.validate(), Error);
}
