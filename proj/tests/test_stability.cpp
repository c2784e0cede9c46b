#include <doctest.h>

#include <cmath>

#include "ffgram/corpus.hpp"
#include "ffgram/stability.hpp"

using namespace ffgram;

namespace {

Subspace line(Eigen::Index n, std::initializer_list<Complex> entries) {
    Mat span(n, 1);
    Eigen::Index k = 0;
    for (Complex c : entries) span(k++, 0) = c;
    return make_subspace(span);
}

WeightedFamily skew_pair() {
    std::vector<Subspace> subs;
    subs.push_back(line(2, {Complex(1, 0), Complex(0, 0)}));
    subs.push_back(line(2, {Complex(1, 0), Complex(1, 0)}));
    return WeightedFamily(std::move(subs), {1.0, 1.0});
}

// The skew pair with every spanning line rotated by theta.
WeightedFamily rotated_skew(double theta) {
    Mat r(2, 2);
    r << Complex(std::cos(theta), 0), Complex(-std::sin(theta), 0),
        Complex(std::sin(theta), 0), Complex(std::cos(theta), 0);
    std::vector<Subspace> subs;
    Mat a(2, 1), b(2, 1);
    a << Complex(1, 0), Complex(0, 0);
    b << Complex(1, 0), Complex(1, 0);
    subs.push_back(make_subspace(r * a));
    subs.push_back(make_subspace(r * b));
    return WeightedFamily(std::move(subs), {1.0, 1.0});
}

WeightedFamily redundant_triple() {
    std::vector<Subspace> subs;
    subs.push_back(line(2, {Complex(1, 0), Complex(0, 0)}));
    subs.push_back(line(2, {Complex(0, 0), Complex(1, 0)}));
    subs.push_back(line(2, {Complex(1, 0), Complex(1, 0)}));
    return WeightedFamily(std::move(subs), {1.0, 1.0, 1.0});
}

} // namespace

TEST_CASE("perturbation defect of a rotated line is exactly sin theta") {
    const double theta = 0.3;
    WeightedFamily v({line(2, {Complex(1, 0), Complex(0, 0)})}, {1.0});
    WeightedFamily z(
        {line(2, {Complex(std::cos(theta), 0), Complex(std::sin(theta), 0)})}, {1.0});
    CHECK(perturbation_epsilon(v, z) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
    CHECK(perturbation_epsilon(v, z) == perturbation_epsilon(z, v));
    CHECK(perturbation_epsilon(v, v) == 0.0);
}

TEST_CASE("instance construction enforces shared shape and weights") {
    WeightedFamily f = skew_pair();
    Mat id = Mat::Identity(2, 2);
    WeightedFamily reweighted({line(2, {Complex(1, 0), Complex(0, 0)}),
                               line(2, {Complex(1, 0), Complex(1, 0)})},
                              {2.0, 1.0});
    CHECK_THROWS_AS(PerturbationInstance(f, f, reweighted, id, id), HypothesisError);
    CHECK_THROWS_AS(PerturbationInstance(f, f, redundant_triple(), id, id),
                    DimensionError);
    CHECK_THROWS_AS(PerturbationInstance(f, f, f, Mat::Identity(3, 3), id),
                    DimensionError);
}

TEST_CASE("unperturbed instance certifies with zero left side") {
    WeightedFamily f = skew_pair();
    Mat id = Mat::Identity(2, 2);
    StabilityReport r = check_stability(PerturbationInstance(f, f, f, id, id));
    CHECK(r.mu == 0.0);
    CHECK(r.epsilon == 0.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs > 0.0);
    CHECK(r.verdict());
    // rhs by hand: bounds are 1 -/+ 1/sqrt(2); the Gram of the identity on
    // (f, f) has the same spectrum, so rhs = (1-1/sqrt 2)^2 / (1+1/sqrt 2).
    const double lo = 1.0 - 1.0 / std::sqrt(2.0);
    const double hi = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(r.rhs == doctest::Approx(lo * lo / hi).epsilon(1e-10));
}

TEST_CASE("small rotation stays certified, invertibility follows") {
    WeightedFamily f = skew_pair();
    WeightedFamily z = rotated_skew(1e-4);
    Mat id = Mat::Identity(2, 2);
    StabilityReport r = check_stability(PerturbationInstance(f, f, z, id, id));
    CHECK(r.epsilon > 0.0);
    CHECK(r.bound_holds);
    CHECK(r.g2_invertible);
    CHECK(r.purb_residual <= 1e-9);
}

TEST_CASE("oversized constants fail the bound without throwing") {
    // Extra lambda slack only weakens the probe inequality, so evaluation
    // completes; the certificate itself is lost.
    WeightedFamily f = skew_pair();
    Mat id = Mat::Identity(2, 2);
    StabilityReport r = check_stability(PerturbationInstance(f, f, f, id, id), 1.0, 1.0);
    CHECK_FALSE(r.bound_holds);
    CHECK(r.g2_invertible); // measured, not asserted
    CHECK_FALSE(r.verdict());
}

TEST_CASE("understated epsilon is rejected on probe vectors") {
    WeightedFamily f = skew_pair();
    WeightedFamily z = rotated_skew(0.3);
    Mat id = Mat::Identity(2, 2);
    CHECK_THROWS_AS(check_stability(PerturbationInstance(f, f, z, id, id), 0.0, 0.0, 0.0),
                    PerturbationBoundError);
}

TEST_CASE("singular reference gram is a hypothesis failure") {
    WeightedFamily r3 = redundant_triple();
    Mat id = Mat::Identity(2, 2);
    CHECK_THROWS_AS(check_stability(PerturbationInstance(r3, r3, r3, id, id)),
                    HypothesisError);
    WeightedFamily f = skew_pair();
    CHECK_THROWS_AS(check_stability(PerturbationInstance(f, f, f, id, id), -1.0),
                    HypothesisError);
}

TEST_CASE("identity-based corollary certifies a gentle operator perturbation") {
    WeightedFamily f = skew_pair();
    Mat u = near_identity(9, 2, 1e-4);
    StabilityReport r = corollary_check(f, f, u, 2e-4);
    CHECK(r.mu == 2e-4);
    CHECK(r.bound_holds);
    CHECK(r.g2_invertible);
    // Corollary right side: lower bound over (largest upper bound * ||S^-1||).
    const double lo = 1.0 - 1.0 / std::sqrt(2.0);
    const double hi = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(r.rhs == doctest::Approx(lo * lo / hi).epsilon(1e-10));
}

TEST_CASE("corollary hypotheses: riesz first slot, dominating mu") {
    WeightedFamily f = skew_pair();
    Mat u = near_identity(9, 2, 0.1);
    CHECK_THROWS_AS(corollary_check(f, f, u, 0.01), HypothesisError);
    CHECK_THROWS_AS(
        corollary_check(redundant_triple(), redundant_triple(),
                        Mat::Identity(2, 2), 0.0),
        HypothesisError);
}

TEST_CASE("neumann series: exact data gives the exact inverse in one term") {
    Mat f = Mat::Zero(2, 2);
    f(0, 0) = 2.0;
    f(1, 1) = 4.0;
    NeumannResult r = neumann_inverse(f, f);
    REQUIRE(r.converged());
    CHECK(r.terms == 1);
    CHECK(r.contraction == 0.0);
    Mat expected = Mat::Zero(2, 2);
    expected(0, 0) = 0.5;
    expected(1, 1) = 0.25;
    CHECK(frobenius(*r.inverse - expected) == 0.0);
}

TEST_CASE("neumann series converges under the contraction premise") {
    Mat f = Mat::Identity(3, 3) * 2.0;
    Mat g = f + 0.5 * near_identity(21, 3, 1.0) - 0.5 * Mat::Identity(3, 3);
    NeumannResult r = neumann_inverse(f, g);
    REQUIRE(r.converged());
    CHECK(r.contraction < 0.9);
    CHECK(frobenius(*r.inverse * g - Mat::Identity(3, 3)) < 1e-8);
    CHECK(r.terms > 1);
}

TEST_CASE("neumann series reports divergence as data") {
    Mat f = Mat::Zero(2, 2);
    f(0, 0) = 2.0;
    f(1, 1) = 4.0;
    NeumannResult r = neumann_inverse(f, -f);
    CHECK_FALSE(r.converged());
    CHECK(r.contraction == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("neumann series rejects malformed references") {
    CHECK_THROWS_AS(neumann_inverse(Mat::Zero(2, 2), Mat::Identity(2, 2)),
                    HypothesisError);
    CHECK_THROWS_AS(neumann_inverse(Mat::Zero(2, 3), Mat::Zero(2, 3)), DimensionError);
}
