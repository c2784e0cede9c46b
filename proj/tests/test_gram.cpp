#include <doctest.h>

#include <cmath>

#include "ffgram/corpus.hpp"
#include "ffgram/gram.hpp"

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

// Three lines in C^2: a redundant frame whose canonical dual gives a genuine
// oblique projection below.
WeightedFamily redundant_triple() {
    std::vector<Subspace> subs;
    subs.push_back(line(2, {Complex(1, 0), Complex(0, 0)}));
    subs.push_back(line(2, {Complex(0, 0), Complex(1, 0)}));
    subs.push_back(line(2, {Complex(1, 0), Complex(1, 0)}));
    return WeightedFamily(std::move(subs), {1.0, 1.0, 1.0});
}

WeightedFamily coordinate_onb4() {
    Mat a = Mat::Zero(4, 2), b = Mat::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    b(2, 0) = 1.0;
    b(3, 1) = 1.0;
    std::vector<Subspace> subs{make_subspace(a), make_subspace(b)};
    return WeightedFamily(std::move(subs), {1.0, 1.0});
}

Mat hand_operator() {
    Mat u(2, 2);
    u << Complex(2, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0);
    return u;
}

} // namespace

TEST_CASE("gram of the identity over the skew pair, by hand") {
    // phi tiles are both exactly 1, so the gram equals T^* T.
    WeightedFamily f = skew_pair();
    BlockOperator g = cross_gram(GramTriple(Mat::Identity(2, 2), f, f));
    const double r = 1.0 / std::sqrt(2.0);
    Mat expected(2, 2);
    expected << Complex(1, 0), Complex(r, 0), Complex(r, 0), Complex(1, 0);
    CHECK(frobenius(g.matrix - expected) < 1e-13);

    BlockOperator phi = phi_block(f, f);
    CHECK(frobenius(phi.matrix - Mat::Identity(2, 2)) < 1e-13);
}

TEST_CASE("gram of the identity is the identity on orthogonal decompositions") {
    // Weights scale tiles as w_i / w_j, which cancels exactly on the diagonal
    // pattern of an orthogonal split: the invariant survives non-unit weights.
    Mat a = Mat::Zero(4, 2), b = Mat::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    b(2, 0) = 1.0;
    b(3, 1) = 1.0;
    WeightedFamily f({make_subspace(a), make_subspace(b)}, {2.0, 3.0});
    BlockOperator g = cross_gram(GramTriple(Mat::Identity(4, 4), f, f));
    CHECK(frobenius(g.matrix - Mat::Identity(4, 4)) < 1e-13);
}

TEST_CASE("alternate operator of the skew pair with itself is its frame operator") {
    WeightedFamily f = skew_pair();
    Mat l = alternate_operator(f, f);
    CHECK(frobenius(l - frame_operator(f)) < 1e-13);
}

TEST_CASE("alternate operator over a dual pair is the identity") {
    WeightedFamily base = redundant_triple();
    WeightedFamily dual = canonical_dual(base);
    CHECK(frobenius(alternate_operator(dual, base) - Mat::Identity(2, 2)) < 1e-12);
}

TEST_CASE("tile formula agrees with the assembled product") {
    // Independent routes: cross_gram multiplies three block maps, gram_block
    // evaluates the closed tile formula. Mixed dims and weights.
    auto w = generate(
        [] {
            InstanceSpec s;
            s.kind = InstanceKind::generic_frame;
            s.seed = 5;
            s.ambient_dim = 5;
            s.subspace_dims = {2, 3};
            s.weight_law = WeightLaw::uniform(0.5, 2.0);
            return s;
        }());
    auto v = generate(
        [] {
            InstanceSpec s;
            s.kind = InstanceKind::generic_frame;
            s.seed = 11;
            s.ambient_dim = 5;
            s.subspace_dims = {3, 2};
            s.weight_law = WeightLaw::uniform(0.5, 2.0);
            return s;
        }());
    GramTriple t(random_matrix(7, 5, 5), w.primary, v.primary);
    BlockOperator g = cross_gram(t);
    for (Eigen::Index j = 0; j < 2; ++j)
        for (Eigen::Index i = 0; i < 2; ++i) {
            Mat tile = gram_block(t, j, i);
            CHECK(frobenius(Mat(g.block(j, i)) - tile) < 1e-12);
        }
    CHECK_THROWS_AS(gram_block(t, 2, 0), DimensionError);
}

TEST_CASE("closed-form inverse on one family: condition number by hand") {
    // Gram eigenvalues are 1 -/+ 1/sqrt(2), so kappa = 3 + 2 sqrt(2).
    WeightedFamily f = skew_pair();
    GramInverseReport r = gram_inverse(GramTriple(Mat::Identity(2, 2), f, f), InverseMode::ww);
    REQUIRE(r.invertible());
    CHECK(r.kappa() == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(r.resid_left < 1e-12);
    CHECK(r.resid_right < 1e-12);

    BlockOperator g = cross_gram(GramTriple(Mat::Identity(2, 2), f, f));
    Mat direct = inverse_checked(g.matrix).inverse.value();
    CHECK(frobenius(r.inverse->matrix - direct) < 1e-12);
}

TEST_CASE("closed-form inverse over a dual pair applies the inverted operator") {
    WeightedFamily base = skew_pair();
    WeightedFamily dual = canonical_dual(base);
    Mat u = hand_operator();
    GramTriple t(u, dual, base);
    GramInverseReport r = gram_inverse(t, InverseMode::dual_vw);
    REQUIRE(r.invertible());
    CHECK(r.resid_left < 1e-12);
    CHECK(r.resid_right < 1e-12);
    Mat dense = inverse_checked(cross_gram(t).matrix).inverse.value();
    CHECK(frobenius(r.inverse->matrix - dense) < 1e-12);
}

TEST_CASE("closed-form inverse for two generic frames") {
    // Order matters: pairing the diagonal line of v with the diagonal line of
    // w would zero a connector tile and make the Gram singular.
    std::vector<Subspace> vsubs;
    vsubs.push_back(line(2, {Complex(0, 0), Complex(1, 0)}));
    vsubs.push_back(line(2, {Complex(1, 0), Complex(1, 0)}));
    WeightedFamily v(std::move(vsubs), {1.0, 1.0});
    GramTriple t(hand_operator(), skew_pair(), v);
    GramInverseReport r = gram_inverse(t, InverseMode::wv);
    REQUIRE(r.invertible());
    CHECK(r.resid_left < 1e-11);
    CHECK(r.resid_right < 1e-11);
    Mat dense = inverse_checked(cross_gram(t).matrix).inverse.value();
    CHECK(frobenius(r.inverse->matrix - dense) < 1e-11);
}

TEST_CASE("inverse modes enforce their structural preconditions") {
    WeightedFamily f = skew_pair();
    WeightedFamily dual = canonical_dual(f);
    Mat id = Mat::Identity(2, 2);
    CHECK_THROWS_AS(gram_inverse(GramTriple(id, f, dual), InverseMode::ww), HypothesisError);
    CHECK_THROWS_AS(gram_inverse(GramTriple(id, f, f), InverseMode::dual_vw), HypothesisError);
}

TEST_CASE("a singular operator yields a missing inverse, not an error") {
    WeightedFamily f = skew_pair();
    Mat u = Mat::Zero(2, 2);
    u(0, 0) = 1.0;
    GramInverseReport r = gram_inverse(GramTriple(u, f, f), InverseMode::ww);
    CHECK_FALSE(r.invertible());
    CHECK(r.sigma_min < 1e-12);
}

TEST_CASE("equivalence battery: conditions stand together on a basis, fall together off it") {
    WeightedFamily f = skew_pair();
    InvEquivalenceReport good = inv_equivalence_battery(GramTriple(hand_operator(), f, f));
    CHECK(good.agree());
    CHECK(good.verdict());
    CHECK(good.phi_ww_selfadjoint_defect < 1e-12);

    Mat sing = Mat::Zero(2, 2);
    sing(0, 0) = 1.0;
    InvEquivalenceReport bad = inv_equivalence_battery(GramTriple(sing, f, f));
    CHECK(bad.agree());
    CHECK_FALSE(bad.verdict());

    InvEquivalenceReport red =
        inv_equivalence_battery(GramTriple(hand_operator(), redundant_triple(), redundant_triple()));
    CHECK(red.agree());
    CHECK_FALSE(red.verdict());

    CHECK_THROWS_AS(inv_equivalence_battery(GramTriple(hand_operator(), f, canonical_dual(f))),
                    HypothesisError);
}

TEST_CASE("pseudo-inverse formula is exact on a self-dual decomposition") {
    WeightedFamily onb = coordinate_onb4();
    Mat low = random_rank(3, 4, 2);
    PinvReport r = gram_pinv_formula(GramTriple(low, onb, onb), PinvVariant::dual_vw);
    CHECK(r.conditions_hold());
    CHECK(r.ranges_match());
    CHECK(r.formula_matches());

    PinvReport rw = gram_pinv_formula(GramTriple(low, onb, onb), PinvVariant::ww);
    CHECK(rw.conditions_hold());
    CHECK(rw.formula_matches());
}

TEST_CASE("pseudo-inverse formula reduces to the inverse on an invertible dual pair") {
    WeightedFamily base = skew_pair();
    WeightedFamily dual = canonical_dual(base);
    PinvReport r = gram_pinv_formula(GramTriple(hand_operator(), dual, base),
                                     PinvVariant::dual_vw);
    CHECK(r.conditions_hold());
    CHECK(r.ranges_match());
    CHECK(r.formula_matches());
}

TEST_CASE("pseudo-inverse formula rejects a non-dual pair") {
    WeightedFamily f = skew_pair();
    CHECK_THROWS_AS(gram_pinv_formula(GramTriple(hand_operator(), f, f), PinvVariant::dual_vw),
                    HypothesisError);
    CHECK_THROWS_AS(
        gram_pinv_formula(GramTriple(hand_operator(), f, canonical_dual(f)), PinvVariant::ww),
        HypothesisError);
}

TEST_CASE("operator reconstruction from the gram over a dual pair") {
    WeightedFamily base = skew_pair();
    WeightedFamily dual = canonical_dual(base);
    Mat u = hand_operator();
    BlockOperator g = cross_gram(GramTriple(u, dual, base));
    Mat rec = reconstruct_operator(g, dual, base);
    CHECK(frobenius(rec - u) < 1e-12);

    BlockOperator same = cross_gram(GramTriple(u, base, base));
    CHECK_THROWS_AS(reconstruct_operator(same, base, base), NotDualError);
}

TEST_CASE("gram of the identity over a redundant dual pair is an oblique projection") {
    WeightedFamily base = redundant_triple();
    WeightedFamily dual = canonical_dual(base);
    ObliqueReport r = oblique_projection_check(dual, base);
    CHECK(r.idempotent_residual < 1e-12);
    CHECK(r.synthesis_residual < 1e-12);
    CHECK(r.kernel_angle < 1e-7);
    // Oblique, not orthogonal: the projection fails self-adjointness visibly.
    CHECK(r.selfadjoint_defect > 1e-3);

    CHECK_THROWS_AS(oblique_projection_check(base, base), NotDualError);
}

TEST_CASE("gram products compose through the bridge operator") {
    WeightedFamily f = skew_pair();
    Mat u1 = hand_operator();
    Mat u2(2, 2);
    u2 << Complex(0, 1), Complex(1, 0), Complex(1, 0), Complex(0.5, -0.5);
    CompositionReport r = composition_check(u1, u2, f, f, f);
    CHECK(r.general_residual < 1e-12);
    CHECK_FALSE(r.dual_residual.has_value()); // the pair (f, f) is not dual

    WeightedFamily dual = canonical_dual(f);
    CompositionReport d = composition_check(u1, u2, dual, f, f);
    CHECK(d.general_residual < 1e-12);
    REQUIRE(d.dual_residual.has_value());
    CHECK(*d.dual_residual < 1e-12);
}

TEST_CASE("schatten norms of a hand diagonal") {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = 4.0;
    CHECK(schatten_norm(m, 1.0).value == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(schatten_norm(m, 2.0).value == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(schatten_norm(m, 3.0).value == doctest::Approx(std::cbrt(91.0)).epsilon(1e-13));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(schatten_norm(m, inf).value == doctest::Approx(4.0).epsilon(1e-14));

    // Rectangular input uses the same singular values.
    Mat rect = Mat::Zero(2, 3);
    rect(0, 0) = 3.0;
    rect(1, 1) = 4.0;
    CHECK(schatten_norm(rect, 2.0).value == doctest::Approx(5.0).epsilon(1e-14));

    CHECK_THROWS_AS(schatten_norm(m, 0.5), BadExponentError);
    CHECK_THROWS_AS(schatten_norm(m, std::nan("")), BadExponentError);
}
