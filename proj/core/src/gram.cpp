#include "ffgram/gram.hpp"

#include <cmath>
#include <limits>

namespace ffgram {

GramTriple::GramTriple(Mat u_, WeightedFamily w_, WeightedFamily v_)
    : u(std::move(u_)), w(std::move(w_)), v(std::move(v_)) {
    if (w.ambient != v.ambient)
        throw DimensionError("gram families live in different ambient spaces");
    if (w.size() != v.size())
        throw DimensionError("gram families must share the index set");
    if (u.rows() != w.ambient || u.cols() != w.ambient)
        throw DimensionError("operator shape does not match the ambient space");
    check_finite(u, "gram operator");
}

namespace {

Mat frame_operator_inverse(const WeightedFamily& f, const TolerancePolicy& tol) {
    InverseResult inv = inverse_checked(frame_operator(f), tol);
    if (!inv.invertible())
        throw NotAFrameError("family is not a frame: frame operator is singular");
    return *inv.inverse;
}

// Same index-wise subspaces (by span) and identical weights.
bool families_equal(const WeightedFamily& a, const WeightedFamily& b) {
    if (a.ambient != b.ambient || a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a.weights[i] != b.weights[i]) return false;
        if (a.subspaces[i].dim() != b.subspaces[i].dim()) return false;
        if (largest_principal_angle(a.subspaces[i].basis, b.subspaces[i].basis) > 1e-7)
            return false;
    }
    return true;
}

} // namespace

BlockOperator phi_block(const WeightedFamily& v, const WeightedFamily& w,
                        const TolerancePolicy& tol) {
    if (v.ambient != w.ambient)
        throw DimensionError("connector families live in different ambient spaces");
    if (v.size() != w.size())
        throw DimensionError("connector families must share the index set");
    Mat sinv = frame_operator_inverse(w, tol);
    BlockOperator phi(w.coeff_space(), v.coeff_space());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        phi.block(i, i) = v.subspaces[i].basis.adjoint() * sinv * w.subspaces[i].basis;
    return phi;
}

BlockOperator cross_gram(const GramTriple& t, const TolerancePolicy& tol) {
    BlockOperator phi = phi_block(t.w, t.v, tol);
    Mat g = phi.matrix * analysis(t.v) * t.u * synthesis(t.w);
    DirectSumSpace space = t.w.coeff_space();
    return BlockOperator(space, space, std::move(g));
}

Mat gram_block(const GramTriple& t, Eigen::Index j, Eigen::Index i,
               const TolerancePolicy& tol) {
    if (j < 0 || j >= t.w.size() || i < 0 || i >= t.w.size())
        throw DimensionError("gram tile index out of range");
    Mat sinv = frame_operator_inverse(t.v, tol);
    return t.w.weights[i] * t.v.weights[j] * t.w.subspaces[j].basis.adjoint() * sinv *
           projection(t.v.subspaces[j]) * t.u * t.w.subspaces[i].basis;
}

Mat alternate_operator(const WeightedFamily& v, const WeightedFamily& w,
                       const TolerancePolicy& tol) {
    return synthesis(v) * phi_block(v, w, tol).matrix * analysis(w);
}

GramInverseReport gram_inverse(const GramTriple& t, InverseMode mode,
                               const TolerancePolicy& tol) {
    switch (mode) {
    case InverseMode::ww:
        if (!families_equal(t.w, t.v))
            throw HypothesisError("ww mode needs the same family in both slots");
        break;
    case InverseMode::dual_vw:
        if (duality_defect(t.w, t.v, tol) > tol.identity_abs)
            throw HypothesisError("dual mode needs the first slot dual of the second");
        break;
    case InverseMode::wv:
        break;
    }

    BlockOperator g = cross_gram(t, tol);
    GramInverseReport out;
    InverseResult direct = inverse_checked(g.matrix, tol);
    out.sigma_min = direct.sigma_min;
    out.sigma_max = direct.sigma_max;
    if (!direct.invertible()) return out;

    // The assembled Gram is invertible, which forces every operator inverted
    // below to exist; a singular one would falsify the structure theorems, so
    // it surfaces as a missing result rather than being patched over.
    std::optional<Mat> op;
    switch (mode) {
    case InverseMode::ww: {
        InverseResult ui = inverse_checked(t.u, tol);
        InverseResult si = inverse_checked(frame_operator(unit_weight_family(t.w)), tol);
        if (ui.invertible() && si.invertible())
            op = (*si.inverse) * (*ui.inverse) * (*si.inverse);
        break;
    }
    case InverseMode::dual_vw: {
        InverseResult ui = inverse_checked(t.u, tol);
        if (ui.invertible()) op = *ui.inverse;
        break;
    }
    case InverseMode::wv: {
        Mat m = alternate_operator(t.w, t.v, tol) * t.u *
                frame_operator(unit_weight_family(t.w));
        InverseResult mi = inverse_checked(m, tol);
        if (mi.invertible()) op = *mi.inverse;
        break;
    }
    }
    if (!op.has_value()) return out;

    BlockOperator formula = mode == InverseMode::wv
                                ? cross_gram(GramTriple(*op, t.w, t.w), tol)
                                : cross_gram(GramTriple(*op, t.w, t.v), tol);
    const Mat id = Mat::Identity(g.matrix.rows(), g.matrix.cols());
    out.resid_left = frobenius(formula.matrix * g.matrix - id);
    out.resid_right = frobenius(g.matrix * formula.matrix - id);
    out.inverse = std::move(formula);
    return out;
}

InvEquivalenceReport inv_equivalence_battery(const GramTriple& t,
                                             const TolerancePolicy& tol) {
    if (!families_equal(t.w, t.v))
        throw HypothesisError("equivalence battery needs the same family in both slots");

    InvEquivalenceReport r;
    Classification c = classify(t.w, tol);
    if (!c.is_frame)
        throw NotAFrameError("equivalence battery needs a frame");
    r.riesz_and_u_invertible = c.is_riesz_basis && inverse_checked(t.u, tol).invertible();

    BlockOperator g_ww = cross_gram(t, tol);
    InverseResult ww_inv = inverse_checked(g_ww.matrix, tol);
    r.gram_ww_invertible = ww_inv.invertible();
    r.gram_ww_sigma_ratio = ww_inv.sigma_ratio();
    Eigen::Index rank_ww = numerical_rank(g_ww.matrix, tol);
    r.gram_ww_onto = rank_ww == g_ww.matrix.rows();
    r.gram_ww_injective = rank_ww == g_ww.matrix.cols();

    WeightedFamily dual = canonical_dual(t.w, tol);
    BlockOperator g_dual = cross_gram(GramTriple(t.u, dual, t.w), tol);
    InverseResult dual_inv = inverse_checked(g_dual.matrix, tol);
    r.gram_dual_invertible = dual_inv.invertible();
    r.gram_dual_sigma_ratio = dual_inv.sigma_ratio();
    Eigen::Index rank_dual = numerical_rank(g_dual.matrix, tol);
    r.gram_dual_onto = rank_dual == g_dual.matrix.rows();
    r.gram_dual_injective = rank_dual == g_dual.matrix.cols();

    Mat phi = phi_block(t.w, t.w, tol).matrix;
    r.phi_ww_selfadjoint_defect = frobenius(phi - Mat(phi.adjoint()));
    return r;
}

PinvReport gram_pinv_formula(const GramTriple& t, PinvVariant variant,
                             const TolerancePolicy& tol) {
    if (variant == PinvVariant::dual_vw) {
        if (duality_defect(t.w, t.v, tol) > tol.identity_abs)
            throw HypothesisError("dual variant needs the first slot dual of the second");
    } else {
        if (!families_equal(t.w, t.v))
            throw HypothesisError("ww variant needs the same family in both slots");
    }

    BlockOperator g = cross_gram(t, tol);
    DirectSumSpace space = t.w.coeff_space();
    PinvReport r;
    r.direct = BlockOperator(space, space, pseudo_inverse(g.matrix, tol));

    const Mat phi_wv = phi_block(t.w, t.v, tol).matrix;
    const Mat an_v = analysis(t.v);
    const Mat an_w = analysis(t.w);
    const Mat sw_inv = frame_operator_inverse(t.w, tol);
    const Mat u_adj = t.u.adjoint();

    if (variant == PinvVariant::dual_vw) {
        r.formula = cross_gram(GramTriple(pseudo_inverse(t.u, tol), t.w, t.v), tol);

        const Mat lhs_a = phi_wv * an_v * u_adj;
        const Mat rhs_a = an_w * sw_inv * u_adj;
        const Mat lhs_b = phi_wv * an_v * t.u;
        const Mat rhs_b = an_w * sw_inv * t.u;
        r.condition_resid_a = frobenius(lhs_a - rhs_a);
        r.condition_resid_b = frobenius(lhs_b - rhs_b);
        r.range_angle_a = largest_principal_angle(lhs_a, Mat(an_w * u_adj), tol);
        r.range_angle_b = largest_principal_angle(lhs_b, Mat(an_w * t.u), tol);
    } else {
        const Mat l = alternate_operator(t.w, t.w, tol);
        InverseResult li = inverse_checked(l, tol);
        if (!li.invertible())
            throw HypothesisError("alternate operator of the family is singular");
        const Mat& l_inv = *li.inverse;
        r.formula =
            cross_gram(GramTriple(l_inv * pseudo_inverse(t.u, tol) * l_inv, t.w, t.w), tol);

        const Mat lhs_a = phi_wv * an_v * l_inv * u_adj;
        const Mat rhs_a = an_w * sw_inv * u_adj;
        const Mat lhs_b = phi_wv * an_v * t.u;
        const Mat rhs_b = an_w * sw_inv * t.u;
        r.condition_resid_a = frobenius(lhs_a - rhs_a);
        r.condition_resid_b = frobenius(lhs_b - rhs_b);
        r.range_angle_a = largest_principal_angle(lhs_a, Mat(an_w * u_adj), tol);
        r.range_angle_b =
            largest_principal_angle(lhs_b, Mat(an_w * l_inv.adjoint() * t.u), tol);
    }

    r.distance = frobenius(r.direct.matrix - r.formula.matrix);
    r.direct_norm = frobenius(r.direct.matrix);
    return r;
}

Mat reconstruct_operator(const BlockOperator& g, const WeightedFamily& w,
                         const WeightedFamily& v, const TolerancePolicy& tol) {
    if (g.matrix.rows() != w.coeff_dim() || g.matrix.cols() != w.coeff_dim())
        throw DimensionError("gram matrix does not match the first family");
    if (duality_defect(w, v, tol) > tol.identity_abs)
        throw NotDualError("reconstruction needs the first family dual of the second");
    return synthesis(w) * g.matrix * analysis(w) * frame_operator_inverse(w, tol);
}

CompositionReport composition_check(const Mat& u1, const Mat& u2,
                                    const WeightedFamily& w, const WeightedFamily& v,
                                    const WeightedFamily& z, const TolerancePolicy& tol) {
    const Mat lhs = cross_gram(GramTriple(u1, w, v), tol).matrix *
                    cross_gram(GramTriple(u2, w, z), tol).matrix;
    const Mat composite = u1 * alternate_operator(w, z, tol) * u2;
    const Mat rhs = cross_gram(GramTriple(composite, w, v), tol).matrix;

    CompositionReport r;
    r.general_residual = frobenius(lhs - rhs);
    if (duality_defect(w, z, tol) <= tol.identity_abs) {
        const Mat product = cross_gram(GramTriple(Mat(u1 * u2), w, v), tol).matrix;
        r.dual_residual = frobenius(lhs - product);
    }
    return r;
}

ObliqueReport oblique_projection_check(const WeightedFamily& v, const WeightedFamily& w,
                                       const TolerancePolicy& tol) {
    if (duality_defect(v, w, tol) > tol.identity_abs)
        throw NotDualError("oblique projection needs the first family dual of the second");

    const Mat id = Mat::Identity(v.ambient, v.ambient);
    BlockOperator g = cross_gram(GramTriple(id, v, w), tol);
    const Mat tv = synthesis(v);

    ObliqueReport r;
    r.idempotent_residual = frobenius(g.matrix * g.matrix - g.matrix);
    r.synthesis_residual = frobenius(tv * g.matrix - tv);
    r.kernel_angle =
        largest_principal_angle(kernel_basis(g.matrix, tol), kernel_basis(tv, tol), tol);
    r.selfadjoint_defect = frobenius(g.matrix - Mat(g.matrix.adjoint()));
    return r;
}

SchattenNorm schatten_norm(const Mat& m, double p) {
    if (std::isnan(p) || p < 1.0)
        throw BadExponentError("schatten exponent must be >= 1");
    SchattenNorm out;
    out.p = p;
    if (m.rows() == 0 || m.cols() == 0) return out;
    RVec sv = singular_values(m);
    if (std::isinf(p)) {
        out.value = sv(0);
        return out;
    }
    const double top = sv(0);
    if (top == 0.0) return out;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) sum += std::pow(sv(i) / top, p);
    out.value = top * std::pow(sum, 1.0 / p);
    return out;
}

} // namespace ffgram
