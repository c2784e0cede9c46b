#ifndef FFGRAM_GRAM_HPP
#define FFGRAM_GRAM_HPP

#include <optional>

#include "ffgram/fusion.hpp"

namespace ffgram {

// The data of a cross Gram matrix: an ambient operator u and two families.
// w is the first slot (the Gram lives on its coefficient space), v the second
// (its frame operator gets inverted). Orientation note: results about a
// "dual pair" below always mean the first slot is a dual of the second.
struct GramTriple {
    Mat u;
    WeightedFamily w;
    WeightedFamily v;

    GramTriple(Mat u_, WeightedFamily w_, WeightedFamily v_);
};

// The connector phi_{vw}: block-diagonal map (sum+W_i) -> (sum+V_i) with
// diagonal tile i = basis_{V_i}^* S_w^{-1} basis_{W_i}. Throws NotAFrameError
// when w is not a frame.
BlockOperator phi_block(const WeightedFamily& v, const WeightedFamily& w,
                        const TolerancePolicy& tol = {});

// The cross Gram operator phi_{wv} T_v^* u T_w on the coefficient space of w.
BlockOperator cross_gram(const GramTriple& t, const TolerancePolicy& tol = {});

// Tile (j, i) by its direct formula w_i v_j basis_{W_j}^* S_v^{-1} P_{V_j} u
// basis_{W_i}, independent of the product assembly in cross_gram.
Mat gram_block(const GramTriple& t, Eigen::Index j, Eigen::Index i,
               const TolerancePolicy& tol = {});

// L_{vw} = T_v phi_{vw} T_w^*, an ambient operator. Equals the identity
// exactly when v is a dual of w.
Mat alternate_operator(const WeightedFamily& v, const WeightedFamily& w,
                       const TolerancePolicy& tol = {});

enum class InverseMode {
    ww,      // second slot equals first; needs first slot Riesz
    dual_vw, // first slot a dual of the second
    wv,      // generic frames; inverse lands on the (w, w) triple
};

// Closed-form inverse of the assembled Gram. The inverse is absent when the
// assembled matrix is singular (wrong family class or singular u); mode
// preconditions that fail structurally throw HypothesisError instead.
struct GramInverseReport {
    std::optional<BlockOperator> inverse;
    double sigma_min = 0.0;   // of the assembled Gram
    double sigma_max = 0.0;
    double resid_left = 0.0;  // ||formula * gram - I||_F
    double resid_right = 0.0; // ||gram * formula - I||_F

    bool invertible() const { return inverse.has_value(); }
    double kappa() const { return sigma_min > 0.0 ? sigma_max / sigma_min : 0.0; }
};

GramInverseReport gram_inverse(const GramTriple& t, InverseMode mode,
                               const TolerancePolicy& tol = {});

// Seven separately computed conditions that stand or fall together for a
// frame w: riesz-and-invertible, plus invertible/onto/injective of the Gram
// on (w, w) and of the Gram with the canonical dual in the first slot.
struct InvEquivalenceReport {
    bool riesz_and_u_invertible = false;
    bool gram_ww_invertible = false;
    bool gram_ww_onto = false;
    bool gram_ww_injective = false;
    bool gram_dual_invertible = false;
    bool gram_dual_onto = false;
    bool gram_dual_injective = false;
    double gram_ww_sigma_ratio = 0.0;
    double gram_dual_sigma_ratio = 0.0;
    // The connector on (w, w) is self-adjoint for Riesz families; measured
    // here rather than assumed.
    double phi_ww_selfadjoint_defect = 0.0;

    bool agree() const {
        return riesz_and_u_invertible == gram_ww_invertible &&
               riesz_and_u_invertible == gram_ww_onto &&
               riesz_and_u_invertible == gram_ww_injective &&
               riesz_and_u_invertible == gram_dual_invertible &&
               riesz_and_u_invertible == gram_dual_onto &&
               riesz_and_u_invertible == gram_dual_injective;
    }
    bool verdict() const { return riesz_and_u_invertible; }
};

// Requires t.v == t.w (same family); throws HypothesisError otherwise and
// NotAFrameError when w is not a frame.
InvEquivalenceReport inv_equivalence_battery(const GramTriple& t,
                                             const TolerancePolicy& tol = {});

enum class PinvVariant {
    dual_vw, // first slot a dual of the second; formula uses u's pseudo-inverse
    ww,      // second slot equals first; formula conjugates by L_w^{-1}
};

// Pseudo-inverse formula check. Everything is measured and reported, nothing
// asserted: the exact-identity residuals (conditions_a/b), the range-equality
// angles (range_angle_a/b), and the distance between the true pseudo-inverse
// and the formula candidate. The range equalities are the reliable gate for
// whether the formula agrees with the pseudo-inverse; the exact identities can
// hold in degenerate cases where the formula still fails.
struct PinvReport {
    BlockOperator direct;  // pseudo-inverse of the assembled Gram
    BlockOperator formula; // Gram built from the closed-form candidate
    double condition_resid_a = 0.0; // identity with u^* on the right
    double condition_resid_b = 0.0; // identity with u on the right
    double range_angle_a = 0.0;     // largest principal angle, u^* ranges
    double range_angle_b = 0.0;     // largest principal angle, u ranges
    double distance = 0.0;          // ||direct - formula||_F
    double direct_norm = 0.0;       // ||direct||_F

    bool conditions_hold(const TolerancePolicy& tol = {}) const {
        return condition_resid_a <= tol.identity_abs && condition_resid_b <= tol.identity_abs;
    }
    bool ranges_match() const { return range_angle_a <= 1e-7 && range_angle_b <= 1e-7; }
    bool formula_matches() const {
        return distance <= 1e-7 * std::max(direct_norm, 1.0);
    }
};

PinvReport gram_pinv_formula(const GramTriple& t, PinvVariant variant,
                             const TolerancePolicy& tol = {});

// Recovers the ambient operator from its Gram: T_w g T_w^* S_w^{-1}. Requires
// w to be a dual of v (the pair the Gram was assembled over); throws
// NotDualError otherwise.
Mat reconstruct_operator(const BlockOperator& g, const WeightedFamily& w,
                         const WeightedFamily& v, const TolerancePolicy& tol = {});

// Product law: gram(u1, w, v) * gram(u2, w, z) against the single Gram of the
// composite operator u1 L_{wz} u2. When w is a dual of z the composite
// collapses to u1 u2; that residual is reported too.
struct CompositionReport {
    double general_residual = 0.0;
    std::optional<double> dual_residual;
};

CompositionReport composition_check(const Mat& u1, const Mat& u2,
                                    const WeightedFamily& w, const WeightedFamily& v,
                                    const WeightedFamily& z,
                                    const TolerancePolicy& tol = {});

// For a dual pair (v dual of w), the Gram of the identity operator on (v, w)
// is an oblique projection: idempotent, fixed by T_v, with the kernel of T_v,
// and generally not self-adjoint. All four measurements reported.
struct ObliqueReport {
    double idempotent_residual = 0.0;  // ||G^2 - G||_F
    double synthesis_residual = 0.0;   // ||T_v G - T_v||_F
    double kernel_angle = 0.0;         // principal angle ker G vs ker T_v
    double selfadjoint_defect = 0.0;   // ||G - G^*||_F
};

// Throws NotDualError when v is not a dual of w.
ObliqueReport oblique_projection_check(const WeightedFamily& v, const WeightedFamily& w,
                                       const TolerancePolicy& tol = {});

struct SchattenNorm {
    double p = 2.0; // infinity() for the operator norm
    double value = 0.0;
};

// l^p norm of the singular values; p = infinity gives the operator norm.
// Throws BadExponentError for p < 1 or NaN.
SchattenNorm schatten_norm(const Mat& m, double p);

} // namespace ffgram

#endif
