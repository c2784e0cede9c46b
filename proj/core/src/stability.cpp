#include "ffgram/stability.hpp"

#include <cmath>
#include <limits>

#include "ffgram/rng.hpp"

namespace ffgram {

PerturbationInstance::PerturbationInstance(WeightedFamily w_, WeightedFamily v_,
                                           WeightedFamily z_, Mat u1_, Mat u2_)
    : w(std::move(w_)), v(std::move(v_)), z(std::move(z_)), u1(std::move(u1_)),
      u2(std::move(u2_)) {
    if (v.ambient != w.ambient || z.ambient != w.ambient)
        throw DimensionError("perturbation families live in different ambient spaces");
    if (v.size() != w.size() || z.size() != w.size())
        throw DimensionError("perturbation families must share the index set");
    // The theorem uses one weight sequence across all three families.
    if (v.weights != w.weights || z.weights != w.weights)
        throw HypothesisError("perturbation families must share one weight list");
    if (u1.rows() != w.ambient || u1.cols() != w.ambient || u2.rows() != w.ambient ||
        u2.cols() != w.ambient)
        throw DimensionError("operator shape does not match the ambient space");
    check_finite(u1, "u1");
    check_finite(u2, "u2");
}

namespace {

// Gramian of the stacked difference map f -> {v_i (P_{Z_i} - P_{V_i}) f}.
// Sign-symmetric by construction: swapping the families negates each block,
// and the blockwise products are then entrywise identical.
Mat difference_gramian(const WeightedFamily& v, const WeightedFamily& z) {
    if (v.ambient != z.ambient || v.size() != z.size())
        throw DimensionError("perturbation families are incompatible");
    if (v.weights != z.weights)
        throw HypothesisError("perturbation families must share one weight list");
    Mat gram = Mat::Zero(v.ambient, v.ambient);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Mat d = projection(z.subspaces[i]) - projection(v.subspaces[i]);
        gram += (v.weights[i] * v.weights[i]) * (d.adjoint() * d);
    }
    return gram;
}

double weighted_projection_sum(const WeightedFamily& f, const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double norm = (f.subspaces[i].basis.adjoint() * x).norm();
        s += f.weights[i] * f.weights[i] * norm * norm;
    }
    return std::sqrt(s);
}

double frame_inverse_norm(const WeightedFamily& f, const TolerancePolicy& tol,
                          const char* which) {
    InverseResult inv = inverse_checked(frame_operator(f), tol);
    if (!inv.invertible())
        throw NotAFrameError(std::string(which) + " is not a frame");
    return operator_norm(*inv.inverse);
}

StabilityReport evaluate(const PerturbationInstance& inst, double lambda1, double lambda2,
                         std::optional<double> epsilon, std::uint64_t probe_seed,
                         const TolerancePolicy& tol, std::optional<double> mu_override,
                         std::optional<double> rhs_override) {
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw HypothesisError("lambda constants must be nonnegative");

    BlockOperator g1 = cross_gram(GramTriple(inst.u1, inst.w, inst.v), tol);
    InverseResult g1_inv = inverse_checked(g1.matrix, tol);
    if (!g1_inv.invertible())
        throw HypothesisError("reference Gram is singular; the theorem needs it invertible");

    StabilityReport r;
    r.lambda1 = lambda1;
    r.lambda2 = lambda2;
    r.probe_seed = probe_seed;
    r.epsilon = epsilon ? *epsilon : perturbation_epsilon(inst.v, inst.z);
    if (r.epsilon < 0.0) throw HypothesisError("epsilon must be nonnegative");

    // The comparison inequality is not one operator norm once lambda1 or
    // lambda2 is positive, so it is checked on probes: every eigenvector of
    // the stacked difference Gramian (its top one attains the lambda=0 bound)
    // plus seeded random unit vectors.
    const Mat gram = difference_gramian(inst.v, inst.z);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Eigen::Index n = inst.w.ambient;
    Xoshiro256ss rng(probe_seed);
    double worst = -std::numeric_limits<double>::infinity();
    const int random_probes = 200;
    for (Eigen::Index k = 0; k < n + random_probes; ++k) {
        Vec f(n);
        if (k < n) {
            f = es.eigenvectors().col(k);
        } else {
            for (Eigen::Index j = 0; j < n; ++j) {
                double re, im;
                rng.cgaussian(re, im);
                f(j) = Complex(re, im);
            }
            const double norm = f.norm();
            if (norm == 0.0) continue;
            f /= norm;
        }
        const double lhs_probe = std::sqrt(std::max(0.0, (f.adjoint() * gram * f)(0).real()));
        const double rhs_probe = lambda1 * weighted_projection_sum(inst.z, f) +
                                 lambda2 * weighted_projection_sum(inst.v, f) +
                                 r.epsilon * f.norm();
        worst = std::max(worst, lhs_probe - rhs_probe);
    }
    r.purb_residual = worst;
    if (r.purb_residual > 1e-9)
        throw PerturbationBoundError(
            "supplied perturbation constants fail the comparison inequality on probes");

    r.mu = mu_override ? *mu_override : operator_norm(inst.u1 - inst.u2);
    r.bound_b = std::max({frame_bounds(inst.w).upper, frame_bounds(inst.v).upper,
                          frame_bounds(inst.z).upper});
    r.sum_weights_sq = 0.0;
    for (double wi : inst.w.weights) r.sum_weights_sq += wi * wi;
    r.g1_inv_norm = operator_norm(*g1_inv.inverse);
    r.sv_inv_norm = frame_inverse_norm(inst.v, tol, "v");
    r.sz_inv_norm = frame_inverse_norm(inst.z, tol, "z");
    const double u2_norm = operator_norm(inst.u2);
    const double sqrt_b = std::sqrt(r.bound_b);

    r.lhs = r.mu + (lambda1 + lambda2 + r.epsilon / sqrt_b) *
                       (sqrt_b * r.sz_inv_norm * std::sqrt(r.sum_weights_sq) * u2_norm +
                        u2_norm);
    r.rhs = rhs_override ? *rhs_override
                         : (1.0 / r.g1_inv_norm) / (r.bound_b * r.sv_inv_norm);
    r.bound_holds = r.lhs < r.rhs;

    BlockOperator g2 = cross_gram(GramTriple(inst.u2, inst.w, inst.z), tol);
    InverseResult g2_inv = inverse_checked(g2.matrix, tol);
    r.g2_invertible = g2_inv.invertible();
    r.g2_sigma_min = g2_inv.sigma_min;
    r.g2_sigma_max = g2_inv.sigma_max;
    if (r.bound_holds && !r.g2_invertible)
        throw Error("perturbation bound held but the perturbed Gram is singular; "
                    "this contradicts the invertibility theorem");
    return r;
}

} // namespace

double perturbation_epsilon(const WeightedFamily& v, const WeightedFamily& z) {
    RVec ev = hermitian_eigenvalues(difference_gramian(v, z));
    return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

StabilityReport check_stability(const PerturbationInstance& inst, double lambda1,
                                double lambda2, std::optional<double> epsilon,
                                std::uint64_t probe_seed, const TolerancePolicy& tol) {
    return evaluate(inst, lambda1, lambda2, epsilon, probe_seed, tol, std::nullopt,
                    std::nullopt);
}

StabilityReport corollary_check(const WeightedFamily& w, const WeightedFamily& z,
                                const Mat& u, double mu, double lambda1, double lambda2,
                                std::optional<double> epsilon, const TolerancePolicy& tol) {
    Classification c = classify(w, tol);
    if (!c.is_riesz_basis)
        throw HypothesisError("corollary needs a Riesz family in the first slot");
    const Mat id = Mat::Identity(w.ambient, w.ambient);
    if (operator_norm(u - id) > mu * (1.0 + 1e-12))
        throw HypothesisError("mu must dominate ||u - I||");

    PerturbationInstance inst(w, w, z, id, u);
    const double b = std::max({frame_bounds(w).upper, frame_bounds(z).upper});
    const double sw_inv_norm = frame_inverse_norm(w, tol, "w");
    const double rhs = c.lower / (b * sw_inv_norm);
    return evaluate(inst, lambda1, lambda2, epsilon, 0x9e3779b97f4a7c15ull, tol, mu, rhs);
}

NeumannResult neumann_inverse(const Mat& f, const Mat& g, int k_max, double term_tol,
                              const TolerancePolicy& tol) {
    if (f.rows() != f.cols() || g.rows() != g.cols() || f.rows() != g.rows())
        throw DimensionError("neumann inverse needs square matrices of one size");
    InverseResult fi = inverse_checked(f, tol);
    if (!fi.invertible())
        throw HypothesisError("the reference matrix must be invertible");

    NeumannResult out;
    out.contraction = operator_norm(*fi.inverse) * operator_norm(f - g);
    if (out.contraction >= 1.0) return out;

    const Mat step = (*fi.inverse) * (f - g);
    Mat term = *fi.inverse;
    Mat sum = term;
    out.terms = 1;
    for (int k = 1; k < k_max; ++k) {
        term = step * term;
        if (frobenius(term) <= term_tol) break;
        sum += term;
        ++out.terms;
    }
    out.inverse = std::move(sum);
    return out;
}

} // namespace ffgram
