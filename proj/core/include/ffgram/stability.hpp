#ifndef FFGRAM_STABILITY_HPP
#define FFGRAM_STABILITY_HPP

#include <cstdint>
#include <optional>

#include "ffgram/gram.hpp"

namespace ffgram {

// Data of the perturbation theorem: a Bessel family w, frames v and z sharing
// w's weight list exactly, and the operator u1 with its perturbation u2.
// The reference Gram is (u1, w, v); the perturbed one is (u2, w, z).
struct PerturbationInstance {
    WeightedFamily w;
    WeightedFamily v;
    WeightedFamily z;
    Mat u1;
    Mat u2;

    PerturbationInstance(WeightedFamily w_, WeightedFamily v_, WeightedFamily z_,
                         Mat u1_, Mat u2_);
};

struct StabilityReport {
    double mu = 0.0;      // ||u1 - u2||
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double epsilon = 0.0;
    double bound_b = 0.0;        // max of the three upper frame bounds
    double sum_weights_sq = 0.0; // sum of the shared squared weights
    double lhs = 0.0;
    double rhs = 0.0;
    double purb_residual = 0.0;  // worst probe violation of the comparison inequality
    std::uint64_t probe_seed = 0;
    double g1_inv_norm = 0.0;    // ||gram(u1, w, v)^{-1}||
    double sv_inv_norm = 0.0;    // ||S_v^{-1}||
    double sz_inv_norm = 0.0;    // ||S_z^{-1}||
    bool bound_holds = false;    // lhs < rhs
    bool g2_invertible = false;
    double g2_sigma_min = 0.0;
    double g2_sigma_max = 0.0;

    double g2_sigma_ratio() const {
        return g2_sigma_max > 0.0 ? g2_sigma_min / g2_sigma_max : 0.0;
    }
    bool verdict() const { return bound_holds && g2_invertible; }
};

// Smallest epsilon closing the comparison inequality at lambda1 = lambda2 = 0:
// the operator norm of f -> {v_i (P_{Z_i} - P_{V_i}) f}. Exactly symmetric in
// its arguments.
double perturbation_epsilon(const WeightedFamily& v, const WeightedFamily& z);

// Evaluates the perturbation bound. Throws HypothesisError when the reference
// Gram is singular, and PerturbationBoundError when the supplied
// (lambda1, lambda2, epsilon) fail the comparison inequality on probe vectors
// (singular vectors of the stacked difference map plus 200 seeded random unit
// vectors). epsilon defaults to perturbation_epsilon(v, z). When the bound
// holds, invertibility of the perturbed Gram is asserted (that is the
// theorem); when it fails, actual invertibility is reported without assertion.
StabilityReport check_stability(const PerturbationInstance& inst, double lambda1 = 0.0,
                                double lambda2 = 0.0,
                                std::optional<double> epsilon = std::nullopt,
                                std::uint64_t probe_seed = 0x9e3779b97f4a7c15ull,
                                const TolerancePolicy& tol = {});

// Specialization: w a Riesz family, u1 = identity, v = w, and the simpler
// right-hand side A_w / (B ||S_w^{-1}||). mu must dominate ||u - I||; throws
// HypothesisError when it does not or when w is not Riesz.
StabilityReport corollary_check(const WeightedFamily& w, const WeightedFamily& z,
                                const Mat& u, double mu, double lambda1 = 0.0,
                                double lambda2 = 0.0,
                                std::optional<double> epsilon = std::nullopt,
                                const TolerancePolicy& tol = {});

// Partial sums of g^{-1} = sum_k [f^{-1}(f-g)]^k f^{-1}. The inverse is
// absent when the contraction premise ||f^{-1}|| ||f-g|| < 1 fails
// (divergence is a value, not an error); f itself must be invertible.
struct NeumannResult {
    std::optional<Mat> inverse;
    int terms = 0;
    double contraction = 0.0; // ||f^{-1}|| * ||f - g||

    bool converged() const { return inverse.has_value(); }
};

NeumannResult neumann_inverse(const Mat& f, const Mat& g, int k_max = 512,
                              double term_tol = 1e-14,
                              const TolerancePolicy& tol = {});

} // namespace ffgram

#endif
