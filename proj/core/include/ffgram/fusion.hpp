#ifndef FFGRAM_FUSION_HPP
#define FFGRAM_FUSION_HPP

#include <vector>

#include "ffgram/spaces.hpp"

namespace ffgram {

// A finite weighted family {(W_i, w_i)}: subspaces of one ambient space with
// strictly positive weights.
struct WeightedFamily {
    Eigen::Index ambient = 0;
    std::vector<Subspace> subspaces;
    std::vector<double> weights;

    WeightedFamily() = default;
    WeightedFamily(std::vector<Subspace> parts, std::vector<double> w);

    Eigen::Index size() const { return static_cast<Eigen::Index>(subspaces.size()); }
    Eigen::Index coeff_dim() const; // sum of subspace dimensions
    DirectSumSpace coeff_space() const;
};

// Coefficient stack -> ambient: the n x D matrix [w_1 Q_1 | ... | w_N Q_N]
// where Q_i is the stored orthonormal basis of W_i.
Mat synthesis(const WeightedFamily& f);

// Adjoint of synthesis, D x n.
Mat analysis(const WeightedFamily& f);

// synthesis * analysis = sum_i w_i^2 P_i, Hermitian positive semidefinite.
Mat frame_operator(const WeightedFamily& f);

// Optimal constants: extreme eigenvalues of the frame operator.
struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};

FrameBounds frame_bounds(const WeightedFamily& f);

struct Classification {
    bool is_bessel = false; // finite families always are
    bool is_frame = false;  // lower bound stays away from zero, relative to upper
    bool is_riesz_basis = false;
    bool is_parseval = false; // frame operator is the identity
    bool is_orthonormal_basis = false;
    bool is_uniform = false; // all weights equal
    bool is_complete = false; // subspaces together span the ambient space
    double lower = 0.0;
    double upper = 0.0;
};

Classification classify(const WeightedFamily& f, const TolerancePolicy& tol = {});

// The same subspaces with all weights set to 1.
WeightedFamily unit_weight_family(const WeightedFamily& f);

// Measures w_i^2 pi_i S^{-1} pi_j against the Kronecker-delta pattern
// delta_ij pi_j that characterizes Riesz families among frames.
struct RieszDeltaReport {
    double max_off_diagonal = 0.0;    // largest ||w_i^2 Q_i^* S^{-1} Q_j||_F, i != j
    double max_diagonal_defect = 0.0; // largest ||w_i^2 Q_i^* S^{-1} Q_i - I||_F

    bool holds(const TolerancePolicy& tol = {}) const {
        return max_off_diagonal <= tol.identity_abs &&
               max_diagonal_defect <= tol.identity_abs;
    }
};

// Throws NotAFrameError when f is not a frame; the delta pattern only makes
// sense against S^{-1}.
RieszDeltaReport riesz_delta_test(const WeightedFamily& f, const TolerancePolicy& tol = {});

// The canonical dual family {(S^{-1} W_i, w_i)}. Throws NotAFrameError when f
// is not a frame; throws Error if applying S^{-1} drops a subspace dimension,
// which an invertible S cannot do.
WeightedFamily canonical_dual(const WeightedFamily& f, const TolerancePolicy& tol = {});

// ||sum_i v_i w_i pi_{V_i} S_W^{-1} pi_{W_i} - I|| in operator norm; zero
// exactly when v is a dual of w. Throws NotAFrameError when w is not a frame.
double duality_defect(const WeightedFamily& v, const WeightedFamily& w,
                      const TolerancePolicy& tol = {});

// True when sum_i v_i w_i pi_{V_i} S_W^{-1} pi_{W_i} is invertible, the
// weaker pseudo-dual relation.
bool is_pseudo_dual(const WeightedFamily& v, const WeightedFamily& w,
                    const TolerancePolicy& tol = {});

// Concatenation of weighted local spanning families into one ambient vector
// family, columns w_i * f_ij. The default uses the stored orthonormal bases.
// The overload with explicit local sets first checks each one spans the
// matching subspace and throws LocalBasisError otherwise.
Mat flatten_local(const WeightedFamily& f);
Mat flatten_local(const WeightedFamily& f, const std::vector<Mat>& local,
                  const TolerancePolicy& tol = {});

// Independent routes to the Riesz-family verdict, each sound for arbitrary
// weighted families (bijectivity, not mere injectivity, away from the frame
// case). They agree on every family; disagreement means a tolerance is
// mis-set.
struct RieszEquivalenceReport {
    bool decomposition = false;       // unit-weight synthesis bijective
    bool synthesis_bijective = false; // weighted synthesis square + invertible
    bool analysis_bijective = false;  // adjoint route, measured separately
    bool flatten_invertible = false;  // flattened vector family is a basis
    bool riesz_inequality = false;    // complete + positive lower constant
    bool delta_test = false;          // delta pattern; false off the frame case
    double inequality_lower = 0.0;    // optimal C from the coefficient Gramian
    double inequality_upper = 0.0;    // optimal D

    bool agree() const {
        return decomposition == synthesis_bijective &&
               decomposition == analysis_bijective &&
               decomposition == flatten_invertible &&
               decomposition == riesz_inequality && decomposition == delta_test;
    }
    bool verdict() const { return decomposition; }
};

RieszEquivalenceReport riesz_equivalence(const WeightedFamily& f,
                                         const TolerancePolicy& tol = {});

} // namespace ffgram

#endif
