#ifndef FFGRAM_CORPUS_HPP
#define FFGRAM_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffgram/fusion.hpp"
#include "ffgram/rng.hpp"

namespace ffgram {

struct WeightLaw {
    enum class Kind { unit, uniform, explicit_list };
    Kind kind = Kind::unit;
    double a = 0.5; // uniform law bounds
    double b = 2.0;
    std::vector<double> values; // explicit_list

    static WeightLaw unit() { return {}; }
    static WeightLaw uniform(double a, double b);
    static WeightLaw explicit_list(std::vector<double> v);
};

enum class InstanceKind {
    generic_frame,
    riesz_basis,
    fusion_onb,
    parseval,
    dual_pair,
    perturbation_pair,
};

std::string to_string(InstanceKind k);
InstanceKind instance_kind_from_string(const std::string& s);

struct InstanceSpec {
    std::uint64_t seed = 0;
    Eigen::Index ambient_dim = 0;
    std::vector<Eigen::Index> subspace_dims;
    WeightLaw weight_law;
    InstanceKind kind = InstanceKind::generic_frame;
    double theta = 0.0; // perturbation_pair rotation angle, in [0, pi/2]

    // Throws Error on an impossible spec: empty dims, dims outside [1, n],
    // total below n for frame kinds, total != n for riesz/onb, total not a
    // multiple of n for parseval, theta out of range.
    void validate() const;
};

// dual_pair: primary is a dual of secondary (the canonical dual of the
// generated base frame, in that order). perturbation_pair: secondary is the
// theta-rotated copy of primary, same weights. Other kinds: primary only.
struct GeneratedInstance {
    WeightedFamily primary;
    std::optional<WeightedFamily> secondary;
};

// Deterministic in spec. Output is certified by classify (and by
// duality_defect for dual pairs); after 16 failed rebases throws
// GenerationError. The parseval kind places rotated coordinate blocks that
// cover every coordinate equally often and forces the matching uniform
// weights, ignoring weight_law.
GeneratedInstance generate(const InstanceSpec& spec, const TolerancePolicy& tol = {});

// Seeded dense draws used for operators in batteries and tests.
Mat random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols);
// Gaussian draw redrawn (derived seeds) until sigma_min/sigma_max >= 1e-3.
Mat random_invertible(std::uint64_t seed, Eigen::Index n);
Mat random_unitary(std::uint64_t seed, Eigen::Index n);
// Product of well-conditioned n x r and r x n factors: rank exactly r.
Mat random_rank(std::uint64_t seed, Eigen::Index n, Eigen::Index r);
// I + delta * (gaussian matrix scaled to unit operator norm).
Mat near_identity(std::uint64_t seed, Eigen::Index n, double delta);

} // namespace ffgram

#endif
