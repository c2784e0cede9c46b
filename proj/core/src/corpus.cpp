#include "ffgram/corpus.hpp"

#include <cmath>
#include <numeric>

namespace ffgram {

WeightLaw WeightLaw::uniform(double a, double b) {
    WeightLaw law;
    law.kind = Kind::uniform;
    law.a = a;
    law.b = b;
    return law;
}

WeightLaw WeightLaw::explicit_list(std::vector<double> v) {
    WeightLaw law;
    law.kind = Kind::explicit_list;
    law.values = std::move(v);
    return law;
}

std::string to_string(InstanceKind k) {
    switch (k) {
    case InstanceKind::generic_frame: return "generic_frame";
    case InstanceKind::riesz_basis: return "riesz_basis";
    case InstanceKind::fusion_onb: return "fusion_onb";
    case InstanceKind::parseval: return "parseval";
    case InstanceKind::dual_pair: return "dual_pair";
    case InstanceKind::perturbation_pair: return "perturbation_pair";
    }
    throw Error("unknown instance kind");
}

InstanceKind instance_kind_from_string(const std::string& s) {
    if (s == "generic_frame" || s == "generic") return InstanceKind::generic_frame;
    if (s == "riesz_basis" || s == "riesz") return InstanceKind::riesz_basis;
    if (s == "fusion_onb" || s == "onb") return InstanceKind::fusion_onb;
    if (s == "parseval") return InstanceKind::parseval;
    if (s == "dual_pair") return InstanceKind::dual_pair;
    if (s == "perturbation_pair") return InstanceKind::perturbation_pair;
    throw Error("unknown instance kind: " + s);
}

void InstanceSpec::validate() const {
    if (ambient_dim < 1) throw Error("ambient dimension must be at least 1");
    if (subspace_dims.empty()) throw Error("at least one subspace required");
    Eigen::Index total = 0;
    for (Eigen::Index d : subspace_dims) {
        if (d < 1 || d > ambient_dim)
            throw Error("subspace dimensions must lie in [1, ambient]");
        total += d;
    }
    switch (kind) {
    case InstanceKind::riesz_basis:
    case InstanceKind::fusion_onb:
        if (total != ambient_dim)
            throw Error("riesz and onb kinds need dimensions summing to the ambient");
        break;
    case InstanceKind::parseval:
        if (total < ambient_dim || total % ambient_dim != 0)
            throw Error("parseval kind needs dimensions summing to a multiple of the ambient");
        break;
    default:
        if (total < ambient_dim)
            throw Error("frame kinds need dimensions summing to at least the ambient");
        break;
    }
    if (kind == InstanceKind::perturbation_pair) {
        if (!(theta >= 0.0) || theta > 1.5707963267948966 + 1e-12)
            throw Error("rotation angle must lie in [0, pi/2]");
    }
    if (weight_law.kind == WeightLaw::Kind::uniform) {
        if (!(weight_law.a > 0.0) || !(weight_law.b >= weight_law.a))
            throw Error("uniform weight law needs 0 < a <= b");
    } else if (weight_law.kind == WeightLaw::Kind::explicit_list) {
        if (weight_law.values.size() != subspace_dims.size())
            throw Error("explicit weight list length must match the subspace count");
        for (double w : weight_law.values)
            if (!(w > 0.0) || !std::isfinite(w)) throw Error("weights must be positive");
    }
}

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    return seed + 0x9e3779b97f4a7c15ull * (salt + 1);
}

Mat draw_matrix(Xoshiro256ss& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            double re, im;
            rng.cgaussian(re, im);
            m(r, c) = Complex(re, im);
        }
    return m;
}

// QR with the R diagonal rotated real positive, so the factor is a
// deterministic function of the draw.
Mat draw_unitary(Xoshiro256ss& rng, Eigen::Index n) {
    Mat m = draw_matrix(rng, n, n);
    Eigen::HouseholderQR<Mat> qr(m);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    Mat r = q.adjoint() * m;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

std::vector<double> draw_weights(Xoshiro256ss& rng, const InstanceSpec& spec) {
    const std::size_t n = spec.subspace_dims.size();
    switch (spec.weight_law.kind) {
    case WeightLaw::Kind::unit: return std::vector<double>(n, 1.0);
    case WeightLaw::Kind::uniform: {
        std::vector<double> w(n);
        for (double& wi : w) wi = rng.uniform(spec.weight_law.a, spec.weight_law.b);
        return w;
    }
    case WeightLaw::Kind::explicit_list: return spec.weight_law.values;
    }
    throw Error("unknown weight law");
}

WeightedFamily subspaces_from_columns(const Mat& m, const InstanceSpec& spec,
                                      std::vector<double> weights,
                                      const TolerancePolicy& tol) {
    std::vector<Subspace> parts;
    parts.reserve(spec.subspace_dims.size());
    Eigen::Index col = 0;
    for (Eigen::Index d : spec.subspace_dims) {
        parts.push_back(make_subspace(m.middleCols(col, d), tol));
        col += d;
    }
    return WeightedFamily(std::move(parts), std::move(weights));
}

WeightedFamily random_frame_family(Xoshiro256ss& rng, const InstanceSpec& spec,
                                   std::vector<double> weights,
                                   const TolerancePolicy& tol) {
    std::vector<Subspace> parts;
    parts.reserve(spec.subspace_dims.size());
    for (Eigen::Index d : spec.subspace_dims)
        parts.push_back(make_subspace(draw_matrix(rng, spec.ambient_dim, d), tol));
    return WeightedFamily(std::move(parts), std::move(weights));
}

// Rotation by theta inside the (u, v) plane: u a unit vector of the subspace,
// v a unit vector orthogonal to it. Exactly the identity at theta = 0.
Mat plane_rotation(const Vec& u, const Vec& v, double theta) {
    const Eigen::Index n = u.size();
    const double c = std::cos(theta) - 1.0;
    const double s = std::sin(theta);
    return Mat::Identity(n, n) + c * (u * u.adjoint() + v * v.adjoint()) +
           s * (v * u.adjoint() - u * v.adjoint());
}

WeightedFamily rotated_family(Xoshiro256ss& rng, const WeightedFamily& base, double theta) {
    std::vector<Subspace> parts;
    parts.reserve(base.subspaces.size());
    for (const Subspace& sub : base.subspaces) {
        // Plane draws happen before theta is applied, so the random stream is
        // the same for every angle and sweeps over theta stay comparable.
        Vec coeffs = draw_matrix(rng, sub.dim(), 1).col(0);
        Vec inside = sub.basis * coeffs;
        Vec ambient_draw = draw_matrix(rng, sub.ambient, 1).col(0);
        Vec outside = ambient_draw - sub.basis * (sub.basis.adjoint() * ambient_draw);
        Subspace rotated;
        rotated.ambient = sub.ambient;
        if (inside.norm() == 0.0 || outside.norm() <= 1e-12) {
            // Full-space subspace (or a degenerate draw): nothing to rotate into.
            rotated.basis = sub.basis;
        } else {
            inside /= inside.norm();
            outside /= outside.norm();
            rotated.basis = plane_rotation(inside, outside, theta) * sub.basis;
        }
        parts.push_back(std::move(rotated));
    }
    return WeightedFamily(std::move(parts), base.weights);
}

} // namespace

GeneratedInstance generate(const InstanceSpec& spec, const TolerancePolicy& tol) {
    spec.validate();
    const Eigen::Index n = spec.ambient_dim;
    const Eigen::Index total =
        std::accumulate(spec.subspace_dims.begin(), spec.subspace_dims.end(),
                        Eigen::Index{0});

    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        Xoshiro256ss rng(derive(spec.seed, attempt));
        std::vector<double> weights = draw_weights(rng, spec);
        GeneratedInstance out;
        try {
            switch (spec.kind) {
            case InstanceKind::generic_frame: {
                out.primary = random_frame_family(rng, spec, std::move(weights), tol);
                if (!classify(out.primary, tol).is_frame) continue;
                return out;
            }
            case InstanceKind::riesz_basis: {
                Mat m = draw_matrix(rng, n, n);
                out.primary = subspaces_from_columns(m, spec, std::move(weights), tol);
                if (!classify(out.primary, tol).is_riesz_basis) continue;
                return out;
            }
            case InstanceKind::fusion_onb: {
                Mat q = draw_unitary(rng, n);
                out.primary = subspaces_from_columns(
                    q, spec, std::vector<double>(spec.subspace_dims.size(), 1.0), tol);
                if (!classify(out.primary, tol).is_orthonormal_basis) continue;
                return out;
            }
            case InstanceKind::parseval: {
                // Rotated coordinate blocks covering every coordinate exactly
                // total/n times; the matching uniform weight makes the frame
                // operator the identity on the nose.
                const Eigen::Index cover = total / n;
                Mat q = draw_unitary(rng, n);
                std::vector<Subspace> parts;
                parts.reserve(spec.subspace_dims.size());
                Eigen::Index offset = 0;
                for (Eigen::Index d : spec.subspace_dims) {
                    Mat basis(n, d);
                    for (Eigen::Index j = 0; j < d; ++j)
                        basis.col(j) = q.col((offset + j) % n);
                    parts.push_back(Subspace{n, std::move(basis)});
                    offset += d;
                }
                out.primary = WeightedFamily(
                    std::move(parts),
                    std::vector<double>(spec.subspace_dims.size(),
                                        1.0 / std::sqrt(static_cast<double>(cover))));
                if (!classify(out.primary, tol).is_parseval) continue;
                return out;
            }
            case InstanceKind::dual_pair: {
                WeightedFamily base = random_frame_family(rng, spec, std::move(weights), tol);
                if (!classify(base, tol).is_frame) continue;
                WeightedFamily dual = canonical_dual(base, tol);
                if (duality_defect(dual, base, tol) > tol.identity_abs) continue;
                out.primary = std::move(dual);
                out.secondary = std::move(base);
                return out;
            }
            case InstanceKind::perturbation_pair: {
                WeightedFamily base = random_frame_family(rng, spec, std::move(weights), tol);
                if (!classify(base, tol).is_frame) continue;
                WeightedFamily rotated = rotated_family(rng, base, spec.theta);
                if (!classify(rotated, tol).is_frame) continue;
                out.primary = std::move(base);
                out.secondary = std::move(rotated);
                return out;
            }
            }
        } catch (const AllZeroError&) {
            continue; // degenerate draw; rebase
        } catch (const NotAFrameError&) {
            continue;
        }
    }
    throw GenerationError("could not certify a " + to_string(spec.kind) +
                          " instance within the rebase budget");
}

Mat random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
    Xoshiro256ss rng(seed);
    return draw_matrix(rng, rows, cols);
}

Mat random_invertible(std::uint64_t seed, Eigen::Index n) {
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        Xoshiro256ss rng(derive(seed, attempt));
        Mat m = draw_matrix(rng, n, n);
        RVec sv = singular_values(m);
        if (sv(sv.size() - 1) >= 1e-3 * sv(0)) return m;
    }
    throw GenerationError("could not draw a well-conditioned invertible matrix");
}

Mat random_unitary(std::uint64_t seed, Eigen::Index n) {
    Xoshiro256ss rng(seed);
    return draw_unitary(rng, n);
}

Mat random_rank(std::uint64_t seed, Eigen::Index n, Eigen::Index r) {
    if (r < 0 || r > n) throw Error("rank must lie in [0, n]");
    if (r == 0) return Mat::Zero(n, n);
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        Xoshiro256ss rng(derive(seed, attempt));
        Mat a = draw_matrix(rng, n, r);
        Mat b = draw_matrix(rng, r, n);
        RVec sa = singular_values(a);
        RVec sb = singular_values(b);
        if (sa(sa.size() - 1) >= 1e-3 * sa(0) && sb(sb.size() - 1) >= 1e-3 * sb(0))
            return a * b;
    }
    throw GenerationError("could not draw well-conditioned rank factors");
}

Mat near_identity(std::uint64_t seed, Eigen::Index n, double delta) {
    Xoshiro256ss rng(seed);
    Mat noise = draw_matrix(rng, n, n);
    const double norm = operator_norm(noise);
    if (norm == 0.0) return Mat::Identity(n, n);
    return Mat::Identity(n, n) + (delta / norm) * noise;
}

} // namespace ffgram
