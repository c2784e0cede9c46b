#include "ffgram/fusion.hpp"

#include <cmath>

namespace ffgram {

WeightedFamily::WeightedFamily(std::vector<Subspace> parts, std::vector<double> w)
    : subspaces(std::move(parts)), weights(std::move(w)) {
    if (subspaces.empty())
        throw DimensionError("a weighted family needs at least one subspace");
    if (subspaces.size() != weights.size())
        throw DimensionError("subspace and weight counts differ");
    ambient = subspaces.front().ambient;
    for (const Subspace& s : subspaces) {
        if (s.ambient != ambient)
            throw DimensionError("subspaces live in different ambient spaces");
        if (s.dim() == 0)
            throw DimensionError("zero-dimensional subspace in family");
    }
    for (double wi : weights) {
        if (!(wi > 0.0) || !std::isfinite(wi))
            throw Error("weights must be positive and finite");
    }
}

Eigen::Index WeightedFamily::coeff_dim() const {
    Eigen::Index d = 0;
    for (const Subspace& s : subspaces) d += s.dim();
    return d;
}

DirectSumSpace WeightedFamily::coeff_space() const {
    std::vector<Eigen::Index> dims;
    dims.reserve(subspaces.size());
    for (const Subspace& s : subspaces) dims.push_back(s.dim());
    return DirectSumSpace(std::move(dims));
}

Mat synthesis(const WeightedFamily& f) {
    Mat t(f.ambient, f.coeff_dim());
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const auto& s = f.subspaces[i];
        t.middleCols(col, s.dim()) = f.weights[i] * s.basis;
        col += s.dim();
    }
    return t;
}

Mat analysis(const WeightedFamily& f) {
    return synthesis(f).adjoint();
}

Mat frame_operator(const WeightedFamily& f) {
    Mat s = Mat::Zero(f.ambient, f.ambient);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        s += (f.weights[i] * f.weights[i]) * projection(f.subspaces[i]);
    // Rounding can leave a skew part of size eps; the operator is Hermitian by
    // construction, so restore that exactly.
    return 0.5 * (s + Mat(s.adjoint()));
}

FrameBounds frame_bounds(const WeightedFamily& f) {
    RVec ev = hermitian_eigenvalues(frame_operator(f));
    return FrameBounds{std::max(0.0, ev(0)), ev(ev.size() - 1)};
}

namespace {

Mat concatenated_bases(const WeightedFamily& f) {
    Mat c(f.ambient, f.coeff_dim());
    Eigen::Index col = 0;
    for (const Subspace& s : f.subspaces) {
        c.middleCols(col, s.dim()) = s.basis;
        col += s.dim();
    }
    return c;
}

bool square_invertible(const Mat& m, const TolerancePolicy& tol) {
    if (m.rows() != m.cols()) return false;
    return inverse_checked(m, tol).invertible();
}

} // namespace

Classification classify(const WeightedFamily& f, const TolerancePolicy& tol) {
    Classification c;
    c.is_bessel = true; // finite sums are always norm-bounded
    FrameBounds b = frame_bounds(f);
    c.lower = b.lower;
    c.upper = b.upper;
    c.is_frame = c.lower > tol.invert_rel * c.upper;
    c.is_riesz_basis = f.coeff_dim() == f.ambient && square_invertible(synthesis(f), tol);
    c.is_parseval =
        frobenius(frame_operator(f) - Mat::Identity(f.ambient, f.ambient)) <= tol.identity_abs;
    c.is_uniform = true;
    bool unit_weights = true;
    for (double w : f.weights) {
        if (std::abs(w - f.weights.front()) > tol.identity_abs) c.is_uniform = false;
        if (std::abs(w - 1.0) > tol.identity_abs) unit_weights = false;
    }
    c.is_orthonormal_basis = c.is_parseval && unit_weights;
    c.is_complete = numerical_rank(concatenated_bases(f), tol) == f.ambient;
    return c;
}

WeightedFamily unit_weight_family(const WeightedFamily& f) {
    return WeightedFamily(f.subspaces, std::vector<double>(f.subspaces.size(), 1.0));
}

namespace {

Mat frame_operator_inverse(const WeightedFamily& f, const TolerancePolicy& tol) {
    InverseResult inv = inverse_checked(frame_operator(f), tol);
    if (!inv.invertible())
        throw NotAFrameError("family is not a frame: frame operator is singular");
    return *inv.inverse;
}

} // namespace

RieszDeltaReport riesz_delta_test(const WeightedFamily& f, const TolerancePolicy& tol) {
    Mat sinv = frame_operator_inverse(f, tol);
    RieszDeltaReport r;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const Mat left = (f.weights[i] * f.weights[i]) * f.subspaces[i].basis.adjoint() * sinv;
        for (Eigen::Index j = 0; j < f.size(); ++j) {
            // Q_i (w_i^2 Q_i^* S^{-1} Q_j - delta I) Q_j^* has the same
            // Frobenius norm as the bracket because the outer factors are
            // isometries.
            Mat bracket = left * f.subspaces[j].basis;
            if (i == j) bracket -= Mat::Identity(bracket.rows(), bracket.cols());
            const double r_ij = frobenius(bracket);
            if (i == j)
                r.max_diagonal_defect = std::max(r.max_diagonal_defect, r_ij);
            else
                r.max_off_diagonal = std::max(r.max_off_diagonal, r_ij);
        }
    }
    return r;
}

WeightedFamily canonical_dual(const WeightedFamily& f, const TolerancePolicy& tol) {
    Mat sinv = frame_operator_inverse(f, tol);
    std::vector<Subspace> duals;
    duals.reserve(f.subspaces.size());
    for (const Subspace& s : f.subspaces) {
        Subspace d = make_subspace(sinv * s.basis, tol);
        if (d.dim() != s.dim())
            throw Error("canonical dual changed a subspace dimension; S^{-1} cannot do that");
        duals.push_back(std::move(d));
    }
    return WeightedFamily(std::move(duals), f.weights);
}

namespace {

Mat cross_frame_operator(const WeightedFamily& v, const WeightedFamily& w,
                         const TolerancePolicy& tol) {
    if (v.size() != w.size())
        throw DimensionError("families must share the index set");
    if (v.ambient != w.ambient)
        throw DimensionError("families must share the ambient space");
    Mat sinv = frame_operator_inverse(w, tol);
    Mat l = Mat::Zero(w.ambient, w.ambient);
    for (Eigen::Index i = 0; i < w.size(); ++i)
        l += (v.weights[i] * w.weights[i]) * projection(v.subspaces[i]) * sinv *
             projection(w.subspaces[i]);
    return l;
}

} // namespace

double duality_defect(const WeightedFamily& v, const WeightedFamily& w,
                      const TolerancePolicy& tol) {
    Mat l = cross_frame_operator(v, w, tol);
    return operator_norm(l - Mat::Identity(w.ambient, w.ambient));
}

bool is_pseudo_dual(const WeightedFamily& v, const WeightedFamily& w,
                    const TolerancePolicy& tol) {
    return inverse_checked(cross_frame_operator(v, w, tol), tol).invertible();
}

Mat flatten_local(const WeightedFamily& f) {
    return synthesis(f);
}

Mat flatten_local(const WeightedFamily& f, const std::vector<Mat>& local,
                  const TolerancePolicy& tol) {
    if (static_cast<Eigen::Index>(local.size()) != f.size())
        throw DimensionError("one local spanning set per subspace required");
    Eigen::Index total = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const Mat& m = local[i];
        if (m.rows() != f.ambient)
            throw LocalBasisError("local set does not live in the ambient space");
        if (numerical_rank(m, tol) != f.subspaces[i].dim())
            throw LocalBasisError("local set rank does not match its subspace");
        if (largest_principal_angle(m, f.subspaces[i].basis, tol) > 1e-7)
            throw LocalBasisError("local set does not span its subspace");
        total += m.cols();
    }
    Mat out(f.ambient, total);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        out.middleCols(col, local[i].cols()) = f.weights[i] * local[i];
        col += local[i].cols();
    }
    return out;
}

RieszEquivalenceReport riesz_equivalence(const WeightedFamily& f, const TolerancePolicy& tol) {
    RieszEquivalenceReport r;
    const Eigen::Index n = f.ambient;
    const Eigen::Index d = f.coeff_dim();

    r.decomposition = square_invertible(synthesis(unit_weight_family(f)), tol);
    r.synthesis_bijective = square_invertible(synthesis(f), tol);
    r.analysis_bijective = square_invertible(analysis(f), tol);
    r.flatten_invertible = square_invertible(flatten_local(f), tol);

    // Optimal constants of the two-sided inequality, read off the coefficient
    // Gramian T^* T; the inequality alone gives injectivity, so completeness
    // is checked alongside.
    Mat t = synthesis(f);
    RVec ev = hermitian_eigenvalues(Mat(t.adjoint() * t), tol);
    r.inequality_lower = std::max(0.0, ev(0));
    r.inequality_upper = ev(ev.size() - 1);
    const bool complete = numerical_rank(concatenated_bases(f), tol) == n;
    r.riesz_inequality =
        complete && d <= n && std::sqrt(r.inequality_lower) > tol.invert_rel * std::sqrt(r.inequality_upper);

    // Riesz implies frame, so off the frame case the delta verdict is false
    // without consulting the pattern.
    FrameBounds b = frame_bounds(f);
    if (b.lower > tol.invert_rel * b.upper)
        r.delta_test = riesz_delta_test(f, tol).holds(tol);
    else
        r.delta_test = false;
    return r;
}

} // namespace ffgram
