#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffgram/corpus.hpp"
#include "ffgram/fusion.hpp"
#include "ffgram/gram.hpp"
#include "ffgram/serialize.hpp"
#include "ffgram/spaces.hpp"
#include "ffgram/stability.hpp"

namespace ffgram::cli {
namespace {

// Bad flags, missing files, malformed specs. Distinct from math failures.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Report document: insertion-ordered tree emitted with the same 17-digit
// double formatting as the corpus files, so identical runs byte-match.

class Node {
  public:
    Node() = default;
    Node(bool v) : kind_(Kind::boolean), b_(v) {}
    Node(int v) : kind_(Kind::integer), i_(v) {}
    Node(long v) : kind_(Kind::integer), i_(v) {}
    Node(long long v) : kind_(Kind::integer), i_(v) {}
    Node(unsigned v) : kind_(Kind::unsigned_integer), u_(v) {}
    Node(unsigned long v) : kind_(Kind::unsigned_integer), u_(v) {}
    Node(unsigned long long v) : kind_(Kind::unsigned_integer), u_(v) {}
    Node(double v) : kind_(Kind::real), d_(v) {}
    Node(const char* v) : kind_(Kind::text), s_(v) {}
    Node(std::string v) : kind_(Kind::text), s_(std::move(v)) {}

    static Node object() {
        Node n;
        n.kind_ = Kind::object;
        return n;
    }
    static Node array() {
        Node n;
        n.kind_ = Kind::array;
        return n;
    }

    Node& set(const std::string& key, Node value) {
        obj_.emplace_back(key, std::move(value));
        return *this;
    }
    Node& push(Node value) {
        arr_.push_back(std::move(value));
        return *this;
    }
    bool is_object() const { return kind_ == Kind::object; }

    void dump(std::string& out) const {
        switch (kind_) {
        case Kind::null: out += "null"; return;
        case Kind::boolean: out += b_ ? "true" : "false"; return;
        case Kind::integer: out += std::to_string(i_); return;
        case Kind::unsigned_integer: out += std::to_string(u_); return;
        case Kind::real: out += format_double(d_); return;
        case Kind::text: append_quoted(out, s_); return;
        case Kind::array: {
            out += '[';
            for (std::size_t k = 0; k < arr_.size(); ++k) {
                if (k) out += ',';
                arr_[k].dump(out);
            }
            out += ']';
            return;
        }
        case Kind::object: {
            out += '{';
            for (std::size_t k = 0; k < obj_.size(); ++k) {
                if (k) out += ',';
                append_quoted(out, obj_[k].first);
                out += ':';
                obj_[k].second.dump(out);
            }
            out += '}';
            return;
        }
        }
    }

    void render_text(std::ostream& os, const std::string& prefix) const {
        switch (kind_) {
        case Kind::array:
            for (std::size_t k = 0; k < arr_.size(); ++k)
                arr_[k].render_text(os, prefix + "[" + std::to_string(k) + "]");
            return;
        case Kind::object:
            for (const auto& [key, value] : obj_)
                value.render_text(os, prefix.empty() ? key : prefix + "." + key);
            return;
        default: {
            std::string scalar;
            dump(scalar);
            os << prefix << " = " << scalar << '\n';
            return;
        }
        }
    }

  private:
    enum class Kind { null, boolean, integer, unsigned_integer, real, text, array, object };

    static void append_quoted(std::string& out, const std::string& s) {
        out += '"';
        for (unsigned char c : s) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
            }
        }
        out += '"';
    }

    Kind kind_ = Kind::null;
    bool b_ = false;
    long long i_ = 0;
    unsigned long long u_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<Node> arr_;
    std::vector<std::pair<std::string, Node>> obj_;
};

// ---------------------------------------------------------------------------
// Inline argument grammars.

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

struct KvSpec {
    std::string head;
    std::vector<std::pair<std::string, std::string>> pairs;

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : pairs)
            if (k == key) return &v;
        return nullptr;
    }
};

// head:key=value,key=value. A comma token without '=' continues the previous
// value, so list values (dims=2,2,3) and uniform(0.5,2) survive the split.
KvSpec parse_kv(const std::string& text) {
    KvSpec out;
    auto colon = text.find(':');
    out.head = text.substr(0, colon);
    if (colon == std::string::npos) return out;
    for (const std::string& tok : split(text.substr(colon + 1), ',')) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
            if (out.pairs.empty())
                throw UsageError("malformed spec near '" + tok + "' in '" + text + "'");
            out.pairs.back().second += "," + tok;
        } else {
            out.pairs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("expected an unsigned integer for " + what + ", got '" + s + "'");
    }
}

Eigen::Index parse_index(const std::string& s, const std::string& what) {
    std::uint64_t v = parse_u64(s, what);
    if (v > (1u << 20)) throw UsageError(what + " is out of range: " + s);
    return static_cast<Eigen::Index>(v);
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("expected a number for " + what + ", got '" + s + "'");
    }
}

WeightLaw parse_weight_law(const std::string& text) {
    if (text == "unit") return WeightLaw::unit();
    if (text.rfind("uniform(", 0) == 0 && text.back() == ')') {
        auto inner = split(text.substr(8, text.size() - 9), ',');
        if (inner.size() != 2) throw UsageError("uniform weight law needs two bounds: " + text);
        return WeightLaw::uniform(parse_real(inner[0], "weight bound"),
                                  parse_real(inner[1], "weight bound"));
    }
    std::vector<double> values;
    for (const std::string& tok : split(text, ','))
        values.push_back(parse_real(tok, "weight"));
    return WeightLaw::explicit_list(std::move(values));
}

InstanceSpec parse_instance_spec(const std::string& text) {
    KvSpec kv = parse_kv(text);
    InstanceSpec spec;
    spec.kind = instance_kind_from_string(kv.head);
    if (const auto* s = kv.find("seed")) spec.seed = parse_u64(*s, "seed");
    const auto* n = kv.find("n");
    if (!n) throw UsageError("instance spec needs n=<ambient dimension>: " + text);
    spec.ambient_dim = parse_index(*n, "n");
    const auto* dims = kv.find("dims");
    if (!dims) throw UsageError("instance spec needs dims=<d1,d2,...>: " + text);
    for (const std::string& tok : split(*dims, ','))
        spec.subspace_dims.push_back(parse_index(tok, "dims entry"));
    if (const auto* w = kv.find("weights")) spec.weight_law = parse_weight_law(*w);
    if (const auto* t = kv.find("theta")) spec.theta = parse_real(*t, "theta");
    spec.validate();
    return spec;
}

GeneratedInstance resolve_family(const std::string& arg, const TolerancePolicy& tol) {
    if (std::filesystem::exists(arg))
        return GeneratedInstance{parse_family(read_text_file(arg), tol), std::nullopt};
    return generate(parse_instance_spec(arg), tol);
}

Mat resolve_operator(const std::string& arg, Eigen::Index n, const TolerancePolicy& tol) {
    (void)tol;
    if (arg == "identity") return Mat::Identity(n, n);
    if (arg == "zero") return Mat::Zero(n, n);
    if (std::filesystem::exists(arg)) {
        Mat m = parse_matrix(read_text_file(arg));
        if (m.rows() != n || m.cols() != n)
            throw UsageError("operator in " + arg + " is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " but the ambient dimension is " +
                             std::to_string(n));
        return m;
    }
    KvSpec kv = parse_kv(arg);
    auto seed_of = [&](const char* fallback_msg) {
        const auto* s = kv.find("seed");
        if (!s) throw UsageError(std::string(fallback_msg) + ": " + arg);
        return parse_u64(*s, "seed");
    };
    if (kv.head == "random_matrix") return random_matrix(seed_of("random_matrix needs seed="), n, n);
    if (kv.head == "random_invertible")
        return random_invertible(seed_of("random_invertible needs seed="), n);
    if (kv.head == "random_unitary") return random_unitary(seed_of("random_unitary needs seed="), n);
    if (kv.head == "random_rank") {
        const auto* r = kv.find("rank");
        if (!r) throw UsageError("random_rank needs rank=: " + arg);
        return random_rank(seed_of("random_rank needs seed="), n, parse_index(*r, "rank"));
    }
    if (kv.head == "near_identity") {
        double delta = 1e-2;
        if (const auto* d = kv.find("delta")) delta = parse_real(*d, "delta");
        return near_identity(seed_of("near_identity needs seed="), n, delta);
    }
    throw UsageError("unknown operator spec '" + arg +
                     "' (expected identity, zero, a file, or "
                     "random_matrix|random_invertible|random_unitary|random_rank|near_identity)");
}

TolerancePolicy load_tolerances(const std::string& path) {
    TolerancePolicy tol;
    if (path.empty()) return tol;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("cannot parse tolerance file: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("tolerance file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number()) throw UsageError("tolerance " + key + " must be a number");
        if (key == "rank_rel")
            tol.rank_rel = value.get<double>();
        else if (key == "invert_rel")
            tol.invert_rel = value.get<double>();
        else if (key == "identity_abs")
            tol.identity_abs = value.get<double>();
        else
            throw UsageError("unknown tolerance key: " + key);
    }
    try {
        tol.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return tol;
}

Node tolerances_node(const TolerancePolicy& tol) {
    Node n = Node::object();
    n.set("rank_rel", tol.rank_rel);
    n.set("invert_rel", tol.invert_rel);
    n.set("identity_abs", tol.identity_abs);
    return n;
}

// ---------------------------------------------------------------------------
// Deterministic seed derivation for battery sub-draws (splitmix finalizer).

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t h = seed ^ (0x9e3779b97f4a7c15ull * (k + 1));
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

Eigen::Index pick_n(std::uint64_t seed) { return 4 + static_cast<Eigen::Index>(seed % 4); }

std::vector<Eigen::Index> riesz_dims(Eigen::Index n) {
    std::vector<Eigen::Index> dims;
    Eigen::Index rem = n;
    while (rem > 3) {
        dims.push_back(2);
        rem -= 2;
    }
    dims.push_back(rem);
    return dims;
}

std::vector<Eigen::Index> redundant_dims(Eigen::Index n) {
    auto dims = riesz_dims(n);
    dims.push_back(2);
    return dims;
}

// Same subspace count as riesz_dims but over-complete, for mixed-pair Grams.
std::vector<Eigen::Index> overfull_dims(Eigen::Index n) {
    auto dims = riesz_dims(n);
    dims.back() += 1;
    return dims;
}

InstanceSpec basic_spec(InstanceKind kind, std::uint64_t seed, Eigen::Index n,
                        std::vector<Eigen::Index> dims, WeightLaw law = WeightLaw::unit(),
                        double theta = 0.0) {
    InstanceSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.ambient_dim = n;
    spec.subspace_dims = std::move(dims);
    spec.weight_law = law;
    spec.theta = theta;
    spec.validate();
    return spec;
}

WeightedFamily reweighted(const WeightedFamily& f, std::uint64_t seed, double lo, double hi) {
    Xoshiro256ss rng(seed);
    std::vector<double> weights(f.subspaces.size());
    for (double& w : weights) w = rng.uniform(lo, hi);
    return WeightedFamily(f.subspaces, std::move(weights));
}

// ---------------------------------------------------------------------------
// Theorem batteries. Each trial is a pure function of (seed, tolerances); a
// trial may take a user-supplied instance instead where that makes sense.

struct BatteryCtx {
    TolerancePolicy tol;
    const GeneratedInstance* instance = nullptr;
    const std::string* u_arg = nullptr;
};

struct BatteryOutcome {
    std::string name;
    std::uint64_t seed = 0;
    bool pass = false;
    Node details = Node::object();
};

Mat ctx_operator(const BatteryCtx& ctx, Eigen::Index n, std::uint64_t fallback_seed) {
    if (ctx.u_arg) return resolve_operator(*ctx.u_arg, n, ctx.tol);
    return random_invertible(fallback_seed, n);
}

void require_no_override(const BatteryCtx& ctx, const char* name) {
    if (ctx.instance || ctx.u_arg)
        throw UsageError(std::string("battery ") + name +
                         " constructs its own instances; --spec/--u do not apply");
}

Node riesz_routes_node(const RieszEquivalenceReport& r) {
    Node n = Node::object();
    n.set("decomposition", r.decomposition);
    n.set("synthesis_bijective", r.synthesis_bijective);
    n.set("analysis_bijective", r.analysis_bijective);
    n.set("flatten_invertible", r.flatten_invertible);
    n.set("riesz_inequality", r.riesz_inequality);
    n.set("delta_test", r.delta_test);
    n.set("inequality_lower", r.inequality_lower);
    n.set("inequality_upper", r.inequality_upper);
    n.set("agree", r.agree());
    return n;
}

BatteryOutcome battery_riesz_equiv(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"riesz_equiv", seed};
    if (ctx.u_arg) throw UsageError("battery riesz_equiv takes no --u");
    if (ctx.instance) {
        auto rep = riesz_equivalence(ctx.instance->primary, ctx.tol);
        out.details.set("routes", riesz_routes_node(rep));
        out.pass = rep.agree();
        return out;
    }
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);

    auto riesz = generate(
        basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 1), n, riesz_dims(n), law), ctx.tol);
    auto redundant = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 2), n, redundant_dims(n), law),
        ctx.tol);

    // Deliberately rank-starved: random spans whose total dimension stays
    // below the ambient one, so no route may report a basis.
    std::vector<Eigen::Index> inc_dims = riesz_dims(n - 2);
    Mat raw = random_matrix(sub_seed(seed, 3), n, n - 2);
    std::vector<Subspace> subs;
    Eigen::Index col = 0;
    for (Eigen::Index d : inc_dims) {
        subs.push_back(make_subspace(raw.block(0, col, n, d)));
        col += d;
    }
    WeightedFamily incomplete(std::move(subs), std::vector<double>(inc_dims.size(), 1.0));

    struct Case {
        const char* label;
        const WeightedFamily* family;
        bool expected;
    } cases[] = {
        {"riesz", &riesz.primary, true},
        {"redundant", &redundant.primary, false},
        {"incomplete", &incomplete, false},
    };
    out.pass = true;
    for (const Case& c : cases) {
        auto rep = riesz_equivalence(*c.family, ctx.tol);
        Node entry = riesz_routes_node(rep);
        entry.set("expected", c.expected);
        out.details.set(c.label, std::move(entry));
        out.pass = out.pass && rep.agree() && rep.verdict() == c.expected;
    }
    return out;
}

Node inv_conditions_node(const InvEquivalenceReport& r) {
    Node n = Node::object();
    n.set("riesz_and_u_invertible", r.riesz_and_u_invertible);
    n.set("gram_ww_invertible", r.gram_ww_invertible);
    n.set("gram_ww_onto", r.gram_ww_onto);
    n.set("gram_ww_injective", r.gram_ww_injective);
    n.set("gram_dual_invertible", r.gram_dual_invertible);
    n.set("gram_dual_onto", r.gram_dual_onto);
    n.set("gram_dual_injective", r.gram_dual_injective);
    n.set("gram_ww_sigma_ratio", r.gram_ww_sigma_ratio);
    n.set("gram_dual_sigma_ratio", r.gram_dual_sigma_ratio);
    n.set("phi_ww_selfadjoint_defect", r.phi_ww_selfadjoint_defect);
    n.set("agree", r.agree());
    return n;
}

BatteryOutcome battery_inv(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"inv", seed};
    if (ctx.instance) {
        const WeightedFamily& f = ctx.instance->primary;
        Mat u = ctx_operator(ctx, f.ambient, sub_seed(seed, 9));
        auto rep = inv_equivalence_battery(GramTriple(u, f, f), ctx.tol);
        out.details.set("conditions", inv_conditions_node(rep));
        out.pass = rep.agree();
        return out;
    }
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);
    auto riesz = generate(
        basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 1), n, riesz_dims(n), law), ctx.tol);
    auto redundant = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 2), n, redundant_dims(n), law),
        ctx.tol);
    Mat invertible = random_invertible(sub_seed(seed, 3), n);
    Mat singular = random_rank(sub_seed(seed, 4), n, n - 1);

    struct Case {
        const char* label;
        const WeightedFamily* family;
        const Mat* u;
        bool expected;
    } cases[] = {
        {"riesz_invertible", &riesz.primary, &invertible, true},
        {"riesz_singular", &riesz.primary, &singular, false},
        {"redundant_invertible", &redundant.primary, &invertible, false},
        {"redundant_singular", &redundant.primary, &singular, false},
    };
    out.pass = true;
    for (const Case& c : cases) {
        auto rep = inv_equivalence_battery(GramTriple(*c.u, *c.family, *c.family), ctx.tol);
        Node entry = inv_conditions_node(rep);
        entry.set("expected", c.expected);
        out.details.set(c.label, std::move(entry));
        out.pass = out.pass && rep.agree() && rep.verdict() == c.expected;
    }
    return out;
}

Node inverse_mode_node(const GramTriple& t, InverseMode mode, const TolerancePolicy& tol,
                       bool& pass) {
    BlockOperator g = cross_gram(t, tol);
    InverseResult direct = inverse_checked(g.matrix, tol);
    GramInverseReport rep = gram_inverse(t, mode, tol);
    Node n = Node::object();
    n.set("sigma_min", rep.sigma_min);
    n.set("sigma_max", rep.sigma_max);
    n.set("kappa", rep.kappa());
    n.set("resid_left", rep.resid_left);
    n.set("resid_right", rep.resid_right);
    bool ok = rep.invertible() && rep.inverse.has_value() && direct.invertible();
    if (ok) {
        double rel = frobenius(rep.inverse->matrix - *direct.inverse) / frobenius(*direct.inverse);
        n.set("formula_vs_direct_rel", rel);
        ok = std::max(rep.resid_left, rep.resid_right) <= 1e-8 * rep.kappa() && rel <= 1e-7;
    }
    n.set("pass", ok);
    pass = pass && ok;
    return n;
}

BatteryOutcome battery_inverse_formulas(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"inverse_formulas", seed};
    out.pass = true;
    if (ctx.instance) {
        const WeightedFamily& f = ctx.instance->primary;
        Mat u = ctx_operator(ctx, f.ambient, sub_seed(seed, 9));
        if (ctx.instance->secondary) {
            GramTriple t(u, f, *ctx.instance->secondary);
            out.details.set("dual_vw",
                            inverse_mode_node(t, InverseMode::dual_vw, ctx.tol, out.pass));
        } else {
            GramTriple t(u, f, f);
            out.details.set("ww", inverse_mode_node(t, InverseMode::ww, ctx.tol, out.pass));
        }
        return out;
    }
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);

    auto riesz = generate(
        basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 1), n, riesz_dims(n), law), ctx.tol);
    Mat u1 = random_invertible(sub_seed(seed, 2), n);
    out.details.set("ww", inverse_mode_node(GramTriple(u1, riesz.primary, riesz.primary),
                                            InverseMode::ww, ctx.tol, out.pass));

    auto pair = generate(
        basic_spec(InstanceKind::dual_pair, sub_seed(seed, 3), n, riesz_dims(n), law), ctx.tol);
    Mat u2 = random_invertible(sub_seed(seed, 4), n);
    out.details.set("dual_vw", inverse_mode_node(GramTriple(u2, pair.primary, *pair.secondary),
                                                 InverseMode::dual_vw, ctx.tol, out.pass));

    auto mixed = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 5), n, overfull_dims(n), law),
        ctx.tol);
    Mat u3 = random_invertible(sub_seed(seed, 6), n);
    out.details.set("wv", inverse_mode_node(GramTriple(u3, riesz.primary, mixed.primary),
                                            InverseMode::wv, ctx.tol, out.pass));
    return out;
}

Node pinv_node(const PinvReport& rep, const TolerancePolicy& tol) {
    Node n = Node::object();
    n.set("condition_resid_a", rep.condition_resid_a);
    n.set("condition_resid_b", rep.condition_resid_b);
    n.set("range_angle_a", rep.range_angle_a);
    n.set("range_angle_b", rep.range_angle_b);
    n.set("distance", rep.distance);
    n.set("direct_norm", rep.direct_norm);
    n.set("conditions_hold", rep.conditions_hold(tol));
    n.set("ranges_match", rep.ranges_match());
    n.set("formula_matches", rep.formula_matches());
    return n;
}

BatteryOutcome battery_pinv(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"pinv", seed};
    if (ctx.instance) {
        if (!ctx.instance->secondary)
            throw UsageError("battery pinv needs a dual_pair spec when one is supplied");
        Mat u = ctx_operator(ctx, ctx.instance->primary.ambient, sub_seed(seed, 9));
        auto rep = gram_pinv_formula(
            GramTriple(u, ctx.instance->primary, *ctx.instance->secondary), PinvVariant::dual_vw,
            ctx.tol);
        out.details.set("dual_vw", pinv_node(rep, ctx.tol));
        // The sound criterion: matching ranges force the closed form.
        out.pass = !(rep.conditions_hold(ctx.tol) && rep.ranges_match()) || rep.formula_matches();
        return out;
    }
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);
    out.pass = true;

    // Self-dual tight family: the closed form survives any operator, rank
    // deficient ones included.
    auto parseval_dims = riesz_dims(n);
    {
        auto more = riesz_dims(n);
        parseval_dims.insert(parseval_dims.end(), more.begin(), more.end());
    }
    auto tight = generate(
        basic_spec(InstanceKind::parseval, sub_seed(seed, 1), n, parseval_dims), ctx.tol);
    Mat low = random_rank(sub_seed(seed, 2), n, n - 2);
    auto rep_a = gram_pinv_formula(GramTriple(low, tight.primary, tight.primary),
                                   PinvVariant::dual_vw, ctx.tol);
    Node node_a = pinv_node(rep_a, ctx.tol);
    bool ok_a = rep_a.conditions_hold(ctx.tol) && rep_a.ranges_match() && rep_a.formula_matches();
    node_a.set("pass", ok_a);
    out.details.set("tight_low_rank", std::move(node_a));
    out.pass = out.pass && ok_a;

    auto pair = generate(
        basic_spec(InstanceKind::dual_pair, sub_seed(seed, 3), n, riesz_dims(n), law), ctx.tol);
    Mat uinv = random_invertible(sub_seed(seed, 4), n);
    auto rep_b = gram_pinv_formula(GramTriple(uinv, pair.primary, *pair.secondary),
                                   PinvVariant::dual_vw, ctx.tol);
    Node node_b = pinv_node(rep_b, ctx.tol);
    bool ok_b = rep_b.conditions_hold(ctx.tol) && rep_b.formula_matches();
    node_b.set("pass", ok_b);
    out.details.set("riesz_dual_invertible", std::move(node_b));
    out.pass = out.pass && ok_b;

    // Low-rank operator on the same dual pair: the commuting identities still
    // hold to machine precision, yet the ranges detach and the closed form
    // visibly stops being the pseudo-inverse. The range test is the one that
    // tracks the truth.
    Mat low2 = random_rank(sub_seed(seed, 5), n, n - 2);
    auto rep_c = gram_pinv_formula(GramTriple(low2, pair.primary, *pair.secondary),
                                   PinvVariant::dual_vw, ctx.tol);
    Node node_c = pinv_node(rep_c, ctx.tol);
    bool ok_c = rep_c.conditions_hold(ctx.tol) && !rep_c.ranges_match() &&
                !rep_c.formula_matches() && rep_c.distance >= 1e-3;
    node_c.set("pass", ok_c);
    out.details.set("riesz_dual_low_rank", std::move(node_c));
    out.pass = out.pass && ok_c;

    auto wide = generate(
        basic_spec(InstanceKind::dual_pair, sub_seed(seed, 6), n, redundant_dims(n), law),
        ctx.tol);
    Mat rank1 = random_rank(sub_seed(seed, 7), n, 1);
    auto rep_d = gram_pinv_formula(GramTriple(rank1, wide.primary, *wide.secondary),
                                   PinvVariant::dual_vw, ctx.tol);
    Node node_d = pinv_node(rep_d, ctx.tol);
    bool ok_d = !rep_d.conditions_hold(ctx.tol) &&
                std::max(rep_d.condition_resid_a, rep_d.condition_resid_b) >= 1e-2 &&
                rep_d.distance >= 1e-3;
    node_d.set("pass", ok_d);
    out.details.set("redundant_dual_rank_one", std::move(node_d));
    out.pass = out.pass && ok_d;

    // Unit-weight orthogonal decomposition: the connector and the normalizer
    // are both trivial and the corrected form commutes with the pseudo-inverse
    // through the unitary change of frame, for any operator.
    auto onb = generate(basic_spec(InstanceKind::fusion_onb, sub_seed(seed, 8), n, riesz_dims(n)),
                        ctx.tol);
    Mat low3 = random_rank(sub_seed(seed, 10), n, n - 2);
    auto rep_e =
        gram_pinv_formula(GramTriple(low3, onb.primary, onb.primary), PinvVariant::ww, ctx.tol);
    Node node_e = pinv_node(rep_e, ctx.tol);
    bool ok_e = rep_e.conditions_hold(ctx.tol) && rep_e.ranges_match() && rep_e.formula_matches();
    node_e.set("pass", ok_e);
    out.details.set("decomposition_ww", std::move(node_e));
    out.pass = out.pass && ok_e;

    // The same decomposition under scattered weights turns the change of frame
    // into a non-unitary similarity. The commuting identities still hold to
    // machine precision while the closed form stops being the pseudo-inverse:
    // the exact identities alone cannot certify the formula.
    WeightedFamily weighted = reweighted(onb.primary, sub_seed(seed, 9), 1.2, 2.0);
    auto rep_g =
        gram_pinv_formula(GramTriple(low3, weighted, weighted), PinvVariant::ww, ctx.tol);
    Node node_g = pinv_node(rep_g, ctx.tol);
    bool ok_g = rep_g.conditions_hold(ctx.tol) && !rep_g.ranges_match() && !rep_g.formula_matches();
    node_g.set("pass", ok_g);
    out.details.set("weighted_decomposition_ww", std::move(node_g));
    out.pass = out.pass && ok_g;

    // Generic Riesz family with an invertible operator: the closed form IS
    // the inverse, while the commuting identities fail loudly. Neither
    // direction of the naive equivalence survives; only the range criterion
    // pairs with the formula.
    auto riesz = generate(
        basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 11), n, riesz_dims(n), law), ctx.tol);
    Mat uinv2 = random_invertible(sub_seed(seed, 12), n);
    auto rep_f =
        gram_pinv_formula(GramTriple(uinv2, riesz.primary, riesz.primary), PinvVariant::ww, ctx.tol);
    Node node_f = pinv_node(rep_f, ctx.tol);
    bool ok_f = !rep_f.conditions_hold(ctx.tol) && rep_f.ranges_match() && rep_f.formula_matches();
    node_f.set("pass", ok_f);
    out.details.set("riesz_ww_invertible", std::move(node_f));
    out.pass = out.pass && ok_f;
    return out;
}

BatteryOutcome battery_norm_bounds(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"norm_bounds", seed};
    require_no_override(ctx, "norm_bounds");
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);
    out.pass = true;

    auto w = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 1), n, overfull_dims(n), law),
        ctx.tol);
    auto v = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 2), n, overfull_dims(n), law),
        ctx.tol);
    Mat u = random_matrix(sub_seed(seed, 3), n, n);
    auto cw = classify(w.primary, ctx.tol);
    auto cv = classify(v.primary, ctx.tol);

    BlockOperator g = cross_gram(GramTriple(u, w.primary, v.primary), ctx.tol);
    double gram_norm = operator_norm(g.matrix);
    double gram_bound =
        std::sqrt(cw.upper * cv.upper) / cv.lower * operator_norm(u) + 1e-9;
    out.details.set("gram_norm", gram_norm);
    out.details.set("gram_bound", gram_bound);
    out.pass = out.pass && gram_norm <= gram_bound;

    BlockOperator phi = phi_block(v.primary, w.primary, ctx.tol);
    Mat sw = frame_operator(w.primary);
    double sw_inv_norm = operator_norm(inverse_checked(sw, ctx.tol).inverse.value());
    double phi_norm = operator_norm(phi.matrix);
    out.details.set("phi_norm", phi_norm);
    out.details.set("phi_bound", sw_inv_norm + 1e-12);
    out.pass = out.pass && phi_norm <= sw_inv_norm + 1e-12;

    auto riesz = generate(
        basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 4), n, riesz_dims(n), law), ctx.tol);
    auto cr = classify(riesz.primary, ctx.tol);
    Mat l = alternate_operator(riesz.primary, riesz.primary, ctx.tol);
    RVec eig = hermitian_eigenvalues(0.5 * (l + l.adjoint()));
    double l_min = eig(0);
    double l_bound = cr.lower / cr.upper - 1e-9;
    out.details.set("l_min_eigenvalue", l_min);
    out.details.set("l_lower_bound", l_bound);
    out.pass = out.pass && l_min >= l_bound;
    return out;
}

BatteryOutcome battery_reconstruction(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"reconstruction", seed};
    const Eigen::Index n = pick_n(seed);
    GeneratedInstance local;
    const GeneratedInstance* pair = ctx.instance;
    if (pair && !pair->secondary)
        throw UsageError("battery reconstruction needs a dual_pair spec when one is supplied");
    if (!pair) {
        local = generate(basic_spec(InstanceKind::dual_pair, sub_seed(seed, 1), n,
                                    redundant_dims(n), WeightLaw::uniform(0.5, 2.0)),
                         ctx.tol);
        pair = &local;
    }
    Mat u = ctx.u_arg ? resolve_operator(*ctx.u_arg, pair->primary.ambient, ctx.tol)
                      : random_matrix(sub_seed(seed, 2), pair->primary.ambient,
                                      pair->primary.ambient);
    BlockOperator g = cross_gram(GramTriple(u, pair->primary, *pair->secondary), ctx.tol);
    Mat rec = reconstruct_operator(g, pair->primary, *pair->secondary, ctx.tol);
    double defect = frobenius(rec - u);
    double scale = std::max(frobenius(u), 1e-300);
    out.details.set("defect", defect);
    out.details.set("operator_norm", frobenius(u));
    out.pass = defect <= 1e-8 * scale;
    return out;
}

BatteryOutcome battery_oblique(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"oblique", seed};
    const Eigen::Index n = pick_n(seed);
    GeneratedInstance local;
    const GeneratedInstance* pair = ctx.instance;
    if (ctx.u_arg) throw UsageError("battery oblique takes no --u");
    if (pair && !pair->secondary)
        throw UsageError("battery oblique needs a dual_pair spec when one is supplied");
    if (!pair) {
        local = generate(basic_spec(InstanceKind::dual_pair, sub_seed(seed, 1), n,
                                    redundant_dims(n), WeightLaw::uniform(0.5, 2.0)),
                         ctx.tol);
        pair = &local;
    }
    auto rep = oblique_projection_check(pair->primary, *pair->secondary, ctx.tol);
    out.details.set("idempotent_residual", rep.idempotent_residual);
    out.details.set("synthesis_residual", rep.synthesis_residual);
    out.details.set("kernel_angle", rep.kernel_angle);
    out.details.set("selfadjoint_defect", rep.selfadjoint_defect);
    out.pass = rep.idempotent_residual <= 1e-9 && rep.synthesis_residual <= 1e-9 &&
               rep.kernel_angle <= 1e-7;
    return out;
}

BatteryOutcome battery_composition(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"composition", seed};
    require_no_override(ctx, "composition");
    const Eigen::Index n = pick_n(seed);
    auto law = WeightLaw::uniform(0.5, 2.0);
    out.pass = true;

    auto w = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 1), n, overfull_dims(n), law),
        ctx.tol);
    auto v = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 2), n, overfull_dims(n), law),
        ctx.tol);
    auto z = generate(
        basic_spec(InstanceKind::generic_frame, sub_seed(seed, 3), n, overfull_dims(n), law),
        ctx.tol);
    Mat u1 = random_matrix(sub_seed(seed, 4), n, n);
    Mat u2 = random_matrix(sub_seed(seed, 5), n, n);
    double scale = std::max(1.0, frobenius(u1) * frobenius(u2));

    auto rep = composition_check(u1, u2, w.primary, v.primary, z.primary, ctx.tol);
    out.details.set("general_residual", rep.general_residual);
    out.pass = out.pass && rep.general_residual <= 1e-7 * scale;

    // First slot dual of the last factor's frame: the bridge collapses.
    auto pair = generate(basic_spec(InstanceKind::dual_pair, sub_seed(seed, 6), n,
                                    redundant_dims(n), law),
                         ctx.tol);
    auto vmid = generate(basic_spec(InstanceKind::generic_frame, sub_seed(seed, 7), n,
                                    redundant_dims(n), law),
                         ctx.tol);
    auto rep2 = composition_check(u1, u2, pair.primary, vmid.primary, *pair.secondary, ctx.tol);
    out.details.set("dual_general_residual", rep2.general_residual);
    bool have_dual = rep2.dual_residual.has_value();
    out.details.set("dual_collapse_present", have_dual);
    if (have_dual) {
        out.details.set("dual_collapse_residual", *rep2.dual_residual);
        out.pass = out.pass && *rep2.dual_residual <= 1e-7 * scale;
    } else {
        out.pass = false;
    }
    out.pass = out.pass && rep2.general_residual <= 1e-7 * scale;
    return out;
}

BatteryOutcome battery_stability(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"stability", seed};
    const Eigen::Index n = pick_n(seed);
    if (ctx.u_arg) throw UsageError("battery stability takes no --u");
    if (ctx.instance) {
        if (!ctx.instance->secondary)
            throw UsageError("battery stability needs a perturbation_pair spec");
        const Eigen::Index m = ctx.instance->primary.ambient;
        Mat u1 = Mat::Identity(m, m);
        PerturbationInstance inst(ctx.instance->primary, ctx.instance->primary,
                                  *ctx.instance->secondary, u1, u1);
        auto rep = check_stability(inst, 0.0, 0.0, std::nullopt, 0x9e3779b97f4a7c15ull, ctx.tol);
        out.details.set("lhs", rep.lhs);
        out.details.set("rhs", rep.rhs);
        out.details.set("bound_holds", rep.bound_holds);
        out.details.set("g2_sigma_ratio", rep.g2_sigma_ratio());
        out.pass = !rep.bound_holds || rep.g2_invertible;
        return out;
    }

    // A near-degenerate base family pushes the certified region below what
    // double precision rotations can reach, so scan derived seeds for a base
    // with a frame-bound ratio the ladder can work against. Deterministic in
    // the battery seed.
    std::uint64_t base_seed = sub_seed(seed, 1);
    double base_ratio = 0.0;
    for (std::uint64_t k = 0; k < 16; ++k) {
        const std::uint64_t cand = sub_seed(seed, 100 + k);
        auto probe = generate(basic_spec(InstanceKind::perturbation_pair, cand, n, riesz_dims(n),
                                         WeightLaw::uniform(0.8, 1.6), 1e-3),
                              ctx.tol);
        auto c = classify(probe.primary, ctx.tol);
        if (c.lower / c.upper > base_ratio) {
            base_ratio = c.lower / c.upper;
            base_seed = cand;
        }
        if (base_ratio >= 1e-2) break;
    }
    out.details.set("base_bound_ratio", base_ratio);

    // Shrink the rotation and the operator gap together until the margin
    // certifies; the theorem then guarantees the perturbed Gram inverts. The
    // reference operator stays well conditioned so the right-hand side keeps
    // a floor the ladder can reach.
    bool found = false;
    Node ladder = Node::array();
    for (int rung = 0; rung < 8 && !found; ++rung) {
        const double theta = 1e-3 * std::pow(0.1, rung);
        const double delta = 1e-4 * std::pow(0.1, rung);
        auto pair = generate(basic_spec(InstanceKind::perturbation_pair, base_seed, n,
                                        riesz_dims(n), WeightLaw::uniform(0.8, 1.6), theta),
                             ctx.tol);
        Mat u1 = near_identity(sub_seed(seed, 2), n, 0.4);
        Mat gap = random_matrix(sub_seed(seed, 3), n, n);
        gap /= operator_norm(gap);
        Mat u2 = u1 + delta * gap;
        PerturbationInstance inst(pair.primary, pair.primary, *pair.secondary, u1, u2);
        auto rep = check_stability(inst, 0.0, 0.0, std::nullopt, 0x9e3779b97f4a7c15ull, ctx.tol);
        Node step = Node::object();
        step.set("theta", theta);
        step.set("lhs", rep.lhs);
        step.set("rhs", rep.rhs);
        step.set("bound_holds", rep.bound_holds);
        ladder.push(std::move(step));
        if (!rep.bound_holds) continue;
        found = true;
        out.details.set("theta", theta);
        out.details.set("mu", rep.mu);
        out.details.set("epsilon", rep.epsilon);
        out.details.set("lhs", rep.lhs);
        out.details.set("rhs", rep.rhs);
        out.details.set("margin", rep.rhs - rep.lhs);
        out.details.set("g2_sigma_ratio", rep.g2_sigma_ratio());
        out.details.set("purb_residual", rep.purb_residual);
        out.pass = rep.verdict() && rep.g2_sigma_ratio() > 1e-10;

        // Identity-based specialization on the same family pair.
        Mat u = near_identity(sub_seed(seed, 4), n, delta);
        double mu = operator_norm(u - Mat::Identity(n, n)) * (1.0 + 1e-9) + 1e-15;
        auto cor = corollary_check(pair.primary, *pair.secondary, u, mu, 0.0, 0.0, std::nullopt,
                                   ctx.tol);
        out.details.set("corollary_lhs", cor.lhs);
        out.details.set("corollary_rhs", cor.rhs);
        out.details.set("corollary_bound_holds", cor.bound_holds);
        out.pass = out.pass && (!cor.bound_holds || cor.g2_invertible);
        out.details.set("corollary_pass", !cor.bound_holds || cor.g2_invertible);
    }
    out.details.set("ladder", std::move(ladder));
    if (!found) out.details.set("note", "no certifying margin found on any rung");
    return out;
}

BatteryOutcome battery_neumann(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"neumann", seed};
    require_no_override(ctx, "neumann");
    const Eigen::Index n = pick_n(seed);
    Mat f = random_invertible(sub_seed(seed, 1), n);
    Mat finv = inverse_checked(f, ctx.tol).inverse.value();
    Mat gap = random_matrix(sub_seed(seed, 2), n, n);
    gap /= operator_norm(gap);
    out.pass = true;

    Mat g = f + (0.5 / operator_norm(finv)) * gap;
    auto near = neumann_inverse(f, g, 512, 1e-14, ctx.tol);
    out.details.set("contraction", near.contraction);
    out.details.set("terms", near.terms);
    bool ok = near.converged() && near.contraction <= 0.9;
    if (ok) {
        Mat direct = inverse_checked(g, ctx.tol).inverse.value();
        double rel = frobenius(*near.inverse - direct) / frobenius(direct);
        out.details.set("series_vs_direct_rel", rel);
        ok = rel <= 1e-8;
    }
    out.pass = out.pass && ok;

    Mat far = f + (1.5 / operator_norm(finv)) * gap;
    auto diverged = neumann_inverse(f, far, 512, 1e-14, ctx.tol);
    out.details.set("divergent_contraction", diverged.contraction);
    out.details.set("divergent_has_inverse", diverged.converged());
    out.pass = out.pass && !diverged.converged() && diverged.contraction >= 1.0;

    auto exact = neumann_inverse(f, f, 512, 1e-14, ctx.tol);
    out.details.set("exact_terms", exact.terms);
    out.pass = out.pass && exact.converged() && exact.terms == 1 &&
               frobenius(*exact.inverse - finv) <= 1e-10 * frobenius(finv);
    return out;
}

BatteryOutcome battery_onb_gram(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"onb_gram", seed};
    if (ctx.u_arg) throw UsageError("battery onb_gram takes no --u");
    auto identity_defect = [&](const WeightedFamily& f) {
        BlockOperator g =
            cross_gram(GramTriple(Mat::Identity(f.ambient, f.ambient), f, f), ctx.tol);
        Mat id = Mat::Identity(g.matrix.rows(), g.matrix.cols());
        return frobenius(g.matrix - id);
    };
    if (ctx.instance) {
        const WeightedFamily& f = ctx.instance->primary;
        double defect = identity_defect(f);
        bool onb = classify(f, ctx.tol).is_orthonormal_basis;
        out.details.set("identity_defect", defect);
        out.details.set("is_orthonormal_basis", onb);
        out.pass = onb ? defect <= 1e-9 : defect > 1e-3;
        return out;
    }
    const Eigen::Index n = pick_n(seed);
    out.pass = true;

    auto onb = generate(basic_spec(InstanceKind::fusion_onb, sub_seed(seed, 1), n, riesz_dims(n)),
                        ctx.tol);
    double d_onb = identity_defect(onb.primary);
    double d_unit = identity_defect(unit_weight_family(onb.primary));
    out.details.set("onb_defect", d_onb);
    out.details.set("unit_weight_defect", d_unit);
    out.pass = out.pass && d_onb <= 1e-9 && d_unit <= 1e-9;

    // Same orthogonal decomposition under scattered weights: the Gram stays
    // the identity even though the family is no longer Parseval.
    WeightedFamily weighted = reweighted(onb.primary, sub_seed(seed, 2), 1.2, 2.0);
    double d_weighted = identity_defect(weighted);
    auto cw = classify(weighted, ctx.tol);
    out.details.set("weighted_defect", d_weighted);
    out.details.set("weighted_is_parseval", cw.is_parseval);
    out.pass = out.pass && d_weighted <= 1e-9 && !cw.is_parseval && !cw.is_orthonormal_basis;

    auto riesz = generate(basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 3), n,
                                     riesz_dims(n), WeightLaw::uniform(0.5, 2.0)),
                          ctx.tol);
    double d_riesz = identity_defect(riesz.primary);
    bool riesz_is_onb = classify(riesz.primary, ctx.tol).is_orthonormal_basis;
    out.details.set("riesz_defect", d_riesz);
    out.details.set("riesz_is_onb", riesz_is_onb);
    out.pass = out.pass && !riesz_is_onb && d_riesz > 1e-3;
    return out;
}

BatteryOutcome battery_weight_independence(std::uint64_t seed, const BatteryCtx& ctx) {
    BatteryOutcome out{"weight_independence", seed};
    if (ctx.u_arg) throw UsageError("battery weight_independence takes no --u");
    const Eigen::Index n = pick_n(seed);
    out.pass = true;
    auto check = [&](const WeightedFamily& f, const char* label) {
        bool base = classify(f, ctx.tol).is_riesz_basis;
        bool stable = true;
        for (std::uint64_t k = 0; k < 3; ++k) {
            WeightedFamily re = reweighted(f, sub_seed(seed, 10 + k), 0.5, 2.0);
            stable = stable && classify(re, ctx.tol).is_riesz_basis == base;
        }
        Node entry = Node::object();
        entry.set("is_riesz_basis", base);
        entry.set("stable", stable);
        out.details.set(label, std::move(entry));
        out.pass = out.pass && stable;
    };
    if (ctx.instance) {
        check(ctx.instance->primary, "supplied");
        return out;
    }
    auto riesz = generate(basic_spec(InstanceKind::riesz_basis, sub_seed(seed, 1), n,
                                     riesz_dims(n), WeightLaw::uniform(0.5, 2.0)),
                          ctx.tol);
    auto redundant = generate(basic_spec(InstanceKind::generic_frame, sub_seed(seed, 2), n,
                                         redundant_dims(n), WeightLaw::uniform(0.5, 2.0)),
                              ctx.tol);
    check(riesz.primary, "riesz");
    check(redundant.primary, "redundant");
    return out;
}

struct BatteryDef {
    const char* name;
    const char* statement;
    BatteryOutcome (*fn)(std::uint64_t, const BatteryCtx&);
};

const BatteryDef kBatteries[] = {
    {"riesz_equiv",
     "six detection routes for a Riesz decomposition return one verdict on mixed families",
     battery_riesz_equiv},
    {"inv",
     "invertibility, surjectivity and injectivity of the Gram agree with the family being a "
     "Riesz basis carrying an invertible operator, on the family and on its canonical dual",
     battery_inv},
    {"inverse_formulas",
     "the three closed-form Gram inverses reproduce the dense inverse within a "
     "condition-number budget",
     battery_inverse_formulas},
    {"pinv",
     "matching analysis ranges force the pseudo-inverse to be the Gram of the "
     "pseudo-inverse, and measurably fail to when the ranges detach",
     battery_pinv},
    {"norm_bounds",
     "the Gram, the bridge map and the unit-weight connector obey their frame-bound "
     "estimates",
     battery_norm_bounds},
    {"reconstruction",
     "the ambient operator is recovered from its Gram over a dual pair by synthesis and "
     "frame inversion",
     battery_reconstruction},
    {"oblique", "the Gram of the identity over a dual pair is an oblique projection with the "
                "analysis kernel",
     battery_oblique},
    {"composition",
     "Gram products compose through the bridge operator and collapse to a single Gram over "
     "dual pairs",
     battery_composition},
    {"stability",
     "a certified perturbation margin forces invertibility of the perturbed Gram, identity "
     "specialization included",
     battery_stability},
    {"neumann",
     "the geometric series built from a nearby invertible operator reproduces the dense "
     "inverse under the contraction premise",
     battery_neumann},
    {"onb_gram",
     "the Gram of the identity is the identity exactly on orthogonal decompositions and "
     "visibly not on skew Riesz families",
     battery_onb_gram},
    {"weight_independence",
     "rescaling the weights never changes the Riesz decomposition verdict", battery_weight_independence},
};

const BatteryDef* find_battery(const std::string& name) {
    for (const BatteryDef& def : kBatteries)
        if (name == def.name) return &def;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Report plumbing.

struct Sink {
    std::string path;   // empty: data stream
    std::string format; // json | text
};

void emit_report(const Node& report, const Sink& sink, std::ostream& out) {
    std::string text;
    if (sink.format == "text") {
        std::ostringstream os;
        report.render_text(os, "");
        text = os.str();
    } else {
        report.dump(text);
        text += '\n';
    }
    if (!sink.path.empty())
        write_text_file(sink.path, text);
    else
        out << text;
}

Node base_report(const std::string& command) {
    Node rep = Node::object();
    rep.set("report_version", 1);
    rep.set("command", command);
    return rep;
}

Node classification_node(const Classification& c) {
    Node n = Node::object();
    n.set("is_bessel", c.is_bessel);
    n.set("is_frame", c.is_frame);
    n.set("is_riesz_basis", c.is_riesz_basis);
    n.set("is_parseval", c.is_parseval);
    n.set("is_orthonormal_basis", c.is_orthonormal_basis);
    n.set("is_uniform", c.is_uniform);
    n.set("is_complete", c.is_complete);
    n.set("lower_bound", c.lower);
    n.set("upper_bound", c.upper);
    return n;
}

std::string classification_verdict(const Classification& c) {
    if (c.is_orthonormal_basis) return "orthonormal_basis";
    if (c.is_parseval) return "parseval";
    if (c.is_riesz_basis) return "riesz_basis";
    if (c.is_frame) return "frame";
    return "bessel";
}

// ---------------------------------------------------------------------------
// Commands.

struct Options {
    std::string spec, w, v, z;
    std::string u = "identity", u1 = "identity", u2 = "identity";
    std::string mode = "ww", variant = "dual_vw";
    std::string theorem, tol_file, output, output2, matrix_out, matrix_file;
    std::string format = "json";
    std::uint64_t seed = 1;
    std::uint64_t probe_seed = 0x9e3779b97f4a7c15ull;
    int sweep = 1;
    double p = 2.0;
    double lambda1 = 0.0, lambda2 = 0.0, epsilon = 0.0, mu = 0.0;
    bool list = false, corollary = false;
};

// Resolves --w/--v (or a pair-producing --spec) into the two Gram slots.
struct TriplePick {
    WeightedFamily w;
    WeightedFamily v;
    Node inputs = Node::object();
};

TriplePick pick_pair(const Options& opt, const TolerancePolicy& tol) {
    if (!opt.spec.empty()) {
        if (!opt.w.empty() || !opt.v.empty())
            throw UsageError("give either --spec or --w/--v, not both");
        GeneratedInstance inst = resolve_family(opt.spec, tol);
        Node inputs = Node::object();
        inputs.set("spec", opt.spec);
        WeightedFamily w = inst.primary;
        WeightedFamily v = inst.secondary ? *inst.secondary : inst.primary;
        return {std::move(w), std::move(v), std::move(inputs)};
    }
    if (opt.w.empty()) throw UsageError("need --w (file or instance spec) or --spec");
    GeneratedInstance wi = resolve_family(opt.w, tol);
    Node inputs = Node::object();
    inputs.set("w", opt.w);
    if (opt.v.empty()) {
        WeightedFamily v = wi.secondary ? *wi.secondary : wi.primary;
        return {std::move(wi.primary), std::move(v), std::move(inputs)};
    }
    GeneratedInstance vi = resolve_family(opt.v, tol);
    inputs.set("v", opt.v);
    return {std::move(wi.primary), std::move(vi.primary), std::move(inputs)};
}

int cmd_classify(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    const std::string source = !opt.spec.empty() ? opt.spec : opt.w;
    if (source.empty()) throw UsageError("classify needs --spec or --w");
    GeneratedInstance inst = resolve_family(source, tol);
    auto c = classify(inst.primary, tol);

    Node rep = base_report("classify");
    Node inputs = Node::object();
    inputs.set(!opt.spec.empty() ? "spec" : "w", source);
    rep.set("inputs", std::move(inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("ambient", inst.primary.ambient);
    results.set("subspaces", static_cast<long long>(inst.primary.size()));
    results.set("coefficient_dim", inst.primary.coeff_dim());
    results.set("classification", classification_node(c));
    if (inst.secondary)
        results.set("secondary_classification", classification_node(classify(*inst.secondary, tol)));
    rep.set("results", std::move(results));
    rep.set("residuals", Node::object());
    rep.set("verdict", classification_verdict(c));
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_gram(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    TriplePick pick = pick_pair(opt, tol);
    Mat u = resolve_operator(opt.u, pick.w.ambient, tol);
    BlockOperator g = cross_gram(GramTriple(u, pick.w, pick.v), tol);

    Node rep = base_report("gram");
    pick.inputs.set("u", opt.u);
    rep.set("inputs", std::move(pick.inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("rows", g.matrix.rows());
    results.set("cols", g.matrix.cols());
    results.set("operator_norm", operator_norm(g.matrix));
    results.set("frobenius_norm", frobenius(g.matrix));
    rep.set("results", std::move(results));
    Node residuals = Node::object();
    double identity_defect = -1.0;
    if (g.matrix.rows() == g.matrix.cols()) {
        identity_defect =
            frobenius(g.matrix - Mat::Identity(g.matrix.rows(), g.matrix.cols()));
        residuals.set("identity_defect", identity_defect);
    }
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", identity_defect >= 0.0 && identity_defect <= tol.identity_abs
                           ? "identity"
                           : "computed");
    if (!opt.matrix_out.empty()) write_text_file(opt.matrix_out, serialize(g.matrix));
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

InverseMode parse_mode(const std::string& text) {
    if (text == "ww") return InverseMode::ww;
    if (text == "dual_vw") return InverseMode::dual_vw;
    if (text == "wv") return InverseMode::wv;
    throw UsageError("unknown inverse mode '" + text + "' (ww, dual_vw, wv)");
}

int cmd_invert(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    TriplePick pick = pick_pair(opt, tol);
    Mat u = resolve_operator(opt.u, pick.w.ambient, tol);
    InverseMode mode = parse_mode(opt.mode);
    GramInverseReport r = gram_inverse(GramTriple(u, pick.w, pick.v), mode, tol);

    Node rep = base_report("invert");
    pick.inputs.set("u", opt.u);
    pick.inputs.set("mode", opt.mode);
    rep.set("inputs", std::move(pick.inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("sigma_min", r.sigma_min);
    results.set("sigma_max", r.sigma_max);
    results.set("sigma_ratio", r.sigma_max > 0.0 ? r.sigma_min / r.sigma_max : 0.0);
    results.set("kappa", r.kappa());
    results.set("invertible", r.invertible());
    results.set("formula_inverse_present", r.inverse.has_value());
    rep.set("results", std::move(results));
    Node residuals = Node::object();
    if (r.inverse) {
        residuals.set("formula_left_residual", r.resid_left);
        residuals.set("formula_right_residual", r.resid_right);
    }
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", r.invertible() ? "invertible" : "singular");
    if (!opt.matrix_out.empty() && r.inverse)
        write_text_file(opt.matrix_out, serialize(r.inverse->matrix));
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_pinv(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    TriplePick pick = pick_pair(opt, tol);
    Mat u = resolve_operator(opt.u, pick.w.ambient, tol);
    PinvVariant variant;
    if (opt.variant == "dual_vw")
        variant = PinvVariant::dual_vw;
    else if (opt.variant == "ww")
        variant = PinvVariant::ww;
    else
        throw UsageError("unknown pinv variant '" + opt.variant + "' (dual_vw, ww)");
    PinvReport r = gram_pinv_formula(GramTriple(u, pick.w, pick.v), variant, tol);

    Node rep = base_report("pinv");
    pick.inputs.set("u", opt.u);
    pick.inputs.set("variant", opt.variant);
    rep.set("inputs", std::move(pick.inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("conditions_hold", r.conditions_hold(tol));
    results.set("ranges_match", r.ranges_match());
    results.set("formula_matches", r.formula_matches());
    results.set("direct_norm", r.direct_norm);
    rep.set("results", std::move(results));
    Node residuals = Node::object();
    residuals.set("condition_resid_a", r.condition_resid_a);
    residuals.set("condition_resid_b", r.condition_resid_b);
    residuals.set("range_angle_a", r.range_angle_a);
    residuals.set("range_angle_b", r.range_angle_b);
    residuals.set("distance", r.distance);
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", r.formula_matches() ? "formula_matches" : "formula_differs");
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_reconstruct(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    TriplePick pick = pick_pair(opt, tol);
    Mat u = resolve_operator(opt.u, pick.w.ambient, tol);
    BlockOperator g = cross_gram(GramTriple(u, pick.w, pick.v), tol);
    Mat rec = reconstruct_operator(g, pick.w, pick.v, tol);
    double defect = frobenius(rec - u);
    double rel = defect / std::max(frobenius(u), 1e-300);

    Node rep = base_report("reconstruct");
    pick.inputs.set("u", opt.u);
    rep.set("inputs", std::move(pick.inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("operator_frobenius", frobenius(u));
    rep.set("results", std::move(results));
    Node residuals = Node::object();
    residuals.set("defect", defect);
    residuals.set("relative_defect", rel);
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", rel <= 1e-8 ? "recovered" : "not_recovered");
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_duality(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    TriplePick pick = pick_pair(opt, tol); // w: candidate dual, v: base
    double forward = duality_defect(pick.w, pick.v, tol);
    double backward = duality_defect(pick.v, pick.w, tol);
    bool pseudo = is_pseudo_dual(pick.w, pick.v, tol);
    Mat l = alternate_operator(pick.w, pick.v, tol);
    RVec sv = singular_values(l);

    Node rep = base_report("duality");
    pick.inputs.set("u", "identity");
    rep.set("inputs", std::move(pick.inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("is_dual", forward <= tol.identity_abs);
    results.set("is_pseudo_dual", pseudo);
    results.set("bridge_sigma_min", sv(sv.size() - 1));
    results.set("bridge_sigma_max", sv(0));
    rep.set("results", std::move(results));
    Node residuals = Node::object();
    residuals.set("duality_defect", forward);
    residuals.set("reverse_defect", backward);
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", forward <= tol.identity_abs ? "dual"
                       : pseudo                    ? "pseudo_dual"
                                                   : "not_dual");
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_stability(const Options& opt, const CLI::App* sub, const TolerancePolicy& tol,
                  std::ostream& out) {
    WeightedFamily* wp = nullptr;
    std::optional<WeightedFamily> w, v, z;
    Node inputs = Node::object();
    if (!opt.spec.empty()) {
        GeneratedInstance inst = resolve_family(opt.spec, tol);
        if (!inst.secondary)
            throw UsageError("stability needs a perturbation_pair spec or --w/--v/--z files");
        w = inst.primary;
        v = inst.primary;
        z = *inst.secondary;
        inputs.set("spec", opt.spec);
    } else {
        if (opt.w.empty() || opt.z.empty())
            throw UsageError("stability needs --spec or --w and --z (and optionally --v)");
        w = resolve_family(opt.w, tol).primary;
        v = opt.v.empty() ? *w : resolve_family(opt.v, tol).primary;
        z = resolve_family(opt.z, tol).primary;
        inputs.set("w", opt.w);
        if (!opt.v.empty()) inputs.set("v", opt.v);
        inputs.set("z", opt.z);
    }
    wp = &*w;
    const Eigen::Index n = wp->ambient;
    std::optional<double> eps;
    if (sub->count("--epsilon")) eps = opt.epsilon;

    Node rep = base_report("stability");
    Node results = Node::object();
    Node residuals = Node::object();
    std::string verdict;
    if (opt.corollary) {
        Mat u = resolve_operator(opt.u2, n, tol);
        if (!sub->count("--mu")) throw UsageError("stability --corollary needs --mu");
        inputs.set("u", opt.u2);
        inputs.set("mu", opt.mu);
        auto r = corollary_check(*w, *z, u, opt.mu, opt.lambda1, opt.lambda2, eps, tol);
        results.set("mu", r.mu);
        results.set("epsilon", r.epsilon);
        results.set("lhs", r.lhs);
        results.set("rhs", r.rhs);
        results.set("bound_holds", r.bound_holds);
        results.set("g2_invertible", r.g2_invertible);
        results.set("g2_sigma_ratio", r.g2_sigma_ratio());
        residuals.set("purb_residual", r.purb_residual);
        verdict = r.bound_holds ? (r.g2_invertible ? "certified" : "falsified")
                                : "margin_not_certified";
    } else {
        Mat u1 = resolve_operator(opt.u1, n, tol);
        Mat u2 = resolve_operator(opt.u2, n, tol);
        inputs.set("u1", opt.u1);
        inputs.set("u2", opt.u2);
        PerturbationInstance inst(*w, *v, *z, u1, u2);
        auto r = check_stability(inst, opt.lambda1, opt.lambda2, eps, opt.probe_seed, tol);
        results.set("mu", r.mu);
        results.set("lambda1", r.lambda1);
        results.set("lambda2", r.lambda2);
        results.set("epsilon", r.epsilon);
        results.set("bound_b", r.bound_b);
        results.set("lhs", r.lhs);
        results.set("rhs", r.rhs);
        results.set("bound_holds", r.bound_holds);
        results.set("g1_inverse_norm", r.g1_inv_norm);
        results.set("g2_invertible", r.g2_invertible);
        results.set("g2_sigma_min", r.g2_sigma_min);
        results.set("g2_sigma_max", r.g2_sigma_max);
        results.set("g2_sigma_ratio", r.g2_sigma_ratio());
        residuals.set("purb_residual", r.purb_residual);
        verdict = r.bound_holds ? (r.g2_invertible ? "certified" : "falsified")
                                : "margin_not_certified";
    }
    rep.set("inputs", std::move(inputs));
    rep.set("tolerances", tolerances_node(tol));
    rep.set("results", std::move(results));
    rep.set("residuals", std::move(residuals));
    rep.set("verdict", verdict);
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_generate(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    if (opt.spec.empty()) throw UsageError("generate needs --spec");
    if (opt.output.empty()) throw UsageError("generate needs --output <family file>");
    GeneratedInstance inst = generate(parse_instance_spec(opt.spec), tol);
    if (inst.secondary && opt.output2.empty())
        throw UsageError("this spec produces a pair; add --output2 <second family file>");
    write_text_file(opt.output, serialize(inst.primary));
    if (inst.secondary) write_text_file(opt.output2, serialize(*inst.secondary));

    Node rep = base_report("generate");
    Node inputs = Node::object();
    inputs.set("spec", opt.spec);
    rep.set("inputs", std::move(inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    Node files = Node::array();
    files.push(opt.output);
    if (inst.secondary) files.push(opt.output2);
    results.set("files", std::move(files));
    results.set("classification", classification_node(classify(inst.primary, tol)));
    if (inst.secondary) {
        results.set("secondary_classification",
                    classification_node(classify(*inst.secondary, tol)));
        results.set("duality_defect", duality_defect(inst.primary, *inst.secondary, tol));
    }
    rep.set("results", std::move(results));
    rep.set("residuals", Node::object());
    rep.set("verdict", "generated");
    emit_report(rep, {"", opt.format}, out);
    return 0;
}

int cmd_schatten(const Options& opt, const TolerancePolicy& tol, std::ostream& out) {
    Mat m;
    Node inputs = Node::object();
    if (!opt.matrix_file.empty()) {
        m = parse_matrix(read_text_file(opt.matrix_file));
        inputs.set("matrix", opt.matrix_file);
    } else if (!opt.w.empty()) {
        TriplePick pick = pick_pair(opt, tol);
        Mat u = resolve_operator(opt.u, pick.w.ambient, tol);
        m = cross_gram(GramTriple(u, pick.w, pick.v), tol).matrix;
        inputs = std::move(pick.inputs);
        inputs.set("u", opt.u);
    } else {
        throw UsageError("schatten needs --matrix <file> or --w/--v with --u");
    }
    auto r = schatten_norm(m, opt.p);

    Node rep = base_report("schatten");
    inputs.set("p", opt.p);
    rep.set("inputs", std::move(inputs));
    rep.set("tolerances", tolerances_node(tol));
    Node results = Node::object();
    results.set("rows", m.rows());
    results.set("cols", m.cols());
    results.set("value", r.value);
    rep.set("results", std::move(results));
    rep.set("residuals", Node::object());
    rep.set("verdict", "computed");
    emit_report(rep, {opt.output, opt.format}, out);
    return 0;
}

int cmd_battery(const Options& opt, const TolerancePolicy& tol, std::ostream& out,
                std::ostream& err) {
    if (opt.list) {
        Node rep = base_report("battery");
        Node inputs = Node::object();
        inputs.set("list", true);
        rep.set("inputs", std::move(inputs));
        rep.set("tolerances", tolerances_node(tol));
        Node results = Node::object();
        Node arr = Node::array();
        for (const BatteryDef& def : kBatteries) {
            Node entry = Node::object();
            entry.set("name", def.name);
            entry.set("statement", def.statement);
            arr.push(std::move(entry));
        }
        results.set("batteries", std::move(arr));
        rep.set("results", std::move(results));
        rep.set("residuals", Node::object());
        rep.set("verdict", "list");
        emit_report(rep, {opt.output, opt.format}, out);
        return 0;
    }
    if (opt.theorem.empty()) throw UsageError("battery needs --theorem <name|all> or --list");

    std::vector<const BatteryDef*> selected;
    if (opt.theorem == "all") {
        for (const BatteryDef& def : kBatteries) selected.push_back(&def);
    } else {
        const BatteryDef* def = find_battery(opt.theorem);
        if (!def) {
            std::string names;
            for (const BatteryDef& d : kBatteries) {
                if (!names.empty()) names += ", ";
                names += d.name;
            }
            throw UsageError("unknown battery '" + opt.theorem + "' (available: " + names +
                             ", all)");
        }
        selected.push_back(def);
    }

    std::optional<GeneratedInstance> supplied;
    if (!opt.spec.empty()) {
        if (opt.theorem == "all") throw UsageError("--spec needs a single named battery");
        if (opt.sweep != 1) throw UsageError("--spec runs one instance; drop --sweep");
        supplied = resolve_family(opt.spec, tol);
    }
    const bool u_given = opt.u != "identity";
    if (u_given && !supplied) throw UsageError("battery --u only applies together with --spec");

    BatteryCtx ctx;
    ctx.tol = tol;
    if (supplied) ctx.instance = &*supplied;
    if (u_given) ctx.u_arg = &opt.u;

    if (opt.sweep < 1) throw UsageError("--sweep must be at least 1");
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < opt.sweep; ++k) seeds.push_back(opt.seed + static_cast<std::uint64_t>(k));

    // One task per seed; assembly below is by ascending seed regardless of
    // completion order.
    auto run_seed = [&](std::uint64_t seed) {
        std::vector<BatteryOutcome> outcomes;
        outcomes.reserve(selected.size());
        for (const BatteryDef* def : selected) {
            try {
                outcomes.push_back(def->fn(seed, ctx));
            } catch (const UsageError&) {
                throw;
            } catch (const std::exception& e) {
                BatteryOutcome failed{def->name, seed, false};
                failed.details.set("error", e.what());
                outcomes.push_back(std::move(failed));
            }
        }
        return outcomes;
    };

    std::vector<std::vector<BatteryOutcome>> by_seed(seeds.size());
    if (seeds.size() == 1) {
        by_seed[0] = run_seed(seeds[0]);
    } else {
        const std::size_t lanes = std::max<std::size_t>(1, std::thread::hardware_concurrency());
        for (std::size_t base = 0; base < seeds.size(); base += lanes) {
            std::vector<std::future<std::vector<BatteryOutcome>>> futures;
            const std::size_t stop = std::min(base + lanes, seeds.size());
            for (std::size_t k = base; k < stop; ++k)
                futures.push_back(
                    std::async(std::launch::async, run_seed, seeds[k]));
            for (std::size_t k = base; k < stop; ++k) by_seed[k] = futures[k - base].get();
        }
    }

    Node rep = base_report("battery");
    Node inputs = Node::object();
    inputs.set("theorem", opt.theorem);
    if (supplied) inputs.set("spec", opt.spec);
    if (u_given) inputs.set("u", opt.u);
    inputs.set("seed", opt.seed);
    inputs.set("sweep", opt.sweep);
    rep.set("inputs", std::move(inputs));
    rep.set("tolerances", tolerances_node(tol));

    Node arr = Node::array();
    std::vector<std::string> failing;
    int total = 0, passed = 0;
    for (const auto& outcomes : by_seed) {
        for (const BatteryOutcome& o : outcomes) {
            Node entry = Node::object();
            entry.set("name", o.name);
            entry.set("seed", o.seed);
            entry.set("pass", o.pass);
            entry.set("details", o.details);
            arr.push(std::move(entry));
            ++total;
            if (o.pass) {
                ++passed;
            } else if (std::find(failing.begin(), failing.end(), o.name) == failing.end()) {
                failing.push_back(o.name);
            }
            err << "battery " << o.name << " seed " << o.seed << ": "
                << (o.pass ? "pass" : "FAIL") << '\n';
        }
    }
    Node results = Node::object();
    results.set("trials", total);
    results.set("passed", passed);
    results.set("batteries", std::move(arr));
    rep.set("results", std::move(results));
    rep.set("residuals", Node::object());
    std::string verdict = "pass";
    if (!failing.empty()) {
        verdict = "fail:";
        for (std::size_t k = 0; k < failing.size(); ++k) {
            if (k) verdict += ",";
            verdict += failing[k];
        }
    }
    rep.set("verdict", verdict);
    emit_report(rep, {opt.output, opt.format}, out);
    return failing.empty() ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"finite fusion frame Gram toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol-file", opt.tol_file, "JSON file overriding tolerance fields");
        sub->add_option("--output", opt.output, "write the report here instead of stdout");
        sub->add_option("--format", opt.format, "report format: json or text")
            ->check(CLI::IsMember({"json", "text"}));
    };
    auto add_pair = [&](CLI::App* sub) {
        sub->add_option("--spec", opt.spec, "inline instance spec kind:seed=..,n=..,dims=..");
        sub->add_option("--w", opt.w, "first family: file or inline spec");
        sub->add_option("--v", opt.v, "second family: file or inline spec (default: first)");
    };

    CLI::App* c_classify = app.add_subcommand("classify", "frame properties of one family");
    add_common(c_classify);
    c_classify->add_option("--spec", opt.spec, "inline instance spec");
    c_classify->add_option("--w", opt.w, "family file or inline spec");

    CLI::App* c_gram = app.add_subcommand("gram", "assemble a cross Gram block matrix");
    add_common(c_gram);
    add_pair(c_gram);
    c_gram->add_option("--u", opt.u, "ambient operator (identity, file, or draw spec)");
    c_gram->add_option("--matrix-out", opt.matrix_out, "write the assembled matrix here");

    CLI::App* c_invert = app.add_subcommand("invert", "closed-form Gram inverse");
    add_common(c_invert);
    add_pair(c_invert);
    c_invert->add_option("--u", opt.u, "ambient operator");
    c_invert->add_option("--mode", opt.mode, "inverse route: ww, dual_vw, wv");
    c_invert->add_option("--matrix-out", opt.matrix_out, "write the inverse matrix here");

    CLI::App* c_pinv = app.add_subcommand("pinv", "pseudo-inverse closed form and conditions");
    add_common(c_pinv);
    add_pair(c_pinv);
    c_pinv->add_option("--u", opt.u, "ambient operator");
    c_pinv->add_option("--variant", opt.variant, "dual_vw or ww");

    CLI::App* c_reconstruct =
        app.add_subcommand("reconstruct", "recover the operator from its Gram");
    add_common(c_reconstruct);
    add_pair(c_reconstruct);
    c_reconstruct->add_option("--u", opt.u, "ambient operator the Gram is built from");

    CLI::App* c_duality = app.add_subcommand("duality", "duality defect between two families");
    add_common(c_duality);
    add_pair(c_duality);

    CLI::App* c_stability = app.add_subcommand("stability", "perturbation bound check");
    add_common(c_stability);
    c_stability->add_option("--spec", opt.spec, "perturbation_pair inline spec");
    c_stability->add_option("--w", opt.w, "reference family file/spec");
    c_stability->add_option("--v", opt.v, "comparison family (defaults to --w)");
    c_stability->add_option("--z", opt.z, "perturbed family file/spec");
    c_stability->add_option("--u1", opt.u1, "reference operator");
    c_stability->add_option("--u2", opt.u2, "perturbed operator");
    c_stability->add_option("--lambda1", opt.lambda1, "relative term against the perturbed side");
    c_stability->add_option("--lambda2", opt.lambda2, "relative term against the reference side");
    c_stability->add_option("--epsilon", opt.epsilon,
                            "absolute comparison term (default: measured exactly)");
    c_stability->add_option("--probe-seed", opt.probe_seed, "seed for inequality probe vectors");
    c_stability->add_flag("--corollary", opt.corollary, "identity-reference specialization");
    c_stability->add_option("--mu", opt.mu, "operator gap bound for --corollary");

    CLI::App* c_battery = app.add_subcommand("battery", "run theorem check batteries");
    add_common(c_battery);
    c_battery->add_option("--theorem", opt.theorem, "battery name or 'all'");
    c_battery->add_option("--spec", opt.spec, "run one battery on this instance");
    c_battery->add_option("--u", opt.u, "operator override for instance mode");
    c_battery->add_option("--seed", opt.seed, "base seed (default 1)");
    c_battery->add_option("--sweep", opt.sweep, "number of consecutive seeds to run");
    c_battery->add_flag("--list", opt.list, "list battery names and their statements");

    CLI::App* c_generate = app.add_subcommand("generate", "write certified instance files");
    c_generate->add_option("--tol-file", opt.tol_file, "JSON file overriding tolerance fields");
    c_generate->add_option("--format", opt.format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    c_generate->add_option("--spec", opt.spec, "instance spec to realize");
    c_generate->add_option("--output", opt.output, "family file to write");
    c_generate->add_option("--output2", opt.output2, "second file for pair-producing kinds");

    CLI::App* c_schatten = app.add_subcommand("schatten", "Schatten p-norm of a matrix or Gram");
    add_common(c_schatten);
    c_schatten->add_option("--matrix", opt.matrix_file, "matrix file");
    c_schatten->add_option("--w", opt.w, "first family (builds the Gram instead)");
    c_schatten->add_option("--v", opt.v, "second family");
    c_schatten->add_option("--u", opt.u, "ambient operator for the Gram");
    c_schatten->add_option("--p", opt.p, "exponent, inf for the operator norm");

    try {
        std::vector<const char*> argv;
        argv.push_back("ffgram");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        for (const CLI::App* sub : app.get_subcommands()) {
            out << sub->help();
            return 0;
        }
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        TolerancePolicy tol = load_tolerances(opt.tol_file);
        if (app.got_subcommand(c_classify)) return cmd_classify(opt, tol, out);
        if (app.got_subcommand(c_gram)) return cmd_gram(opt, tol, out);
        if (app.got_subcommand(c_invert)) return cmd_invert(opt, tol, out);
        if (app.got_subcommand(c_pinv)) return cmd_pinv(opt, tol, out);
        if (app.got_subcommand(c_reconstruct)) return cmd_reconstruct(opt, tol, out);
        if (app.got_subcommand(c_duality)) return cmd_duality(opt, tol, out);
        if (app.got_subcommand(c_stability)) return cmd_stability(opt, c_stability, tol, out);
        if (app.got_subcommand(c_battery)) return cmd_battery(opt, tol, out, err);
        if (app.got_subcommand(c_generate)) return cmd_generate(opt, tol, out);
        if (app.got_subcommand(c_schatten)) return cmd_schatten(opt, tol, out);
        err << "usage error: no command selected\n";
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "input error: " << e.what();
        if (e.line > 0) err << " (line " << e.line << ", column " << e.column << ")";
        err << '\n';
        return 2;
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace ffgram::cli
