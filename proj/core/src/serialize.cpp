#include "ffgram/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ffgram {

std::string format_double(double x) {
    if (x == 0.0) return "0"; // JSON readers drop the sign of -0; canonicalize
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

using nlohmann::json;

void append_complex(std::string& out, const Complex& z) {
    out += '[';
    out += format_double(z.real());
    out += ',';
    out += format_double(z.imag());
    out += ']';
}

// Matrix body without the top-level format/type keys, reused inside families.
void append_matrix_body(std::string& out, const Mat& m) {
    out += "{\"rows\":" + std::to_string(m.rows());
    out += ",\"cols\":" + std::to_string(m.cols());
    out += ",\"data\":[";
    bool first = true;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (!first) out += ',';
            first = false;
            append_complex(out, m(r, c));
        }
    out += "]}";
}

// Maps a byte offset from the json parser into 1-based line/column.
ParseError parse_error_at(const std::string& text, std::size_t byte, const char* what) {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return ParseError(what, line, column);
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw parse_error_at(text, byte, e.what());
    }
}

double require_finite(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ParseError(std::string(what) + " must be finite");
    return x;
}

Eigen::Index require_count(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError(std::string(what) + " must be a nonnegative integer");
    return static_cast<Eigen::Index>(j.get<long long>());
}

Mat matrix_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("matrix must be an object");
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ParseError("matrix needs rows, cols and data");
    const Eigen::Index rows = require_count(j.at("rows"), "rows");
    const Eigen::Index cols = require_count(j.at("cols"), "cols");
    const json& data = j.at("data");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ParseError("matrix data length must equal rows*cols");
    Mat m(rows, cols);
    Eigen::Index idx = 0;
    for (const json& entry : data) {
        if (!entry.is_array() || entry.size() != 2)
            throw ParseError("complex entries must be [re, im] pairs");
        const double re = require_finite(entry.at(0), "entry");
        const double im = require_finite(entry.at(1), "entry");
        m(idx / cols, idx % cols) = Complex(re, im);
        ++idx;
    }
    return m;
}

void require_header(const json& j, const char* type) {
    if (!j.is_object()) throw ParseError("document must be an object");
    if (!j.contains("format") || j.at("format") != 1)
        throw ParseError("document needs \"format\": 1");
    if (!j.contains("type") || j.at("type") != type)
        throw ParseError(std::string("document type must be \"") + type + "\"");
}

} // namespace

std::string serialize(const Mat& m) {
    std::string out = "{\"format\":1,\"type\":\"matrix\",";
    std::string body;
    append_matrix_body(body, m);
    out += body.substr(1); // splice the shared body after the header keys
    return out;
}

std::string serialize(const WeightedFamily& f) {
    std::string out = "{\"format\":1,\"type\":\"family\",\"ambient\":";
    out += std::to_string(f.ambient);
    out += ",\"weights\":[";
    for (std::size_t i = 0; i < f.weights.size(); ++i) {
        if (i) out += ',';
        out += format_double(f.weights[i]);
    }
    out += "],\"subspaces\":[";
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (i) out += ',';
        append_matrix_body(out, f.subspaces[i].basis);
    }
    out += "]}";
    return out;
}

Mat parse_matrix(const std::string& text) {
    json j = parse_document(text);
    require_header(j, "matrix");
    return matrix_from_json(j);
}

WeightedFamily parse_family(const std::string& text, const TolerancePolicy& tol) {
    json j = parse_document(text);
    require_header(j, "family");
    if (!j.contains("ambient") || !j.contains("weights") || !j.contains("subspaces"))
        throw ParseError("family needs ambient, weights and subspaces");
    const Eigen::Index ambient = require_count(j.at("ambient"), "ambient");
    const json& jw = j.at("weights");
    const json& js = j.at("subspaces");
    if (!jw.is_array() || !js.is_array()) throw ParseError("weights and subspaces must be arrays");
    if (jw.size() != js.size())
        throw ParseError("weights and subspaces must have equal lengths");
    if (jw.empty()) throw ParseError("family must contain at least one subspace");

    std::vector<double> weights;
    weights.reserve(jw.size());
    for (const json& w : jw) {
        const double wi = require_finite(w, "weight");
        if (!(wi > 0.0)) throw ParseError("weights must be positive");
        weights.push_back(wi);
    }
    std::vector<Subspace> parts;
    parts.reserve(js.size());
    for (const json& sub : js) {
        Mat basis = matrix_from_json(sub);
        if (basis.rows() != ambient)
            throw ParseError("subspace basis rows must equal the ambient dimension");
        if (basis.cols() < 1) throw ParseError("subspace basis needs at least one column");
        const Mat gram = basis.adjoint() * basis;
        if (frobenius(gram - Mat::Identity(basis.cols(), basis.cols())) > tol.identity_abs)
            throw ParseError("subspace basis columns are not orthonormal");
        parts.push_back(Subspace{ambient, std::move(basis)});
    }
    return WeightedFamily(std::move(parts), std::move(weights));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

} // namespace ffgram
