#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffgram/cli_app.hpp"
#include "ffgram/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = ffgram::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Scratch directory per test binary run; contents are overwritten freely.
fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "ffgram_cli_tests";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("classify emits the report keys in their fixed order") {
    CliResult r = run_cli({"classify", "--spec", "onb:seed=3,n=4,dims=2,2"});
    REQUIRE(r.code == 0);
    const std::vector<std::string> keys = {
        "\"report_version\"", "\"command\"", "\"inputs\"",   "\"tolerances\"",
        "\"results\"",        "\"residuals\"", "\"verdict\"",
    };
    std::string::size_type last = 0;
    for (const std::string& key : keys) {
        const auto pos = r.out.find(key);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= last);
        last = pos;
    }
    CHECK(r.out.find("\"verdict\":\"orthonormal_basis\"") != std::string::npos);

    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("report_version") == 1);
    CHECK(doc.at("results").at("classification").at("is_riesz_basis") == true);
}

TEST_CASE("usage and input problems exit with code 2") {
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"classify"}).code == 2);
    CHECK(run_cli({"battery", "--theorem", "nope"}).code == 2);
    CHECK(run_cli({"gram", "--spec", "riesz:seed=1,n=4,dims=2,2", "--u", "banana"}).code == 2);
    CHECK(run_cli({"classify", "--spec", "banana:seed=1,n=4,dims=2,2"}).code == 2);
    CHECK(run_cli({"classify", "--spec", "riesz:seed=1,n=4"}).code == 2);
    CHECK(run_cli({"battery", "--theorem", "inv", "--sweep", "0"}).code == 2);
    CHECK(run_cli({"battery", "--theorem", "all", "--spec", "riesz:seed=1,n=4,dims=2,2"}).code == 2);
    CHECK(run_cli({"battery", "--theorem", "inv", "--u", "zero"}).code == 2);

    const fs::path tolf = scratch_dir() / "bad_tol.json";
    ffgram::write_text_file(tolf.string(), R"({"no_such_knob": 1.0})");
    CliResult r = run_cli({"classify", "--spec", "onb:seed=3,n=4,dims=2,2", "--tol-file",
                           tolf.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("no_such_knob") != std::string::npos);
}

TEST_CASE("battery output is byte-stable across repeat runs") {
    const std::vector<std::string> args = {"battery", "--theorem", "onb_gram",
                                           "--seed",  "5",         "--sweep", "2"};
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"verdict\":\"pass\"") != std::string::npos);
}

TEST_CASE("battery --list names every battery with a statement") {
    CliResult r = run_cli({"battery", "--list"});
    REQUIRE(r.code == 0);
    for (const char* name : {"riesz_equiv", "inv", "inverse_formulas", "pinv", "norm_bounds",
                             "reconstruction", "oblique", "composition", "stability", "neumann",
                             "onb_gram", "weight_independence"})
        CHECK(r.out.find(std::string("\"name\":\"") + name + "\"") != std::string::npos);
}

TEST_CASE("generated families round trip through files and commands") {
    const fs::path dir = scratch_dir();
    const fs::path fam = dir / "onb.json";
    CliResult gen = run_cli({"generate", "--spec", "onb:seed=9,n=4,dims=2,2", "--output",
                             fam.string()});
    REQUIRE(gen.code == 0);
    CHECK(gen.out.find("\"verdict\":\"generated\"") != std::string::npos);

    CliResult cls = run_cli({"classify", "--w", fam.string()});
    REQUIRE(cls.code == 0);
    CHECK(cls.out.find("\"verdict\":\"orthonormal_basis\"") != std::string::npos);

    CliResult dual = run_cli({"duality", "--w", fam.string(), "--v", fam.string()});
    REQUIRE(dual.code == 0);
    CHECK(dual.out.find("\"verdict\":\"dual\"") != std::string::npos);
}

TEST_CASE("gram --matrix-out writes a parseable matrix document") {
    const fs::path out = scratch_dir() / "gram.json";
    CliResult r = run_cli({"gram", "--spec", "riesz:seed=4,n=4,dims=2,2", "--u",
                           "random_invertible:seed=4", "--matrix-out", out.string()});
    REQUIRE(r.code == 0);
    ffgram::Mat g = ffgram::parse_matrix(ffgram::read_text_file(out.string()));
    CHECK(g.rows() == 4);
    CHECK(g.cols() == 4);
}

TEST_CASE("a hostile tolerance file turns a true theorem false, exit 1") {
    const fs::path tolf = scratch_dir() / "harsh_tol.json";
    ffgram::write_text_file(tolf.string(), R"({"invert_rel": 0.5})");
    CliResult r = run_cli({"battery", "--theorem", "inv", "--seed", "1", "--tol-file",
                           tolf.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("\"verdict\":\"fail:inv\"") != std::string::npos);
}

TEST_CASE("--output redirects the report and leaves stdout empty") {
    const fs::path rep = scratch_dir() / "report.json";
    CliResult r = run_cli({"classify", "--spec", "onb:seed=3,n=4,dims=2,2", "--output",
                           rep.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    auto doc = nlohmann::json::parse(ffgram::read_text_file(rep.string()));
    CHECK(doc.at("command") == "classify");
}

TEST_CASE("text format renders dotted key paths") {
    CliResult r = run_cli({"classify", "--spec", "onb:seed=3,n=4,dims=2,2", "--format", "text"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("verdict = \"orthonormal_basis\"") != std::string::npos);
    CHECK(r.out.find("results.classification.is_orthonormal_basis = true") !=
          std::string::npos);
}

TEST_CASE("schatten on a matrix file matches the hand value") {
    const fs::path mf = scratch_dir() / "diag34.json";
    ffgram::Mat m = ffgram::Mat::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = 4.0;
    ffgram::write_text_file(mf.string(), ffgram::serialize(m));
    CliResult r = run_cli({"schatten", "--matrix", mf.string(), "--p", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"value\":7") != std::string::npos);
}

TEST_CASE("stability on a gentle generated pair certifies") {
    CliResult r = run_cli({"stability", "--spec",
                           "perturbation_pair:seed=3,n=4,dims=2,2,theta=1e-7"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"verdict\":\"certified\"") != std::string::npos);
    CHECK(r.out.find("\"purb_residual\"") != std::string::npos);
}

TEST_CASE("invert reports the spectrum data of the assembled gram") {
    CliResult r = run_cli({"invert", "--spec", "riesz:seed=4,n=4,dims=2,2", "--mode", "ww",
                           "--u", "identity"});
    REQUIRE(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("results").at("sigma_min").get<double>() > 0.0);
}

TEST_CASE("help text exits cleanly for the app and each subcommand") {
    CliResult top = run_cli({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("classify") != std::string::npos);
    CliResult sub = run_cli({"battery", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--theorem") != std::string::npos);
}
