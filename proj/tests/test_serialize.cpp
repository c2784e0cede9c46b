#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "ffgram/serialize.hpp"

using namespace ffgram;

#ifndef FFGRAM_TEST_DATA_DIR
#error "test data directory not configured"
#endif

namespace {

std::string data_file(const char* name) {
    return std::string(FFGRAM_TEST_DATA_DIR) + "/" + name;
}

WeightedFamily sample_family() {
    Mat a(3, 1), b(3, 2);
    a << Complex(1, 0), Complex(1, 0), Complex(0, 1);
    b << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0.25, -0.5),
        Complex(0, 0.125), Complex(-1, 0);
    return WeightedFamily({make_subspace(a), make_subspace(b)}, {0.75, 2.0});
}

} // namespace

TEST_CASE("17-digit double printing") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1e300) == "1.0000000000000001e+300");
    for (double x : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-17, -7.25e5}) {
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("matrix text matches the checked-in golden bytes") {
    const std::string golden = read_text_file(data_file("identity2x2.json"));
    CHECK(serialize(Mat(Mat::Identity(2, 2))) == golden);
    Mat parsed = parse_matrix(golden);
    CHECK(frobenius(parsed - Mat::Identity(2, 2)) == 0.0);
}

TEST_CASE("family text survives a parse round trip byte for byte") {
    WeightedFamily f = sample_family();
    const std::string text = serialize(f);
    WeightedFamily back = parse_family(text);
    CHECK(serialize(back) == text);
    CHECK(back.ambient == f.ambient);
    CHECK(back.weights == f.weights);
}

TEST_CASE("malformed text reports where it broke") {
    try {
        parse_matrix("{\n \"format\": 1,\n oops");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.column >= 1);
    }
}

TEST_CASE("document headers are enforced") {
    CHECK_THROWS_AS(parse_matrix("[1,2]"), ParseError);
    CHECK_THROWS_AS(parse_matrix("{\"type\":\"matrix\"}"), ParseError);
    CHECK_THROWS_AS(parse_family(serialize(Mat(Mat::Identity(2, 2)))), ParseError);
    CHECK_THROWS_AS(
        parse_matrix(R"({"format":2,"type":"matrix","rows":1,"cols":1,"data":[[1,0]]})"),
        ParseError);
}

TEST_CASE("matrix bodies are checked for shape and entry form") {
    CHECK_THROWS_AS(
        parse_matrix(R"({"format":1,"type":"matrix","rows":2,"cols":2,"data":[[1,0]]})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_matrix(R"({"format":1,"type":"matrix","rows":1,"cols":1,"data":[[1]]})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_matrix(R"({"format":1,"type":"matrix","rows":-1,"cols":1,"data":[]})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_matrix(R"({"format":1,"type":"matrix","rows":1,"cols":1,"data":[[1,"x"]]})"),
        ParseError);
}

TEST_CASE("family bodies are validated before construction") {
    const char* no_unit = R"({"format":1,"type":"family","ambient":2,"weights":[1],)"
                          R"("subspaces":[{"rows":2,"cols":1,"data":[[2,0],[0,0]]}]})";
    CHECK_THROWS_WITH_AS(parse_family(no_unit),
                         "subspace basis columns are not orthonormal", ParseError);

    const char* bad_weight = R"({"format":1,"type":"family","ambient":2,"weights":[0],)"
                             R"("subspaces":[{"rows":2,"cols":1,"data":[[1,0],[0,0]]}]})";
    CHECK_THROWS_WITH_AS(parse_family(bad_weight), "weights must be positive", ParseError);

    const char* mismatch = R"({"format":1,"type":"family","ambient":2,"weights":[1,1],)"
                           R"("subspaces":[{"rows":2,"cols":1,"data":[[1,0],[0,0]]}]})";
    CHECK_THROWS_AS(parse_family(mismatch), ParseError);

    const char* wrong_rows = R"({"format":1,"type":"family","ambient":3,"weights":[1],)"
                             R"("subspaces":[{"rows":2,"cols":1,"data":[[1,0],[0,0]]}]})";
    CHECK_THROWS_AS(parse_family(wrong_rows), ParseError);
}

TEST_CASE("text files round trip and report open failures") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "ffgram_serialize_roundtrip.json";
    const std::string text = serialize(sample_family());
    write_text_file(path.string(), text);
    CHECK(read_text_file(path.string()) == text);
    fs::remove(path);
    CHECK_THROWS_AS(read_text_file(path.string()), Error);
    CHECK_THROWS_AS(write_text_file((path / "nested" / "x.json").string(), text), Error);
}
