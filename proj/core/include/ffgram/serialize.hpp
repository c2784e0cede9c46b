#ifndef FFGRAM_SERIALIZE_HPP
#define FFGRAM_SERIALIZE_HPP

#include <string>

#include "ffgram/fusion.hpp"

namespace ffgram {

// Canonical interchange text: UTF-8 JSON with a fixed key order, doubles
// printed with 17 significant digits so round-trips are bit-exact, complex
// scalars as [re, im] pairs, matrices row-major. Every document carries
// "format": 1 at top level.
//
//   matrix  {"format":1,"type":"matrix","rows":r,"cols":c,"data":[[re,im],...]}
//   family  {"format":1,"type":"family","ambient":n,"weights":[...],
//            "subspaces":[matrix-without-format,...]}
//
// Subspace entries inside a family are matrix objects without their own
// "format"/"type" keys.
std::string serialize(const Mat& m);
std::string serialize(const WeightedFamily& f);

// Parsers accept exactly the documents above; anything else raises ParseError
// carrying a 1-based line/column when the underlying text is malformed.
Mat parse_matrix(const std::string& text);
WeightedFamily parse_family(const std::string& text, const TolerancePolicy& tol = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// 17-significant-digit formatting used across all emitters (reports included)
// so equal values always print to equal bytes.
std::string format_double(double x);

} // namespace ffgram

#endif
