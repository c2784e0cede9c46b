#ifndef FFGRAM_ERRORS_HPP
#define FFGRAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ffgram {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape disagreements: ambient dimensions, block counts, vector lengths, tile indices.
struct DimensionError : Error {
    using Error::Error;
};

// Input matrix is numerically zero where a nonzero one is required.
struct AllZeroError : Error {
    using Error::Error;
};

// ||m - m^*||_F exceeded the tolerance where a Hermitian matrix was required.
struct NotHermitianError : Error {
    using Error::Error;
};

// Family fails the lower frame inequality (relative to its upper bound).
struct NotAFrameError : Error {
    using Error::Error;
};

// Candidate dual fails the duality identity beyond tolerance.
struct NotDualError : Error {
    using Error::Error;
};

// Supplied local spanning sets do not span the family's subspaces.
struct LocalBasisError : Error {
    using Error::Error;
};

// A stated theorem hypothesis does not hold for the given inputs.
struct HypothesisError : Error {
    using Error::Error;
};

// Supplied perturbation constants fail the perturbation inequality on probes.
struct PerturbationBoundError : HypothesisError {
    using HypothesisError::HypothesisError;
};

// Schatten exponent outside [1, inf].
struct BadExponentError : Error {
    using Error::Error;
};

// Instance generator could not certify the requested kind within the retry budget.
struct GenerationError : Error {
    using Error::Error;
};

// Malformed interchange document. line/column are 1-based; 0 means unknown.
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& what, int line_, int column_)
        : Error(what), line(line_), column(column_) {}
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace ffgram

#endif
