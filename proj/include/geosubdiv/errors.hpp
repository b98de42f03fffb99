#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geosubdiv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A residue class of the mask does not sum to one.
class NotAffineInvariant : public Error {
public:
    NotAffineInvariant(std::int64_t residue, std::string sum)
        : Error("mask is not affine invariant: residue " + std::to_string(residue) +
                " coefficients sum to " + sum + " (expected 1)"),
          residue_(residue), sum_(std::move(sum)) {}

    std::int64_t residue() const { return residue_; }
    const std::string& sum() const { return sum_; }

private:
    std::int64_t residue_;
    std::string sum_;
};

class PolygonTooShort : public Error {
public:
    using Error::Error;
};

class ManifoldMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace geosubdiv
