#pragma once

#include <stdexcept>
#include <string>

namespace crystalwalk {

// A model parameter is outside its admissible range (probability outside
// [0,1], alpha on the boundary, non-positive geometry, ...).
class RangeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A horizontal probability row violates its normalization constraint.
// Remembers which row and by how much, so callers can report precisely.
class NormalizationError : public std::invalid_argument {
public:
    NormalizationError(std::string row, double residual)
        : std::invalid_argument("row " + row + " violates normalization, residual " +
                                std::to_string(residual)),
          row_(std::move(row)),
          residual_(residual) {}

    const std::string& row() const noexcept { return row_; }
    double residual() const noexcept { return residual_; }

private:
    std::string row_;
    double residual_;
};

// Structurally inconsistent lattice state or an inadmissible move
// (e.g. a vertical jump from a graphite site without vertical neighbors).
class LatticeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed run configuration (unknown key, bad type, missing field).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace crystalwalk
