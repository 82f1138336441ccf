#pragma once

#include <stdexcept>
#include <string>

namespace vtp {

// Shape or wiring violations: mismatched dimensions, invalid operands.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or invalid numeric domains.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files: missing columns, bad headers, bad records.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible artifacts: wrong model variant, mismatched bin structure.
class VariantError : public std::runtime_error {
 public:
  explicit VariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vtp
