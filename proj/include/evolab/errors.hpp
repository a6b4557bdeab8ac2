#pragma once

#include <stdexcept>
#include <string>

namespace evolab {

/// Input files or JSON specs that do not parse or fail cross-validation.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// No candidate seminorm yields a growth certificate.
class CertificationFailure : public std::runtime_error {
 public:
  explicit CertificationFailure(const std::string& what) : std::runtime_error(what) {}
};

/// The requested tolerance is unreachable within the series depth cap.
class DepthCapExceeded : public std::runtime_error {
 public:
  explicit DepthCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A posteriori check failed (non-invertible trajectory value, residual blowup,
/// imaginary residue). Signals numerical trouble, not a modelling error.
class NumericalBreakdown : public std::runtime_error {
 public:
  explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evolab
