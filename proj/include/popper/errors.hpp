#pragma once

#include <stdexcept>
#include <string>

namespace popper {

/// Invalid argument to a physics operation (non-positive width, bad normalization, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested measurement outcome has zero probability.
class ImpossibleOutcome : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Width inversion has no real solution (observed width below the diffraction floor).
class UnreachableWidth : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Width inversion gives a negative a^2: the slit alone is wider than the observed localization.
class SlitWiderThanLocalization : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Scenario or experiment configuration is inconsistent (missing lens, 2f - b1 <= 0, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The numerical grid cannot represent the requested computation.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditioning weight vanished; the aperture does not overlap the state.
class DegenerateConditioning : public ResolutionError {
 public:
  using ResolutionError::ResolutionError;
};

}  // namespace popper
