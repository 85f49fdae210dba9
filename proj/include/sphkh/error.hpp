#pragma once

#include <stdexcept>
#include <string>

namespace sphkh {

/// Evaluation point coincides with an atom, node or charge.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series would not converge for the requested radius.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A partition/scattering pair violates the one-point-per-region hypothesis.
class MatchingError : public std::runtime_error {
 public:
  MatchingError(const std::string& what, std::size_t region)
      : std::runtime_error(what), region_(region) {}
  std::size_t region() const noexcept { return region_; }

 private:
  std::size_t region_;
};

/// Malformed or inconsistent input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sphkh
