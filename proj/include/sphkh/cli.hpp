#pragma once

// Command-line front end. Exit codes: 0 success, 1 bound violation, residual
// above tolerance or failed gate, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphkh {

enum class Command { VerifyIdentity, Bound, Corollary3, Thm4a, Thm4b, Partition, MeshNorm, Scaling };

std::string command_name(Command c);

struct RunConfig {
  Command command = Command::VerifyIdentity;
  int d = 2;
  double r0 = 0.3;
  double r = 0.7;
  /// Hoelder exponent; infinity allowed.
  double p = 2.0;
  /// Acceptance tolerance on the identity's relative residual.
  double tol = 1e-8;
  /// Tail tolerance for truncating field expansions.
  double truncation_tol = 1e-12;
  std::uint64_t seed = 1;

  std::optional<std::filesystem::path> sigma;
  std::optional<std::filesystem::path> field;
  std::optional<std::filesystem::path> points;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> table;
  std::optional<std::filesystem::path> profile;
  std::optional<std::filesystem::path> expansion;

  /// Shell quadrature degree; 0 picks a default for the command and d.
  int quad_degree = 0;
  /// Degree of the surrogate for the normalized surface measure.
  int mu_degree = 240;
  std::size_t n = 256;
  std::vector<std::size_t> n_values{64, 256, 1024, 4096};
  std::size_t random_atoms = 50;
  std::size_t random_charges = 3;
  std::size_t random_points = 0;
  /// Defaults to 0.8 r0.
  std::optional<double> charge_radius;
  std::optional<double> epsilon;
  double epsilon_factor = 2.0;
  int radii = 8;
  std::size_t resolution = 0;
};

/// Carries the text to print and the exit code (0 for --help).
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code) : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Validates 0 < r0 < r < 1, d >= 2, tol > 0, p >= 1.
RunConfig parse_args(int argc, const char* const* argv);

/// Executes the command; JSON goes to cfg.output or, absent that, to out.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sphkh
