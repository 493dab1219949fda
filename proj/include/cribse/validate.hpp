#ifndef CRIBSE_VALIDATE_HPP
#define CRIBSE_VALIDATE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cribse::validate {

inline constexpr std::uint64_t kDefaultSeed = 20260823;

/// One measured quantity against its acceptance bound.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  bool pass = false;
  std::vector<Check> checks;
};

const std::vector<std::string>& suite_names();

/// Dispatch by name; throws InvalidParams for unknown suites.
SuiteReport run_suite(const std::string& name, std::uint64_t seed = kDefaultSeed);

/// Machine-readable report; byte-deterministic for a fixed seed.
std::string report_json(const SuiteReport& report);

/// Analytic per-block information matrix against the Monte Carlo covariance
/// of the per-sample gradient triple at the equivariant point; 1e5 samples,
/// six (alpha, gamma) pairs, relative Frobenius error below 5%.
SuiteReport fim_oracle_suite(std::uint64_t seed = kDefaultSeed);

/// Source-sampler second moments and score power at 1e6 draws. rho_scale
/// rescales the emitted samples as a tampered radial normalization would —
/// the negative-control hook; 1.0 is the untouched library path.
SuiteReport sampler_moments_suite(std::uint64_t seed = kDefaultSeed,
                                  double rho_scale = 1.0);

/// Numeric bounds against the stationary closed form at random settings.
SuiteReport closed_form_suite(std::uint64_t seed = kDefaultSeed);

/// T = 2 blend/free-block coincidence and the T = 1 static reduction.
SuiteReport coincidence_suite(std::uint64_t seed = kDefaultSeed);

/// Bound ordering (blend <= free-block <= blockwise-static) over the three
/// chart presets; deterministic, no randomness involved.
SuiteReport ordering_suite();

/// Analytic likelihood gradients against central finite differences at
/// random parameter points on small random datasets.
SuiteReport gradient_suite(std::uint64_t seed = kDefaultSeed);

}  // namespace cribse::validate

#endif
