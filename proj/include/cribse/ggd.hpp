#ifndef CRIBSE_GGD_HPP
#define CRIBSE_GGD_HPP

#include <vector>

#include "cribse/errors.hpp"
#include "cribse/rng.hpp"
#include "cribse/types.hpp"

namespace cribse::ggd {

/// Shape and circularity of a normalized (zero-mean, unit-variance) complex
/// Generalized Gaussian source. alpha < 1 is super-Gaussian, alpha = 1
/// Gaussian, alpha > 1 sub-Gaussian; gamma = 0 is circular and gamma = 1 is
/// degenerate (rejected).
class GgdParams {
 public:
  GgdParams(double alpha, double gamma);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  /// Gamma(2/alpha) / Gamma(1/alpha); normalizes the radial law to unit
  /// variance.
  double rho() const { return rho_; }

 private:
  double alpha_;
  double gamma_;
  double rho_;
};

/// Log density at s. The exponent base gamma*s^2 + gamma*conj(s)^2 - 2*s*conj(s)
/// is a non-positive real; divided by gamma^2 - 1 it becomes the non-negative
/// real rho * (x^2/(1+gamma) + y^2/(1-gamma)), which is the branch under the
/// fractional power here and in the score.
double log_pdf(Complex s, const GgdParams& p);

/// Score phi(s, conj(s)) = -d log p / d s (Wirtinger derivative).
/// Throws ScoreSingularity for alpha < 1 when |s| < 1e-300.
Complex score(Complex s, const GgdParams& p);

/// alpha^2 Gamma(2/alpha) / ((1 - gamma^2) Gamma(1/alpha)^2); equals
/// E|phi|^2 for the normalized source and is >= 1, with equality exactly at
/// the circular Gaussian.
double kappa_bar(const GgdParams& p);

/// i.i.d. draws with E[s] = 0, E|s|^2 = 1, E[s^2] = gamma. Radial recipe:
/// u ~ Gamma(1/alpha), r = sqrt(u^(1/alpha)/rho), angle uniform, axes scaled
/// by sqrt(1 +/- gamma).
std::vector<Complex> sample(const GgdParams& p, int count, RandomStream& rng);

/// Single draw; same recipe as sample().
Complex sample_one(const GgdParams& p, RandomStream& rng);

}  // namespace cribse::ggd

#endif
