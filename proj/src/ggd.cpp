#include "cribse/ggd.hpp"

#include <cmath>
#include <numbers>

namespace cribse::ggd {

GgdParams::GgdParams(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParams("alpha must be finite and positive");
  if (!(gamma >= 0.0) || gamma >= 1.0)
    throw InvalidParams("gamma must lie in [0, 1); gamma = 1 is degenerate");
  rho_ = std::exp(std::lgamma(2.0 / alpha) - std::lgamma(1.0 / alpha));
}

namespace {

// rho * (x^2/(1+gamma) + y^2/(1-gamma)): the exponent base as a
// non-negative real.
double radial_base(Complex s, const GgdParams& p) {
  const double x = s.real(), y = s.imag();
  return p.rho() * (x * x / (1.0 + p.gamma()) + y * y / (1.0 - p.gamma()));
}

}  // namespace

double log_pdf(Complex s, const GgdParams& p) {
  const double a = p.alpha();
  const double e = radial_base(s, p);
  return std::log(a * p.rho()) - std::pow(e, a) - std::log(std::numbers::pi) -
         std::lgamma(1.0 / a) - 0.5 * std::log1p(-p.gamma() * p.gamma());
}

Complex score(Complex s, const GgdParams& p) {
  const double a = p.alpha();
  const double g = p.gamma();
  if (a < 1.0 && std::abs(s) < 1e-300)
    throw ScoreSingularity("score singular at the origin for alpha < 1");
  const double e = radial_base(s, p);
  const double ep = (a == 1.0) ? 1.0 : std::pow(e, a - 1.0);
  return a * ep * p.rho() * (g * s - std::conj(s)) / (g * g - 1.0);
}

double kappa_bar(const GgdParams& p) {
  const double a = p.alpha();
  const double g = p.gamma();
  return std::exp(2.0 * std::log(a) + std::lgamma(2.0 / a) -
                  2.0 * std::lgamma(1.0 / a)) /
         (1.0 - g * g);
}

Complex sample_one(const GgdParams& p, RandomStream& rng) {
  const double a = p.alpha();
  const double u = rng.gamma(1.0 / a);
  const double r = std::sqrt(std::pow(u, 1.0 / a) / p.rho());
  const double th = 2.0 * std::numbers::pi * rng.uniform();
  return Complex(std::sqrt(1.0 + p.gamma()) * r * std::cos(th),
                 std::sqrt(1.0 - p.gamma()) * r * std::sin(th));
}

std::vector<Complex> sample(const GgdParams& p, int count, RandomStream& rng) {
  if (count < 1) throw InvalidParams("sample count must be >= 1");
  std::vector<Complex> out(static_cast<std::size_t>(count));
  for (auto& s : out) s = sample_one(p, rng);
  return out;
}

}  // namespace cribse::ggd
