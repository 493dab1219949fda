#ifndef CRIBSE_TESTS_ORACLES_HPP
#define CRIBSE_TESTS_ORACLES_HPP

#include <complex>
#include <functional>

#include "cribse/types.hpp"

// Reference values computed with an independent implementation (NumPy /
// mpmath); frozen here so regressions surface as value drift.
namespace oracles {

// log density of the normalized source at s = 0.3 + 0.4i, alpha = 0.5,
// gamma = 0.5.
inline constexpr double kLogPdfHalf = -1.41224344800955;

// Score powers kappa-bar at reference shapes.
inline constexpr double kKbarGaussianCircular = 1.0;                 // (1, 0)
inline constexpr double kKbarSubGaussian = 1.273239544735163;        // (2, 0) = 4/pi
inline constexpr double kKbarSuperGaussian = 8.75;                   // (0.25, 0)
inline constexpr double kKbarGaussianNoncircular = 1.5625;           // (1, 0.6)

// Stationary closed form at d=5, N=5000, alpha=2, gamma=0, tau=1:
// (d-1) / (N (4/pi - 1)).
inline constexpr double kClosedFormReference = 2.927833893060389e-3;

// Bounds at d=5, N=5000, T=10, linear schedule, identity background.
inline constexpr double kBlendGaussianDynamic = 4.0411239999128275e-4;   // (1, 0, tau=0)
inline constexpr double kBlendNoncircDynamic = 2.4937806823996795e-4;    // (1, 0.5, tau=0)
inline constexpr double kFreeBlockNoncircDynamic = 6.512890094979652e-4; // (1, 0.5, tau=0)
inline constexpr double kBlockwiseNoncircDynamic = 2.4e-2;               // (1, 0.5, tau=0)

// Bound at the estimator-attainment instance d=3, N=20000, T=10,
// alpha=0.25, gamma=0, tau=1; equals 2/155000.
inline constexpr double kAttainmentBound = 1.2903225806451613e-5;

inline double rel_err(double got, double want) {
  const double denom = std::abs(want) > 0 ? std::abs(want) : 1.0;
  return std::abs(got - want) / denom;
}

// Central finite difference of a real function along the real and imaginary
// parts of one complex coordinate, combined into the conjugate-coordinate
// Wirtinger derivative (d/dz* = (d/dx + i d/dy) / 2).
inline cribse::Complex wirtinger_fd(const std::function<double(cribse::Complex)>& f,
                                    cribse::Complex at, double step = 1e-6) {
  const cribse::Complex dx(step, 0.0), dy(0.0, step);
  const double fx = (f(at + dx) - f(at - dx)) / (2.0 * step);
  const double fy = (f(at + dy) - f(at - dy)) / (2.0 * step);
  return {0.5 * fx, 0.5 * fy};
}

}  // namespace oracles

#endif
