#ifndef CRIBSE_MLE_HPP
#define CRIBSE_MLE_HPP

#include <cstdint>
#include <vector>

#include "cribse/ggd.hpp"
#include "cribse/model.hpp"
#include "cribse/simulate.hpp"
#include "cribse/types.hpp"

namespace cribse::mle {

/// Free parameters of the constrained extractor: endpoint lower parts g1,
/// gT and the separator lower part h. The endpoint gains gamma are derived,
/// gamma_1 = 1 - h^H g1 and gamma_T = 1 - h^H gT, and must stay away from 0
/// (modulus >= 1e-8) for the likelihood to be evaluable.
struct ThetaCvx {
  CVector g1, gT, h;

  ThetaCvx() = default;
  ThetaCvx(CVector g1, CVector gT, CVector h);
  static ThetaCvx zero(int d);

  int dim() const { return static_cast<int>(h.size()) + 1; }  // sensors
  Complex gamma_first() const;
  Complex gamma_last() const;
  model::SeparatingVector separator() const;

  ThetaCvx& operator+=(const ThetaCvx& step);
  double norm() const;
};

inline constexpr double kGammaGuard = 1e-8;

/// Ascent controls. initial_step <= 0 selects the 1/N default; the
/// tolerance is compared against the gradient norm divided by the sample
/// count. Restarts draw independent initial points near theta = 0 from the
/// stream seeded here, and the best final log-likelihood wins.
struct FitOptions {
  int max_iters = 500;
  double initial_step = 0.0;
  double backtrack = 0.5;
  double tolerance = 1e-9;
  int restarts = 2;
  double init_scale = 0.01;
  std::uint64_t seed = 0x5EED0F17;

  void validate() const;
};

/// Log-likelihood of the constrained model on a dataset, up to additive
/// data-independent constants: per sample, the scaled-source log density of
/// w^H x, minus the Gaussian background quadratic form of B_t x, plus
/// (d-2) log |gamma_t|^2 from the demixing Jacobian. sigma and Cz are the
/// per-block nuisances (known in bound-validation runs).
double loglik(const ThetaCvx& theta, const simulate::Dataset& data,
              const ggd::GgdParams& source, const std::vector<double>& sigma,
              const std::vector<CMatrix>& Cz);

/// Wirtinger gradient with respect to (g1*, gT*, h*), in ThetaCvx shape.
ThetaCvx grad_loglik(const ThetaCvx& theta, const simulate::Dataset& data,
                     const ggd::GgdParams& source, const std::vector<double>& sigma,
                     const std::vector<CMatrix>& Cz);

struct FitResult {
  ThetaCvx theta;
  double loglik = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;  // per-sample at the final iterate
  bool converged = false;
  std::vector<double> trace;  // accepted log-likelihood values, nondecreasing
};

/// Gradient ascent with backtracking line search; steps that break the
/// gamma guard or produce a non-finite value are rejected by the search.
/// Returns the best restart. A result that hit max_iters is reported with
/// converged = false rather than thrown.
FitResult fit(const simulate::Dataset& data, const ggd::GgdParams& source,
              const std::vector<double>& sigma, const std::vector<CMatrix>& Cz,
              const FitOptions& opts);

/// Secondary realism mode: per-block sample covariance of B_t x at the
/// given parameters, usable as the Cz input of fit.
std::vector<CMatrix> estimate_background_cov(const simulate::Dataset& data,
                                             const ThetaCvx& theta);

}  // namespace cribse::mle

#endif
