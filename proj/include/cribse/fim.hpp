#ifndef CRIBSE_FIM_HPP
#define CRIBSE_FIM_HPP

#include <string>
#include <vector>

#include "cribse/ggd.hpp"
#include "cribse/model.hpp"
#include "cribse/types.hpp"

namespace cribse::fim {

enum class Model { CvxCsv, Csv, Bice };

std::string model_name(Model m);
Model model_from_name(const std::string& name);

/// Per-block source statistics: SOI variance sigma_t^2, score power
/// kappa_t = E|phi_t(s)|^2, and background covariance C_{z_t}. The product
/// kappa_t * sigma_t^2 is the per-block kappa-bar and must be >= 1.
struct SourceProfile {
  int T;
  std::vector<double> sigma2;
  std::vector<double> kappa;
  std::vector<CMatrix> Cz;

  SourceProfile(int T, std::vector<double> sigma2, std::vector<double> kappa,
                std::vector<CMatrix> Cz);

  int background_dim() const { return static_cast<int>(Cz.front().rows()); }
};

/// Gradient weights mu_{t,k} tying block t to the K free mixing-basis
/// vectors. One FIM builder covers all compared parameterizations:
/// CvxCSV rows are (lambda_t, 1 - lambda_t), CSV is the T x T identity,
/// static ICE the all-ones column.
struct BasisWeights {
  int K;
  RMatrix mu;  // T x K

  BasisWeights(int K, RMatrix mu);
};

BasisWeights cvxcsv_weights(const model::BlendingSchedule& schedule);
BasisWeights csv_weights(int T);
BasisWeights ice_weights(int T);

/// A/B/D partition of F = Nb * sum_t F_t; blocks hold the per-sample sums
/// over t and Nb is kept as the separate factor (C is B^H).
struct FimBlocks {
  CMatrix A;  // K(d-1) x K(d-1)
  CMatrix B;  // K(d-1) x (d-1)
  CMatrix D;  // (d-1) x (d-1)
  int Nb = 1;

  CMatrix assemble() const;  // [A B; B^H D] without the Nb factor
};

/// Per-block SOI standard deviations
/// sigma_t = tau + (1 - tau) sin(pi t / (2T)); tau = 1 is the stationary
/// case.
std::vector<double> variance_profile(double tau, int T);

/// Single-block, per-sample FIM contribution at the equivariant point:
/// A-block entries mu_{t,k} mu_{t,l} R_t with R_t = sigma_t^2 C_{z_t}^{-1},
/// B-block entries -mu_{t,k} I, D-block kappa_t C_{z_t}. t is 1-based.
FimBlocks fim_per_block(const SourceProfile& profile, const BasisWeights& weights,
                        int t);

/// F = Nb * sum_t F_t, returned as per-sample block sums plus the Nb factor.
FimBlocks assemble_fim(const SourceProfile& profile, const BasisWeights& weights,
                       int Nb);

/// CRLB for h, (1/Nb) (D - C A^{-1} B)^{-1}, or an unidentifiable outcome
/// when the A block or the Schur complement is singular. Singularity of the
/// Schur complement is gauged against the scale of D so that exact analytic
/// cancellation registers as singular rather than as a tiny well-conditioned
/// matrix.
struct CrlbOutcome {
  bool identifiable = false;
  CMatrix crlb;   // valid iff identifiable
  double rcond = 0.0;
};

CrlbOutcome crlb_h(const FimBlocks& F);

/// Mean-ISR lower bound with identifiability classification.
struct CribResult {
  double isr = 0.0;
  double isr_db = 0.0;
  bool identifiable = false;
  double rcond = 0.0;
  Model model = Model::CvxCsv;
};

/// tr[<C_{z_t}>_t crlb] / <sigma_t^2>_t; propagates non-identifiability.
CribResult crib_isr(const CrlbOutcome& crlb, const SourceProfile& profile,
                    Model model);

/// Closed-form special case (R_t independent of t, linear schedule):
/// (1/N) (d-1) / (<kbar>_t - 1). Returns +inf when <kbar> <= 1 + 1e-12.
double closed_form_isr(int d, int N, const std::vector<double>& kbar);

/// Builds the SourceProfile for a GGD source with the sinusoidal variance
/// profile; empty Cz means identity background covariance.
SourceProfile ggd_profile(int T, const ggd::GgdParams& p, double tau, int d,
                          std::vector<CMatrix> Cz = {});

/// End-to-end bound for one model at one configuration. BICE composes
/// per-block static bounds on Nb samples through the separate numerator and
/// denominator averages of the ISR definition; T = 1 reduces every model to
/// the static ICE bound.
CribResult crib_model(Model m, int d, int N, int T,
                      const model::BlendingSchedule& schedule,
                      const ggd::GgdParams& p, double tau,
                      std::vector<CMatrix> Cz = {});

}  // namespace cribse::fim

#endif
