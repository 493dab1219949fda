#ifndef CRIBSE_SIMULATE_HPP
#define CRIBSE_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "cribse/ggd.hpp"
#include "cribse/model.hpp"
#include "cribse/rng.hpp"
#include "cribse/types.hpp"

namespace cribse::simulate {

/// Ground truth for one synthetic mixture: the mixing path, the true
/// separating vector (which also fixes the noise-subspace basis Q_t), the
/// source shape, and the variance-profile knob tau. The background is
/// circular Gaussian with identity covariance.
struct MixtureConfig {
  int d;
  int N;
  int T;
  ggd::GgdParams source;
  double tau;
  model::MixingPath path;
  model::SeparatingVector w;
  std::uint64_t seed;

  MixtureConfig(int N, ggd::GgdParams source, double tau, model::MixingPath path,
                model::SeparatingVector w, std::uint64_t seed);
};

/// All-static truth at the equivariant point: a_1 = a_T = e_1, w = e_1.
MixtureConfig equivariant_config(int d, int N, int T, ggd::GgdParams source,
                                 double tau, std::uint64_t seed);

/// Random unit-norm endpoints with first-component modulus >= 0.3 (keeps
/// every blended gamma_t away from the blocking-matrix singularity), plus
/// the minimum-norm separator satisfying both distortionless constraints.
/// Needs d >= 3; with d = 2 one shared separator cannot meet two independent
/// unit-gain constraints, so there the endpoints are derived from random
/// free parameters instead (and are not unit-norm).
model::ConstrainedModel random_endpoints(int d, RandomStream& rng);

/// One synthetic record: observations x (sensors x samples), the
/// ground-truth source, and each sample's 1-based block index.
struct Dataset {
  CMatrix x;                    // d x N
  CVector s;                    // N
  std::vector<int> block_index; // N, values 1..T

  int d() const { return static_cast<int>(x.rows()); }
  int N() const { return static_cast<int>(x.cols()); }
};

/// x(n) = a_t s(n) + Q_t z(n) with s(n) = sigma_t u(n), u ~ the configured
/// GGD, z ~ circular Gaussian with identity covariance. Per sample the draw
/// order is u first, then the d-1 background components, which pins the
/// byte-exact output for a given seed.
Dataset generate(const MixtureConfig& config);

/// Population ISR of w_hat under the truth: with w_hat^H A_t = (1+eps_t,
/// q_t^H) per block, returns <|q_t|^2>_t / <|1+eps_t|^2 sigma_t^2>_t
/// (identity background covariance). Exactly 0 at the true separator.
double empirical_isr(const Dataset& data, const model::SeparatingVector& w_hat,
                     const MixtureConfig& truth);

/// Sample-moment variant of the same ratio, using the dataset's realized
/// source: the extracted signal w_hat^H x(n) is split into (1+eps_t) s(n)
/// plus residual interference, and sample powers replace expectations.
double empirical_isr_sample(const Dataset& data,
                            const model::SeparatingVector& w_hat,
                            const MixtureConfig& truth);

}  // namespace cribse::simulate

#endif
