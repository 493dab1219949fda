#include "cribse/simulate.hpp"

#include <cmath>
#include <utility>

#include "cribse/errors.hpp"
#include "cribse/fim.hpp"
#include "cribse/numerics.hpp"

namespace cribse::simulate {

MixtureConfig::MixtureConfig(int N_, ggd::GgdParams source_, double tau_,
                             model::MixingPath path_, model::SeparatingVector w_,
                             std::uint64_t seed_)
    : d(path_.dim()),
      N(N_),
      T(path_.schedule.T()),
      source(source_),
      tau(tau_),
      path(std::move(path_)),
      w(std::move(w_)),
      seed(seed_) {
  if (d < 2) throw InvalidParams("mixture needs at least two sensors");
  if (w.dim() != d) throw DimensionMismatch("separator dimension must match path");
  if (N < T || N % T != 0) {
    throw InvalidParams("sample count must be a positive multiple of T");
  }
  if (!std::isfinite(tau) || tau < 0.0 || tau > 1.0) {
    throw InvalidTau("tau must lie in [0, 1]");
  }
}

MixtureConfig equivariant_config(int d, int N, int T, ggd::GgdParams source,
                                 double tau, std::uint64_t seed) {
  if (d < 2) throw InvalidParams("mixture needs at least two sensors");
  CVector e1 = CVector::Zero(d);
  e1(0) = 1.0;
  model::MixingPath path(e1, e1, model::linear_schedule(T));
  model::SeparatingVector w(CVector::Zero(d - 1));
  return MixtureConfig(N, source, tau, std::move(path), std::move(w), seed);
}

namespace {

CVector random_unit_endpoint(int d, RandomStream& rng) {
  // Rejection on the first-component modulus; acceptance odds are good for
  // every d of interest, so this terminates quickly.
  for (;;) {
    CVector a(d);
    for (int i = 0; i < d; ++i) a(i) = rng.circular_normal();
    a /= a.norm();
    if (std::abs(a(0)) >= 0.3) return a;
  }
}

CVector random_small(int n, double scale, RandomStream& rng) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.circular_normal();
  return v;
}

}  // namespace

model::ConstrainedModel random_endpoints(int d, RandomStream& rng) {
  if (d < 2) throw InvalidParams("mixture needs at least two sensors");
  if (d == 2) {
    const CVector g1 = random_small(1, 0.5, rng);
    const CVector gT = random_small(1, 0.5, rng);
    const CVector h = random_small(1, 0.5, rng);
    return model::apply_distortionless(g1, gT, h);
  }
  const CVector a1 = random_unit_endpoint(d, rng);
  const CVector aT = random_unit_endpoint(d, rng);
  // Minimum-norm h with h^H a1~ = 1 - a1(0), h^H aT~ = 1 - aT(0): both
  // unit-gain constraints hold at the endpoints, hence on the whole path.
  CMatrix A(d - 1, 2);
  A.col(0) = a1.tail(d - 1);
  A.col(1) = aT.tail(d - 1);
  CVector rbar(2);
  rbar(0) = std::conj(Complex(1.0, 0.0) - a1(0));
  rbar(1) = std::conj(Complex(1.0, 0.0) - aT(0));
  const CVector h = A * numerics::solve(A.adjoint() * A, rbar);
  return model::ConstrainedModel{a1, aT, model::SeparatingVector(h)};
}

Dataset generate(const MixtureConfig& config) {
  const int d = config.d;
  const int N = config.N;
  const int T = config.T;
  const std::vector<double> sigma = fim::variance_profile(config.tau, T);

  std::vector<CVector> a(T);
  std::vector<CMatrix> Q(T);
  for (int t = 1; t <= T; ++t) {
    a[t - 1] = model::mixing_at(config.path, t);
    Q[t - 1] = model::demixing_pair(config.w, a[t - 1]).A.rightCols(d - 1);
  }

  Dataset data;
  data.x.resize(d, N);
  data.s.resize(N);
  data.block_index.resize(N);
  RandomStream rng(config.seed);
  CVector z(d - 1);
  for (int n = 1; n <= N; ++n) {
    const int t = model::block_of_sample(n, N, T);
    const Complex s = sigma[t - 1] * ggd::sample_one(config.source, rng);
    for (int i = 0; i < d - 1; ++i) z(i) = rng.circular_normal();
    data.x.col(n - 1) = a[t - 1] * s + Q[t - 1] * z;
    data.s(n - 1) = s;
    data.block_index[n - 1] = t;
  }
  return data;
}

double empirical_isr(const Dataset& data, const model::SeparatingVector& w_hat,
                     const MixtureConfig& truth) {
  if (w_hat.dim() != truth.d || data.d() != truth.d) {
    throw DimensionMismatch("separator dimension must match the truth model");
  }
  const std::vector<double> sigma = fim::variance_profile(truth.tau, truth.T);
  const CVector wh = w_hat.full();
  double num = 0.0;
  double den = 0.0;
  for (int t = 1; t <= truth.T; ++t) {
    const CVector a_t = model::mixing_at(truth.path, t);
    const CMatrix A_t = model::demixing_pair(truth.w, a_t).A;
    const CVector v = A_t.adjoint() * wh;  // (1 + eps_t; q_t)
    num += v.tail(truth.d - 1).squaredNorm();
    den += std::norm(v(0)) * sigma[t - 1] * sigma[t - 1];
  }
  return num / den;
}

double empirical_isr_sample(const Dataset& data,
                            const model::SeparatingVector& w_hat,
                            const MixtureConfig& truth) {
  if (w_hat.dim() != truth.d || data.d() != truth.d) {
    throw DimensionMismatch("separator dimension must match the truth model");
  }
  const CVector wh = w_hat.full();
  std::vector<Complex> gain(static_cast<std::size_t>(truth.T));
  for (int t = 1; t <= truth.T; ++t) {
    gain[t - 1] = wh.dot(model::mixing_at(truth.path, t));  // 1 + eps_t
  }
  double num = 0.0;
  double den = 0.0;
  for (int n = 0; n < data.N(); ++n) {
    const Complex extracted = wh.dot(data.x.col(n));
    const Complex signal = gain[data.block_index[n] - 1] * data.s(n);
    num += std::norm(extracted - signal);
    den += std::norm(signal);
  }
  return num / den;
}

}  // namespace cribse::simulate
