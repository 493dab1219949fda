#include "cribse/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "cribse/errors.hpp"
#include "cribse/numerics.hpp"
#include "cribse/rng.hpp"

namespace cribse::mle {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kStepGrowth = 2.0;

struct BlockInfo {
  double lam;
  double sigma;
  Complex gamma;   // 1 - h^H g_t, refreshed per evaluation
  CVector g;       // lambda g1 + (1 - lambda) gT, refreshed per evaluation
  CMatrix Cinv;
  bool identity;
  int count = 0;
};

struct Workspace {
  int d, N, T;
  std::vector<int> blk;  // 0-based block per sample
  std::vector<BlockInfo> blocks;
};

Workspace build_workspace(const simulate::Dataset& data,
                          const std::vector<double>& sigma,
                          const std::vector<CMatrix>& Cz,
                          const model::BlendingSchedule* schedule) {
  Workspace ws;
  ws.d = data.d();
  ws.N = data.N();
  ws.T = static_cast<int>(sigma.size());
  if (ws.d < 2) throw DimensionMismatch("dataset needs at least two sensors");
  if (ws.T < 1 || Cz.size() != sigma.size()) {
    throw DimensionMismatch("sigma and Cz lists must share a positive length");
  }
  if (schedule != nullptr && schedule->T() != ws.T) {
    throw DimensionMismatch("schedule length must match the nuisance lists");
  }
  const model::BlendingSchedule sched =
      schedule != nullptr ? *schedule : model::linear_schedule(ws.T);

  const int dm = ws.d - 1;
  ws.blocks.resize(static_cast<std::size_t>(ws.T));
  for (int t = 1; t <= ws.T; ++t) {
    BlockInfo& b = ws.blocks[t - 1];
    b.lam = sched.lambda(t);
    b.sigma = sigma[t - 1];
    if (!std::isfinite(b.sigma) || b.sigma <= 0.0) {
      throw InvalidParams("block standard deviations must be finite and positive");
    }
    const CMatrix& C = Cz[t - 1];
    if (C.rows() != dm || C.cols() != dm) {
      throw DimensionMismatch("background covariance must be (d-1) x (d-1)");
    }
    if (!numerics::hermitian_check(C, 1e-10)) {
      throw InvalidParams("background covariance must be Hermitian");
    }
    b.identity = (C - CMatrix::Identity(dm, dm)).cwiseAbs().maxCoeff() == 0.0;
    if (!b.identity) {
      CMatrix Cinv = numerics::inverse(C);
      b.Cinv = 0.5 * (Cinv + Cinv.adjoint().eval());
    }
  }

  ws.blk.resize(static_cast<std::size_t>(ws.N));
  for (int n = 0; n < ws.N; ++n) {
    const int t = data.block_index[static_cast<std::size_t>(n)];
    if (t < 1 || t > ws.T) {
      throw BlockOutOfRange("sample assigned to a block outside the nuisance lists");
    }
    ws.blk[static_cast<std::size_t>(n)] = t - 1;
    ws.blocks[t - 1].count += 1;
  }
  return ws;
}

void check_theta(const ThetaCvx& th, int d) {
  if (th.dim() != d) throw DimensionMismatch("parameter dimension must match data");
  const Complex gamma1 = th.gamma_first();
  const Complex gammaT = th.gamma_last();
  if (std::abs(gamma1) < kGammaGuard || std::abs(gammaT) < kGammaGuard) {
    throw DegenerateGamma("endpoint gain too close to zero");
  }
}

/// Log-likelihood and (optionally) its conjugate-parameter gradient in one
/// pass. The per-sample terms are grouped per block so the g1/gT gradients
/// reduce to lambda-weighted combinations of one shared block sum.
double eval(const ThetaCvx& th, const simulate::Dataset& data, Workspace& ws,
            const ggd::GgdParams& p, ThetaCvx* grad) {
  check_theta(th, ws.d);
  const int dm = ws.d - 1;
  const double a = p.alpha();
  const double gg = p.gamma();
  const double rho = p.rho();
  const double const_term = std::log(a * rho) - std::log(std::numbers::pi) -
                            std::lgamma(1.0 / a) - 0.5 * std::log1p(-gg * gg);
  const bool want_grad = grad != nullptr;

  for (auto& b : ws.blocks) {
    b.g = b.lam * th.g1 + (1.0 - b.lam) * th.gT;
    b.gamma = 1.0 - th.h.dot(b.g);
  }

  std::vector<CVector> sum_phi_x, sum_x1cz;
  std::vector<Complex> sum_zx;
  if (want_grad) {
    sum_phi_x.assign(static_cast<std::size_t>(ws.T), CVector::Zero(dm));
    sum_x1cz.assign(static_cast<std::size_t>(ws.T), CVector::Zero(dm));
    sum_zx.assign(static_cast<std::size_t>(ws.T), Complex(0.0, 0.0));
  }

  double L = 0.0;
  CVector z(dm), cz(dm);
  for (int n = 0; n < ws.N; ++n) {
    const int bi = ws.blk[static_cast<std::size_t>(n)];
    const BlockInfo& b = ws.blocks[static_cast<std::size_t>(bi)];
    const Complex x1 = data.x(0, n);
    const auto xt = data.x.col(n).segment(1, dm);

    const Complex sh = x1 + th.h.dot(xt);
    const Complex u = sh / b.sigma;
    const double E = rho * (u.real() * u.real() / (1.0 + gg) +
                            u.imag() * u.imag() / (1.0 - gg));

    z = x1 * b.g - b.gamma * xt;
    if (b.identity) {
      cz = z;
    } else {
      cz.noalias() = b.Cinv * z;
    }
    L -= z.dot(cz).real();

    if (want_grad) {
      if (a < 1.0 && std::abs(u) < 1e-300) {
        throw ScoreSingularity("score singular at the origin for alpha < 1");
      }
      const double Ep = (a == 1.0) ? 1.0 : std::pow(E, a - 1.0);
      L -= Ep * E;
      const Complex phi =
          a * Ep * rho * (gg * u - std::conj(u)) / ((gg * gg - 1.0) * b.sigma);
      sum_phi_x[static_cast<std::size_t>(bi)].noalias() += phi * xt;
      sum_x1cz[static_cast<std::size_t>(bi)].noalias() += std::conj(x1) * cz;
      sum_zx[static_cast<std::size_t>(bi)] += cz.dot(xt);
    } else {
      L -= std::pow(E, a);
    }
  }

  for (const auto& b : ws.blocks) {
    L += b.count * (const_term - 2.0 * std::log(b.sigma) +
                    (ws.d - 2) * std::log(std::norm(b.gamma)));
  }

  if (want_grad) {
    grad->g1.setZero(dm);
    grad->gT.setZero(dm);
    grad->h.setZero(dm);
    CVector base(dm);
    for (int bi = 0; bi < ws.T; ++bi) {
      const BlockInfo& b = ws.blocks[static_cast<std::size_t>(bi)];
      const double ld = static_cast<double>(ws.d - 2) * b.count;
      base = -sum_x1cz[static_cast<std::size_t>(bi)] -
             std::conj(sum_zx[static_cast<std::size_t>(bi)]) * th.h -
             (ld / std::conj(b.gamma)) * th.h;
      grad->g1 += b.lam * base;
      grad->gT += (1.0 - b.lam) * base;
      grad->h -= sum_phi_x[static_cast<std::size_t>(bi)] +
                 sum_zx[static_cast<std::size_t>(bi)] * b.g + (ld / b.gamma) * b.g;
    }
  }
  return L;
}

}  // namespace

ThetaCvx::ThetaCvx(CVector g1_, CVector gT_, CVector h_)
    : g1(std::move(g1_)), gT(std::move(gT_)), h(std::move(h_)) {
  if (g1.size() < 1 || g1.size() != gT.size() || g1.size() != h.size()) {
    throw DimensionMismatch("g1, gT and h must share a positive length");
  }
}

ThetaCvx ThetaCvx::zero(int d) {
  if (d < 2) throw InvalidParams("parameter needs at least two sensors");
  return ThetaCvx(CVector::Zero(d - 1), CVector::Zero(d - 1), CVector::Zero(d - 1));
}

Complex ThetaCvx::gamma_first() const { return Complex(1.0, 0.0) - h.dot(g1); }
Complex ThetaCvx::gamma_last() const { return Complex(1.0, 0.0) - h.dot(gT); }

model::SeparatingVector ThetaCvx::separator() const {
  return model::SeparatingVector(h);
}

ThetaCvx& ThetaCvx::operator+=(const ThetaCvx& step) {
  if (step.h.size() != h.size()) throw DimensionMismatch("parameter size mismatch");
  g1 += step.g1;
  gT += step.gT;
  h += step.h;
  return *this;
}

double ThetaCvx::norm() const {
  return std::sqrt(g1.squaredNorm() + gT.squaredNorm() + h.squaredNorm());
}

void FitOptions::validate() const {
  if (max_iters < 1) throw InvalidParams("max_iters must be >= 1");
  if (initial_step < 0.0 || !std::isfinite(initial_step)) {
    throw InvalidParams("step size must be positive (or 0 for the 1/N default)");
  }
  if (!(backtrack > 0.0) || backtrack >= 1.0) {
    throw InvalidParams("backtracking factor must lie in (0, 1)");
  }
  if (!(tolerance > 0.0)) throw InvalidParams("gradient tolerance must be positive");
  if (restarts < 1) throw InvalidParams("restart count must be >= 1");
  if (init_scale < 0.0) throw InvalidParams("init scale must be nonnegative");
}

double loglik(const ThetaCvx& theta, const simulate::Dataset& data,
              const ggd::GgdParams& source, const std::vector<double>& sigma,
              const std::vector<CMatrix>& Cz) {
  Workspace ws = build_workspace(data, sigma, Cz, nullptr);
  return eval(theta, data, ws, source, nullptr);
}

ThetaCvx grad_loglik(const ThetaCvx& theta, const simulate::Dataset& data,
                     const ggd::GgdParams& source, const std::vector<double>& sigma,
                     const std::vector<CMatrix>& Cz) {
  Workspace ws = build_workspace(data, sigma, Cz, nullptr);
  ThetaCvx grad = ThetaCvx::zero(ws.d);
  eval(theta, data, ws, source, &grad);
  return grad;
}

FitResult fit(const simulate::Dataset& data, const ggd::GgdParams& source,
              const std::vector<double>& sigma, const std::vector<CMatrix>& Cz,
              const FitOptions& opts) {
  opts.validate();
  Workspace ws = build_workspace(data, sigma, Cz, nullptr);
  const double step0 =
      opts.initial_step > 0.0 ? opts.initial_step : 1.0 / static_cast<double>(ws.N);

  FitResult best;
  bool have_best = false;
  for (int r = 0; r < opts.restarts; ++r) {
    RandomStream rng = RandomStream(opts.seed).derive(static_cast<std::uint64_t>(r));
    ThetaCvx th = ThetaCvx::zero(ws.d);
    for (int i = 0; i < ws.d - 1; ++i) {
      th.g1(i) = opts.init_scale * rng.circular_normal();
      th.gT(i) = opts.init_scale * rng.circular_normal();
      th.h(i) = opts.init_scale * rng.circular_normal();
    }

    FitResult res;
    res.theta = th;
    ThetaCvx grad = ThetaCvx::zero(ws.d);
    ThetaCvx trial_grad = ThetaCvx::zero(ws.d);
    double L;
    try {
      L = eval(th, data, ws, source, &grad);
    } catch (const Error&) {
      continue;  // pathological initial point; spend the restart
    }
    res.trace.push_back(L);
    double step = step0;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
      const double gn = grad.norm();
      res.grad_norm = gn / static_cast<double>(ws.N);
      if (res.grad_norm < opts.tolerance) {
        res.converged = true;
        break;
      }
      bool accepted = false;
      double s = step;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        ThetaCvx trial = th;
        trial.g1 += s * grad.g1;
        trial.gT += s * grad.gT;
        trial.h += s * grad.h;
        if (std::abs(trial.gamma_first()) < kGammaGuard ||
            std::abs(trial.gamma_last()) < kGammaGuard) {
          s *= opts.backtrack;
          continue;
        }
        // The score has a pole at the extractor output's origin for
        // alpha < 1, so the gradient evaluation itself can reject a step.
        try {
          const double Ln = eval(trial, data, ws, source, nullptr);
          if (std::isfinite(Ln) && Ln > L + kArmijo * s * gn * gn) {
            eval(trial, data, ws, source, &trial_grad);
            th = std::move(trial);
            L = Ln;
            std::swap(grad, trial_grad);
            accepted = true;
            break;
          }
        } catch (const Error&) {
        }
        s *= opts.backtrack;
      }
      if (!accepted) break;  // line search exhausted; keep the last iterate
      res.trace.push_back(L);
      step = s * kStepGrowth;
    }
    res.theta = th;
    res.loglik = L;
    res.iterations = it;
    res.grad_norm = grad.norm() / static_cast<double>(ws.N);
    res.converged = res.converged || res.grad_norm < opts.tolerance;

    if (!have_best || res.loglik > best.loglik) {
      best = std::move(res);
      have_best = true;
    }
  }
  if (!have_best) {
    throw Error("every restart started at an unevaluable point");
  }
  return best;
}

std::vector<CMatrix> estimate_background_cov(const simulate::Dataset& data,
                                             const ThetaCvx& theta) {
  const int d = data.d();
  if (theta.dim() != d) throw DimensionMismatch("parameter dimension must match data");
  const int dm = d - 1;
  int T = 0;
  for (int t : data.block_index) T = std::max(T, t);
  if (T < 1) throw InvalidBlockCount("dataset carries no block labels");
  const model::BlendingSchedule sched = model::linear_schedule(T);

  std::vector<CMatrix> out(static_cast<std::size_t>(T), CMatrix::Zero(dm, dm));
  std::vector<int> count(static_cast<std::size_t>(T), 0);
  std::vector<CVector> g(static_cast<std::size_t>(T));
  std::vector<Complex> gamma(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const double lam = sched.lambda(t);
    g[t - 1] = lam * theta.g1 + (1.0 - lam) * theta.gT;
    gamma[t - 1] = 1.0 - theta.h.dot(g[t - 1]);
  }
  CVector z(dm);
  for (int n = 0; n < data.N(); ++n) {
    const int t = data.block_index[static_cast<std::size_t>(n)];
    z = data.x(0, n) * g[t - 1] - gamma[t - 1] * data.x.col(n).segment(1, dm);
    out[t - 1].noalias() += z * z.adjoint();
    count[t - 1] += 1;
  }
  for (int t = 1; t <= T; ++t) {
    if (count[t - 1] == 0) throw InvalidBlockCount("empty block in dataset");
    out[t - 1] /= static_cast<double>(count[t - 1]);
  }
  return out;
}

}  // namespace cribse::mle
