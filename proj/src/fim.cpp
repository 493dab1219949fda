#include "cribse/fim.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <utility>

#include "cribse/errors.hpp"
#include "cribse/numerics.hpp"

namespace cribse::fim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKbarSlack = 1e-9;   // per-block kappa*sigma^2 >= 1 tolerance
constexpr double kHermTol = 1e-10;
constexpr double kGaussianTol = 1e-12;  // <kbar> - 1 threshold for +inf bounds

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_psd(const CMatrix& C, int t) {
  if (!numerics::hermitian_check(C, kHermTol)) {
    throw InvalidParams("background covariance for block " + std::to_string(t) +
                        " is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(C, Eigen::EigenvaluesOnly);
  const double floor = -kHermTol * std::max(1.0, C.real().trace());
  if (es.eigenvalues().minCoeff() < floor) {
    throw InvalidParams("background covariance for block " + std::to_string(t) +
                        " is not positive semidefinite");
  }
}

}  // namespace

std::string model_name(Model m) {
  switch (m) {
    case Model::CvxCsv: return "cvxcsv";
    case Model::Csv: return "csv";
    case Model::Bice: return "bice";
  }
  throw InvalidParams("unknown model tag");
}

Model model_from_name(const std::string& name) {
  if (name == "cvxcsv") return Model::CvxCsv;
  if (name == "csv") return Model::Csv;
  if (name == "bice") return Model::Bice;
  throw InvalidParams("unknown model name: " + name);
}

SourceProfile::SourceProfile(int T_, std::vector<double> sigma2_,
                             std::vector<double> kappa_, std::vector<CMatrix> Cz_)
    : T(T_), sigma2(std::move(sigma2_)), kappa(std::move(kappa_)), Cz(std::move(Cz_)) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  const auto n = static_cast<std::size_t>(T);
  if (sigma2.size() != n || kappa.size() != n || Cz.size() != n) {
    throw DimensionMismatch("profile arrays must all have length T");
  }
  const auto dz = Cz.front().rows();
  if (dz < 1) throw DimensionMismatch("background covariance must be nonempty");
  for (int t = 0; t < T; ++t) {
    if (!std::isfinite(sigma2[t]) || sigma2[t] <= 0.0) {
      throw InvalidParams("sigma2 must be finite and positive");
    }
    if (!std::isfinite(kappa[t]) || kappa[t] <= 0.0) {
      throw InvalidParams("kappa must be finite and positive");
    }
    if (kappa[t] * sigma2[t] < 1.0 - kKbarSlack) {
      throw InvalidParams("score power inconsistent: kappa*sigma2 < 1 in block " +
                          std::to_string(t + 1));
    }
    if (Cz[t].rows() != dz || Cz[t].cols() != dz) {
      throw DimensionMismatch("background covariances must share one square size");
    }
    numerics::require_finite(Cz[t], "Cz");
    check_psd(Cz[t], t + 1);
  }
}

BasisWeights::BasisWeights(int K_, RMatrix mu_) : K(K_), mu(std::move(mu_)) {
  if (K < 1) throw InvalidParams("basis size must be >= 1");
  if (mu.cols() != K || mu.rows() < 1) {
    throw DimensionMismatch("weight matrix must be T x K");
  }
  if (!mu.allFinite()) throw NonFiniteEntry("weight matrix has non-finite entries");
}

BasisWeights cvxcsv_weights(const model::BlendingSchedule& schedule) {
  const int T = schedule.T();
  if (T == 1) return ice_weights(1);
  RMatrix mu(T, 2);
  for (int t = 1; t <= T; ++t) {
    mu(t - 1, 0) = schedule.lambda(t);
    mu(t - 1, 1) = 1.0 - schedule.lambda(t);
  }
  return BasisWeights(2, mu);
}

BasisWeights csv_weights(int T) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  return BasisWeights(T, RMatrix::Identity(T, T));
}

BasisWeights ice_weights(int T) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  return BasisWeights(1, RMatrix::Ones(T, 1));
}

CMatrix FimBlocks::assemble() const {
  return numerics::assemble(numerics::BlockPartition(A, B, B.adjoint(), D));
}

std::vector<double> variance_profile(double tau, int T) {
  if (!std::isfinite(tau) || tau < 0.0 || tau > 1.0) {
    throw InvalidTau("tau must lie in [0, 1]");
  }
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  std::vector<double> sigma(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    sigma[t - 1] = tau + (1.0 - tau) * std::sin(kPi * t / (2.0 * T));
  }
  return sigma;
}

FimBlocks fim_per_block(const SourceProfile& profile, const BasisWeights& weights,
                        int t) {
  if (weights.mu.rows() != profile.T) {
    throw DimensionMismatch("weight rows must match profile block count");
  }
  if (t < 1 || t > profile.T) throw BlockOutOfRange("block index out of range");
  const int dz = profile.background_dim();
  const int K = weights.K;
  const int i = t - 1;

  const CMatrix R = profile.sigma2[i] * numerics::inverse(profile.Cz[i]);
  FimBlocks F;
  F.A = CMatrix::Zero(K * dz, K * dz);
  F.B = CMatrix::Zero(K * dz, dz);
  F.D = profile.kappa[i] * profile.Cz[i];
  for (int k = 0; k < K; ++k) {
    const double mk = weights.mu(i, k);
    for (int l = 0; l < K; ++l) {
      F.A.block(k * dz, l * dz, dz, dz) = mk * weights.mu(i, l) * R;
    }
    F.B.block(k * dz, 0, dz, dz) = -mk * CMatrix::Identity(dz, dz);
  }
  F.Nb = 1;
  return F;
}

FimBlocks assemble_fim(const SourceProfile& profile, const BasisWeights& weights,
                       int Nb) {
  if (Nb < 1) throw InvalidParams("samples per block must be >= 1");
  FimBlocks sum = fim_per_block(profile, weights, 1);
  for (int t = 2; t <= profile.T; ++t) {
    const FimBlocks Ft = fim_per_block(profile, weights, t);
    sum.A += Ft.A;
    sum.B += Ft.B;
    sum.D += Ft.D;
  }
  sum.Nb = Nb;
  return sum;
}

CrlbOutcome crlb_h(const FimBlocks& F) {
  CrlbOutcome out;
  if (numerics::rcond(F.A) < numerics::kSingularThreshold) {
    out.rcond = 0.0;
    return out;
  }
  const CMatrix S =
      numerics::schur_complement({F.A, F.B, F.B.adjoint(), F.D});
  Eigen::JacobiSVD<CMatrix> svd_s(S);
  Eigen::JacobiSVD<CMatrix> svd_d(F.D);
  const double smin = svd_s.singularValues().minCoeff();
  const double scale =
      std::max(svd_s.singularValues().maxCoeff(), svd_d.singularValues().maxCoeff());
  out.rcond = scale > 0.0 ? smin / scale : 0.0;
  if (out.rcond < numerics::kSingularThreshold) return out;
  out.crlb = numerics::inverse(S) / static_cast<double>(F.Nb);
  out.identifiable = true;
  return out;
}

CribResult crib_isr(const CrlbOutcome& crlb, const SourceProfile& profile,
                    Model model) {
  CribResult r;
  r.model = model;
  r.rcond = crlb.rcond;
  if (!crlb.identifiable) {
    r.identifiable = false;
    r.isr = std::numeric_limits<double>::infinity();
    r.isr_db = std::numeric_limits<double>::infinity();
    return r;
  }
  const int dz = profile.background_dim();
  CMatrix Cbar = CMatrix::Zero(dz, dz);
  for (const auto& C : profile.Cz) Cbar += C;
  Cbar /= static_cast<double>(profile.T);
  r.identifiable = true;
  r.isr = (Cbar * crlb.crlb).real().trace() / mean(profile.sigma2);
  r.isr_db = 10.0 * std::log10(r.isr);
  return r;
}

double closed_form_isr(int d, int N, const std::vector<double>& kbar) {
  if (d < 2) throw InvalidParams("dimension must be >= 2");
  if (N < 1) throw InvalidParams("sample count must be >= 1");
  if (kbar.empty()) throw InvalidBlockCount("kbar list must be nonempty");
  const double excess = mean(kbar) - 1.0;
  if (excess <= kGaussianTol) return std::numeric_limits<double>::infinity();
  return static_cast<double>(d - 1) / (static_cast<double>(N) * excess);
}

SourceProfile ggd_profile(int T, const ggd::GgdParams& p, double tau, int d,
                          std::vector<CMatrix> Cz) {
  if (d < 2) throw InvalidParams("dimension must be >= 2");
  const std::vector<double> sigma = variance_profile(tau, T);
  std::vector<double> sigma2(sigma.size());
  std::vector<double> kappa(sigma.size());
  const double kbar = ggd::kappa_bar(p);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    sigma2[i] = sigma[i] * sigma[i];
    kappa[i] = kbar / sigma2[i];
  }
  if (Cz.empty()) {
    Cz.assign(static_cast<std::size_t>(T), CMatrix::Identity(d - 1, d - 1));
  }
  return SourceProfile(T, std::move(sigma2), std::move(kappa), std::move(Cz));
}

CribResult crib_model(Model m, int d, int N, int T,
                      const model::BlendingSchedule& schedule,
                      const ggd::GgdParams& p, double tau,
                      std::vector<CMatrix> Cz) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  if (schedule.T() != T) {
    throw DimensionMismatch("schedule length must match block count");
  }
  if (N < T || N % T != 0) {
    throw InvalidParams("sample count must be a positive multiple of T");
  }
  const int Nb = N / T;
  const SourceProfile profile = ggd_profile(T, p, tau, d, std::move(Cz));

  if (m == Model::Bice && T > 1) {
    // Average of per-block static bounds, composed through the numerator and
    // denominator of the ISR ratio separately.
    double num = 0.0;
    double den = 0.0;
    double rc = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int t = 1; t <= T; ++t) {
      SourceProfile one(1, {profile.sigma2[t - 1]}, {profile.kappa[t - 1]},
                        {profile.Cz[t - 1]});
      const CrlbOutcome c = crlb_h(assemble_fim(one, ice_weights(1), Nb));
      rc = std::min(rc, c.rcond);
      if (!c.identifiable) {
        ok = false;
        continue;
      }
      num += (one.Cz[0] * c.crlb).real().trace();
      den += one.sigma2[0];
    }
    CribResult r;
    r.model = m;
    r.rcond = rc;
    if (!ok) {
      r.identifiable = false;
      r.isr = std::numeric_limits<double>::infinity();
      r.isr_db = std::numeric_limits<double>::infinity();
      return r;
    }
    r.identifiable = true;
    r.isr = num / den;
    r.isr_db = 10.0 * std::log10(r.isr);
    return r;
  }

  BasisWeights weights = [&] {
    if (T == 1) return ice_weights(1);  // every model is static for one block
    switch (m) {
      case Model::CvxCsv: return cvxcsv_weights(schedule);
      case Model::Csv: return csv_weights(T);
      default: return ice_weights(1);  // unreachable: Bice handled above
    }
  }();
  const FimBlocks F = assemble_fim(profile, weights, Nb);
  return crib_isr(crlb_h(F), profile, m);
}

}  // namespace cribse::fim
