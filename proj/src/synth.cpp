#include "alphacomb/synth.hpp"

#include <cmath>
#include <random>

#include "alphacomb/parallel.hpp"

namespace alphacomb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ (domain * 0xd1342543de82ef95ULL)) + index));
}

constexpr std::uint64_t kDomainModel = 1, kDomainFactors = 2, kDomainIdio = 3, kDomainExpected = 4;

std::string label(const char* prefix, Index i) { return std::string(prefix) + std::to_string(i); }

}  // namespace

void SynthSpec::validate() const {
  if (n_alphas < 2 || n_obs < 3) throw ValidationError("synth spec: need N >= 2 and M+1 >= 3");
  if (true_k > n_obs - 1) throw ValidationError("synth spec: true_k > M");
  if (!(rho_min > 0.0) || rho_max < rho_min) throw ValidationError("synth spec: bad rho range");
  if (!(vol_min > 0.0) || vol_max < vol_min) throw ValidationError("synth spec: bad vol range");
}

FactorModel random_factor_model(Index n, Index k, double rho_min, double rho_max, double vol_min,
                                double vol_max, std::uint64_t seed) {
  FactorModel model;
  model.xi.resize(n);
  model.omega.resize(n, k);
  model.phi = Matrix::Identity(k, k);

  Vector strength(k);
  {
    auto rng = substream(seed, kDomainModel, 0);
    std::uniform_real_distribution<double> rho(rho_min, rho_max);
    for (Index a = 0; a < k; ++a) strength[a] = rho(rng);
  }
  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      auto rng = substream(seed, kDomainModel, static_cast<std::uint64_t>(i) + 1);
      std::uniform_real_distribution<double> vol(vol_min, vol_max);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double sigma = vol(rng);
      double sq = 0.0;
      for (Index a = 0; a < k; ++a) {
        model.omega(i, a) = strength[a] * gauss(rng);
        sq += model.omega(i, a) * model.omega(i, a);
      }
      const double denom = std::sqrt(1.0 + sq);
      model.xi[i] = sigma / denom;
      model.omega.row(i) *= sigma / denom;
    }
  });
  return model;
}

FactorModel uniform_one_factor_model(const Vector& sigma, double rho) {
  const Index n = sigma.size();
  if (!(rho > -1.0 / double(n - 1)) || !(rho < 1.0))
    throw ValidationError("uniform correlation rho outside the positive-definite range");
  if ((sigma.array() <= 0.0).any()) throw ValidationError("sigma must be strictly positive");
  FactorModel model;
  model.xi = std::sqrt(1.0 - rho) * sigma;
  model.omega = std::sqrt(std::abs(rho)) * sigma;
  model.phi = Matrix::Constant(1, 1, rho >= 0.0 ? 1.0 : -1.0);
  return model;
}

ReturnsPanel sample_panel(const FactorModel& model, Index n_obs, std::uint64_t seed) {
  const Index n = model.n();
  const Index k = model.k();
  ReturnsPanel panel;
  panel.returns.resize(n, n_obs);

  Matrix factor_draws(k, n_obs);
  if (k > 0) {
    // Factor realizations f_s ~ N(0, Phi) via the Cholesky of Phi; shared
    // across alphas from a dedicated stream.
    Eigen::LLT<Matrix> llt(model.phi);
    Matrix chol;
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(model.phi);
      if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
        throw NumericError("sample_panel: factor covariance is indefinite");
      chol = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    auto rng = substream(seed, kDomainFactors, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix raw(k, n_obs);
    for (Index s = 0; s < n_obs; ++s)
      for (Index a = 0; a < k; ++a) raw(a, s) = gauss(rng);
    factor_draws = chol * raw;
  }

  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      auto rng = substream(seed, kDomainIdio, static_cast<std::uint64_t>(i) + 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (Index s = 0; s < n_obs; ++s) {
        double r = model.xi[i] * gauss(rng);
        if (k > 0) r += model.omega.row(i).dot(factor_draws.col(s));
        panel.returns(i, s) = r;
      }
    }
  });

  panel.alpha_ids.reserve(n);
  panel.time_labels.reserve(n_obs);
  for (Index i = 0; i < n; ++i) panel.alpha_ids.push_back(label("alpha_", i));
  for (Index s = 0; s < n_obs; ++s) panel.time_labels.push_back(label("t_", s + 1));
  return panel;
}

ExpectedReturns sample_expected(Index n, std::uint64_t seed) {
  ExpectedReturns e;
  e.values.resize(n);
  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      auto rng = substream(seed, kDomainExpected, static_cast<std::uint64_t>(i) + 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      e.values[i] = 1e-3 * std::exp(0.5 * gauss(rng));
    }
  });
  return e;
}

SynthResult gen_synthetic(const SynthSpec& spec) {
  spec.validate();
  SynthResult out;
  out.truth = spec.true_k > 0
                  ? random_factor_model(spec.n_alphas, spec.true_k, spec.rho_min, spec.rho_max,
                                        spec.vol_min, spec.vol_max, spec.seed)
                  : [&] {
                      FactorModel m;
                      m.omega.resize(spec.n_alphas, 0);
                      m.phi.resize(0, 0);
                      m.xi.resize(spec.n_alphas);
                      for_each_block(spec.n_alphas, [&](Index, Index begin, Index end) {
                        for (Index i = begin; i < end; ++i) {
                          auto rng = substream(spec.seed, kDomainModel,
                                               static_cast<std::uint64_t>(i) + 1);
                          std::uniform_real_distribution<double> vol(spec.vol_min, spec.vol_max);
                          m.xi[i] = vol(rng);
                        }
                      });
                      return m;
                    }();
  out.panel = sample_panel(out.truth, spec.n_obs, spec.seed);
  out.expected = sample_expected(spec.n_alphas, spec.seed);
  return out;
}

}  // namespace alphacomb
