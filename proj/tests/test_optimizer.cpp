#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "alphacomb/optimizer.hpp"
#include "alphacomb/pca.hpp"
#include "alphacomb/synth.hpp"
#include "helpers.hpp"

using namespace alphacomb;
using namespace testutil;

TEST_CASE("combine at tiny scale matches a hand-rolled dense pipeline") {
  RowMatrix r(2, 3);
  r << 0.02, -0.01, 0.03, -0.015, 0.02, 0.01;
  const ReturnsPanel panel = make_panel(r);
  const ExpectedReturns e = expected_of(Vector::Ones(2));

  CombineOptions opts;
  opts.remove_overall_mode = true;
  const CombineResult res = combine(panel, e, opts);
  CHECK(res.weights.weights.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-13));

  // hand pipeline: demean, variance with 1/M, Y = X/sigma over cols 1..M,
  // cross-demean, keep col 1, regress E/sigma, w ~ eps/sigma
  Matrix x = r;
  for (Index i = 0; i < 2; ++i) x.row(i).array() -= r.row(i).mean();
  Vector sigma(2);
  for (Index i = 0; i < 2; ++i) sigma[i] = std::sqrt(x.row(i).squaredNorm() / 2.0);
  Matrix y = x.leftCols(2);
  for (Index i = 0; i < 2; ++i) y.row(i) /= sigma[i];
  for (Index s = 0; s < 2; ++s) y.col(s).array() -= y.col(s).mean();
  const Matrix lam = y.leftCols(1);
  const Vector et = e.values.cwiseQuotient(sigma);
  const Vector coef = (lam.transpose() * lam).ldlt().solve(lam.transpose() * et);
  const Vector eps = et - lam * coef;
  const Vector hand = normalize_weights(eps.cwiseQuotient(sigma)).weights;
  CHECK(max_abs_diff(res.weights.weights, hand) < 1e-12);
}

TEST_CASE("combine rejects an all-zero expected-return vector") {
  const ReturnsPanel panel = make_panel(random_rows(10, 6, 60));
  const ExpectedReturns e = expected_of(Vector::Zero(10));
  CHECK_THROWS_WITH_AS(combine(panel, e), doctest::Contains("degenerate"), ValidationError);
}

TEST_CASE("overall-mode removal limits negative weights on correlated panels") {
  const Index n = 2000;
  const FactorModel truth = uniform_one_factor_model(Vector::Ones(n), 0.3);
  const ReturnsPanel panel = sample_panel(truth, 40, 61);
  const ExpectedReturns e = expected_of(positive_vector(n, 62));

  CombineOptions off;
  off.remove_overall_mode = false;
  const CombineResult woff = combine(panel, e, off);
  const CombineResult won = combine(panel, e, CombineOptions{});

  CHECK(woff.negative_count >= n / 4);
  CHECK(won.negative_count < woff.negative_count);
}

TEST_CASE("with mode retained, residuals are orthogonal to the first PC") {
  const ReturnsPanel panel = make_panel(random_rows(500, 20, 63));
  const ExpectedReturns e = expected_of(positive_vector(500, 64));
  CombineOptions off;
  off.remove_overall_mode = false;
  const CombineResult res = combine(panel, e, off);

  const DemeanedPanel x = serial_demean(panel);
  const Vector sigma = sample_variances(x).cwiseSqrt();
  const PcDecomposition pcs = correlation_pcs(normalize_and_trim(x, sigma, false));
  const double dot = std::abs(pcs.components.col(0).dot(res.residuals));
  CHECK(dot < 1e-8 * res.residuals.norm());
}

TEST_CASE("dense_oracle_weights") {
  SUBCASE("identity covariance is proportional to E") {
    const Vector e = random_vector(6, 65);
    const WeightVector w = dense_oracle_weights(Matrix::Identity(6, 6), expected_of(e));
    CHECK(max_abs_diff(w.weights, normalize_weights(e).weights) < 1e-14);
  }
  SUBCASE("diagonal covariance reduces to the benchmark") {
    const Vector sigma = positive_vector(6, 66);
    const Vector e = random_vector(6, 67);
    const Matrix cov = Vector(sigma.array().square()).asDiagonal();
    const WeightVector w = dense_oracle_weights(cov, expected_of(e));
    const WeightVector bench = benchmark_weights(expected_of(e), sigma);
    CHECK(max_abs_diff(w.weights, bench.weights) < 1e-13);
  }
  SUBCASE("random PD 500x500 solves the system") {
    const Matrix a = random_matrix(500, 500, 68);
    const Matrix cov = a * a.transpose() / 500.0 + Matrix::Identity(500, 500);
    const Vector e = random_vector(500, 69);
    const WeightVector w = dense_oracle_weights(cov, expected_of(e));
    // C w must be proportional to E
    const Vector cw = cov * w.weights;
    const double scale = cw.dot(e) / e.squaredNorm();
    CHECK((cw - scale * e).cwiseAbs().maxCoeff() < 1e-9 * cw.cwiseAbs().maxCoeff());
  }
  SUBCASE("indefinite matrix is rejected") {
    Matrix bad = -Matrix::Identity(4, 4);
    CHECK_THROWS_AS(dense_oracle_weights(bad, expected_of(Vector::Ones(4))), NumericError);
  }
  SUBCASE("cap is enforced") {
    set_dense_cap(3);
    CHECK_THROWS_AS(dense_oracle_weights(Matrix::Identity(4, 4), expected_of(Vector::Ones(4))),
                    ValidationError);
    set_dense_cap(4000);
  }
}

TEST_CASE("one_factor_weights") {
  const Index n = 50;
  const Vector sigma = positive_vector(n, 70);
  const Vector e = positive_vector(n, 71);
  SUBCASE("rho = 0 reduces to the benchmark") {
    const WeightVector w = one_factor_weights(expected_of(e), sigma, 0.0);
    const WeightVector bench = benchmark_weights(expected_of(e), sigma);
    CHECK(max_abs_diff(w.weights, bench.weights) < 1e-13);
  }
  SUBCASE("matches the dense oracle on the explicit covariance") {
    const WeightVector w = one_factor_weights(expected_of(e), sigma, 0.3);
    const WeightVector dense =
        dense_oracle_weights(uniform_correlation_cov(sigma, 0.3), expected_of(e));
    CHECK(max_abs_diff(w.weights, dense.weights) < 1e-12);
  }
  SUBCASE("positive E with large N rho still yields negative weights") {
    const Index big = 500;
    const WeightVector w =
        one_factor_weights(expected_of(positive_vector(big, 72)), positive_vector(big, 73), 0.3);
    const Index neg = (w.weights.array() < 0.0).count();
    CHECK(neg > 0);
  }
  SUBCASE("rho outside the PD range is rejected") {
    CHECK_THROWS_AS(one_factor_weights(expected_of(e), sigma, 1.0), ValidationError);
    CHECK_THROWS_AS(one_factor_weights(expected_of(e), sigma, -1.0 / double(n - 1)),
                    ValidationError);
  }
}

TEST_CASE("benchmark_weights") {
  SUBCASE("E = sigma^2 gives equal weights") {
    const Vector sigma = positive_vector(8, 74);
    const Vector e = sigma.array().square().matrix();
    const WeightVector w = benchmark_weights(expected_of(e), sigma);
    CHECK((w.weights.array() - 1.0 / 8.0).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("sigma rescaling is absorbed by eta") {
    const Vector sigma = positive_vector(8, 75);
    const Vector e = random_vector(8, 76);
    const WeightVector a = benchmark_weights(expected_of(e), sigma);
    const WeightVector b = benchmark_weights(expected_of(e), Vector(2.0 * sigma));
    CHECK(max_abs_diff(a.weights, b.weights) < 1e-14);
  }
  SUBCASE("explicit 3-alpha case") {
    Vector e(3);
    e << 1, 2, 3;
    const WeightVector w = benchmark_weights(expected_of(e), Vector::Ones(3));
    CHECK(w.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(w.weights[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(w.weights[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
  }
}

TEST_CASE("reference_parity against the frozen transliteration") {
  SynthSpec spec;
  spec.n_alphas = 1000;
  spec.n_obs = 60;
  spec.true_k = 3;
  spec.seed = 77;
  const SynthResult synth = gen_synthetic(spec);

  SUBCASE("default flags") {
    CHECK(reference_parity(synth.panel, synth.expected, CombineOptions{}) < 1e-10);
  }
  SUBCASE("overall mode kept") {
    CombineOptions opts;
    opts.remove_overall_mode = false;
    CHECK(reference_parity(synth.panel, synth.expected, opts) < 1e-10);
  }
  SUBCASE("external loadings, replace and union") {
    Matrix ext = random_matrix(1000, 4, 78).cwiseAbs();
    for (Index i = 0; i < 1000; ++i) ext.row(i) /= ext.row(i).sum();
    for (bool rm : {false, true}) {
      for (AugmentMode mode : {AugmentMode::Replace, AugmentMode::Union}) {
        CombineOptions opts;
        opts.remove_overall_mode = rm;
        opts.external_loadings = ext;
        opts.augment_mode = mode;
        CHECK(reference_parity(synth.panel, synth.expected, opts) < 1e-10);
      }
    }
  }
}

TEST_CASE("combine invariance properties") {
  SynthSpec spec;
  spec.n_alphas = 800;
  spec.n_obs = 30;
  spec.true_k = 2;
  spec.seed = 79;
  const SynthResult synth = gen_synthetic(spec);
  const CombineResult base = combine(synth.panel, synth.expected);

  SUBCASE("unit absolute sum") {
    CHECK(std::abs(base.weights.weights.cwiseAbs().sum() - 1.0) < 1e-12);
  }
  SUBCASE("E-scale invariance") {
    ExpectedReturns e2 = synth.expected;
    e2.values *= 37.5;
    const CombineResult scaled = combine(synth.panel, e2);
    CHECK(max_abs_diff(scaled.weights.weights, base.weights.weights) < 1e-12);
  }
  SUBCASE("return-scale invariance") {
    ReturnsPanel p2 = synth.panel;
    p2.returns *= 4.0;
    const CombineResult scaled = combine(p2, synth.expected);
    CHECK(max_abs_diff(scaled.weights.weights, base.weights.weights) < 1e-10);
  }
  SUBCASE("permutation equivariance") {
    const Index n = spec.n_alphas;
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index(0));
    std::mt19937_64 rng(80);
    std::shuffle(perm.begin(), perm.end(), rng);
    ReturnsPanel p2 = synth.panel;
    ExpectedReturns e2 = synth.expected;
    for (Index i = 0; i < n; ++i) {
      p2.returns.row(i) = synth.panel.returns.row(perm[i]);
      p2.alpha_ids[i] = synth.panel.alpha_ids[perm[i]];
      e2.values[i] = synth.expected.values[perm[i]];
    }
    const CombineResult permuted = combine(p2, e2);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i)
      worst = std::max(worst,
                       std::abs(permuted.weights.weights[i] - base.weights.weights[perm[i]]));
    CHECK(worst < 1e-12);
  }
  SUBCASE("thread-count bit stability") {
    set_num_threads(1);
    const CombineResult one = combine(synth.panel, synth.expected);
    set_num_threads(4);
    const CombineResult four = combine(synth.panel, synth.expected);
    set_num_threads(0);
    CHECK((one.weights.weights - four.weights.weights).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("combine alternative weight sources run and normalize") {
  SynthSpec spec;
  spec.n_alphas = 400;
  spec.n_obs = 25;
  spec.true_k = 2;
  spec.seed = 81;
  const SynthResult synth = gen_synthetic(spec);

  SUBCASE("precomputed xi") {
    CombineOptions opts;
    opts.weight_source = WeightSource::Precomputed;
    opts.precomputed_xi = positive_vector(400, 82);
    const CombineResult res = combine(synth.panel, synth.expected, opts);
    CHECK(std::abs(res.weights.weights.cwiseAbs().sum() - 1.0) < 1e-12);
  }
  SUBCASE("pc-based specific risks") {
    CombineOptions opts;
    opts.weight_source = WeightSource::PcSpecific;
    opts.pc_k = 2;
    opts.pc_zeta = 0.9;
    const CombineResult res = combine(synth.panel, synth.expected, opts);
    CHECK(std::abs(res.weights.weights.cwiseAbs().sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("shrinkage-family deviation shrinks with N at fixed M") {
  // pipeline weights vs dense shrunk-covariance weights, zeta = 0.5
  std::vector<double> devs;
  for (Index n : {Index(300), Index(1500)}) {
    SynthSpec spec;
    spec.n_alphas = n;
    spec.n_obs = 20;
    spec.true_k = 2;
    spec.seed = 83;
    const SynthResult synth = gen_synthetic(spec);
    CombineOptions opts;
    opts.remove_overall_mode = false;
    const CombineResult pipe = combine(synth.panel, synth.expected, opts);

    const DemeanedPanel x = serial_demean(synth.panel);
    const Vector var = sample_variances(x);
    Matrix shrunk = 0.5 * (x.x * x.x.transpose() / double(x.m()));
    shrunk.diagonal() += 0.5 * var;
    const WeightVector dense = dense_oracle_weights(shrunk, synth.expected);
    devs.push_back(rel_err(pipe.weights.weights, dense.weights));
  }
  CHECK(devs[1] < devs[0]);
}
