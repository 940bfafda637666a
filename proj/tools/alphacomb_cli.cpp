#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "alphacomb/optimizer.hpp"
#include "alphacomb/pca.hpp"
#include "alphacomb/styleanalysis.hpp"
#include "alphacomb/synth.hpp"

namespace ac = alphacomb;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CommonFlags {
  int threads = 0;
  long dense_cap = 0;
  void apply() const {
    if (threads > 0) ac::set_num_threads(threads);
    if (dense_cap > 0) ac::set_dense_cap(dense_cap);
  }
  void attach(CLI::App* app) {
    app->add_option("--threads", threads, "worker thread count (0 = hardware)");
    app->add_option("--dense-cap", dense_cap, "dense-oracle N cap override");
  }
};

ac::Vector momentum_from_panel(const ac::ReturnsPanel& panel) {
  // gross-return proxy exp(mean R) keeps momentum strictly positive, so the
  // log-space style loading reduces to the demeaned mean return
  ac::Vector mu(panel.n_alphas());
  for (ac::Index i = 0; i < panel.n_alphas(); ++i) mu[i] = std::exp(panel.returns.row(i).mean());
  return mu;
}

int cmd_combine(const std::string& returns_path, const std::string& expected_path,
                const std::string& out_path, bool keep_overall_mode,
                const std::string& loadings_path, const std::string& loadings_mode, long pc_k,
                double pc_zeta) {
  const auto t0 = std::chrono::steady_clock::now();
  const ac::ReturnsPanel panel = ac::load_returns_csv(returns_path);
  const ac::ExpectedReturns e = ac::load_expected_csv(expected_path, panel);

  ac::CombineOptions opts;
  opts.remove_overall_mode = !keep_overall_mode;
  if (pc_k > 0) {
    opts.weight_source = ac::WeightSource::PcSpecific;
    opts.pc_k = pc_k;
    opts.pc_zeta = pc_zeta;
  }
  if (!loadings_path.empty()) {
    const ac::PositionHistory pos = ac::load_positions(loadings_path);
    if (pos.n_alphas != panel.n_alphas())
      throw ac::ValidationError("positions file alpha count does not match returns file");
    opts.external_loadings = ac::position_loadings(pos).omega_tilde;
    opts.augment_mode =
        loadings_mode == "union" ? ac::AugmentMode::Union : ac::AugmentMode::Replace;
  }

  const ac::CombineResult res = ac::combine(panel, e, opts);
  ac::save_weights_csv(res.weights, panel.alpha_ids, out_path);
  std::printf("N=%lld M=%lld eta=%.15g min_q=%.15g negative_weights=%lld wall_s=%.3f\n",
              static_cast<long long>(panel.n_alphas()), static_cast<long long>(panel.m()),
              res.weights.eta, res.min_q_diag, static_cast<long long>(res.negative_count),
              seconds_since(t0));
  return 0;
}

int cmd_oracle_check(long n, long m_cols, long k, unsigned long long seed) {
  if (m_cols >= n) m_cols = std::max<long>(2, n - 1);
  k = std::min(std::max<long>(k, 1), n - 1);  // keep tiny-N invocations valid
  int status = 0;

  // Exact small-matrix identity vs the dense inverse.
  {
    const ac::FactorModel model =
        ac::random_factor_model(n, std::max<long>(k, 1), 0.1, 0.5, 0.5, 2.0, seed);
    const ac::ExpectedReturns e = ac::sample_expected(n, seed + 1);
    const ac::WeightVector fast = ac::exact_factor_weights(e, model);
    const ac::WeightVector dense = ac::dense_oracle_weights(ac::dense_covariance(model), e);
    const double dev = (fast.weights - dense.weights).cwiseAbs().maxCoeff() /
                       dense.weights.cwiseAbs().maxCoeff();
    std::printf("factor-model identity: max relative deviation %.3e (N=%ld, K=%ld)\n", dev, n,
                std::max<long>(k, 1));
    if (!(dev < 1e-9)) status = 1;
  }

  // Shrinkage grid: pipeline vs dense deformed-SCM weights across zeta.
  const std::vector<long> sizes = n > 500 ? std::vector<long>{500, n} : std::vector<long>{n};
  std::vector<std::vector<double>> devs(sizes.size());
  for (size_t si = 0; si < sizes.size(); ++si) {
    ac::SynthSpec spec;
    spec.n_alphas = sizes[si];
    spec.n_obs = std::max<long>(3, std::min<long>(m_cols + 1, sizes[si] - 1));
    spec.true_k = std::min<long>(3, spec.n_obs - 1);
    spec.seed = seed + 17 * (si + 1);
    const ac::SynthResult synth = ac::gen_synthetic(spec);

    ac::CombineOptions opts;
    opts.remove_overall_mode = false;
    const ac::CombineResult pipe = ac::combine(synth.panel, synth.expected, opts);

    const ac::DemeanedPanel x = ac::serial_demean(synth.panel);
    const ac::Vector var = ac::sample_variances(x);
    const ac::Matrix scm = x.x * x.x.transpose() / double(x.m());
    for (double zeta : {0.1, 0.5, 0.9}) {
      ac::Matrix shrunk = (1.0 - zeta) * scm;
      shrunk.diagonal() += zeta * var;
      const ac::WeightVector dense = ac::dense_oracle_weights(shrunk, synth.expected);
      const double dev = (pipe.weights.weights - dense.weights).cwiseAbs().maxCoeff() /
                         dense.weights.cwiseAbs().maxCoeff();
      devs[si].push_back(dev);
      std::printf("shrinkage zeta=%.1f N=%ld: max relative deviation %.3e\n", zeta, sizes[si],
                  dev);
    }
  }
  if (devs.size() == 2) {
    const bool monotone = devs[1][0] < devs[0][0] && devs[1][1] < devs[0][1] &&
                          devs[1][2] < devs[0][2];
    std::printf("large-N trend (deviation shrinks with N): %s\n", monotone ? "yes" : "no");
  }
  return status;
}

int cmd_bench(long nobs, std::vector<long> ns, std::vector<long> ms, unsigned long long seed,
              const std::string& out_path) {
  std::FILE* out = nullptr;
  if (!out_path.empty()) {
    out = std::fopen(out_path.c_str(), "w");
    if (!out) throw ac::ParseError("cannot open " + out_path);
    std::fprintf(out, "n,m,seconds,ratio\n");
  }
  auto run_one = [&](long n, long obs) {
    ac::SynthSpec spec;
    spec.n_alphas = n;
    spec.n_obs = obs;
    spec.true_k = 0;
    spec.seed = seed;
    const ac::SynthResult synth = ac::gen_synthetic(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const ac::CombineResult res = ac::combine(synth.panel, synth.expected);
    (void)res;
    return seconds_since(t0);
  };

  double prev = 0.0;
  if (ms.empty()) {
    for (size_t i = 0; i < ns.size(); ++i) {
      const double t = run_one(ns[i], nobs);
      const double ratio = i > 0 ? t / prev : 0.0;
      std::printf("N=%ld M=%ld combine %.3f s%s\n", ns[i], nobs - 1, t,
                  i > 0 ? (" (ratio " + std::to_string(ratio) + ")").c_str() : "");
      if (out) std::fprintf(out, "%ld,%ld,%.6f,%.6f\n", ns[i], nobs - 1, t, ratio);
      prev = t;
    }
  } else {
    const long n = ns.empty() ? 100000 : ns[0];
    for (size_t i = 0; i < ms.size(); ++i) {
      const double t = run_one(n, ms[i] + 1);
      const double ratio = i > 0 ? t / prev : 0.0;
      std::printf("N=%ld M=%ld combine %.3f s%s\n", n, ms[i], t,
                  i > 0 ? (" (ratio " + std::to_string(ratio) + ")").c_str() : "");
      if (out) std::fprintf(out, "%ld,%ld,%.6f,%.6f\n", n, ms[i], t, ratio);
      prev = t;
    }
  }
  if (out) std::fclose(out);
  return 0;
}

int cmd_gen(long n, long nobs, long k, unsigned long long seed, double rho_min, double rho_max,
            double vol_min, double vol_max, const std::string& prefix) {
  ac::SynthSpec spec;
  spec.n_alphas = n;
  spec.n_obs = nobs;
  spec.true_k = k;
  spec.rho_min = rho_min;
  spec.rho_max = rho_max;
  spec.vol_min = vol_min;
  spec.vol_max = vol_max;
  spec.seed = seed;
  const ac::SynthResult synth = ac::gen_synthetic(spec);
  ac::save_returns_csv(synth.panel, prefix + "_returns.csv");
  ac::save_expected_csv(synth.expected, synth.panel.alpha_ids, prefix + "_expected.csv");

  json truth;
  truth["xi"] = std::vector<double>(synth.truth.xi.data(), synth.truth.xi.data() + n);
  truth["k"] = synth.truth.k();
  truth["omega"] = json::array();
  for (ac::Index i = 0; i < n; ++i) {
    std::vector<double> row(synth.truth.omega.row(i).begin(), synth.truth.omega.row(i).end());
    truth["omega"].push_back(row);
  }
  truth["phi"] = json::array();
  for (ac::Index a = 0; a < synth.truth.k(); ++a) {
    std::vector<double> row(synth.truth.phi.row(a).begin(), synth.truth.phi.row(a).end());
    truth["phi"].push_back(row);
  }
  std::ofstream(prefix + "_truth.json") << truth.dump(2) << "\n";
  std::printf("wrote %s_returns.csv, %s_expected.csv, %s_truth.json\n", prefix.c_str(),
              prefix.c_str(), prefix.c_str());
  return 0;
}

int cmd_style(const std::string& returns_path, const std::string& factor,
              const std::string& report_path, const std::string& figure_path) {
  const ac::ReturnsPanel panel = ac::load_returns_csv(returns_path);
  ac::require_dense_cap(panel.n_alphas(), "style diagnostic");

  const ac::DemeanedPanel x = ac::serial_demean(panel);
  const ac::Vector sigma = ac::sample_variances(x).cwiseSqrt();
  const ac::NormalizedLoadings y = ac::normalize_and_trim(x, sigma, false);
  const ac::Matrix psi = ac::sample_correlation_dense(y);

  ac::Vector basis;
  if (factor == "volatility") {
    basis = sigma;
  } else if (factor == "momentum") {
    basis = momentum_from_panel(panel);
  } else {
    throw ac::ValidationError("--factor must be volatility or momentum");
  }
  const ac::Matrix nu = ac::style_loadings(basis, std::nullopt, std::nullopt);

  const ac::Vector psi_a = ac::flatten_offdiag(psi);
  const ac::StyleTensors t = ac::style_tensors(nu.col(0));
  const ac::StyleRegressionReport rep = ac::style_regression(psi_a, t.y, t.z);

  {
    std::FILE* f = std::fopen(report_path.c_str(), "w");
    if (!f) throw ac::ParseError("cannot open " + report_path);
    std::fprintf(f, ",Estimate,Standard error,t-statistic,Overall\n");
    const char* names[3] = {"Intercept", "y_a", "z_a"};
    for (int c = 0; c < 3; ++c)
      std::fprintf(f, "%s,%.4f,%.4f,%.2f,\n", names[c], rep.coefficients[c],
                   rep.standard_errors[c], rep.t_statistics[c]);
    std::fprintf(f, "Mult./Adj. R-squared,,,,%.4f / %.4f\n", rep.r_squared,
                 rep.adjusted_r_squared);
    std::fprintf(f, "F-statistic,,,,%.4g\n", rep.f_statistic);
    std::fclose(f);
  }
  if (!figure_path.empty()) {
    const ac::FigureColumns fig = ac::figure_projection(psi_a, t.y, t.z, rep);
    std::FILE* f = std::fopen(figure_path.c_str(), "w");
    if (!f) throw ac::ParseError("cannot open " + figure_path);
    std::fprintf(f, "w_a,psi_demeaned\n");
    for (ac::Index a = 0; a < fig.w.size(); ++a)
      std::fprintf(f, "%.15g,%.15g\n", fig.w[a], fig.psi_demeaned[a]);
    std::fclose(f);
  }
  std::printf("style factor=%s L=%lld R2=%.4f adjR2=%.4f F=%.4g\n", factor.c_str(),
              static_cast<long long>(rep.n_points), rep.r_squared, rep.adjusted_r_squared,
              rep.f_statistic);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha weight combination toolkit"};
  app.require_subcommand(1);

  CommonFlags common;

  // combine
  auto* combine = app.add_subcommand("combine", "compute optimal alpha weights");
  std::string returns_path, expected_path, out_path = "weights.csv";
  std::string loadings_path, loadings_mode = "replace";
  bool keep_overall_mode = false;
  long pc_k = 0;
  double pc_zeta = 1.0;
  combine->add_option("--returns", returns_path, "returns CSV")->required();
  combine->add_option("--expected", expected_path, "expected returns CSV")->required();
  combine->add_option("--out", out_path, "output weights CSV");
  combine->add_flag("--keep-overall-mode", keep_overall_mode,
                    "skip cross-sectional demeaning (keep the overall mode)");
  combine->add_option("--loadings", loadings_path, "positions CSV for external factor loadings");
  combine->add_option("--loadings-mode", loadings_mode, "replace | union")
      ->check(CLI::IsMember({"replace", "union"}));
  combine->add_option("--pc-k", pc_k, "use PC-based specific risks with this K");
  combine->add_option("--pc-zeta", pc_zeta, "shrinkage constant for PC specific risks");
  common.attach(combine);

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "dense-oracle equivalence checks");
  long on = 2000, onobs = 60, ok = 5;
  unsigned long long oseed = 1;
  oracle->add_option("--n", on, "alpha count");
  oracle->add_option("--m", onobs, "observation count M+1");
  oracle->add_option("--k", ok, "factor count");
  oracle->add_option("--seed", oseed, "rng seed");
  common.attach(oracle);

  // bench
  auto* bench = app.add_subcommand("bench", "O(M^2 N) scaling benchmark");
  long bobs = 253;
  std::vector<long> bns = {100000, 200000, 400000, 800000};
  std::vector<long> bms;
  unsigned long long bseed = 1;
  std::string bout;
  bench->add_option("--m", bobs, "observation count M+1 (default 253)");
  bench->add_option("--ns", bns, "alpha counts to time");
  bench->add_option("--ms", bms, "M values to time at fixed N (overrides --ns sweep)");
  bench->add_option("--seed", bseed, "rng seed");
  bench->add_option("--out", bout, "machine-readable CSV output");
  common.attach(bench);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic returns/expected/truth files");
  long gn = 1000, gobs = 60, gk = 3;
  unsigned long long gseed = 1;
  double grho_min = 0.1, grho_max = 0.5, gvol_min = 0.5, gvol_max = 2.0;
  std::string gprefix = "synth";
  gen->add_option("--n", gn, "alpha count")->required();
  gen->add_option("--m", gobs, "observation count M+1")->required();
  gen->add_option("--k", gk, "true factor count");
  gen->add_option("--seed", gseed, "rng seed");
  gen->add_option("--rho-min", grho_min, "factor strength lower bound");
  gen->add_option("--rho-max", grho_max, "factor strength upper bound");
  gen->add_option("--vol-min", gvol_min, "volatility lower bound");
  gen->add_option("--vol-max", gvol_max, "volatility upper bound");
  gen->add_option("--out-prefix", gprefix, "output file prefix");
  common.attach(gen);

  // style
  auto* style = app.add_subcommand("style", "pairwise-correlation style regression diagnostic");
  std::string sreturns, sfactor = "volatility", sreport = "style_report.csv", sfigure;
  style->add_option("--returns", sreturns, "returns CSV")->required();
  style->add_option("--factor", sfactor, "volatility | momentum")
      ->check(CLI::IsMember({"volatility", "momentum"}));
  style->add_option("--report", sreport, "report CSV path");
  style->add_option("--figure", sfigure, "figure columns CSV path");
  common.attach(style);

  CLI11_PARSE(app, argc, argv);
  common.apply();

  try {
    if (*combine)
      return cmd_combine(returns_path, expected_path, out_path, keep_overall_mode, loadings_path,
                         loadings_mode, pc_k, pc_zeta);
    if (*oracle) return cmd_oracle_check(on, onobs - 1, ok, oseed);
    if (*bench) return cmd_bench(bobs, bns, bms, bseed, bout);
    if (*gen) return cmd_gen(gn, gobs, gk, gseed, grho_min, grho_max, gvol_min, gvol_max, gprefix);
    if (*style) return cmd_style(sreturns, sfactor, sreport, sfigure);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
