#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alphacomb/optimizer.hpp"
#include "alphacomb/pca.hpp"
#include "alphacomb/synth.hpp"

namespace py = pybind11;
namespace ac = alphacomb;

namespace {

ac::ReturnsPanel panel_from_array(const Eigen::Ref<const ac::RowMatrix>& returns) {
  ac::ReturnsPanel panel;
  panel.returns = returns;
  for (ac::Index i = 0; i < panel.n_alphas(); ++i)
    panel.alpha_ids.push_back("alpha_" + std::to_string(i));
  for (ac::Index s = 0; s < panel.n_obs(); ++s)
    panel.time_labels.push_back("t_" + std::to_string(s + 1));
  panel.validate();
  return panel;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear-cost optimal weights for combining large numbers of alpha return streams";

  py::register_exception<ac::ParseError>(m, "ParseError");
  py::register_exception<ac::ValidationError>(m, "ValidationError");
  py::register_exception<ac::NumericError>(m, "NumericError");

  m.def(
      "combine",
      [](const Eigen::Ref<const ac::RowMatrix>& returns, const ac::Vector& expected,
         bool remove_overall_mode, std::optional<ac::Matrix> external_loadings,
         const std::string& loadings_mode, long pc_k, double pc_zeta) {
        const ac::ReturnsPanel panel = panel_from_array(returns);
        ac::ExpectedReturns e;
        e.values = expected;
        ac::CombineOptions opts;
        opts.remove_overall_mode = remove_overall_mode;
        opts.external_loadings = std::move(external_loadings);
        opts.augment_mode =
            loadings_mode == "union" ? ac::AugmentMode::Union : ac::AugmentMode::Replace;
        if (pc_k > 0) {
          opts.weight_source = ac::WeightSource::PcSpecific;
          opts.pc_k = pc_k;
          opts.pc_zeta = pc_zeta;
        }
        const ac::CombineResult res = ac::combine(panel, e, opts);
        py::dict out;
        out["weights"] = res.weights.weights;
        out["eta"] = res.weights.eta;
        out["min_q"] = res.min_q_diag;
        out["negative_count"] = res.negative_count;
        return out;
      },
      py::arg("returns"), py::arg("expected"), py::arg("remove_overall_mode") = true,
      py::arg("external_loadings") = std::nullopt, py::arg("loadings_mode") = "replace",
      py::arg("pc_k") = 0, py::arg("pc_zeta") = 1.0,
      "Optimal weights via the O(M^2 N) regression pipeline; returns is N x (M+1), "
      "column 0 most recent.");

  m.def(
      "benchmark_weights",
      [](const ac::Vector& expected, const ac::Vector& sigma) {
        ac::ExpectedReturns e;
        e.values = expected;
        return ac::benchmark_weights(e, sigma).weights;
      },
      py::arg("expected"), py::arg("sigma"), "Normalized E_i / sigma_i^2 baseline.");

  m.def(
      "one_factor_weights",
      [](const ac::Vector& expected, const ac::Vector& sigma, double rho) {
        ac::ExpectedReturns e;
        e.values = expected;
        return ac::one_factor_weights(e, sigma, rho).weights;
      },
      py::arg("expected"), py::arg("sigma"), py::arg("rho"),
      "Exact closed form for a uniform-correlation covariance.");

  m.def(
      "exact_factor_weights",
      [](const ac::Vector& expected, const ac::Vector& xi, const ac::Matrix& omega,
         const ac::Matrix& phi) {
        ac::ExpectedReturns e;
        e.values = expected;
        ac::FactorModel model{xi, omega, phi};
        return ac::exact_factor_weights(e, model).weights;
      },
      py::arg("expected"), py::arg("xi"), py::arg("omega"), py::arg("phi"),
      "Exact factor-model optimum in O(K^2 N + K^3).");

  m.def(
      "dense_oracle_weights",
      [](const ac::Matrix& cov, const ac::Vector& expected) {
        ac::ExpectedReturns e;
        e.values = expected;
        return ac::dense_oracle_weights(cov, e).weights;
      },
      py::arg("cov"), py::arg("expected"), "Dense C^-1 E oracle (cap-gated).");

  m.def(
      "correlation_pcs",
      [](const Eigen::Ref<const ac::RowMatrix>& returns) {
        const ac::ReturnsPanel panel = panel_from_array(returns);
        const ac::DemeanedPanel x = ac::serial_demean(panel);
        const ac::Vector sigma = ac::sample_variances(x).cwiseSqrt();
        const ac::PcDecomposition pcs =
            ac::correlation_pcs(ac::normalize_and_trim(x, sigma, false));
        py::dict out;
        out["eigenvalues"] = pcs.eigenvalues;
        out["components"] = pcs.components;
        out["theta"] = pcs.theta;
        return out;
      },
      py::arg("returns"),
      "Principal components of the sample correlation matrix via the M x M Gram trick.");

  m.def(
      "gen_synthetic",
      [](long n, long n_obs, long k, std::uint64_t seed) {
        ac::SynthSpec spec;
        spec.n_alphas = n;
        spec.n_obs = n_obs;
        spec.true_k = k;
        spec.seed = seed;
        const ac::SynthResult res = ac::gen_synthetic(spec);
        py::dict out;
        out["returns"] = ac::Matrix(res.panel.returns);
        out["expected"] = res.expected.values;
        out["xi"] = res.truth.xi;
        out["omega"] = res.truth.omega;
        out["phi"] = res.truth.phi;
        return out;
      },
      py::arg("n"), py::arg("n_obs"), py::arg("k") = 0, py::arg("seed") = 0,
      "Deterministic synthetic panel drawn from an exact factor-model covariance.");

  m.def("set_num_threads", &ac::set_num_threads, py::arg("n"));
  m.def("set_dense_cap", &ac::set_dense_cap, py::arg("cap"));
}
