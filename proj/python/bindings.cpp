#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hetvol/calibration.hpp"
#include "hetvol/config.hpp"
#include "hetvol/process.hpp"
#include "hetvol/semiparam.hpp"
#include "hetvol/volatility.hpp"

namespace py = pybind11;
using namespace hetvol;

namespace {

ModelSpec model_from_config_text(const std::string& text) {
    return RunConfig::parse_string(text).model();
}

} // namespace

PYBIND11_MODULE(_hetvol, m) {
    m.doc() = "heterogeneous-agent realized-volatility toolkit";

    m.def("realized_variance",
          [](const std::vector<double>& prices) {
              IntradayDay day;
              day.date = "day";
              for (std::size_t i = 0; i < prices.size(); ++i) {
                  day.time_s.push_back(double(i));
                  day.price.push_back(prices[i]);
              }
              return compute_realized_variance(day).rv;
          },
          py::arg("prices"), "realized variance of one day of prices");

    m.def("log_vol_from_rv",
          [](const std::vector<double>& rv) {
              RVSeries s;
              s.rv = rv;
              for (std::size_t i = 0; i < rv.size(); ++i)
                  s.dates.push_back(std::to_string(i));
              const LogVolSeries lv = log_vol_series(s);
              return std::make_pair(lv.omega, lv.mean_omega);
          },
          py::arg("rv"));

    m.def("sample_acf", &sample_acf, py::arg("x"), py::arg("max_lag"));
    m.def("sample_autocov", &sample_autocov, py::arg("x"), py::arg("max_lag"));

    m.def("model_acf",
          [](const std::string& config_text, int N, int L) {
              const ModelACF acf = acf_via_fft(model_from_config_text(config_text), N, L);
              return std::make_pair(acf.gamma, acf.rho);
          },
          py::arg("config_text"), py::arg("N") = 65536, py::arg("L") = 120,
          "model autocovariance/autocorrelation via the spectral (FFT) route");

    m.def("model_acf_ma",
          [](const std::string& config_text, int K, int L) {
              const ModelSpec mdl = model_from_config_text(config_text);
              const MACoefficients ma = ma_coefficients(mdl, K);
              const ModelACF acf = acf_via_ma(ma, mdl.sigma_eps, L);
              return std::make_pair(acf.gamma, acf.rho);
          },
          py::arg("config_text"), py::arg("K") = 10000, py::arg("L") = 120,
          "model autocovariance via truncated MA convolution");

    m.def("ma_coefficients",
          [](const std::string& config_text, int K) {
              return ma_coefficients(model_from_config_text(config_text), K).beta_tilde;
          },
          py::arg("config_text"), py::arg("K") = 1000);

    m.def("spectral_density",
          [](const std::string& config_text, const std::vector<double>& lam) {
              return spectral_density(model_from_config_text(config_text), lam);
          },
          py::arg("config_text"), py::arg("lambdas"));

    m.def("simulate_aggregate",
          [](const std::string& config_text, int T, std::uint64_t seed) {
              return simulate_aggregate(model_from_config_text(config_text), T, seed)
                  .omega;
          },
          py::arg("config_text"), py::arg("T"), py::arg("seed") = 12345);

    m.def("simulate_panel",
          [](const std::string& config_text, std::size_t n, int T, int burn_in,
             std::uint64_t seed) {
              return simulate_panel(model_from_config_text(config_text), n, T, burn_in,
                                    seed)
                  .series.omega;
          },
          py::arg("config_text"), py::arg("n"), py::arg("T"), py::arg("burn_in") = 200,
          py::arg("seed") = 12345);

    m.def("gph",
          [](const std::vector<double>& x, int m_) {
              const GPHResult r = gph_estimate(x, m_);
              return py::make_tuple(r.d, r.se, r.m);
          },
          py::arg("x"), py::arg("m") = 0, "GPH log-periodogram estimate: (d, se, m)");

    m.def("rs_hurst",
          [](const std::vector<double>& x) {
              const HurstResult r = rs_hurst(x);
              return py::make_tuple(r.H, r.d, r.trend_flag);
          },
          py::arg("x"), "classical rescaled-range estimate: (H, d, trend_flag)");

    m.def("arfima", &arfima_simulate, py::arg("T"), py::arg("d"), py::arg("seed") = 1);

    py::class_<EstimationResult>(m, "EstimationResult")
        .def_property_readonly("d", [](const EstimationResult& r) { return r.theta.d; })
        .def_property_readonly("w", [](const EstimationResult& r) { return r.theta.w; })
        .def_property_readonly("alpha",
                               [](const EstimationResult& r) { return r.theta.alpha; })
        .def_property_readonly("sigma_eps",
                               [](const EstimationResult& r) { return r.theta.sigma_eps; })
        .def_property_readonly("a", [](const EstimationResult& r) { return r.theta.a; })
        .def_property_readonly("b", [](const EstimationResult& r) { return r.theta.b; })
        .def_readonly("objective_value", &EstimationResult::objective_value)
        .def_readonly("se", &EstimationResult::se)
        .def_readonly("converged", &EstimationResult::converged)
        .def_readonly("boundary_flag", &EstimationResult::boundary_flag)
        .def_readonly("notes", &EstimationResult::notes);

    m.def("fit",
          [](const std::vector<double>& omega, int q, int L, bool two_stage) {
              FitOptions fo;
              fo.L = L;
              fo.two_stage = two_stage;
              return step_by_step_fit(omega, q, fo);
          },
          py::arg("omega"), py::arg("q") = 1, py::arg("L") = 120,
          py::arg("two_stage") = true,
          "step-by-step minimum-distance fit of the mixture model");

    m.def("density_band",
          [](const EstimationResult& r, const std::vector<double>& grid, double level) {
              const DensityBand b = density_confidence_band(r.theta, r.A_L, r.T, grid,
                                                            level);
              return py::make_tuple(b.f, b.lo, b.hi);
          },
          py::arg("result"), py::arg("grid"), py::arg("level") = 0.95);
}
