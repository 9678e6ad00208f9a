#include "CLI11.hpp"

#include "hetvol/calibration.hpp"
#include "hetvol/config.hpp"
#include "hetvol/csv.hpp"
#include "hetvol/errors.hpp"
#include "hetvol/process.hpp"
#include "hetvol/semiparam.hpp"
#include "hetvol/volatility.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>

using namespace hetvol;

namespace {

int run_rv(const std::string& input, const std::string& output,
           const std::string& symbol, double min_interval) {
    IntradayParseReport rep = read_intraday_csv(input, symbol);
    RVSeries rv;
    rv.symbol = symbol;
    int rejected = 0;
    std::vector<std::string> reject_notes;
    for (const auto& day_in : rep.series.days) {
        IntradayDay day = day_in;
        if (min_interval > 0.0) {
            IntradayDay thin;
            thin.date = day.date;
            double last = -1e18;
            for (std::size_t i = 0; i < day.price.size(); ++i) {
                if (day.time_s[i] - last >= min_interval) {
                    thin.time_s.push_back(day.time_s[i]);
                    thin.price.push_back(day.price[i]);
                    last = day.time_s[i];
                }
            }
            day = thin;
        }
        try {
            DayResult r = compute_realized_variance(day);
            rv.dates.push_back(day.date);
            rv.rv.push_back(r.rv);
            rv.n_obs.push_back(int(day.price.size()));
        } catch (const DataError& e) {
            ++rejected;
            if (reject_notes.size() < 20) reject_notes.push_back(e.what());
        }
    }
    if (rv.rv.empty()) throw DataError("no usable trading days in " + input);
    Table t;
    t.header = {"date", "rv", "n_obs", "omega"};
    double mean_nobs = 0.0;
    for (std::size_t i = 0; i < rv.rv.size(); ++i) {
        const double omega = rv.rv[i] > 0.0 ? 0.5 * std::log(rv.rv[i]) : NAN;
        t.rows.push_back({rv.dates[i], format_double(rv.rv[i]),
                          std::to_string(rv.n_obs[i]), format_double(omega)});
        mean_nobs += rv.n_obs[i];
    }
    mean_nobs /= double(rv.rv.size());
    t.save(output);
    std::cerr << "days accepted: " << rv.rv.size() << ", rejected: " << rejected
              << ", malformed rows: " << rep.bad_rows
              << ", mean observations/day: " << format_double(mean_nobs) << "\n";
    for (const auto& n : reject_notes) std::cerr << "  " << n << "\n";
    for (const auto& n : rep.row_errors) std::cerr << "  " << n << "\n";
    return 0;
}

int run_acf(const std::string& input, int L, const std::string& output) {
    const std::vector<double> omega = read_logvol_csv(input);
    const std::vector<double> g = sample_autocov(omega, L);
    Table t;
    t.header = {"h", "gamma", "rho"};
    for (int h = 0; h <= L; ++h)
        t.rows.push_back({std::to_string(h), format_double(g[h]),
                          format_double(g[h] / g[0])});
    t.save(output);
    return 0;
}

int run_model_acf(const RunConfig& cfg, const std::string& output) {
    const ModelSpec m = cfg.model();
    const int L = int(cfg.number("simulate.acf_L", 120));
    const int N = int(cfg.number("simulate.acf_N", 65536));
    const ModelACF acf = acf_via_fft(m, N, L);
    Table t;
    t.header = {"h", "gamma", "rho"};
    for (int h = 0; h <= L; ++h)
        t.rows.push_back({std::to_string(h), format_double(acf.gamma[h]),
                          format_double(acf.rho[h])});
    t.save(output);
    return 0;
}

int run_spectrum(const RunConfig& cfg, int points, const std::string& output) {
    const ModelSpec m = cfg.model();
    const Spectrum s = make_spectrum(m);
    Table t;
    t.header = {"lambda", "f_x"};
    for (int i = 1; i <= points; ++i) {
        const double lam = std::numbers::pi * double(i) / double(points);
        t.rows.push_back({format_double(lam), format_double(s.at(lam))});
    }
    t.save(output);
    return 0;
}

void write_logvol(const LogVolSeries& s, const std::string& output) {
    Table t;
    t.header = {"date", "rv", "n_obs", "omega"};
    for (std::size_t i = 0; i < s.omega.size(); ++i)
        t.rows.push_back({std::to_string(i), format_double(std::exp(2.0 * s.omega[i])),
                          "0", format_double(s.omega[i])});
    t.save(output);
}

int run_simulate(const RunConfig& cfg, const std::string& output) {
    const ModelSpec m = cfg.model();
    const int T = int(cfg.require_number("simulate.T"));
    const std::uint64_t seed = cfg.seed();
    const std::string mode = cfg.text("simulate.mode", "aggregate");
    if (mode == "aggregate") {
        AggregateOptions ao;
        ao.K = int(cfg.number("simulate.K", -1));
        ao.burn_in = int(cfg.number("simulate.burn_in", 0));
        write_logvol(simulate_aggregate(m, T, seed, ao), output);
    } else if (mode == "panel") {
        const std::size_t n = std::size_t(cfg.number("simulate.n_agents", 1000));
        const double sigma_eta = cfg.number("simulate.sigma_eta", 0.0);
        const int burn = int(cfg.number("simulate.burn_in", 200));
        PanelResult r = simulate_panel(m, n, T, burn, seed, sigma_eta);
        write_logvol(r.series, output);
        std::cerr << "panel: n = " << n << ", spectral radius = "
                  << format_double(r.panel.spectral_radius)
                  << (r.panel.rescaled ? " (psi rescaled to restore stationarity)" : "")
                  << ", redraws: " << r.panel.redraws << "\n";
    } else {
        throw ConfigError("simulate.mode must be aggregate or panel");
    }
    return 0;
}

void write_fit_report(const EstimationResult& r, std::ostream& os) {
    os << "fit report\n";
    os << "  T: " << r.T << "\n  L: " << r.L_used << "\n";
    os << "  objective: " << format_double(r.objective_value) << "\n";
    os << "  converged: " << (r.converged ? "yes" : "no") << "\n";
    os << "  boundary_flag: " << (r.boundary_flag ? "yes" : "no") << "\n";
    const int q = r.theta.q();
    for (int n = 0; n < q; ++n)
        os << "  a" << n + 1 << ": " << format_double(r.theta.a[n])
           << (int(r.se.size()) > n ? "  (" + format_double(r.se[n]) + ")" : "") << "\n";
    for (int n = 0; n < q; ++n)
        os << "  b" << n + 1 << ": " << format_double(r.theta.b[n])
           << (int(r.se.size()) > q + n ? "  (" + format_double(r.se[q + n]) + ")" : "")
           << "\n";
    auto line = [&](const char* name, double v, int idx) {
        os << "  " << name << ": " << format_double(v)
           << (int(r.se.size()) > idx ? "  (" + format_double(r.se[idx]) + ")" : "")
           << "\n";
    };
    line("alpha", r.theta.alpha, 2 * q);
    line("w", r.theta.w, 2 * q + 1);
    line("sigma_eps", r.theta.sigma_eps, 2 * q + 2);
    line("d", r.theta.d, 2 * q + 3);
    os << "  stage objectives:";
    for (double v : r.stage_objectives) os << " " << format_double(v);
    os << "\n";
    for (const auto& n : r.notes) os << "  note: " << n << "\n";
}

EstimationResult fit_series(const std::vector<double>& omega, const RunConfig& cfg) {
    FitOptions fo;
    fo.L = int(cfg.number("fit.L", 120));
    fo.two_stage = cfg.number("fit.two_stage", 1) != 0.0;
    const int q = int(cfg.number("fit.q", 1));
    if (cfg.number("fit.de", 0) != 0.0) {
        DeOptions deo;
        deo.L = fo.L;
        deo.generations = int(cfg.number("fit.generations", 500));
        deo.population = int(cfg.number("fit.population", 0));
        deo.seed = cfg.seed();
        return de_fit(omega, q, deo);
    }
    return step_by_step_fit(omega, q, fo);
}

int run_fit(const std::string& input, const RunConfig& cfg,
            const std::string& report_path, const std::string& band_path) {
    const std::vector<double> omega = read_logvol_csv(input);
    EstimationResult r = fit_series(omega, cfg);
    std::ofstream rep(report_path);
    if (!rep) throw DataError("cannot write: " + report_path);
    write_fit_report(r, rep);
    if (!band_path.empty() && r.A_L.size() > 0) {
        const int pts = int(cfg.number("fit.band_points", 201));
        std::vector<double> grid;
        for (int i = 0; i < pts; ++i)
            grid.push_back(-1.0 + 2.0 * double(i) / double(pts - 1));
        const DensityBand band = density_confidence_band(
            r.theta, r.A_L, r.T, grid, cfg.number("fit.level", 0.95));
        Table t;
        t.header = {"x", "f", "lo", "hi"};
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.rows.push_back({format_double(band.x[i]), format_double(band.f[i]),
                              format_double(band.lo[i]), format_double(band.hi[i])});
        t.save(band_path);
    }
    return 0;
}

int run_semiparam(const std::string& input, const std::string& asset,
                  const std::string& output, const RunConfig* cfg) {
    const std::vector<double> omega = read_logvol_csv(input);
    const GPHResult g = gph_estimate(omega);
    const HurstResult h = rs_hurst(omega);
    std::string d_model = "", se_model = "";
    if (cfg && cfg->number("fit.q", 0) > 0) {
        EstimationResult r = fit_series(omega, *cfg);
        d_model = format_double(r.theta.d);
        const int q = r.theta.q();
        if (int(r.se.size()) == r.theta.dim()) se_model = format_double(r.se[2 * q + 3]);
    }
    Table t;
    t.header = {"asset", "d_model", "se_model", "d_gph", "se_gph", "d_hurst"};
    t.rows.push_back({asset, d_model, se_model, format_double(g.d),
                      format_double(g.se), format_double(h.d)});
    t.save(output);
    if (h.trend_flag)
        std::cerr << "warning: rescaled-range slope near 1, trend-dominated\n";
    return 0;
}

int run_bubble(const std::string& price_path, const std::string& logvol_path,
               const RunConfig& cfg, const std::string& output) {
    const NumericCsv pcsv = read_numeric_csv(price_path);
    int pc = pcsv.column("price");
    if (pc < 0) pc = int(pcsv.header.size()) - 1;
    const std::vector<double>& price = pcsv.columns[pc];
    const std::vector<double> omega = read_logvol_csv(logvol_path);
    if (price.size() != omega.size())
        throw DataError("bubble: price and log-vol series lengths differ");
    const PeakSplit split = split_at_peak(price);
    const int L = int(cfg.number("fit.L", 120));

    std::ofstream rep(output);
    if (!rep) throw DataError("cannot write: " + output);
    rep << "bubble study: peak at index " << split.peak_index << "\n";
    auto fit_segment = [&](const char* name, const std::vector<double>& seg) {
        rep << "== " << name << " (T = " << seg.size() << ") ==\n";
        if (int(seg.size()) < 4 * L) {
            rep << "  skipped: segment shorter than 4L = " << 4 * L
                << " (too short for a stable fit)\n";
            return;
        }
        EstimationResult r = fit_series(seg, cfg);
        write_fit_report(r, rep);
    };
    fit_segment("whole period", omega);
    std::vector<double> before(omega.begin(), omega.begin() + split.peak_index + 1);
    std::vector<double> after(omega.begin() + split.peak_index + 1, omega.end());
    fit_segment("before bubble burst", before);
    fit_segment("after bubble burst", after);
    return 0;
}

int run_replicate(const RunConfig& cfg, int reps, int workers,
                  const std::string& output) {
    const ModelSpec m = cfg.model();
    const int T = int(cfg.require_number("simulate.T"));
    const std::uint64_t seed0 = cfg.seed();
    const bool with_fit = cfg.number("fit.q", 0) > 0;
    struct Row {
        double d_gph, se_gph, H, d_fit = NAN, se_fit = NAN;
    };
    std::vector<Row> rows(reps);
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    const int nw = workers > 0 ? workers : int(std::thread::hardware_concurrency());
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lk(mtx);
                    if (next >= rows.size()) return;
                    i = next++;
                }
                const LogVolSeries s = simulate_aggregate(m, T, seed0 + i);
                const GPHResult g = gph_estimate(s.omega);
                const HurstResult h = rs_hurst(s.omega);
                rows[i].d_gph = g.d;
                rows[i].se_gph = g.se;
                rows[i].H = h.H;
                if (with_fit) {
                    try {
                        EstimationResult r = fit_series(s.omega, cfg);
                        rows[i].d_fit = r.theta.d;
                        const int q = r.theta.q();
                        if (int(r.se.size()) == r.theta.dim())
                            rows[i].se_fit = r.se[2 * q + 3];
                    } catch (const std::exception&) {
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    Table t;
    t.header = {"seed", "d_gph", "se_gph", "H", "d_fit", "se_fit"};
    for (int i = 0; i < reps; ++i)
        t.rows.push_back({std::to_string(seed0 + i), format_double(rows[i].d_gph),
                          format_double(rows[i].se_gph), format_double(rows[i].H),
                          format_double(rows[i].d_fit), format_double(rows[i].se_fit)});
    t.save(output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heterogeneous-agent realized-volatility toolkit"};
    app.require_subcommand(1);

    std::string input, output = "out.csv", config_path, symbol = "SYM";
    std::string report_path = "fit_report.txt", band_path, price_path, asset = "ASSET";
    int L = 120, points = 512, reps = 100, workers = 0;
    double min_interval = 0.0;

    auto* c_rv = app.add_subcommand("rv", "realized variance from intraday prices");
    c_rv->add_option("--input", input)->required();
    c_rv->add_option("--output", output);
    c_rv->add_option("--symbol", symbol);
    c_rv->add_option("--min-interval", min_interval,
                     "minimum sampling interval in seconds (0: raw returns)");

    auto* c_acf = app.add_subcommand("acf", "sample autocorrelation of log volatility");
    c_acf->add_option("--input", input)->required();
    c_acf->add_option("--L", L);
    c_acf->add_option("--output", output);

    auto* c_macf = app.add_subcommand("model-acf", "model autocovariance (FFT path)");
    c_macf->add_option("--config", config_path)->required();
    c_macf->add_option("--output", output);

    auto* c_spec = app.add_subcommand("spectrum", "model spectral density");
    c_spec->add_option("--config", config_path)->required();
    c_spec->add_option("--points", points);
    c_spec->add_option("--output", output);

    auto* c_sim = app.add_subcommand("simulate", "simulate log-volatility paths");
    c_sim->add_option("--config", config_path)->required();
    c_sim->add_option("--output", output);

    auto* c_fit = app.add_subcommand("fit", "minimum-distance fit of the mixture model");
    c_fit->add_option("--input", input)->required();
    c_fit->add_option("--config", config_path)->required();
    c_fit->add_option("--report", report_path);
    c_fit->add_option("--band", band_path);

    auto* c_semi = app.add_subcommand("semiparam", "GPH and rescaled-range estimates");
    c_semi->add_option("--input", input)->required();
    c_semi->add_option("--asset", asset);
    c_semi->add_option("--output", output);
    c_semi->add_option("--config", config_path);

    auto* c_bub = app.add_subcommand("bubble", "pre/post price-peak split study");
    c_bub->add_option("--prices", price_path)->required();
    c_bub->add_option("--input", input)->required();
    c_bub->add_option("--config", config_path)->required();
    c_bub->add_option("--output", output);

    auto* c_rep = app.add_subcommand("replicate", "batch simulation/estimation study");
    c_rep->add_option("--config", config_path)->required();
    c_rep->add_option("--reps", reps);
    c_rep->add_option("--workers", workers);
    c_rep->add_option("--output", output);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_rv->parsed()) return run_rv(input, output, symbol, min_interval);
        if (c_acf->parsed()) return run_acf(input, L, output);
        if (c_macf->parsed())
            return run_model_acf(RunConfig::parse_file(config_path), output);
        if (c_spec->parsed())
            return run_spectrum(RunConfig::parse_file(config_path), points, output);
        if (c_sim->parsed())
            return run_simulate(RunConfig::parse_file(config_path), output);
        if (c_fit->parsed())
            return run_fit(input, RunConfig::parse_file(config_path), report_path,
                           band_path);
        if (c_semi->parsed()) {
            if (!config_path.empty()) {
                RunConfig cfg = RunConfig::parse_file(config_path);
                return run_semiparam(input, asset, output, &cfg);
            }
            return run_semiparam(input, asset, output, nullptr);
        }
        if (c_bub->parsed())
            return run_bubble(price_path, input, RunConfig::parse_file(config_path),
                              output);
        if (c_rep->parsed())
            return run_replicate(RunConfig::parse_file(config_path), reps, workers,
                                 output);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
