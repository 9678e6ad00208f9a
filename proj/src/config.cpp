#include "hetvol/config.hpp"

#include "hetvol/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hetvol {

namespace {

const std::set<std::string> kKnownKeys = {
    "data.input",          "data.output",      "data.symbol",
    "data.min_interval_s",
    "model.family",        "model.w",          "model.d",
    "model.fourier_a",     "model.fourier_b",
    "model.alpha",         "model.p",          "model.q",
    "model.bell_w",        "model.bell_m",     "model.bell_sigma",
    "model.coupling",      "model.phibar",     "model.beta",
    "model.sigma_eps",     "model.mean_omega",
    "fit.q",               "fit.L",            "fit.two_stage",
    "fit.de",              "fit.generations",  "fit.population",
    "fit.grid_n",          "fit.band_points",  "fit.level",
    "simulate.T",          "simulate.seed",    "simulate.mode",
    "simulate.n_agents",   "simulate.burn_in", "simulate.sigma_eta",
    "simulate.K",          "simulate.acf_N",   "simulate.acf_L",
    "simulate.replications",
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        cfg.kv_[section + "." + key] = val;
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

void RunConfig::validate() const {
    for (const auto& [k, v] : kv_)
        if (!kKnownKeys.count(k)) throw ConfigError("unknown config key: " + k);
}

bool RunConfig::has(const std::string& k) const { return kv_.count(k) > 0; }

double RunConfig::number(const std::string& k, double fallback) const {
    const auto it = kv_.find(k);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("config value for " + k + " is not a number: " + it->second);
    }
}

double RunConfig::require_number(const std::string& k) const {
    if (!has(k)) throw ConfigError("missing required config key: " + k);
    return number(k, 0.0);
}

std::string RunConfig::text(const std::string& k, const std::string& fallback) const {
    const auto it = kv_.find(k);
    return it == kv_.end() ? fallback : it->second;
}

std::vector<double> RunConfig::numbers(const std::string& k) const {
    const auto it = kv_.find(k);
    std::vector<double> out;
    if (it == kv_.end()) return out;
    std::istringstream ss(it->second);
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw ConfigError("config value for " + k + " is not a number list");
    return out;
}

ModelSpec RunConfig::model() const {
    ModelSpec m;
    const std::string family = text("model.family", "mixture");
    if (family == "mixture") {
        MixtureDensity mx;
        mx.w = number("model.w", 1.0);
        mx.singular.d = number("model.d", 0.25);
        mx.regular.a = numbers("model.fourier_a");
        mx.regular.b = numbers("model.fourier_b");
        const std::size_t q = std::max(mx.regular.a.size(), mx.regular.b.size());
        mx.regular.a.resize(q, 0.0);
        mx.regular.b.resize(q, 0.0);
        m.density = mx;
    } else if (family == "beta_neg_alpha") {
        m.density = BetaNegAlpha{number("model.alpha", -0.25)};
    } else if (family == "stretched_beta") {
        m.density = StretchedBeta{number("model.p", 5.0), number("model.q", 0.75)};
    } else if (family == "bell_mixture") {
        m.density = BellMixture{number("model.p", 5.0), number("model.q", 0.75),
                                number("model.bell_w", 0.5), number("model.bell_m", 0.0),
                                number("model.bell_sigma", 0.2)};
    } else {
        throw ConfigError("unknown model.family: " + family);
    }
    const std::string coupling = text("model.coupling", "linear");
    if (coupling == "rational") {
        m.coupling = RationalCoupling{};
    } else if (coupling == "linear") {
        m.coupling = LinearCoupling{number("model.alpha", 0.3)};
    } else if (coupling == "affine") {
        m.coupling = AffineCoupling{number("model.alpha", 0.8),
                                    number("model.phibar", 0.79)};
    } else if (coupling == "powerlaw") {
        m.coupling = PowerLawCoupling{number("model.beta", 1.5)};
    } else {
        throw ConfigError("unknown model.coupling: " + coupling);
    }
    m.sigma_eps = number("model.sigma_eps", 1.0);
    m.mean_omega = number("model.mean_omega", 0.0);
    return m;
}

} // namespace hetvol
