#include "doctest.h"

#include "hetvol/config.hpp"
#include "hetvol/csv.hpp"
#include "hetvol/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace hetvol;

namespace {

const std::string tmpdir = "/tmp/hetvol_cli_test";

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HETVOL_CLI_PATH) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

struct TmpDir {
    TmpDir() { std::system(("mkdir -p " + tmpdir).c_str()); }
} tmp_dir_guard;

} // namespace

TEST_CASE("config parsing and schema validation") {
    RunConfig cfg = RunConfig::parse_string(
        "[model]\nfamily = mixture\nw = 0.6\nd = 0.3\nfourier_a = 0.1 0.0\n"
        "coupling = linear\nalpha = 0.3\nsigma_eps = 0.5\n"
        "[simulate]\nT = 100\nseed = 7\n");
    CHECK(cfg.number("model.w", 0) == 0.6);
    CHECK(cfg.seed() == 7);
    ModelSpec m = cfg.model();
    CHECK(std::get<MixtureDensity>(m.density).regular.a.size() == 2);
    CHECK_THROWS_AS(RunConfig::parse_string("[model]\nbogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("key_outside = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("[model]\nw = abc\n").number("model.w", 0),
                    ConfigError);
}

TEST_CASE("cli rv: constant prices, rejection policy, row counts") {
    const std::string in = tmpdir + "/intraday.csv";
    // two constant-price days plus one day with a bad price (rejected)
    std::string content = "date,time,price\n";
    for (int d = 0; d < 2; ++d)
        for (int i = 0; i < 5; ++i)
            content += "2001-01-0" + std::to_string(d + 1) + ",09:3" +
                       std::to_string(i) + ":00,50.0\n";
    content += "2001-01-03,09:30:00,50.0\n2001-01-03,09:31:00,-3.0\n";
    write_file(in, content);
    const std::string out = tmpdir + "/rv.csv";
    CHECK(run_cli("rv --input " + in + " --output " + out) == 0);
    NumericCsv csv = read_numeric_csv(out);
    CHECK(csv.columns[csv.column("rv")].size() == 2); // bad day rejected
    for (double v : csv.columns[csv.column("rv")]) CHECK(v == 0.0);
}

TEST_CASE("cli: missing input is a data error (exit 2)") {
    CHECK(run_cli("rv --input /nonexistent.csv --output /tmp/x.csv") == 2);
}

TEST_CASE("cli: bad config is a config error (exit 1)") {
    const std::string cfg = tmpdir + "/bad.cfg";
    write_file(cfg, "[model]\nnot_a_key = 1\n");
    CHECK(run_cli("model-acf --config " + cfg + " --output /tmp/x.csv") == 1);
}

TEST_CASE("cli simulate: determinism and sigma_eps = 0") {
    const std::string cfg = tmpdir + "/sim.cfg";
    write_file(cfg,
               "[model]\nfamily = mixture\nw = 1.0\nd = 0.25\ncoupling = rational\n"
               "sigma_eps = 0.8\nmean_omega = -4.0\n[simulate]\nT = 200\nseed = 9\n");
    const std::string o1 = tmpdir + "/s1.csv", o2 = tmpdir + "/s2.csv";
    CHECK(run_cli("simulate --config " + cfg + " --output " + o1) == 0);
    CHECK(run_cli("simulate --config " + cfg + " --output " + o2) == 0);
    CHECK(slurp(o1) == slurp(o2)); // byte-identical
    CHECK(!slurp(o1).empty());

    const std::string cfg0 = tmpdir + "/sim0.cfg";
    write_file(cfg0,
               "[model]\nfamily = mixture\nw = 1.0\nd = 0.25\ncoupling = rational\n"
               "sigma_eps = 0.0\nmean_omega = -4.0\n[simulate]\nT = 50\nseed = 9\n");
    const std::string o3 = tmpdir + "/s3.csv";
    CHECK(run_cli("simulate --config " + cfg0 + " --output " + o3) == 0);
    NumericCsv csv = read_numeric_csv(o3);
    for (double v : csv.columns[csv.column("omega")]) CHECK(v == -4.0);
}

TEST_CASE("cli model-acf: rational coupling and determinism") {
    const std::string cfg = tmpdir + "/macf.cfg";
    write_file(cfg, "[model]\nfamily = mixture\nw = 0.6\nd = 0.3\n"
                    "coupling = rational\nsigma_eps = 1.0\n"
                    "[simulate]\nacf_L = 16\nacf_N = 4096\n");
    const std::string o1 = tmpdir + "/m1.csv", o2 = tmpdir + "/m2.csv";
    CHECK(run_cli("model-acf --config " + cfg + " --output " + o1) == 0);
    CHECK(run_cli("model-acf --config " + cfg + " --output " + o2) == 0);
    CHECK(slurp(o1) == slurp(o2));
    NumericCsv csv = read_numeric_csv(o1);
    const auto& rho = csv.columns[csv.column("rho")];
    CHECK(rho[0] == 1.0);
    for (std::size_t h = 1; h < rho.size(); ++h) CHECK(std::abs(rho[h]) < 1e-9);
}

TEST_CASE("cli spectrum output parses back") {
    const std::string cfg = tmpdir + "/spec.cfg";
    write_file(cfg, "[model]\nfamily = beta_neg_alpha\nalpha = -0.3\n"
                    "coupling = powerlaw\nbeta = 1.5\nsigma_eps = 1.0\n");
    const std::string out = tmpdir + "/spec.csv";
    CHECK(run_cli("spectrum --config " + cfg + " --points 32 --output " + out) == 0);
    NumericCsv csv = read_numeric_csv(out);
    CHECK(csv.columns[0].size() == 32);
    for (double v : csv.columns[csv.column("f_x")]) CHECK(v > 0.0);
}

TEST_CASE("cli semiparam emits a table-style row") {
    const std::string cfg = tmpdir + "/semi_in.csv";
    // white-noise omega series
    std::string content = "omega\n";
    unsigned long long state = 88172645463325252ULL;
    auto rnd = [&] {
        state ^= state << 13; state ^= state >> 7; state ^= state << 17;
        return double(state % 10000) / 10000.0 - 0.5;
    };
    for (int i = 0; i < 4096; ++i) content += format_double(rnd()) + "\n";
    write_file(cfg, content);
    const std::string out = tmpdir + "/semi.csv";
    CHECK(run_cli("semiparam --input " + cfg + " --asset TEST --output " + out) == 0);
    const std::string s = slurp(out);
    CHECK(s.find("asset,d_model,se_model,d_gph,se_gph,d_hurst") == 0);
    CHECK(s.find("TEST,") != std::string::npos);
}

TEST_CASE("cli bubble: monotone price skips the post segment, exit 0") {
    const std::string prices = tmpdir + "/prices.csv";
    const std::string logvol = tmpdir + "/lv.csv";
    std::string pc = "price\n", lc = "omega\n";
    unsigned long long state = 1234567ULL;
    auto rnd = [&] {
        state ^= state << 13; state ^= state >> 7; state ^= state << 17;
        return double(state % 10000) / 10000.0 - 0.5;
    };
    for (int i = 0; i < 600; ++i) {
        pc += format_double(10.0 + i) + "\n";
        lc += format_double(rnd()) + "\n";
    }
    write_file(prices, pc);
    write_file(logvol, lc);
    const std::string cfg = tmpdir + "/bub.cfg";
    write_file(cfg, "[fit]\nq = 1\nL = 40\ntwo_stage = 0\n");
    const std::string out = tmpdir + "/bubble.txt";
    CHECK(run_cli("bubble --prices " + prices + " --input " + logvol + " --config " +
                  cfg + " --output " + out) == 0);
    const std::string rep = slurp(out);
    CHECK(rep.find("after bubble burst") != std::string::npos);
    CHECK(rep.find("skipped: segment shorter") != std::string::npos);
}
