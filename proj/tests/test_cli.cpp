// End-to-end tests of the command-line binary: flag handling, config-file
// precedence, CSV round trips, exit codes, and byte-level determinism.
// The binary path comes from the HYPMASS_CLI_PATH compile definition (set
// by the build) or the environment variable of the same name.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "hypmass/btz_ellipse.hpp"
#include "hypmass/csv.hpp"
#include "hypmass/periodic.hpp"

namespace fs = std::filesystem;
using hypmass::csv::format_double;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("HYPMASS_CLI_PATH")) return env;
#ifdef HYPMASS_CLI_PATH
    return HYPMASS_CLI_PATH;
#else
    FAIL("HYPMASS_CLI_PATH is not set");
    return "";
#endif
}

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, const std::string& cwd = "",
                  const std::string& env_prefix = "") {
    std::string cmd;
    if (!cwd.empty()) cmd += "cd " + cwd + " && ";
    cmd += env_prefix + cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("hypmass_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_key(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 1));
}

void write_boundary_csv(const fs::path& p, std::size_t n,
                        const std::function<double(double)>& k) {
    auto g = hypmass::periodic::GridFunction::sample(n, k);
    std::ofstream out(p);
    out << "phi,value\n";
    for (std::size_t j = 0; j < n; ++j)
        out << format_double(g.node(j)) << ',' << format_double(g[j]) << '\n';
}

} // namespace

TEST_CASE("top-level flag handling", "[cli]") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("no-such-command").code == 1);
    CHECK(run_cli("--bogus").code == 1);
    auto help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("flow") != std::string::npos);
    CHECK(help.out.find("ellipse") != std::string::npos);
    CHECK(help.out.find("mass-report") != std::string::npos);
    CHECK(help.out.find("verify") != std::string::npos);
}

TEST_CASE("ellipse limit and finite-scale evaluation", "[cli]") {
    auto lim = run_cli("ellipse --m 1 --eps 1 --limit");
    CHECK(lim.code == 0);
    CHECK(parse_key(lim.out, "m_infinity") ==
          Catch::Approx(hypmass::ellipse::m_infinity(1.0, 1.0)).margin(1e-15));

    auto flat = run_cli("ellipse --m 0 --eps 0 --limit");
    CHECK(flat.code == 0);
    CHECK(parse_key(flat.out, "m_infinity") == Catch::Approx(1.0).margin(1e-12));

    auto fin = run_cli("ellipse --m 1 --eps 1 --R 100");
    CHECK(fin.code == 0);
    CHECK(parse_key(fin.out, "byst") ==
          Catch::Approx(hypmass::ellipse::m_infinity(1.0, 1.0)).margin(2e-4));

    CHECK(run_cli("ellipse --m 1 --eps 1").code == 1);              // no mode
    CHECK(run_cli("ellipse --m 1 --eps 1 --limit --R 5").code == 1); // two modes
    CHECK(run_cli("ellipse --m 4 --eps 0 --R 1.5").code == 2);      // horizon
    CHECK(run_cli("ellipse --m 1 --eps -1.5 --limit").code == 1);   // bad eps
}

TEST_CASE("ellipse sweep output", "[cli]") {
    auto dir = fresh_dir("sweep");
    auto out = (dir / "sw.csv").string();
    REQUIRE(run_cli("ellipse --sweep --out " + out).code == 0);
    auto t = hypmass::csv::read_string(read_file(out));
    REQUIRE(t.header == std::vector<std::string>{"m", "epsilon", "m_infinity"});
    REQUIRE(t.rows.size() == 123);
    CHECK(t.rows[0][0] == 1.0);
    CHECK(t.rows[0][1] == 0.0);
    CHECK(t.rows[0][2] == Catch::Approx(2.0).margin(1e-9));

    auto out2 = (dir / "sw2.csv").string();
    REQUIRE(run_cli("ellipse --sweep --out " + out2, "", "HYPMASS_THREADS=1 ").code == 0);
    CHECK(read_file(out) == read_file(out2));
}

TEST_CASE("flow writes solution and report, prints the two masses", "[cli]") {
    auto dir = fresh_dir("flow");
    auto res = run_cli("flow --k-const 2 --r-max 100 --n-phi 64", dir.string());
    REQUIRE(res.code == 0);

    // k = 2 at r0 = 1 means u0 = sqrt(2)/2, so the initial cross-section
    // mass is 2*(1+1)*(1 - 1/u0) and the limit mass is -K = -2.
    const double u0 = std::sqrt(2.0) / 2.0;
    CHECK(parse_key(res.out, "byst") == Catch::Approx(4.0 * (1.0 - 1.0 / u0)).margin(1e-10));
    CHECK(parse_key(res.out, "h0_estimate") == Catch::Approx(-2.0).margin(1e-4));

    auto sol = hypmass::csv::read_string(read_file(dir / "solution.csv"));
    REQUIRE(sol.header == std::vector<std::string>{"r", "phi", "u", "v"});
    REQUIRE(sol.rows.size() % 64 == 0);
    CHECK(sol.rows[0][0] == 1.0);
    CHECK(sol.rows[0][2] == Catch::Approx(u0).margin(1e-12));
    CHECK(sol.rows.back()[0] == 100.0);
    const double K = (1.0 / (u0 * u0) - 1.0) * 2.0;
    CHECK(sol.rows.back()[2] ==
          Catch::Approx(1.0 / std::sqrt(1.0 + K / (1.0 + 1e4))).margin(1e-6));

    auto rep = hypmass::csv::read_string(read_file(dir / "mass_report.csv"));
    REQUIRE(rep.header == std::vector<std::string>{"r", "m", "dmdr_formula", "dmdr_numeric"});
    REQUIRE(rep.rows.size() == sol.rows.size() / 64);

    // Same run again: both CSVs and the printed lines must be byte-identical.
    auto dir2 = fresh_dir("flow_again");
    auto res2 = run_cli("flow --k-const 2 --r-max 100 --n-phi 64", dir2.string());
    REQUIRE(res2.code == 0);
    CHECK(res2.out == res.out);
    CHECK(read_file(dir2 / "solution.csv") == read_file(dir / "solution.csv"));
    CHECK(read_file(dir2 / "mass_report.csv") == read_file(dir / "mass_report.csv"));
}

TEST_CASE("flow boundary-data validation and exit codes", "[cli]") {
    auto dir = fresh_dir("flow_errs");

    CHECK(run_cli("flow", dir.string()).code == 1);                       // no source
    CHECK(run_cli("flow --k-const 1 --k-cosine 1,0.1", dir.string()).code == 1);
    CHECK(run_cli("flow --k-const -0.5", dir.string()).code == 2);        // k <= 0
    CHECK(run_cli("flow --k-cosine 1,2 --n-phi 32", dir.string()).code == 2);
    CHECK(run_cli("flow --k-const 2 --n-phi 7", dir.string()).code == 1); // odd grid
    CHECK(run_cli("flow --k-const 2 --r-max 0.5", dir.string()).code == 1);
    CHECK(run_cli("flow --k-const 2 --tol 1e-30 --r-max 10 --n-phi 16", dir.string()).code ==
          3); // unattainable tolerance

    write_boundary_csv(dir / "k.csv", 32, [](double phi) { return 1.5 + 0.1 * std::cos(phi); });
    CHECK(run_cli("flow --k-csv k.csv --r-max 100", dir.string()).code == 0);
    CHECK(run_cli("flow --k-csv k.csv --n-phi 64 --r-max 100", dir.string()).code == 1);
    CHECK(run_cli("flow --k-csv missing.csv", dir.string()).code == 1);

    std::ofstream(dir / "bad_angles.csv") << "phi,value\n0,1.2\n0.5,1.3\n";
    CHECK(run_cli("flow --k-csv bad_angles.csv", dir.string()).code == 1);
    std::ofstream(dir / "bad_cell.csv") << "phi,value\n0,abc\n";
    CHECK(run_cli("flow --k-csv bad_cell.csv", dir.string()).code == 1);
    std::ofstream(dir / "bad_cols.csv") << "phi,k\n0,1.2\n";
    CHECK(run_cli("flow --k-csv bad_cols.csv", dir.string()).code == 1);
}

TEST_CASE("mass-report prints the full summary", "[cli]") {
    auto dir = fresh_dir("report");
    auto res = run_cli("mass-report --k-cosine 1.5,0.2 --r-max 100 --n-phi 64 --out rep.csv",
                       dir.string());
    REQUIRE(res.code == 0);
    CHECK(res.out.find("byst=") != std::string::npos);
    CHECK(res.out.find("h0_estimate=") != std::string::npos);
    CHECK(parse_key(res.out, "monotonicity_violations") == 0.0);
    auto rep = hypmass::csv::read_string(read_file(dir / "rep.csv"));
    REQUIRE(rep.header == std::vector<std::string>{"r", "m", "dmdr_formula", "dmdr_numeric"});
    CHECK(rep.rows.front()[0] == 1.0);
    CHECK(rep.rows.back()[0] == 100.0);
}

TEST_CASE("config file merges under explicit flags", "[cli]") {
    auto dir = fresh_dir("config");
    std::ofstream(dir / "run.conf") << "# settings\nk-cosine=1.5,0.3\nr-max=100\nn-phi=32\n";

    auto base = run_cli("mass-report --config run.conf --out a.csv", dir.string());
    REQUIRE(base.code == 0);
    auto rep = hypmass::csv::read_string(read_file(dir / "a.csv"));
    CHECK(rep.rows.back()[0] == 100.0);

    // The explicit flag must win over the file's r-max.
    auto flag = run_cli("mass-report --config run.conf --r-max 50 --out b.csv", dir.string());
    REQUIRE(flag.code == 0);
    auto rep2 = hypmass::csv::read_string(read_file(dir / "b.csv"));
    CHECK(rep2.rows.back()[0] == 50.0);

    std::ofstream(dir / "bad.conf") << "k-const=2\nbogus-key=1\n";
    CHECK(run_cli("mass-report --config bad.conf", dir.string()).code == 1);
    std::ofstream(dir / "noeq.conf") << "k-const\n";
    CHECK(run_cli("mass-report --config noeq.conf", dir.string()).code == 1);
    CHECK(run_cli("mass-report --config missing.conf", dir.string()).code == 1);
    CHECK(run_cli("mass-report --config", dir.string()).code == 1);
}

TEST_CASE("verify runs the invariant suite deterministically", "[cli]") {
    auto a = run_cli("verify --quick");
    REQUIRE(a.code == 0);
    CHECK(a.out.find("verify: PASS (9/9 groups)") != std::string::npos);
    auto b = run_cli("verify --quick");
    CHECK(b.code == 0);
    CHECK(a.out == b.out);

    auto bad = run_cli("verify --quick --inject-k2-error 1e-5");
    CHECK(bad.code == 4);
    CHECK(bad.out.find("group ellipse-oracle: FAIL") != std::string::npos);
}
