// Command-line front end for the hypmass library.
//
// Subcommands:
//   flow         solve the radial extension problem for given boundary
//                curvature data, writing the solution and a mass report
//   mass-report  same solve, but only the mass report and its summary
//   ellipse      boundary mass of ellipses in the one-parameter metric
//                family: at a finite scale, in the limit, or as a sweep
//   verify       run the built-in invariant suite
//
// Exit codes: 0 success; 1 bad flags, config, or I/O; 2 rejected input
// (nonpositive curvature data, or a curve touching the excluded region);
// 3 solver failure; 4 verification failure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypmass/btz_ellipse.hpp"
#include "hypmass/csv.hpp"
#include "hypmass/errors.hpp"
#include "hypmass/flow.hpp"
#include "hypmass/mass.hpp"
#include "hypmass/periodic.hpp"
#include "hypmass/verify.hpp"

namespace {

using hypmass::periodic::GridFunction;

struct BoundaryOptions {
    std::string k_csv;
    double k_const = 0.0;
    std::vector<double> k_cosine; // a, b
    bool has_csv = false, has_const = false, has_cosine = false;
};

struct SolveOptions {
    BoundaryOptions boundary;
    hypmass::flow::FlowConfig config;
    bool n_phi_given = false;
};

void add_solve_options(CLI::App* sub, SolveOptions& o) {
    auto* csv_opt = sub->add_option("--k-csv", o.boundary.k_csv,
                                    "Boundary curvature samples (CSV with columns phi,value)");
    auto* const_opt =
        sub->add_option("--k-const", o.boundary.k_const, "Constant boundary curvature");
    auto* cos_opt = sub->add_option("--k-cosine", o.boundary.k_cosine,
                                    "Boundary curvature a + b*cos(phi), given as a,b")
                        ->delimiter(',')
                        ->expected(2);
    csv_opt->excludes(const_opt)->excludes(cos_opt);
    const_opt->excludes(cos_opt);

    sub->add_option("--r0", o.config.r0, "Inner radius of the annulus")
        ->capture_default_str();
    sub->add_option("--r-max", o.config.r_max, "Outer radius of the annulus")
        ->capture_default_str();
    sub->add_option("--n-phi", o.config.n_phi, "Angular grid size (even, at least 16)")
        ->capture_default_str();
    sub->add_option("--tol", o.config.tol, "Step-doubling error tolerance")
        ->capture_default_str();
}

// Resolve the boundary-data source after flags, config file, and defaults
// have all been merged (so it must run from the subcommand callback, not a
// parse hook).
void finalize_boundary(const CLI::App& sub, SolveOptions& o) {
    o.boundary.has_csv = sub.count("--k-csv") > 0;
    o.boundary.has_const = sub.count("--k-const") > 0;
    o.boundary.has_cosine = sub.count("--k-cosine") > 0;
    o.n_phi_given = sub.count("--n-phi") > 0;
    const int sources =
        int(o.boundary.has_csv) + int(o.boundary.has_const) + int(o.boundary.has_cosine);
    if (sources != 1)
        throw hypmass::input_error(sub.get_name() +
                                   ": exactly one of --k-csv, --k-const, --k-cosine "
                                   "must be given");
}

GridFunction load_boundary_curvature(const SolveOptions& o) {
    if (o.boundary.has_csv) {
        std::ifstream in(o.boundary.k_csv);
        if (!in) throw hypmass::input_error("cannot open boundary file: " + o.boundary.k_csv);
        auto t = hypmass::csv::read(in);
        const std::size_t phi_col = t.column("phi");
        const std::size_t val_col = t.column("value");
        hypmass::csv::require_uniform_angles(t, phi_col);
        if (o.n_phi_given && o.config.n_phi != t.rows.size())
            throw hypmass::input_error("--n-phi disagrees with the boundary file's " +
                                       std::to_string(t.rows.size()) + " rows");
        std::vector<double> k(t.rows.size());
        for (std::size_t j = 0; j < k.size(); ++j) k[j] = t.rows[j][val_col];
        return GridFunction(std::move(k));
    }
    if (o.boundary.has_const)
        return GridFunction::constant(o.config.n_phi, o.boundary.k_const);
    const double a = o.boundary.k_cosine[0], b = o.boundary.k_cosine[1];
    return GridFunction::sample(o.config.n_phi,
                                [a, b](double phi) { return a + b * std::cos(phi); });
}

hypmass::flow::FlowSolution solve_from_options(SolveOptions& o) {
    auto k = load_boundary_curvature(o);
    o.config.n_phi = k.size();
    o.config.validate();
    auto u0 = hypmass::flow::boundary_data_from_curvature(k, o.config.r0);
    return hypmass::flow::solve(u0, o.config);
}

hypmass::csv::Table solution_table(const hypmass::flow::FlowSolution& sol) {
    hypmass::csv::Table t;
    t.header = {"r", "phi", "u", "v"};
    const std::size_t n = sol.config.n_phi;
    t.rows.reserve(sol.checkpoints() * n);
    for (std::size_t i = 0; i < sol.checkpoints(); ++i) {
        auto u = sol.u_at(i);
        for (std::size_t j = 0; j < n; ++j)
            t.rows.push_back({sol.radii[i], u.node(j), u[j], sol.v[i][j]});
    }
    return t;
}

void write_table(const std::string& path, const hypmass::csv::Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hypmass::input_error("cannot open output file: " + path);
    hypmass::csv::write(out, t);
    if (!out) throw hypmass::input_error("failed writing output file: " + path);
}

int run_flow(SolveOptions& o, const std::string& out_solution, const std::string& out_report) {
    auto sol = solve_from_options(o);
    write_table(out_solution, solution_table(sol));
    auto report = hypmass::mass::mass_report(sol);
    write_table(out_report, report.table());
    std::cout << "byst=" << hypmass::csv::format_double(report.byst) << "\n"
              << "h0_estimate=" << hypmass::csv::format_double(report.h0_estimate) << "\n";
    return 0;
}

int run_mass_report(SolveOptions& o, const std::string& out_report) {
    auto sol = solve_from_options(o);
    auto report = hypmass::mass::mass_report(sol);
    write_table(out_report, report.table());
    std::cout << report.summary();
    return 0;
}

struct EllipseOptions {
    double m = 1.0;
    double eps = 1.0;
    double R = 0.0;
    bool want_R = false, want_limit = false, want_sweep = false;
    std::string out = "fig1.csv";
};

int run_ellipse(const EllipseOptions& o) {
    if (o.want_sweep) {
        auto t = hypmass::ellipse::fig1_sweep(hypmass::ellipse::default_sweep_m(),
                                              hypmass::ellipse::default_sweep_eps());
        write_table(o.out, t);
        std::cout << "rows=" << t.rows.size() << "\n";
        return 0;
    }
    if (o.want_limit) {
        const double v = hypmass::ellipse::m_infinity(o.m, o.eps);
        std::cout << "m_infinity=" << hypmass::csv::format_double(v) << "\n";
        return 0;
    }
    hypmass::ellipse::EllipseSpec<double> spec{o.m, o.eps, o.R};
    const double v = hypmass::ellipse::byst_at_radius(spec);
    std::cout << "byst=" << hypmass::csv::format_double(v) << "\n";
    return 0;
}

// Replace "--config FILE" with the file's key=value entries, expressed as
// ordinary flags inserted after the command line (so explicit flags always
// win). Keys must name an option of the chosen subcommand; anything else is
// rejected. Lines that are blank or start with '#' are skipped.
std::vector<std::string> expand_config(const std::map<std::string, CLI::App*>& subs,
                                       std::vector<std::string> args) {
    CLI::App* sub = nullptr;
    std::size_t start = 0;
    for (std::size_t i = 0; i < args.size() && sub == nullptr; ++i) {
        auto it = subs.find(args[i]);
        if (it != subs.end()) {
            sub = it->second;
            start = i + 1;
        }
    }
    if (sub == nullptr) return args;

    std::string config_path;
    std::vector<std::string> kept(args.begin(), args.begin() + long(start));
    for (std::size_t i = start; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw hypmass::input_error("--config needs a file argument");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (config_path.empty()) return kept;

    std::set<std::string> given;
    for (std::size_t i = start; i < kept.size(); ++i) {
        const auto& tok = kept[i];
        if (tok.rfind("--", 0) == 0)
            given.insert(tok.substr(2, tok.find('=') - 2));
    }

    std::ifstream in(config_path);
    if (!in) throw hypmass::input_error("cannot open config file: " + config_path);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw hypmass::input_error("config line " + std::to_string(line_no) +
                                       " is not key=value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw hypmass::input_error("config line " + std::to_string(line_no) +
                                       " has an empty key");
        if (sub->get_option_no_throw("--" + key) == nullptr)
            throw hypmass::input_error("config: unknown key '" + key + "' for subcommand " +
                                       sub->get_name());
        if (given.count(key)) continue; // command line takes precedence
        kept.push_back("--" + key + "=" + value);
    }
    return kept;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-local and asymptotic mass toolkit for asymptotically "
                 "hyperbolic surfaces"};
    app.require_subcommand(1);

    SolveOptions flow_opts;
    std::string flow_out_solution = "solution.csv";
    std::string flow_out_report = "mass_report.csv";
    auto* flow_cmd = app.add_subcommand(
        "flow", "Solve the extension problem and report the mass along the way");
    add_solve_options(flow_cmd, flow_opts);
    flow_cmd->add_option("--out-solution", flow_out_solution, "Solution CSV path")
        ->capture_default_str();
    flow_cmd->add_option("--out-report", flow_out_report, "Mass report CSV path")
        ->capture_default_str();

    SolveOptions report_opts;
    std::string report_out = "mass_report.csv";
    auto* report_cmd =
        app.add_subcommand("mass-report", "Solve and print the mass report summary");
    add_solve_options(report_cmd, report_opts);
    report_cmd->add_option("--out", report_out, "Mass report CSV path")->capture_default_str();

    EllipseOptions ell;
    auto* ell_cmd = app.add_subcommand(
        "ellipse", "Boundary mass of ellipses in the one-parameter metric family");
    ell_cmd->add_option("--m", ell.m, "Family parameter")->capture_default_str();
    ell_cmd->add_option("--eps", ell.eps, "Ellipse eccentricity parameter")
        ->capture_default_str();
    auto* r_opt = ell_cmd->add_option("--R", ell.R, "Evaluate at this finite scale");
    auto* limit_opt =
        ell_cmd->add_flag("--limit", ell.want_limit, "Evaluate the large-scale limit");
    auto* sweep_opt = ell_cmd->add_flag(
        "--sweep", ell.want_sweep, "Write the limit over the standard parameter grid");
    ell_cmd->add_option("--out", ell.out, "Sweep CSV path (with --sweep)")
        ->capture_default_str();
    r_opt->excludes(limit_opt)->excludes(sweep_opt);
    limit_opt->excludes(sweep_opt);

    hypmass::verify::Options ver;
    auto* verify_cmd = app.add_subcommand("verify", "Run the built-in invariant suite");
    verify_cmd->add_flag("--quick", ver.quick, "Small grids and ensembles (seconds, not minutes)");
    verify_cmd
        ->add_option("--inject-k2-error", ver.k2_injected_error,
                     "Perturb a closed form to confirm the oracle catches it")
        ->group("");

    const std::map<std::string, CLI::App*> subs = {{"flow", flow_cmd},
                                                   {"mass-report", report_cmd},
                                                   {"ellipse", ell_cmd},
                                                   {"verify", verify_cmd}};
    for (auto& [name, sub] : subs)
        sub->add_option("--config",
                        "Read options from a key=value file (explicit flags take precedence)");

    int rc = 0;
    flow_cmd->callback([&] {
        finalize_boundary(*flow_cmd, flow_opts);
        rc = run_flow(flow_opts, flow_out_solution, flow_out_report);
    });
    report_cmd->callback([&] {
        finalize_boundary(*report_cmd, report_opts);
        rc = run_mass_report(report_opts, report_out);
    });
    ell_cmd->callback([&] {
        ell.want_R = ell_cmd->count("--R") > 0;
        ell.want_limit = ell_cmd->count("--limit") > 0;
        ell.want_sweep = ell_cmd->count("--sweep") > 0;
        if (int(ell.want_R) + int(ell.want_limit) + int(ell.want_sweep) != 1)
            throw hypmass::input_error(
                "ellipse: exactly one of --R, --limit, --sweep must be given");
        rc = run_ellipse(ell);
    });
    verify_cmd->callback([&] { rc = hypmass::verify::run(ver, std::cout) ? 0 : 4; });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(subs, std::move(args));
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(args);
        return rc;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const hypmass::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hypmass::hypothesis_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hypmass::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hypmass::solver_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
