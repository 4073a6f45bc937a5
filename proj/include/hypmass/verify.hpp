#pragma once

// Self-verification: every cross-module invariant the library promises,
// grouped and runnable as one deterministic suite. Each group prints one
// PASS/FAIL line (plus failure details); the suite passes iff every group
// does. The quick profile shrinks grids and ensemble sizes to run in
// seconds; the full profile uses the documented production grids.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "btz_ellipse.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "geometry.hpp"
#include "mass.hpp"
#include "periodic.hpp"
#include "spaces.hpp"

namespace hypmass::verify {

using periodic::GridFunction;

struct Options {
    bool quick = false;
    // Fault-injection hook for exercising the failure path: the amount is
    // added to the closed-form curvature coefficient before it is compared
    // with the numerical oracle, so a nonzero value must make the oracle
    // group fail. Never set outside tests.
    double k2_injected_error = 0.0;
};

namespace detail {

class Checker {
  public:
    void check(bool ok, std::string what) {
        if (!ok) failures_.push_back(std::move(what));
    }

    void near(const std::string& what, double got, double want, double tol) {
        if (!(std::abs(got - want) <= tol))
            failures_.push_back(what + ": got " + csv::format_double(got) + ", want " +
                                csv::format_double(want) + " within " + csv::format_double(tol));
    }

    const std::vector<std::string>& failures() const { return failures_; }

  private:
    std::vector<std::string> failures_;
};

} // namespace detail

// The randomized-but-reproducible family of smooth positive boundary data
// used by the enclosure and monotonicity groups: truncated cosine series
// u0 = c + A sum_{k=1..4} 0.2^(k-1) cos(k phi + psi_k). The base value,
// overall amplitude, and phases are random; the harmonic weights decay at a
// fixed factor 5 so the fundamental always dominates the angular content.
// By construction every sample lies in [0.85 - 0.2745, 1.2 + 0.2745] =
// [0.5755, 1.4745], safely positive.
inline std::vector<GridFunction> ensemble_initial_data(std::size_t count, std::size_t n_phi) {
    std::mt19937_64 rng(0x00C0FFEE5EEDULL);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; }; // [0, 1)
    std::vector<GridFunction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double base = 0.85 + 0.35 * unit();
        const double amp = 0.08 + 0.14 * unit();
        std::vector<double> a(5, 0.0), psi(5, 0.0);
        for (int k = 1; k <= 4; ++k) {
            a[k] = amp * std::pow(0.2, k - 1);
            psi[k] = periodic::two_pi * unit();
        }
        out.push_back(GridFunction::sample(n_phi, [&](double phi) {
            double u = base;
            for (int k = 1; k <= 4; ++k) u += a[k] * std::cos(k * phi + psi[k]);
            return u;
        }));
    }
    return out;
}

namespace detail {

inline geo::Metric2D<double> flat_polar() {
    geo::Metric2D<double> g;
    g.g_rr = [](double, double) { return geo::Jet2<double>{1.0, 0, 0, 0, 0, 0}; };
    g.g_rphi = [](double, double) { return geo::Jet2<double>{0, 0, 0, 0, 0, 0}; };
    g.g_phiphi = [](double r, double) { return geo::Jet2<double>{r * r, 2 * r, 0, 2.0, 0, 0}; };
    return g;
}

inline void group_spectral(const Options&, Checker& c) {
    auto f = GridFunction::sample(64, [](double phi) { return std::sin(3 * phi); });
    auto d = f.derivative(1);
    double worst = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
        worst = std::max(worst, std::abs(d[j] - 3 * std::cos(3 * d.node(j))));
    c.near("spectral derivative of sin(3 phi)", worst, 0.0, 1e-12);

    auto g = GridFunction::sample(32, [](double phi) { return std::exp(std::sin(phi)); });
    double interp_err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        interp_err = std::max(interp_err, std::abs(g.interpolate(g.node(j)) - g[j]));
    c.near("trigonometric interpolation at the nodes", interp_err, 0.0, 1e-13);
    c.near("mean preserved under resampling", g.resample(48).mean(), g.mean(), 1e-13);
}

inline void group_geometry(const Options&, Checker& c) {
    auto hyp = spaces::hyperbolic<double>();
    c.near("constant-curvature space scalar curvature", geo::scalar_curvature(hyp, 1.3, 0.7),
           -2.0, 1e-9);
    c.near("circle curvature in the reference space",
           geo::geodesic_curvature(hyp, geo::Curve<double>::circle(2.0), 1.1),
           std::sqrt(5.0) / 2.0, 1e-12);

    auto g1 = spaces::btz<double>(1.0);
    c.near("family metric scalar curvature", geo::scalar_curvature(g1, 2.4, 3.0), -2.0, 1e-9);
    c.near("family circle curvature closed form",
           geo::geodesic_curvature(g1, geo::Curve<double>::circle(3.0), 0.4),
           std::sqrt(8.0) / 3.0, 1e-12);
    bool threw = false;
    try {
        geo::scalar_curvature(g1, 0.9, 0.0);
    } catch (const domain_error&) {
        threw = true;
    }
    c.check(threw, "evaluation inside the excluded region must be rejected");

    geo::Curve<double> wavy;
    wavy.at = [](double phi) {
        return geo::CurveJet<double>{1.0 + 0.3 * std::cos(3 * phi), -0.9 * std::sin(3 * phi),
                                     -2.7 * std::cos(3 * phi)};
    };
    c.near("total turning of a closed planar curve",
           geo::total_geodesic_curvature(flat_polar(), wavy, 256), periodic::two_pi, 1e-8);
}

inline void group_reference(const Options&, Checker& c) {
    auto a = spaces::btz<double>(-1.0);
    auto b = spaces::hyperbolic<double>();
    bool identical = true;
    for (double r : {0.3, 1.0, 7.7})
        for (double phi : {0.1, 2.9}) {
            auto ja = a.jets(r, phi), jb = b.jets(r, phi);
            identical = identical && ja.E.v == jb.E.v && ja.E.dr == jb.E.dr &&
                        ja.G.drr == jb.G.drr;
        }
    c.check(identical, "family member at m = -1 must coincide with the reference space");

    auto aspect = spaces::MassAspect::sample(
        64, [](double phi) { return 2.0 + std::cos(2 * phi); },
        [](double phi) { return std::sin(phi); }, [](double) { return 1.0; });
    c.near("mass functional of the probe aspect", spaces::hamiltonian_mass(aspect), 5.0, 1e-12);

    auto zero = spaces::MassAspect::zero(32);
    auto alh0 = spaces::alh_metric(zero);
    c.near("tail metric with zero aspect is the reference space",
           geo::scalar_curvature(alh0, 2.0, 1.0), -2.0, 1e-9);
    c.near("inner validity radius for the zero aspect", spaces::alh_r_min(zero), 2e-3, 1e-15);

    std::ostringstream os;
    csv::write(os, aspect.to_csv());
    auto back = spaces::MassAspect::from_csv(csv::read_string(os.str()));
    c.check(back.mu11[3] == aspect.mu11[3] && back.mu22[60] == aspect.mu22[60],
            "aspect CSV round-trip must be exact");
}

inline void group_flow_exactness(const Options& opt, Checker& c) {
    const std::size_t n = opt.quick ? 64 : 256;
    const double r_max = opt.quick ? 200.0 : 1e3;
    std::vector<std::pair<double, double>> cases;
    if (opt.quick)
        cases = {{0.5, 1.0}, {0.9, 0.5}, {1.1, 3.0}, {2.0, 1.0}};
    else
        for (double u0 : {0.5, 0.9, 1.1, 2.0})
            for (double r0 : {0.5, 1.0, 3.0}) cases.emplace_back(u0, r0);

    for (auto [u0c, r0] : cases) {
        flow::FlowConfig cfg;
        cfg.r0 = r0;
        cfg.r_max = r_max;
        cfg.n_phi = n;
        auto sol = flow::solve(GridFunction::constant(n, u0c), cfg);
        const double K = (1.0 / (u0c * u0c) - 1.0) * (1.0 + r0 * r0);
        const std::string tag =
            " (u0 = " + csv::format_double(u0c) + ", r0 = " + csv::format_double(r0) + ")";

        double sup = 0.0;
        const double expect =
            1.0 / std::sqrt(1.0 + K / (1.0 + r_max * r_max));
        auto u = sol.u_at(sol.checkpoints() - 1);
        for (std::size_t j = 0; j < u.size(); ++j)
            sup = std::max(sup, std::abs(u[j] - expect));
        c.near("constant-data solution vs closed form" + tag, sup, 0.0, 1e-6);

        auto vinf = flow::v_infinity(sol);
        c.near("tail coefficient vs closed form" + tag, vinf.max(), -K / 2.0, 1e-5);
        c.near("tail coefficient spread" + tag, vinf.max() - vinf.min(), 0.0, 1e-10);
        c.near("asymptotic mass vs closed form" + tag, mass::h0_from_flow(sol), -K, 1e-4);
    }
}

inline void group_enclosure(const Options& opt, Checker& c) {
    const std::size_t n = opt.quick ? 64 : 256;
    const double r_max = opt.quick ? 200.0 : 1e3;
    const auto ensemble = ensemble_initial_data(opt.quick ? 5 : 20, n);

    for (std::size_t e = 0; e < ensemble.size(); ++e) {
        flow::FlowConfig cfg;
        cfg.r0 = 1.0;
        cfg.r_max = r_max;
        cfg.n_phi = n;
        auto sol = flow::solve(ensemble[e], cfg);
        const std::string tag = " (ensemble member " + std::to_string(e) + ")";

        double worst_low = 0.0, worst_high = 0.0;
        for (std::size_t i = 0; i < sol.checkpoints(); ++i) {
            auto u = sol.u_at(i);
            const double r = sol.radii[i];
            worst_low = std::max(worst_low, sol.barriers.lower(r) - u.min());
            worst_high = std::max(worst_high, u.max() - sol.barriers.upper(r));
        }
        c.check(worst_low <= cfg.tol_barrier() && worst_high <= cfg.tol_barrier(),
                "explicit envelope bounds at every checkpoint" + tag);

        auto rep = mass::mass_report(sol);
        c.check(rep.monotonicity_violations == 0, "mass must be non-increasing" + tag);
        bool signs = true;
        for (double f : rep.dmdr_formula) signs = signs && f <= 0.0;
        c.check(signs, "mass derivative formula must be nonpositive" + tag);

        double worst_rel = 0.0;
        for (std::size_t i = 0; i + 1 < rep.r.size(); ++i) {
            const double dr = rep.r[i + 1] - rep.r[i];
            if (dr / rep.r[i] > 0.2 + 1e-9) continue;
            const double secant = (rep.m[i + 1] - rep.m[i]) / dr;
            const double r_mid = 0.5 * (rep.r[i] + rep.r[i + 1]);
            const double mid = mass::dmdr_formula(r_mid, sol.u_interp(r_mid));
            if (std::abs(mid) <= 1e-8) continue;
            worst_rel = std::max(worst_rel, std::abs(secant - mid) / std::abs(mid));
        }
        c.check(worst_rel <= 0.02,
                "discrete mass derivative within 2% of the formula" + tag +
                    ", worst " + csv::format_double(worst_rel));

        c.near("boundary mass equals the cross-section mass at r0" + tag, rep.byst,
               rep.m.front(), 1e-10);
        c.check(rep.m.front() >= rep.h0_estimate - 1e-4,
                "cross-section mass must dominate the asymptotic mass" + tag);
    }
}

inline void group_curvature_residual(const Options& opt, Checker& c) {
    const std::size_t n = opt.quick ? 64 : 256;
    flow::FlowConfig cfg;
    cfg.r0 = 1.0;
    cfg.r_max = opt.quick ? 200.0 : 1e3;
    cfg.n_phi = n;
    auto u0 = GridFunction::sample(n, [](double phi) { return 1.0 + 0.2 * std::cos(phi); });
    auto sol = flow::solve(u0, cfg);
    auto g = sol.metric();
    const double tol = std::max(1e-4, 50.0 * cfg.tol);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < sol.checkpoints(); ++i)
        for (int a = 0; a < 8; ++a) {
            const double phi = periodic::two_pi * double(a) / 8.0;
            worst = std::max(worst,
                             std::abs(geo::scalar_curvature(g, sol.radii[i], phi) + 2.0));
        }
    c.near("prescribed scalar curvature on interior checkpoints", worst, 0.0, tol);
}

inline void group_tail_expansion(const Options& opt, Checker& c) {
    auto aspect = spaces::MassAspect::sample(
        256, [](double phi) { return 2.0 + std::cos(2 * phi); },
        [](double phi) { return std::sin(phi); }, [](double) { return 1.0; });
    auto g = spaces::alh_metric(aspect);
    const std::vector<double> radii =
        opt.quick ? std::vector<double>{1e2, 316.22776601683793, 1e3}
                  : std::vector<double>{1e2, 1e3, 1e4};

    std::vector<double> lr, ld;
    for (double r : radii) {
        auto circle = geo::Curve<double>::circle(r);
        double resid = 0.0;
        for (int a = 0; a < 64; ++a) {
            const double phi = periodic::two_pi * double(a) / 64.0;
            const double mu11 = 2.0 + std::cos(2 * phi);
            const double expect = 1.0 + (1.0 - 2.0 * mu11 - 1.0) / (2.0 * r * r);
            resid = std::max(resid, std::abs(geo::geodesic_curvature(g, circle, phi) - expect));
        }
        lr.push_back(std::log10(r));
        ld.push_back(std::log10(resid));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
        sx += lr[i];
        sy += ld[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * ld[i];
    }
    const double k = double(lr.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    c.check(slope <= -2.9, "curvature expansion residual slope must be steeper than -2.9, got " +
                               csv::format_double(slope));

    const double r = radii.back();
    auto circle = geo::Curve<double>::circle(r);
    const std::size_t nq = 256;
    double length = 0.0;
    for (std::size_t j = 0; j < nq; ++j)
        length += geo::curve_length_element(g, circle, periodic::two_pi * double(j) / double(nq));
    length *= periodic::two_pi / double(nq);
    const double r0 = length / periodic::two_pi;
    const double total_ref = std::sqrt(1.0 + r0 * r0) / r0 * length;
    const double total = geo::total_geodesic_curvature(g, circle, nq);
    const double probe = (r / (periodic::two_pi / 2.0)) * (total_ref - total);
    c.near("total-curvature probe recovers the aspect mass", probe, 5.0,
           opt.quick ? 1e-4 : 1e-3);
}

inline void group_ellipse_oracle(const Options& opt, Checker& c) {
    struct Pair {
        double m, eps;
    };
    std::vector<Pair> pairs;
    std::vector<double> angles;
    if (opt.quick) {
        pairs = {{1.0, 1.0}, {0.0, 0.5}, {-1.0, 0.25}};
        for (int a = 0; a < 4; ++a) angles.push_back(periodic::two_pi * double(a) / 4.0);
    } else {
        for (double m : {-1.0, 0.0, 1.0})
            for (double eps : {0.25, 0.5, 1.0}) pairs.push_back({m, eps});
        for (int a = 0; a < 16; ++a) angles.push_back(periodic::two_pi * double(a) / 16.0);
    }
    double worst = 0.0;
    for (const auto& p : pairs)
        for (double phi : angles) {
            const double closed = ellipse::k2_closed(p.m, p.eps, phi) + opt.k2_injected_error;
            worst = std::max(worst,
                             std::abs(closed - ellipse::k2_oracle_check(p.m, p.eps, phi)));
        }
    c.near("closed-form curvature coefficient vs numerical oracle", worst, 0.0, 1e-6);

    c.near("limit mass anchor value", ellipse::m_infinity(1.0, 1.0), 2.8848, 5e-4);
    for (double m : {-1.0, 0.0, 1.0, 2.0})
        c.near("round-case limit mass (m = " + csv::format_double(m) + ")",
               ellipse::m_infinity(m, 0.0), m + 1.0, 1e-9);

    if (!opt.quick) {
        for (double m : {-1.0, 0.0, 1.0}) {
            const double q = (ellipse::m_infinity(m, 1e-2) - (m + 1.0)) / 1e-4;
            const double want = 3.0 * (m + 4.0) / 8.0;
            c.check(std::abs(q - want) <= 0.01 * std::abs(want),
                    "quadratic limit-mass coefficient within 1% (m = " +
                        csv::format_double(m) + "), got " + csv::format_double(q));
        }
        const double cp = ellipse::ingredients(0.0, 1e-3).c;
        const double cm = ellipse::ingredients(0.0, -1e-3).c;
        const double c0 = ellipse::ingredients(0.0, 0.0).c;
        c.check(std::abs((cp - cm) / 2e-3 - 0.5) <= 0.005,
                "linear shape-constant coefficient within 1%");
        c.check(std::abs((cp - 2 * c0 + cm) / 2e-6 + 3.0 / 16.0) <= 0.01 * (3.0 / 16.0),
                "quadratic shape-constant coefficient within 1%");
    }
}

inline void group_boundary_mass(const Options& opt, Checker& c) {
    auto closed = [](double m, double R) {
        const double root = std::sqrt(1.0 + R * R);
        return 2.0 * root * (root - std::sqrt(R * R - m));
    };
    c.near("circle boundary mass (m = 1, R = 5)",
           mass::byst_mass_dphi(spaces::btz<double>(1.0), geo::Curve<double>::circle(5.0)),
           closed(1.0, 5.0), 1e-12);
    c.near("circle boundary mass (m = 0, R = 10)",
           mass::byst_mass_dphi(spaces::btz<double>(0.0), geo::Curve<double>::circle(10.0)),
           closed(0.0, 10.0), 1e-12);
    c.near("reference circles carry zero boundary mass",
           mass::byst_mass_dphi(spaces::hyperbolic<double>(), geo::Curve<double>::circle(7.0)),
           0.0, 1e-12);

    auto rep = mass::theorem1_check(spaces::hyperbolic<double>(),
                                    geo::Curve<double>::circle(2.0),
                                    opt.quick ? 16u : 64u, opt.quick ? 64u : 256u);
    c.check(rep.applicable && rep.inequality_holds,
            "total-curvature inequality applies on the geodesic disk");
    c.near("geodesic disk saturates the total-curvature bound",
           rep.total_boundary_curvature, rep.reference_bound, 1e-9);
    auto rep2 = mass::theorem1_check(spaces::btz<double>(1.0), geo::Curve<double>::circle(3.0),
                                     opt.quick ? 16u : 64u, opt.quick ? 64u : 256u);
    c.check(!rep2.jordan_domain_ok && !rep2.applicable,
            "disk crossing the excluded region must be flagged inapplicable");

    const double limit = ellipse::m_infinity(1.0, 1.0);
    if (opt.quick) {
        const double finite =
            ellipse::byst_at_radius(ellipse::EllipseSpec<double>{1.0, 1.0, 100.0});
        c.near("finite-scale boundary mass near its limit", finite, limit, 2e-4);
    } else {
        const double finite =
            ellipse::byst_at_radius(ellipse::EllipseSpec<double>{1.0, 1.0, 1e3});
        c.near("finite-scale boundary mass near its limit", finite, limit, 3e-6);
    }
}

} // namespace detail

struct GroupResult {
    std::string name;
    bool pass = false;
    std::vector<std::string> failures;
};

inline std::vector<GroupResult> run_groups(const Options& opt) {
    using Fn = void (*)(const Options&, detail::Checker&);
    const std::pair<const char*, Fn> groups[] = {
        {"spectral-core", detail::group_spectral},
        {"geometry-closed-forms", detail::group_geometry},
        {"reference-spaces", detail::group_reference},
        {"flow-exactness", detail::group_flow_exactness},
        {"enclosure-and-monotonicity", detail::group_enclosure},
        {"curvature-residual", detail::group_curvature_residual},
        {"tail-expansion", detail::group_tail_expansion},
        {"ellipse-oracle", detail::group_ellipse_oracle},
        {"boundary-mass", detail::group_boundary_mass},
    };
    std::vector<GroupResult> results;
    for (const auto& [name, fn] : groups) {
        detail::Checker c;
        try {
            fn(opt, c);
        } catch (const std::exception& ex) {
            c.check(false, std::string("unexpected exception: ") + ex.what());
        }
        results.push_back(GroupResult{name, c.failures().empty(), c.failures()});
    }
    return results;
}

// Runs all groups, printing one line per group (plus failure details) in a
// fixed order with deterministic formatting. Returns true iff all passed.
inline bool run(const Options& opt, std::ostream& os) {
    auto results = run_groups(opt);
    std::size_t passed = 0;
    for (const auto& g : results) {
        os << "group " << g.name << ": " << (g.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& f : g.failures) os << "  - " << f << "\n";
        if (g.pass) ++passed;
    }
    os << "verify: " << (passed == results.size() ? "PASS" : "FAIL") << " (" << passed << "/"
       << results.size() << " groups)\n";
    return passed == results.size();
}

} // namespace hypmass::verify
