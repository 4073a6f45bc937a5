#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hypmass/flow.hpp"
#include "hypmass/geometry.hpp"
#include "hypmass/mass.hpp"
#include "hypmass/spaces.hpp"
#include "support/oracles.hpp"

namespace mass = hypmass::mass;
namespace flow = hypmass::flow;
namespace geo = hypmass::geo;
namespace spaces = hypmass::spaces;
using hypmass::periodic::GridFunction;

namespace {

geo::Metric2D<double> flat_polar() {
    geo::Metric2D<double> g;
    g.g_rr = [](double, double) { return geo::Jet2<double>{1.0, 0, 0, 0, 0, 0}; };
    g.g_rphi = [](double, double) { return geo::Jet2<double>{0, 0, 0, 0, 0, 0}; };
    g.g_phiphi = [](double r, double) { return geo::Jet2<double>{r * r, 2 * r, 0, 2.0, 0, 0}; };
    return g;
}

// A closed curve rho(phi) = R(1 + a cos(m phi)) with analytic jets.
geo::Curve<double> wavy(double R, double a, int m) {
    geo::Curve<double> c;
    c.at = [=](double phi) {
        geo::CurveJet<double> j;
        j.rho = R * (1.0 + a * std::cos(m * phi));
        j.d1 = -R * a * m * std::sin(m * phi);
        j.d2 = -R * a * m * m * std::cos(m * phi);
        return j;
    };
    return c;
}

double circle_byst_closed_form(double m, double R) {
    const double root = std::sqrt(1.0 + R * R);
    return 2.0 * root * (root - std::sqrt(R * R - m));
}

} // namespace

TEST_CASE("cross-section mass closed forms", "[mass]") {
    CHECK(mass::mass_m(2.0, GridFunction::constant(32, 1.0)) == Catch::Approx(0.0).margin(1e-15));
    for (double c : {0.5, 1.3, 2.0})
        for (double r : {1.0, 5.0}) {
            const double expect = 2.0 * (1.0 + r * r) * (1.0 - 1.0 / c);
            CHECK(mass::mass_m(r, GridFunction::constant(16, c)) == Catch::Approx(expect));
        }
    CHECK_THROWS_AS(mass::mass_m(1.0, GridFunction::constant(16, -1.0)),
                    hypmass::input_error);

    // Deviation-variable form agrees with the direct form...
    auto u = GridFunction::sample(32, [](double phi) { return 1.1 + 0.3 * std::cos(phi); });
    const double r = 1.7;
    auto v = u.map([r](double uj) { return r * r * (uj - 1.0); });
    CHECK(mass::mass_m_from_v(r, v) == Catch::Approx(mass::mass_m(r, u)).margin(1e-12));

    // ...and keeps full precision at large radius, where the direct form
    // would lose digits forming u-1.
    const double rl = 1e6, v0 = -1.5;
    const double exact = 2.0 * (1.0 + rl * rl) * v0 / (rl * rl + v0);
    CHECK(mass::mass_m_from_v(rl, GridFunction::constant(16, v0)) ==
          Catch::Approx(exact).epsilon(1e-14));
}

TEST_CASE("mass of the separable solution family", "[mass]") {
    const double K = 3.0;
    auto u_of_r = [&](double r) { return 1.0 / std::sqrt(1.0 + K / (1.0 + r * r)); };
    for (double r : {0.5, 2.0, 20.0}) {
        const double w = 1.0 + r * r;
        const double expect = 2.0 * w * (1.0 - std::sqrt(1.0 + K / w));
        CHECK(mass::mass_m(r, GridFunction::constant(16, u_of_r(r))) ==
              Catch::Approx(expect).epsilon(1e-13));
    }
    // The limit is -K, approached like K^2/(4(1+r^2)).
    const double r = 1e3;
    CHECK(mass::mass_m(r, GridFunction::constant(16, u_of_r(r))) ==
          Catch::Approx(-K).margin(3e-6));
}

TEST_CASE("mass derivative formula", "[mass]") {
    CHECK(mass::dmdr_formula(3.0, GridFunction::constant(16, 1.0)) ==
          Catch::Approx(0.0).margin(1e-15));
    for (double r : {0.5, 1.0, 4.0})
        CHECK(mass::dmdr_formula(r, GridFunction::constant(16, 2.0)) == Catch::Approx(-r));

    // Nonpositive for arbitrary positive data (AM-GM pointwise).
    oracles::Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        auto u = GridFunction::sample(
            32, [&](double phi) { return 0.6 + rng.uniform(0.0, 1.2) * (1.0 + std::sin(phi)) / 2.0; });
        REQUIRE(mass::dmdr_formula(1.5, u) <= 0.0);
    }

    auto u = GridFunction::sample(32, [](double phi) { return 1.2 + 0.4 * std::cos(phi); });
    const double r = 2.3;
    auto v = u.map([r](double uj) { return r * r * (uj - 1.0); });
    CHECK(mass::dmdr_formula_from_v(r, v) ==
          Catch::Approx(mass::dmdr_formula(r, u)).margin(1e-13));
}

TEST_CASE("boundary mass of circles against closed forms", "[mass]") {
    auto hyp = spaces::hyperbolic<double>();
    auto c2 = geo::Curve<double>::circle(2.0);
    CHECK(mass::byst_mass_dphi(hyp, c2) == Catch::Approx(0.0).margin(1e-12));
    CHECK(mass::byst_mass_ds(hyp, c2) == Catch::Approx(0.0).margin(1e-12));

    struct Case {
        double m, R, pin;
    } cases[] = {
        {1.0, 5.0, 2.04001601281281435},
        {0.0, 10.0, 1.0024875775821946},
        {-1.0, 7.0, 0.0},
    };
    for (const auto& c : cases) {
        auto g = spaces::btz<double>(c.m);
        auto circ = geo::Curve<double>::circle(c.R);
        const double got = mass::byst_mass_dphi(g, circ);
        CHECK(got == Catch::Approx(circle_byst_closed_form(c.m, c.R)).margin(1e-12));
        CHECK(got == Catch::Approx(c.pin).margin(1e-12));
        CHECK(mass::byst_mass_ds(g, circ) == Catch::Approx(got).margin(1e-12));
    }

    // Large-radius limit recovers m + 1 like (m+1)^2/(4R^2).
    auto g1 = spaces::btz<double>(1.0);
    CHECK(mass::byst_mass_dphi(g1, geo::Curve<double>::circle(100.0)) ==
          Catch::Approx(2.0).margin(1.5e-4));
}

TEST_CASE("dphi and ds boundary masses differ off circles", "[mass]") {
    auto hyp = spaces::hyperbolic<double>();
    auto c = wavy(3.0, 0.2, 2);
    const double a = mass::byst_mass_dphi(hyp, c, 512);
    const double b = mass::byst_mass_ds(hyp, c, 512);
    CHECK(std::abs(a - b) > 1e-3);
    // Both quadratures are already converged at this resolution.
    CHECK(mass::byst_mass_dphi(hyp, c, 256) == Catch::Approx(a).margin(1e-9));
    CHECK(mass::byst_mass_ds(hyp, c, 256) == Catch::Approx(b).margin(1e-9));
    CHECK_THROWS_AS(mass::byst_mass_dphi(hyp, c, 2), hypmass::input_error);
}

TEST_CASE("asymptotic mass from the flow tail", "[mass]") {
    flow::FlowConfig cfg;
    cfg.n_phi = 32;
    auto sol1 = flow::solve(GridFunction::constant(32, 1.0), cfg);
    CHECK(mass::h0_from_flow(sol1) == Catch::Approx(0.0).margin(1e-12));

    const double c = 0.8, K = (1.0 / (c * c) - 1.0) * 2.0;
    auto sol2 = flow::solve(GridFunction::constant(32, c), cfg);
    CHECK(mass::h0_from_flow(sol2) == Catch::Approx(-K).margin(1e-4));
}

TEST_CASE("flow mass report: chain identity and monotonicity", "[mass]") {
    const std::size_t n = 64;
    flow::FlowConfig cfg;
    cfg.r0 = 1.0;
    cfg.r_max = 1e3;
    cfg.n_phi = n;
    const double k1 = std::sqrt(2.0);
    auto k = GridFunction::sample(
        n, [&](double phi) { return k1 / (1.0 + 0.2 * std::cos(phi) + 0.1 * std::sin(2 * phi)); });
    auto u0 = flow::boundary_data_from_curvature(k, cfg.r0);
    auto sol = flow::solve(u0, cfg);
    auto rep = mass::mass_report(sol);

    REQUIRE(rep.r.size() == sol.checkpoints());
    CHECK(rep.monotonicity_violations == 0);
    for (std::size_t i = 0; i < rep.r.size(); ++i) REQUIRE(rep.dmdr_formula[i] <= 0.0);
    for (std::size_t i = 0; i + 1 < rep.r.size(); ++i)
        REQUIRE(rep.m[i + 1] <= rep.m[i] + 10.0 * cfg.tol);

    // Boundary mass at r0 is the same number as the cross-section mass there.
    CHECK(rep.byst == Catch::Approx(rep.m.front()).margin(1e-11));
    CHECK(rep.byst == Catch::Approx(mass::mass_m(cfg.r0, u0)).margin(1e-11));

    // Ordering against the asymptotic mass, and tail consistency.
    CHECK(rep.m.front() >= rep.h0_estimate - 1e3 * cfg.tol);
    CHECK(rep.m.back() == Catch::Approx(rep.h0_estimate).margin(1e-4));

    // Adjacent-pair secants track the exact derivative, evaluated at the
    // pair midpoint through the checkpoint interpolant, within 2 percent.
    for (std::size_t i = 0; i + 1 < rep.r.size(); ++i) {
        const double dr = rep.r[i + 1] - rep.r[i];
        if (dr / rep.r[i] > 0.2 + 1e-9) continue;
        const double secant = (rep.m[i + 1] - rep.m[i]) / dr;
        const double r_mid = 0.5 * (rep.r[i] + rep.r[i + 1]);
        const double mid = mass::dmdr_formula(r_mid, sol.u_interp(r_mid));
        if (std::abs(mid) <= 1e-8) continue;
        INFO("pair " << i << " r = " << rep.r[i]);
        REQUIRE(std::abs(secant - mid) <= 0.02 * std::abs(mid));
    }

    // The report's derivative column is a pure finite difference of the
    // (r, m) rows (five-point stencils); where the derivative is above the
    // resolvability floor it matches the row-local formula within 2 percent.
    for (std::size_t i = 0; i < rep.r.size(); ++i)
        if (std::abs(rep.dmdr_formula[i]) > 1e-8) {
            const bool one_sided = (i == 0 || i + 1 == rep.r.size());
            INFO("row " << i << " r = " << rep.r[i]);
            REQUIRE(std::abs(rep.dmdr_numeric[i] - rep.dmdr_formula[i]) <=
                    (one_sided ? 0.04 : 0.02) * std::abs(rep.dmdr_formula[i]));
        }
}

TEST_CASE("mass report serialization", "[mass]") {
    flow::FlowConfig cfg;
    cfg.r_max = 200.0;
    cfg.n_phi = 32;
    auto u0 = GridFunction::sample(32, [](double phi) { return 1.0 + 0.1 * std::cos(phi); });
    auto rep = mass::mass_report(flow::solve(u0, cfg));

    auto t = rep.table();
    REQUIRE(t.header == std::vector<std::string>{"r", "m", "dmdr_formula", "dmdr_numeric"});
    REQUIRE(t.rows.size() == rep.r.size());

    std::ostringstream os;
    hypmass::csv::write(os, t);
    auto back = hypmass::csv::read_string(os.str());
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j) REQUIRE(back.rows[i][j] == t.rows[i][j]);

    auto summary = rep.summary();
    CHECK(summary.find("byst=") != std::string::npos);
    CHECK(summary.find("h0_estimate=") != std::string::npos);
    CHECK(summary.find("monotonicity_violations=0") != std::string::npos);
}

TEST_CASE("total-curvature inequality report", "[mass]") {
    SECTION("geodesic disk: equality, all hypotheses hold") {
        auto rep = mass::theorem1_check(spaces::hyperbolic<double>(),
                                        geo::Curve<double>::circle(2.0));
        CHECK(rep.r0 == Catch::Approx(2.0).margin(1e-12));
        CHECK(rep.total_boundary_curvature ==
              Catch::Approx(rep.reference_bound).margin(1e-9));
        CHECK(rep.min_gauss == Catch::Approx(-1.0).margin(1e-9));
        CHECK(rep.gauss_hypothesis_ok);
        CHECK(rep.jordan_domain_ok);
        CHECK(rep.boundary_convex);
        CHECK(rep.applicable);
        CHECK(rep.inequality_holds);
    }
    SECTION("flat unit disk: strict inequality") {
        auto rep = mass::theorem1_check(flat_polar(), geo::Curve<double>::circle(1.0));
        CHECK(rep.total_boundary_curvature ==
              Catch::Approx(hypmass::periodic::two_pi).margin(1e-10));
        CHECK(rep.reference_bound ==
              Catch::Approx(hypmass::periodic::two_pi * std::sqrt(2.0)).margin(1e-10));
        CHECK(rep.min_gauss == Catch::Approx(0.0).margin(1e-9));
        CHECK(rep.applicable);
        CHECK(rep.inequality_holds);
        CHECK(rep.total_boundary_curvature < rep.reference_bound);
    }
    SECTION("black-hole slice: disk leaves the chart, report flags it") {
        auto rep = mass::theorem1_check(spaces::btz<double>(1.0),
                                        geo::Curve<double>::circle(3.0));
        CHECK_FALSE(rep.jordan_domain_ok);
        CHECK_FALSE(rep.applicable);
        CHECK(rep.boundary_convex);
        // The boundary integrals are still reported.
        CHECK(rep.total_boundary_curvature ==
              Catch::Approx(hypmass::periodic::two_pi * std::sqrt(8.0)).margin(1e-9));
    }
    SECTION("nonconvex boundary is flagged") {
        auto rep = mass::theorem1_check(flat_polar(), wavy(1.0, 0.6, 3));
        CHECK_FALSE(rep.boundary_convex);
        CHECK_FALSE(rep.applicable);
        CHECK(rep.min_boundary_curvature < 0.0);
    }
    CHECK_THROWS_AS(
        mass::theorem1_check(flat_polar(), geo::Curve<double>::circle(1.0), 0, 256),
        hypmass::input_error);
}
