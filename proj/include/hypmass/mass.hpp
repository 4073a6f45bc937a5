#pragma once

// Mass functionals over extension flows and boundary curves:
//
//   * mass_m(r, u)       - integral mass of the radius-r cross-section of an
//                          extension with conformal factor u,
//                          (1/pi) Int (1+r^2)(1 - 1/u) dphi.
//   * dmdr_formula(r, u) - its exact radial derivative along the flow,
//                          -(r/pi) Int (u + 1/u - 2) dphi, nonpositive by
//                          AM-GM, so the mass is monotone nonincreasing.
//   * byst_mass_*        - boundary mass of a closed curve: the defect
//                          between the reference curvature of the
//                          equal-length round circle and the curve's actual
//                          geodesic curvature, in a dphi- and a ds-weighted
//                          variant (they coincide on centred circles).
//   * h0_from_flow       - asymptotic mass read off the flow tail,
//                          (1/pi) Int v_inf dphi.
//   * theorem1_check     - report for the total-curvature inequality
//                          Int k ds <= 2 pi sqrt(1 + r0^2) on a disk, with
//                          hypothesis flags (curvature lower bound, polar
//                          disk inside the chart, convex boundary).
//   * mass_report        - per-checkpoint table (mass, exact and discrete
//                          derivatives) plus the boundary and asymptotic
//                          masses for a flow solution.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "geometry.hpp"
#include "periodic.hpp"

namespace hypmass::mass {

using periodic::GridFunction;

// (1/pi) Int_0^{2pi} (1+r^2)(1 - 1/u) dphi.
inline double mass_m(double r, const GridFunction& u) {
    if (!(u.min() > 0.0)) throw input_error("mass_m: u must be positive");
    const double w = 1.0 + r * r;
    return 2.0 * w * u.map([](double uj) { return 1.0 - 1.0 / uj; }).mean();
}

// Same quantity computed from v = r^2(u-1): 1 - 1/u = v/(r^2+v). Avoids the
// cancellation of forming u-1 from u at large r.
inline double mass_m_from_v(double r, const GridFunction& v) {
    const double r2 = r * r;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (!(r2 + v[j] > 0.0)) throw input_error("mass_m_from_v: u must be positive");
    const double w = 1.0 + r2;
    return 2.0 * w * v.map([r2](double vj) { return vj / (r2 + vj); }).mean();
}

// -(r/pi) Int_0^{2pi} (u + 1/u - 2) dphi; always <= 0.
inline double dmdr_formula(double r, const GridFunction& u) {
    if (!(u.min() > 0.0)) throw input_error("dmdr_formula: u must be positive");
    return -2.0 * r * u.map([](double uj) { return uj + 1.0 / uj - 2.0; }).mean();
}

// From v: u + 1/u - 2 = (u-1)^2/u = v^2 / (r^2 (r^2 + v)).
inline double dmdr_formula_from_v(double r, const GridFunction& v) {
    const double r2 = r * r;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (!(r2 + v[j] > 0.0)) throw input_error("dmdr_formula_from_v: u must be positive");
    return -2.0 * r * v.map([r2](double vj) { return vj * vj / (r2 * (r2 + vj)); }).mean();
}

namespace detail {

template <class Real>
Real curve_length(const geo::Metric2D<Real>& g, const geo::Curve<Real>& c, std::size_t n) {
    Real acc = 0;
    const Real dphi = Real(periodic::two_pi) / Real(n);
    for (std::size_t j = 0; j < n; ++j)
        acc += geo::curve_length_element(g, c, Real(j) * dphi);
    return acc * dphi;
}

// Derivative at node x[at] of the polynomial through (x[i], y[i]), by
// barycentric differentiation. Used for the report's numeric-derivative
// column, which is defined purely in terms of the table's own rows.
inline double lagrange_derivative_at_node(const std::vector<double>& x,
                                          const std::vector<double>& y, std::size_t at) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) w[j] /= x[j] - x[l];
    double acc = 0.0, diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == at) continue;
        const double d = (w[j] / w[at]) / (x[at] - x[j]);
        acc += d * y[j];
        diag -= d;
    }
    return acc + diag * y[at];
}

} // namespace detail

// (1/pi) Int_0^{2pi} (khat - k(phi)) r0 sqrt(1+r0^2) dphi, where r0 = L/2pi
// is the radius of the round circle of the same length and
// khat = sqrt(1+r0^2)/r0 its curvature in the reference space.
template <class Real>
Real byst_mass_dphi(const geo::Metric2D<Real>& g, const geo::Curve<Real>& c,
                    std::size_t n = 256) {
    if (n < 4) throw input_error("byst_mass_dphi: need at least 4 quadrature nodes");
    const Real r0 = detail::curve_length(g, c, n) / Real(periodic::two_pi);
    const Real root = std::sqrt(Real(1) + r0 * r0);
    const Real khat = root / r0;
    const Real dphi = Real(periodic::two_pi) / Real(n);
    Real acc = 0;
    for (std::size_t j = 0; j < n; ++j)
        acc += khat - geo::geodesic_curvature(g, c, Real(j) * dphi);
    return acc * dphi * r0 * root * Real(2) / Real(periodic::two_pi);
}

// (1/pi) Int (khat - k) sqrt(1+r0^2) ds; equal to the dphi form whenever
// ds = r0 dphi along the curve (in particular for centred circles).
template <class Real>
Real byst_mass_ds(const geo::Metric2D<Real>& g, const geo::Curve<Real>& c,
                  std::size_t n = 256) {
    if (n < 4) throw input_error("byst_mass_ds: need at least 4 quadrature nodes");
    const Real r0 = detail::curve_length(g, c, n) / Real(periodic::two_pi);
    const Real root = std::sqrt(Real(1) + r0 * r0);
    const Real khat = root / r0;
    const Real dphi = Real(periodic::two_pi) / Real(n);
    Real acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const Real phi = Real(j) * dphi;
        acc += (khat - geo::geodesic_curvature(g, c, phi)) *
               geo::curve_length_element(g, c, phi);
    }
    return acc * dphi * root * Real(2) / Real(periodic::two_pi);
}

// (1/pi) Int v_inf dphi = 2 * mean(v_inf). Throws if the tail has not settled.
inline double h0_from_flow(const flow::FlowSolution& sol) {
    return 2.0 * flow::v_infinity(sol).mean();
}

// Report for the total-curvature inequality on a disk bounded by `curve`.
struct Theorem1Report {
    double total_boundary_curvature = 0.0; // Int k ds
    double reference_bound = 0.0;          // 2 pi sqrt(1 + r0^2)
    double r0 = 0.0;                       // L / 2pi
    double min_gauss = std::numeric_limits<double>::quiet_NaN();
    double min_boundary_curvature = 0.0;
    bool gauss_hypothesis_ok = false; // sampled Gauss curvature >= -1 - 1e-9
    bool jordan_domain_ok = false;    // the full polar disk lies in the chart
    bool boundary_convex = false;     // k > 0 along the curve
    bool applicable = false;          // all hypotheses hold
    bool inequality_holds = false;    // Int k ds <= bound (+ 1e-9 slack)
};

// Samples Gauss curvature on an n_radial x n_angular polar grid over the
// disk {(t rho(phi), phi) : 0 < t <= 1} and checks the inequality
// Int k ds <= 2 pi sqrt(1+r0^2). Hypotheses are reported, never enforced.
inline Theorem1Report theorem1_check(const geo::Metric2D<double>& g,
                                     const geo::Curve<double>& curve,
                                     std::size_t n_radial = 64,
                                     std::size_t n_angular = 256) {
    if (n_radial == 0 || n_angular < 4)
        throw input_error("theorem1_check: degenerate sampling grid");
    Theorem1Report rep;
    const double dphi = periodic::two_pi / double(n_angular);

    const double length = detail::curve_length(g, curve, n_angular);
    rep.r0 = length / periodic::two_pi;
    rep.reference_bound = periodic::two_pi * std::sqrt(1.0 + rep.r0 * rep.r0);
    rep.total_boundary_curvature = geo::total_geodesic_curvature(g, curve, n_angular);

    rep.min_boundary_curvature = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_angular; ++j)
        rep.min_boundary_curvature =
            std::min(rep.min_boundary_curvature,
                     geo::geodesic_curvature(g, curve, double(j) * dphi));
    rep.boundary_convex = rep.min_boundary_curvature > 0.0;

    rep.jordan_domain_ok = true;
    double min_gauss = std::numeric_limits<double>::infinity();
    bool sampled = false;
    for (std::size_t i = 0; i < n_radial; ++i) {
        const double t = double(i + 1) / double(n_radial);
        for (std::size_t j = 0; j < n_angular; ++j) {
            const double phi = double(j) * dphi;
            const double r = t * curve.at(phi).rho;
            if (!g.in_domain(r, phi)) {
                rep.jordan_domain_ok = false;
                continue;
            }
            min_gauss = std::min(min_gauss, 0.5 * geo::scalar_curvature(g, r, phi));
            sampled = true;
        }
    }
    if (sampled) rep.min_gauss = min_gauss;
    rep.gauss_hypothesis_ok = sampled && min_gauss >= -1.0 - 1e-9;

    rep.applicable = rep.gauss_hypothesis_ok && rep.jordan_domain_ok && rep.boundary_convex;
    rep.inequality_holds =
        rep.total_boundary_curvature <=
        rep.reference_bound + 1e-9 * std::max(1.0, std::abs(rep.reference_bound));
    return rep;
}

// Per-checkpoint mass table for a flow solution, plus the boundary mass at
// r0 and the asymptotic mass from the tail.
struct MassReport {
    std::vector<double> r;
    std::vector<double> m;
    std::vector<double> dmdr_formula;
    std::vector<double> dmdr_numeric;
    double byst = 0.0;
    double h0_estimate = 0.0;
    std::size_t monotonicity_violations = 0;

    csv::Table table() const {
        csv::Table t;
        t.header = {"r", "m", "dmdr_formula", "dmdr_numeric"};
        for (std::size_t i = 0; i < r.size(); ++i)
            t.rows.push_back({r[i], m[i], dmdr_formula[i], dmdr_numeric[i]});
        return t;
    }

    // key=value block mirroring the CSV payload's headline numbers.
    std::string summary() const {
        std::string out;
        out += "byst=" + csv::format_double(byst) + "\n";
        out += "h0_estimate=" + csv::format_double(h0_estimate) + "\n";
        out += "monotonicity_violations=" + std::to_string(monotonicity_violations) + "\n";
        return out;
    }
};

inline MassReport mass_report(const flow::FlowSolution& sol) {
    MassReport rep;
    const std::size_t n = sol.checkpoints();
    rep.r = sol.radii;
    rep.m.resize(n);
    rep.dmdr_formula.resize(n);
    rep.dmdr_numeric.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rep.m[i] = mass_m_from_v(sol.radii[i], sol.v[i]);
        rep.dmdr_formula[i] = dmdr_formula_from_v(sol.radii[i], sol.v[i]);
    }
    // Five-point stencils (clamped at the table edges) on the checkpoint
    // grid, so the column can be reproduced from the CSV rows alone.
    const std::size_t width = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = (i >= width / 2) ? i - width / 2 : 0;
        lo = std::min(lo, n - width);
        std::vector<double> xs(rep.r.begin() + lo, rep.r.begin() + lo + width);
        std::vector<double> ys(rep.m.begin() + lo, rep.m.begin() + lo + width);
        rep.dmdr_numeric[i] = detail::lagrange_derivative_at_node(xs, ys, i - lo);
    }
    const double slack = 10.0 * sol.config.tol;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (rep.m[i + 1] > rep.m[i] + slack) ++rep.monotonicity_violations;

    auto g = sol.metric();
    auto circle = geo::Curve<double>::circle(sol.config.r0);
    rep.byst = byst_mass_dphi(g, circle, sol.config.n_phi);
    rep.h0_estimate = h0_from_flow(sol);
    return rep;
}

} // namespace hypmass::mass
