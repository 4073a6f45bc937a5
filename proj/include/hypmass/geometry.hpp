#pragma once

// Differential geometry of 2D metrics in polar-type coordinates (r, phi),
// phi periodic with period 2*pi.
//
// A metric is described by its three components E = g_rr, F = g_rphi,
// G = g_phiphi, each supplied as a function returning the value together
// with all partial derivatives through second order (a "2-jet"). Analytic
// jets are preferred; `jet_from_value` builds them by fourth-order centered
// finite differences for metrics only available pointwise.
//
// Curves are radial graphs r = rho(phi). The geodesic curvature is reported
// with respect to the outward (increasing-r) conormal and is positive for
// convex curves: a round circle of radius R in the flat metric has
// curvature +1/R.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "errors.hpp"

namespace hypmass::geo {

template <class Real>
struct Jet2 {
    Real v{};   // value
    Real dr{};  // d/dr
    Real dp{};  // d/dphi
    Real drr{}; // d2/dr2
    Real drp{}; // d2/drdphi
    Real dpp{}; // d2/dphi2
};

template <class Real>
struct MetricJets {
    Jet2<Real> E, F, G;
};

template <class Real>
struct Metric2D {
    using jet_fn = std::function<Jet2<Real>(Real, Real)>;
    using domain_fn = std::function<bool(Real, Real)>;

    jet_fn g_rr;
    jet_fn g_rphi;
    jet_fn g_phiphi;
    domain_fn domain; // empty means: defined wherever r > 0

    bool in_domain(Real r, Real phi) const {
        if (!(r > Real(0))) return false;
        return domain ? domain(r, phi) : true;
    }

    void require_in_domain(Real r, Real phi) const {
        if (!in_domain(r, phi))
            throw domain_error("metric evaluated outside its domain at r = " +
                               std::to_string(double(r)));
    }

    MetricJets<Real> jets(Real r, Real phi) const {
        require_in_domain(r, phi);
        return MetricJets<Real>{g_rr(r, phi), g_rphi(r, phi), g_phiphi(r, phi)};
    }
};

// Build a 2-jet function from a plain value function by fourth-order centered
// differences, step 1e-4 * max(1, |r|) in r and 1e-4 in phi.
template <class Real, class F>
typename Metric2D<Real>::jet_fn jet_from_value(F f) {
    return [f](Real r, Real phi) -> Jet2<Real> {
        const Real hr = Real(1e-4) * std::max<Real>(Real(1), std::abs(r));
        const Real hp = Real(1e-4);
        auto d1 = [](auto g, Real x, Real h) {
            return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h);
        };
        auto d2 = [](auto g, Real x, Real h) {
            return (-g(x + 2 * h) + 16 * g(x + h) - 30 * g(x) + 16 * g(x - h) - g(x - 2 * h)) /
                   (12 * h * h);
        };
        Jet2<Real> j;
        j.v = f(r, phi);
        j.dr = d1([&](Real x) { return f(x, phi); }, r, hr);
        j.dp = d1([&](Real x) { return f(r, x); }, phi, hp);
        j.drr = d2([&](Real x) { return f(x, phi); }, r, hr);
        j.dpp = d2([&](Real x) { return f(r, x); }, phi, hp);
        j.drp = d1([&](Real x) { return d1([&](Real y) { return f(y, x); }, r, hr); }, phi, hp);
        return j;
    };
}

template <class Real, class Frr, class Frp, class Fpp>
Metric2D<Real> metric_from_values(Frr f_rr, Frp f_rphi, Fpp f_phiphi,
                                  typename Metric2D<Real>::domain_fn domain = {}) {
    Metric2D<Real> g;
    g.g_rr = jet_from_value<Real>(f_rr);
    g.g_rphi = jet_from_value<Real>(f_rphi);
    g.g_phiphi = jet_from_value<Real>(f_phiphi);
    g.domain = std::move(domain);
    return g;
}

// Christoffel symbols of the second kind; `r_pp` is the coefficient with
// upper index r and lower indices (phi, phi), and so on.
template <class Real>
struct Christoffel {
    Real r_rr, r_rp, r_pp;
    Real p_rr, p_rp, p_pp;
};

namespace detail {

template <class Real>
Real det3(const std::array<std::array<Real, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class Real>
Real metric_det(const MetricJets<Real>& j) {
    const Real det = j.E.v * j.G.v - j.F.v * j.F.v;
    if (!(det > Real(0)))
        throw geometry_error("metric determinant is not positive; metric is degenerate here");
    return det;
}

} // namespace detail

template <class Real>
Christoffel<Real> christoffel(const Metric2D<Real>& g, Real r, Real phi) {
    const auto j = g.jets(r, phi);
    const Real det = detail::metric_det(j);
    const Real inv_rr = j.G.v / det;
    const Real inv_rp = -j.F.v / det;
    const Real inv_pp = j.E.v / det;

    // Lowered symbols: half * (d_i g_lj + d_j g_li - d_l g_ij).
    const Real half = Real(0.5);
    const Real lo_r_rr = half * j.E.dr;
    const Real lo_r_rp = half * j.E.dp;
    const Real lo_r_pp = j.F.dp - half * j.G.dr;
    const Real lo_p_rr = j.F.dr - half * j.E.dp;
    const Real lo_p_rp = half * j.G.dr;
    const Real lo_p_pp = half * j.G.dp;

    Christoffel<Real> c;
    c.r_rr = inv_rr * lo_r_rr + inv_rp * lo_p_rr;
    c.r_rp = inv_rr * lo_r_rp + inv_rp * lo_p_rp;
    c.r_pp = inv_rr * lo_r_pp + inv_rp * lo_p_pp;
    c.p_rr = inv_rp * lo_r_rr + inv_pp * lo_p_rr;
    c.p_rp = inv_rp * lo_r_rp + inv_pp * lo_p_rp;
    c.p_pp = inv_rp * lo_r_pp + inv_pp * lo_p_pp;
    return c;
}

// Scalar curvature R = 2K, with the Gauss curvature K computed from the
// Brioschi determinant formula (valid for F != 0; no second r-derivative of
// E and no second phi-derivative of G are needed).
template <class Real>
Real scalar_curvature(const Metric2D<Real>& g, Real r, Real phi) {
    const auto j = g.jets(r, phi);
    const Real det = detail::metric_det(j);
    const Real half = Real(0.5);

    const std::array<std::array<Real, 3>, 3> m1{{
        {-half * j.E.dpp + j.F.drp - half * j.G.drr, half * j.E.dr, j.F.dr - half * j.E.dp},
        {j.F.dp - half * j.G.dr, j.E.v, j.F.v},
        {half * j.G.dp, j.F.v, j.G.v},
    }};
    const std::array<std::array<Real, 3>, 3> m2{{
        {Real(0), half * j.E.dp, half * j.G.dr},
        {half * j.E.dp, j.E.v, j.F.v},
        {half * j.G.dr, j.F.v, j.G.v},
    }};
    const Real K = (detail::det3(m1) - detail::det3(m2)) / (det * det);
    return 2 * K;
}

// A closed curve given as a radial graph r = rho(phi) with two derivatives.
template <class Real>
struct CurveJet {
    Real rho, d1, d2;
};

template <class Real>
struct Curve {
    std::function<CurveJet<Real>(Real)> at;

    static Curve circle(Real radius) {
        Curve c;
        c.at = [radius](Real) { return CurveJet<Real>{radius, Real(0), Real(0)}; };
        return c;
    }
};

// Length element ds/dphi = sqrt(E rho'^2 + 2 F rho' + G) along the curve.
template <class Real>
Real curve_length_element(const Metric2D<Real>& g, const Curve<Real>& c, Real phi) {
    const auto cj = c.at(phi);
    const auto j = g.jets(cj.rho, phi);
    const Real t2 = j.E.v * cj.d1 * cj.d1 + 2 * j.F.v * cj.d1 + j.G.v;
    if (!(t2 > Real(0))) throw geometry_error("curve tangent is degenerate");
    return std::sqrt(t2);
}

// Geodesic curvature of the curve with respect to the outward conormal
// (positive for convex curves; +1/R for a flat round circle of radius R).
template <class Real>
Real geodesic_curvature(const Metric2D<Real>& g, const Curve<Real>& c, Real phi) {
    const auto cj = c.at(phi);
    const auto j = g.jets(cj.rho, phi);
    const auto gamma = christoffel(g, cj.rho, phi);

    const Real rp = cj.d1;
    const Real acc_r = cj.d2 + gamma.r_rr * rp * rp + 2 * gamma.r_rp * rp + gamma.r_pp;
    const Real acc_p = gamma.p_rr * rp * rp + 2 * gamma.p_rp * rp + gamma.p_pp;

    const Real det = detail::metric_det(j);
    const Real t2 = j.E.v * rp * rp + 2 * j.F.v * rp + j.G.v;
    if (!(t2 > Real(0))) throw geometry_error("curve tangent is degenerate");
    const Real speed = std::sqrt(t2);
    return -(acc_r - rp * acc_p) * std::sqrt(det) / (t2 * speed);
}

// Integral of the geodesic curvature with respect to arclength, by the
// n-point periodic trapezoid rule (spectrally accurate for smooth data).
template <class Real>
Real total_geodesic_curvature(const Metric2D<Real>& g, const Curve<Real>& c,
                              std::size_t n = 256) {
    if (n == 0) throw input_error("total_geodesic_curvature: n must be positive");
    constexpr Real two_pi = Real(6.28318530717958647692528676655900577L);
    Real acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Real phi = two_pi * Real(i) / Real(n);
        acc += geodesic_curvature(g, c, phi) * curve_length_element(g, c, phi);
    }
    return acc * two_pi / Real(n);
}

} // namespace hypmass::geo
