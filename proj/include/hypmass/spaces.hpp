#pragma once

// Constructors for the metrics the toolkit works with:
//   hyperbolic()  constant curvature -1:   dr^2/(1+r^2) + r^2 dphi^2
//   btz(m)        one-parameter family:    dr^2/(r^2-m) + r^2 dphi^2
//   flow_metric   u^2 dr^2/(1+r^2) + r^2 dphi^2 from tabulated u(r, phi)
//   alh_metric    asymptotic tail metric driven by a mass aspect
// plus the mass-aspect container and its Hamiltonian charge.

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "interp.hpp"
#include "periodic.hpp"

namespace hypmass::spaces {

// dr^2/(r^2 - m) + r^2 dphi^2, positive definite for r^2 > max(m, 0).
template <class Real = double>
geo::Metric2D<Real> btz(Real m) {
    geo::Metric2D<Real> g;
    g.g_rr = [m](Real r, Real) {
        const Real w = r * r - m;
        geo::Jet2<Real> j;
        j.v = Real(1) / w;
        j.dr = -2 * r / (w * w);
        j.drr = (6 * r * r + 2 * m) / (w * w * w);
        return j;
    };
    g.g_rphi = [](Real, Real) { return geo::Jet2<Real>{}; };
    g.g_phiphi = [](Real r, Real) {
        geo::Jet2<Real> j;
        j.v = r * r;
        j.dr = 2 * r;
        j.drr = Real(2);
        return j;
    };
    g.domain = [m](Real r, Real) { return r * r > std::max(m, Real(0)); };
    return g;
}

// dr^2/(1+r^2) + r^2 dphi^2; identical to btz(-1).
template <class Real = double>
geo::Metric2D<Real> hyperbolic() {
    return btz<Real>(Real(-1));
}

// The (mu11, mu12, mu22) triple of periodic functions defining a metric tail.
struct MassAspect {
    periodic::GridFunction mu11, mu12, mu22;

    MassAspect(periodic::GridFunction m11, periodic::GridFunction m12,
               periodic::GridFunction m22)
        : mu11(std::move(m11)), mu12(std::move(m12)), mu22(std::move(m22)) {
        if (mu11.size() != mu12.size() || mu11.size() != mu22.size())
            throw input_error("MassAspect: component grids must share one size");
        if (mu11.size() < 4) throw input_error("MassAspect: grid too small");
    }

    template <class F11, class F12, class F22>
    static MassAspect sample(std::size_t n, F11 f11, F12 f12, F22 f22) {
        return MassAspect(periodic::GridFunction::sample(n, f11),
                          periodic::GridFunction::sample(n, f12),
                          periodic::GridFunction::sample(n, f22));
    }

    static MassAspect zero(std::size_t n) {
        return MassAspect(periodic::GridFunction::constant(n, 0.0),
                          periodic::GridFunction::constant(n, 0.0),
                          periodic::GridFunction::constant(n, 0.0));
    }

    // CSV with header phi,mu11,mu12,mu22 on the uniform angle grid.
    static MassAspect from_csv(const csv::Table& t) {
        const std::size_t c_phi = t.column("phi");
        const std::size_t c11 = t.column("mu11");
        const std::size_t c12 = t.column("mu12");
        const std::size_t c22 = t.column("mu22");
        csv::require_uniform_angles(t, c_phi);
        std::vector<double> m11, m12, m22;
        for (const auto& row : t.rows) {
            m11.push_back(row[c11]);
            m12.push_back(row[c12]);
            m22.push_back(row[c22]);
        }
        return MassAspect(periodic::GridFunction(std::move(m11)),
                          periodic::GridFunction(std::move(m12)),
                          periodic::GridFunction(std::move(m22)));
    }

    csv::Table to_csv() const {
        csv::Table t;
        t.header = {"phi", "mu11", "mu12", "mu22"};
        for (std::size_t j = 0; j < mu11.size(); ++j)
            t.rows.push_back({mu11.node(j), mu11[j], mu12[j], mu22[j]});
        return t;
    }
};

// Hamiltonian charge of the tail: (1/2pi) * integral of (mu22 + 2 mu11).
inline double hamiltonian_mass(const MassAspect& aspect) {
    return aspect.mu22.mean() + 2.0 * aspect.mu11.mean();
}

namespace detail {

// Periodic function with spectrally computed first/second derivative grids,
// all evaluable at arbitrary angles through the trigonometric interpolant.
struct SpectralFn {
    periodic::GridFunction f, f1, f2;
    explicit SpectralFn(const periodic::GridFunction& g)
        : f(g), f1(g.derivative(1)), f2(g.derivative(2)) {}
};

} // namespace detail

// Smallest safe inner radius for alh_metric(aspect): scan a coarse geometric
// grid upward until both eigenvalues of the metric exceed 1e-6 at every
// stored angle, then apply a safety factor of 2.
inline double alh_r_min(const MassAspect& aspect) {
    const std::size_t n = aspect.mu11.size();
    for (double r = 1e-3; r <= 10.0; r *= 1.1) {
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            const double w = 1.0 + r * r;
            const double E = 1.0 / w + aspect.mu22[j] / (r * r * w);
            const double F = aspect.mu12[j] / (r * std::sqrt(w));
            const double G = r * r + aspect.mu11[j];
            const double tr = E + G;
            const double gap = std::sqrt((E - G) * (E - G) + 4.0 * F * F);
            const double lambda_min = 0.5 * (tr - gap);
            if (!(lambda_min > 1e-6)) ok = false;
        }
        if (ok) return 2.0 * r;
    }
    throw geometry_error("alh_metric: no radius below 10 makes the tail metric "
                         "safely positive definite");
}

// (1/(1+r^2) + mu22/(r^2(1+r^2))) dr^2 + 2 mu12/(r sqrt(1+r^2)) dr dphi
//   + (r^2 + mu11) dphi^2,  valid for r >= alh_r_min(aspect).
inline geo::Metric2D<double> alh_metric(const MassAspect& aspect) {
    struct State {
        detail::SpectralFn m11, m12, m22;
        double r_min;
    };
    auto st = std::make_shared<State>(State{detail::SpectralFn(aspect.mu11),
                                            detail::SpectralFn(aspect.mu12),
                                            detail::SpectralFn(aspect.mu22), 0.0});
    st->r_min = alh_r_min(aspect);

    geo::Metric2D<double> g;
    g.domain = [st](double r, double) { return r >= st->r_min; };
    g.g_rr = [st](double r, double phi) {
        const double w = 1.0 + r * r;
        const double a = 1.0 / (r * r * w);
        const double a1 = -2.0 / (r * r * r * w) - 2.0 / (r * w * w);
        const double a2 = 6.0 / (r * r * r * r * w) + 6.0 / (r * r * w * w) + 8.0 / (w * w * w);
        const double w1 = -2.0 * r / (w * w);
        const double w2 = (6.0 * r * r - 2.0) / (w * w * w);
        const double mu = st->m22.f.interpolate(phi);
        const double mup = st->m22.f1.interpolate(phi);
        const double mupp = st->m22.f2.interpolate(phi);
        geo::Jet2<double> j;
        j.v = 1.0 / w + mu * a;
        j.dr = w1 + mu * a1;
        j.dp = mup * a;
        j.drr = w2 + mu * a2;
        j.drp = mup * a1;
        j.dpp = mupp * a;
        return j;
    };
    g.g_rphi = [st](double r, double phi) {
        const double w = 1.0 + r * r;
        const double sw = std::sqrt(w);
        const double b = 1.0 / (r * sw);
        const double b1 = -1.0 / (r * r * sw) - 1.0 / (sw * w);
        const double b2 = 2.0 / (r * r * r * sw) + 1.0 / (r * sw * w) + 3.0 * r / (sw * w * w);
        const double mu = st->m12.f.interpolate(phi);
        const double mup = st->m12.f1.interpolate(phi);
        const double mupp = st->m12.f2.interpolate(phi);
        geo::Jet2<double> j;
        j.v = mu * b;
        j.dr = mu * b1;
        j.dp = mup * b;
        j.drr = mu * b2;
        j.drp = mup * b1;
        j.dpp = mupp * b;
        return j;
    };
    g.g_phiphi = [st](double r, double phi) {
        geo::Jet2<double> j;
        j.v = r * r + st->m11.f.interpolate(phi);
        j.dr = 2.0 * r;
        j.dp = st->m11.f1.interpolate(phi);
        j.drr = 2.0;
        j.dpp = st->m11.f2.interpolate(phi);
        return j;
    };
    return g;
}

namespace detail {

// Shared evaluation state for the flow metric: a radial Hermite table of
// u(r, .) with per-radius angle grids, plus a one-entry cache of the last
// radius evaluated (quadratures evaluate many angles at one radius).
struct FlowMetricState {
    interp::RadialTable table;
    mutable std::mutex mutex;
    mutable double cached_r = -1.0;
    mutable std::vector<double> u, ur, urr;
    mutable std::vector<double> up, upp, urp;

    explicit FlowMetricState(interp::RadialTable t) : table(std::move(t)) {}

    struct UJet {
        double u, ur, up, urr, urp, upp;
    };

    UJet at(double r, double phi) const {
        std::lock_guard<std::mutex> lock(mutex);
        if (r != cached_r) {
            table.eval(r, u, ur, urr);
            up = fft::derivative(u, 1);
            upp = fft::derivative(u, 2);
            urp = fft::derivative(ur, 1);
            cached_r = r;
        }
        periodic::GridFunction gu(u), gur(ur), gurr(urr), gup(up), gupp(upp), gurp(urp);
        UJet j;
        j.u = gu.interpolate(phi);
        j.ur = gur.interpolate(phi);
        j.urr = gurr.interpolate(phi);
        j.up = gup.interpolate(phi);
        j.upp = gupp.interpolate(phi);
        j.urp = gurp.interpolate(phi);
        return j;
    }
};

} // namespace detail

// u^2 dr^2/(1+r^2) + r^2 dphi^2 with tabulated u and supplied radial slopes.
inline geo::Metric2D<double> flow_metric_with_slopes(
    const std::vector<periodic::GridFunction>& u_grid,
    const std::vector<periodic::GridFunction>& ur_grid, const std::vector<double>& r_grid) {
    const std::size_t n = r_grid.size();
    if (u_grid.size() != n || ur_grid.size() != n || n < 2)
        throw input_error("flow_metric: need matching u, du/dr, r arrays with >= 2 radii");
    const std::size_t m = u_grid.front().size();
    std::vector<std::vector<double>> values(n), slopes(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (u_grid[i].size() != m || ur_grid[i].size() != m)
            throw input_error("flow_metric: angle grids must share one size");
        if (!(u_grid[i].min() > 0.0))
            throw input_error("flow_metric: u must be positive everywhere");
        values[i] = u_grid[i].values();
        slopes[i] = ur_grid[i].values();
    }
    auto st = std::make_shared<detail::FlowMetricState>(
        interp::RadialTable(r_grid, std::move(values), std::move(slopes)));

    geo::Metric2D<double> g;
    g.domain = [st](double r, double) { return st->table.contains(r); };
    g.g_rr = [st](double r, double phi) {
        const auto uj = st->at(r, phi);
        const double w = 1.0 + r * r;
        geo::Jet2<double> j;
        j.v = uj.u * uj.u / w;
        j.dr = (2.0 * uj.u * uj.ur - 2.0 * r * uj.u * uj.u / w) / w;
        j.dp = 2.0 * uj.u * uj.up / w;
        j.drr = 2.0 * (uj.ur * uj.ur + uj.u * uj.urr) / w - 8.0 * r * uj.u * uj.ur / (w * w) -
                2.0 * uj.u * uj.u / (w * w) + 8.0 * r * r * uj.u * uj.u / (w * w * w);
        j.drp = 2.0 * (uj.ur * uj.up + uj.u * uj.urp) / w - 4.0 * r * uj.u * uj.up / (w * w);
        j.dpp = 2.0 * (uj.up * uj.up + uj.u * uj.upp) / w;
        return j;
    };
    g.g_rphi = [](double, double) { return geo::Jet2<double>{}; };
    g.g_phiphi = [](double r, double) {
        geo::Jet2<double> j;
        j.v = r * r;
        j.dr = 2.0 * r;
        j.drr = 2.0;
        return j;
    };
    return g;
}

// Same metric with slopes estimated columnwise by a not-a-knot cubic spline.
inline geo::Metric2D<double> flow_metric(const std::vector<periodic::GridFunction>& u_grid,
                                         const std::vector<double>& r_grid) {
    const std::size_t n = r_grid.size();
    if (u_grid.size() != n || n < 2)
        throw input_error("flow_metric: need matching u and r arrays with >= 2 radii");
    const std::size_t m = u_grid.front().size();
    std::vector<std::vector<double>> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (u_grid[i].size() != m)
            throw input_error("flow_metric: angle grids must share one size");
        if (!(u_grid[i].min() > 0.0))
            throw input_error("flow_metric: u must be positive everywhere");
        values[i] = u_grid[i].values();
    }
    auto table = interp::RadialTable::with_spline_slopes(r_grid, std::move(values));
    std::vector<periodic::GridFunction> u_copy(u_grid.begin(), u_grid.end());
    std::vector<periodic::GridFunction> ur;
    ur.reserve(n);
    {
        std::vector<double> value, deriv, second;
        for (std::size_t i = 0; i < n; ++i) {
            table.eval(r_grid[i], value, deriv, second);
            ur.emplace_back(deriv);
        }
    }
    return flow_metric_with_slopes(u_copy, ur, r_grid);
}

} // namespace hypmass::spaces
