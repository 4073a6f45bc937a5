#pragma once

// Outward integration of the quasilinear parabolic equation
//
//     u_r = u^2 u_phiphi / (r(1+r^2)) - r(u^3 - u)/(1+r^2)
//
// from boundary data at r0, for 2*pi-periodic positive u. The solver
// integrates the scaled deviation v = r^2 (u - 1), whose equation
//
//     v_r = [ u^2 v_phiphi + 2v - (u+2) v^2 ] / (r (1+r^2)),  u = 1 + v/r^2,
//
// stays O(1) all the way out and hands the tail coefficient to the fitter
// without catastrophic cancellation.
//
// Scheme: 2-stage, second-order IMEX (implicit-explicit) Runge-Kutta with
// gamma = 1 - sqrt(2)/2. The diffusion is split as alpha * v_phiphi with the
// frozen coefficient alpha = max_phi u^2 / (r(1+r^2)) treated implicitly
// (diagonal in Fourier space); the remainder - whose diffusion coefficient
// is nonpositive by choice of alpha - plus the reaction terms are explicit.
// Step size is controlled by step-doubling with local extrapolation.
//
// Explicit barriers
//     f_i(r) = (1 + K_i/(1+r^2))^{-1/2},
//     K_1 = (1/max(u0)^2 - 1)(1+r0^2),  K_2 = (1/min(u0)^2 - 1)(1+r0^2)
// bound the continuum solution by min{1, f_2} <= u <= f_1; every accepted
// step is checked against them with slack 10*tol. A violation makes the
// step retry smaller; a persistent violation at vanishing step size is a
// solver defect by definition and is reported as such, never tolerated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "interp.hpp"
#include "periodic.hpp"
#include "spaces.hpp"

namespace hypmass::flow {

using periodic::GridFunction;

struct FlowConfig {
    double r0 = 1.0;
    double r_max = 1e3;
    std::size_t n_phi = 256;
    double tol = 1e-8;
    // Fraction of r_max at which the tail fit window starts (last decade).
    double tail_fit_window = 0.1;

    double tol_barrier() const { return 10.0 * tol; }

    void validate() const {
        if (!(r0 > 0.0) || !(r_max > r0))
            throw input_error("FlowConfig: need r_max > r0 > 0");
        if (n_phi < 16 || n_phi % 2 != 0)
            throw input_error("FlowConfig: n_phi must be even and >= 16");
        if (!(tol > 0.0)) throw input_error("FlowConfig: tol must be positive");
        if (!(tail_fit_window > 0.0) || !(tail_fit_window < 1.0))
            throw input_error("FlowConfig: tail_fit_window must lie in (0,1)");
    }
};

// Closed-form upper/lower envelopes computed from the initial data.
struct Barriers {
    double K1 = 0.0, K2 = 0.0;

    double f1(double r) const { return 1.0 / std::sqrt(1.0 + K1 / (1.0 + r * r)); }
    double f2(double r) const { return 1.0 / std::sqrt(1.0 + K2 / (1.0 + r * r)); }
    double upper(double r) const { return f1(r); }
    double lower(double r) const { return std::min(1.0, f2(r)); }

    static Barriers from_initial(const GridFunction& u0, double r0) {
        if (!(u0.min() > 0.0)) throw input_error("Barriers: initial data must be positive");
        Barriers b;
        const double w0 = 1.0 + r0 * r0;
        b.K1 = (1.0 / (u0.max() * u0.max()) - 1.0) * w0;
        b.K2 = (1.0 / (u0.min() * u0.min()) - 1.0) * w0;
        return b;
    }
};

// u0(phi) = sqrt(r0^2+1) / (r0 k(phi)); matches the circle r = r0 whose
// geodesic curvature in the extension metric is the prescribed k.
inline GridFunction boundary_data_from_curvature(const GridFunction& k, double r0) {
    if (!(r0 > 0.0)) throw input_error("boundary_data_from_curvature: r0 must be positive");
    if (!(k.min() > 0.0))
        throw hypothesis_error(
            "boundary curvature must be strictly positive everywhere (k > 0)");
    const double c = std::sqrt(r0 * r0 + 1.0) / r0;
    return k.map([c](double kj) { return c / kj; });
}

// Right-hand side in the u variable (spectral second derivative in phi).
inline GridFunction rhs(double r, const GridFunction& u) {
    if (!(r > 0.0)) throw input_error("rhs: r must be positive");
    if (!(u.min() > 0.0)) throw input_error("rhs: u must be positive");
    const double w = 1.0 + r * r;
    auto upp = u.derivative(2);
    GridFunction out = u;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double uj = u[j];
        out[j] = uj * uj * upp[j] / (r * w) - r * (uj * uj * uj - uj) / w;
    }
    return out;
}

namespace detail {

inline std::vector<double> second_derivative(const std::vector<double>& v) {
    return fft::derivative(v, 2);
}

// Solve (I - mu * d^2/dphi^2) x = b on the periodic grid.
inline std::vector<double> implicit_solve(double mu, const std::vector<double>& b) {
    const std::size_t n = b.size();
    std::vector<fft::cplx> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = b[j];
    fft::transform(a, false);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = fft::wavenumber(k, n);
        a[k] /= 1.0 + mu * kk * kk;
    }
    fft::transform(a, true);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

// Diffusion coefficient ceiling at (r, v): max_phi u^2 / (r(1+r^2)).
inline double frozen_alpha(double r, const std::vector<double>& v) {
    double umax = -std::numeric_limits<double>::infinity();
    const double r2 = r * r;
    for (double vj : v) umax = std::max(umax, 1.0 + vj / r2);
    const double m = std::max(umax, 0.0);
    return m * m / (r * (1.0 + r2));
}

// Explicit part of the split RHS at radius r: the below-ceiling remainder of
// the diffusion plus the full reaction. alpha = 0 recovers the complete RHS.
inline std::vector<double> explicit_rhs(double r, const std::vector<double>& v,
                                        const std::vector<double>& vpp, double alpha) {
    const std::size_t n = v.size();
    const double r2 = r * r;
    const double denom = r * (1.0 + r2);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = 1.0 + v[j] / r2;
        const double c = u * u / denom;
        out[j] = (c - alpha) * vpp[j] + (2.0 * v[j] - (u + 2.0) * v[j] * v[j]) / denom;
    }
    return out;
}

// One IMEX Runge-Kutta step of size h from (r, v); alpha frozen at entry.
inline std::vector<double> imex_step(double r, double h, const std::vector<double>& v) {
    static const double gamma = 1.0 - std::sqrt(2.0) / 2.0;
    static const double delta = 1.0 - 1.0 / (2.0 * gamma);
    const double alpha = frozen_alpha(r, v);
    const std::size_t n = v.size();

    const auto vpp = second_derivative(v);
    const auto fe0 = explicit_rhs(r, v, vpp, alpha);

    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) b[j] = v[j] + gamma * h * fe0[j];
    const auto w = implicit_solve(gamma * h * alpha, b);

    const auto wpp = second_derivative(w);
    const auto fe1 = explicit_rhs(r + gamma * h, w, wpp, alpha);

    for (std::size_t j = 0; j < n; ++j)
        b[j] = v[j] + h * (delta * fe0[j] + (1.0 - delta) * fe1[j]) +
               h * (1.0 - gamma) * alpha * wpp[j];
    return implicit_solve(gamma * h * alpha, b);
}

} // namespace detail

struct FlowState {
    double r = 0.0;
    GridFunction u; // u(r, .)
    GridFunction v; // r^2 (u - 1): the integrated variable
    double step = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    Barriers barriers;

    static FlowState initial(const GridFunction& u0, const FlowConfig& config) {
        config.validate();
        if (u0.size() != config.n_phi)
            throw input_error("FlowState: boundary data size differs from n_phi");
        if (!(u0.min() > 0.0)) throw input_error("FlowState: initial data must be positive");
        FlowState s;
        s.r = config.r0;
        s.u = u0;
        s.v = u0.map([&](double uj) { return config.r0 * config.r0 * (uj - 1.0); });
        s.step = 1e-3 * config.r0;
        s.barriers = Barriers::from_initial(u0, config.r0);
        return s;
    }
};

// Advance one accepted adaptive step, never beyond r_limit. Internal retries
// count as rejections. Error control: step-doubling of the second-order
// scheme, local extrapolation, sup-norm estimate against tol.
inline void step(FlowState& state, const FlowConfig& config,
                 double r_limit = std::numeric_limits<double>::infinity()) {
    const std::size_t n = state.v.size();
    double h = state.step;
    for (;;) {
        h = std::min(h, 0.5 * state.r);
        if (state.r + 1.05 * h >= r_limit) h = r_limit - state.r;
        if (!(h > 0.0)) throw solver_bug_error("step: nonpositive step size requested");

        const auto full = detail::imex_step(state.r, h, state.v.values());
        const auto half1 = detail::imex_step(state.r, 0.5 * h, state.v.values());
        const auto half2 = detail::imex_step(state.r + 0.5 * h, 0.5 * h, half1);

        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(half2[j] - full[j]));
        const double est = diff / 3.0;

        if (est > config.tol) {
            ++state.rejected_steps;
            const double shrink = std::clamp(0.9 * std::cbrt(config.tol / est), 0.2, 1.0);
            h *= shrink;
            if (h < 1e-14 * state.r)
                throw stiffness_error("step size underflow at r = " + std::to_string(state.r));
            continue;
        }

        const double r_new_raw = state.r + h;
        const double r_new =
            (std::abs(r_new_raw - r_limit) <= 1e-12 * r_limit) ? r_limit : r_new_raw;
        std::vector<double> v_new(n);
        const double r2 = r_new * r_new;
        double umin = std::numeric_limits<double>::infinity(), umax = -umin;
        for (std::size_t j = 0; j < n; ++j) {
            v_new[j] = half2[j] + (half2[j] - full[j]) / 3.0;
            const double uj = 1.0 + v_new[j] / r2;
            umin = std::min(umin, uj);
            umax = std::max(umax, uj);
        }
        const double slack = config.tol_barrier();
        if (umin < state.barriers.lower(r_new) - slack ||
            umax > state.barriers.upper(r_new) + slack) {
            ++state.rejected_steps;
            h *= 0.25;
            if (h < 1e-12 * state.r)
                throw solver_bug_error(
                    "enclosure bounds violated at vanishing step size near r = " +
                    std::to_string(state.r) +
                    "; the continuum solution cannot do this, so the integrator is at fault");
            continue;
        }

        state.r = r_new;
        state.v = GridFunction(std::move(v_new));
        state.u = state.v.map([r2](double vj) { return 1.0 + vj / r2; });
        ++state.accepted_steps;
        const double grow = (est > 0.0)
                                ? std::clamp(0.9 * std::cbrt(config.tol / est), 0.2, 5.0)
                                : 5.0;
        state.step = std::min(h * grow, 0.5 * state.r);
        return;
    }
}

struct FlowSolution {
    FlowConfig config;
    Barriers barriers;
    std::vector<double> radii;       // geometric checkpoints, ratio 1.2, ending at r_max
    std::vector<GridFunction> v;     // r^2(u-1) at each checkpoint
    std::vector<GridFunction> v_r;   // dv/dr there (from the continuum equation)
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    std::size_t checkpoints() const { return radii.size(); }

    GridFunction u_at(std::size_t i) const {
        const double r2 = radii[i] * radii[i];
        return v[i].map([r2](double vj) { return 1.0 + vj / r2; });
    }

    // du/dr = v_r / r^2 - 2 v / r^3.
    GridFunction u_r_at(std::size_t i) const {
        const double r = radii[i];
        GridFunction out = v_r[i];
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = v_r[i][j] / (r * r) - 2.0 * v[i][j] / (r * r * r);
        return out;
    }

    // Cubic Hermite interpolation of v between checkpoints (values and
    // radial slopes are both recorded, so the interpolant is C^1 and exact
    // at the checkpoints themselves).
    GridFunction v_interp(double r) const {
        if (!(r >= radii.front() && r <= radii.back()))
            throw domain_error("v_interp: radius outside the solved range");
        auto it = std::upper_bound(radii.begin(), radii.end(), r);
        std::size_t i = (it == radii.begin()) ? 0 : std::size_t(it - radii.begin()) - 1;
        if (i + 1 >= radii.size()) i = radii.size() - 2;
        GridFunction out = v[i];
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = interp::hermite(radii[i], radii[i + 1], v[i][j], v[i + 1][j],
                                     v_r[i][j], v_r[i + 1][j], r)
                         .v;
        return out;
    }

    GridFunction u_interp(double r) const {
        const double r2 = r * r;
        return v_interp(r).map([r2](double vj) { return 1.0 + vj / r2; });
    }

    // The extension metric u^2 dr^2/(1+r^2) + r^2 dphi^2 with node-exact
    // values and slopes at every checkpoint radius.
    geo::Metric2D<double> metric() const {
        std::vector<GridFunction> u_grid, ur_grid;
        u_grid.reserve(radii.size());
        ur_grid.reserve(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            u_grid.push_back(u_at(i));
            ur_grid.push_back(u_r_at(i));
        }
        return spaces::flow_metric_with_slopes(u_grid, ur_grid, radii);
    }
};

inline std::vector<double> checkpoint_radii(const FlowConfig& config) {
    std::vector<double> out{config.r0};
    constexpr double ratio = 1.2;
    while (out.back() * ratio < config.r_max * 0.999) out.push_back(out.back() * ratio);
    out.push_back(config.r_max);
    return out;
}

inline FlowSolution solve(const GridFunction& u0, const FlowConfig& config) {
    FlowState state = FlowState::initial(u0, config);
    FlowSolution sol;
    sol.config = config;
    sol.barriers = state.barriers;
    sol.radii = checkpoint_radii(config);

    auto record = [&](const FlowState& s) {
        sol.v.push_back(s.v);
        auto vpp = detail::second_derivative(s.v.values());
        sol.v_r.push_back(
            GridFunction(detail::explicit_rhs(s.r, s.v.values(), vpp, 0.0)));
    };

    record(state);
    for (std::size_t i = 1; i < sol.radii.size(); ++i) {
        const double target = sol.radii[i];
        while (state.r < target) step(state, config, target);
        record(state);
    }
    sol.accepted_steps = state.accepted_steps;
    sol.rejected_steps = state.rejected_steps;
    return sol;
}

struct TailFit {
    GridFunction v_inf;
    double residual = 0.0; // sup over fit points and angles of |model - data|
};

// Least-squares fit of the checkpoint tail, per angle, against the basis
// {1, s, s^2} with s = 1/(1+r^2), over radii >= tail_fit_window * r_max.
// The constant term is the limit v_inf(phi). The closed-form constant-data
// solution expands in exactly these powers of s, so the model captures the
// tail to O(s^3) instead of the O(s) error a v_inf + a/r model would leave.
inline TailFit tail_fit(const FlowSolution& sol) {
    const double r_start = sol.config.tail_fit_window * sol.config.r_max;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < sol.radii.size(); ++i)
        if (sol.radii[i] >= r_start * (1.0 - 1e-12)) idx.push_back(i);
    if (idx.size() < 4)
        throw tail_error("tail fit: fewer than 4 checkpoints in the fit window; "
                         "increase r_max");
    const std::size_t rows = idx.size();
    const std::size_t n = sol.v.front().size();

    // Columns of the design matrix, orthonormalized by modified Gram-Schmidt.
    std::vector<std::vector<double>> a(3, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const double r = sol.radii[idx[i]];
        const double s = 1.0 / (1.0 + r * r);
        a[0][i] = 1.0;
        a[1][i] = s;
        a[2][i] = s * s;
    }
    std::vector<std::vector<double>> q = a;
    double R[3][3] = {};
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            double dot = 0.0;
            for (std::size_t t = 0; t < rows; ++t) dot += q[i][t] * q[j][t];
            R[i][j] = dot;
            for (std::size_t t = 0; t < rows; ++t) q[j][t] -= dot * q[i][t];
        }
        double norm = 0.0;
        for (std::size_t t = 0; t < rows; ++t) norm += q[j][t] * q[j][t];
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw tail_error("tail fit: degenerate design matrix");
        R[j][j] = norm;
        for (std::size_t t = 0; t < rows; ++t) q[j][t] /= norm;
    }

    std::vector<double> v_inf(n);
    double residual = 0.0;
    std::vector<double> y(rows), beta(3);
    for (std::size_t jphi = 0; jphi < n; ++jphi) {
        for (std::size_t i = 0; i < rows; ++i) y[i] = sol.v[idx[i]][jphi];
        double qy[3];
        for (std::size_t j = 0; j < 3; ++j) {
            qy[j] = 0.0;
            for (std::size_t t = 0; t < rows; ++t) qy[j] += q[j][t] * y[t];
        }
        for (std::size_t j = 3; j-- > 0;) {
            double s = qy[j];
            for (std::size_t k = j + 1; k < 3; ++k) s -= R[j][k] * beta[k];
            beta[j] = s / R[j][j];
        }
        v_inf[jphi] = beta[0];
        for (std::size_t i = 0; i < rows; ++i) {
            const double model = beta[0] + beta[1] * a[1][i] + beta[2] * a[2][i];
            residual = std::max(residual, std::abs(model - y[i]));
        }
    }
    return TailFit{GridFunction(std::move(v_inf)), residual};
}

inline GridFunction v_infinity(const FlowSolution& sol) {
    auto fit = tail_fit(sol);
    if (fit.residual > 1e3 * sol.config.tol)
        throw tail_error("tail fit residual " + std::to_string(fit.residual) +
                         " exceeds 1000*tol; the solution has not settled - "
                         "increase r_max");
    return fit.v_inf;
}

} // namespace hypmass::flow
