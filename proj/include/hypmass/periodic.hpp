#pragma once

// Real-valued functions sampled on the uniform periodic grid
// phi_j = 2*pi*j/N, j = 0..N-1, together with the spectral operations the
// rest of the library needs: exact-for-trig-polynomials quadrature,
// derivatives of the trigonometric interpolant, and off-grid evaluation via
// the barycentric trigonometric interpolation formula.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"

namespace hypmass::periodic {

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

// Sample points of the N-point uniform grid on [0, 2*pi).
inline std::vector<double> grid(std::size_t n) {
    std::vector<double> phi(n);
    for (std::size_t j = 0; j < n; ++j) phi[j] = two_pi * double(j) / double(n);
    return phi;
}

class GridFunction {
  public:
    GridFunction() = default;

    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw input_error("GridFunction: empty value vector");
    }

    template <class F>
    static GridFunction sample(std::size_t n, F&& f) {
        if (n == 0) throw input_error("GridFunction::sample: n must be positive");
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = f(two_pi * double(j) / double(n));
        return GridFunction(std::move(v));
    }

    static GridFunction constant(std::size_t n, double c) {
        return GridFunction(std::vector<double>(n, c));
    }

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    double& operator[](std::size_t j) { return values_[j]; }
    double node(std::size_t j) const { return two_pi * double(j) / double(values_.size()); }

    double mean() const {
        return std::accumulate(values_.begin(), values_.end(), 0.0) / double(values_.size());
    }

    // Trapezoid rule over the full period; on a uniform periodic grid this is
    // 2*pi times the node average and is spectrally accurate.
    double integral() const { return two_pi * mean(); }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }

    GridFunction derivative(int order = 1) const {
        return GridFunction(fft::derivative(values_, order));
    }

    // Value of the trigonometric interpolant at an arbitrary angle, using the
    // barycentric form with the even-N kernel cot((phi - phi_j)/2) (or the
    // odd-N kernel csc). Exact at nodes and for trig polynomials the grid
    // resolves.
    double interpolate(double phi) const {
        const std::size_t n = values_.size();
        if (n == 1) return values_[0];
        const bool even = (n % 2 == 0);
        double num = 0.0, den = 0.0;
        double sign = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = 0.5 * (phi - node(j));
            const double s = std::sin(d);
            if (std::abs(s) < 1e-14) {
                // At (or numerically on top of) a node the interpolant equals
                // the nodal value.
                return values_[j];
            }
            const double w = sign * (even ? (std::cos(d) / s) : (1.0 / s));
            num += w * values_[j];
            den += w;
            sign = -sign;
        }
        return num / den;
    }

    // Resample onto an m-point uniform grid through the interpolant.
    GridFunction resample(std::size_t m) const {
        std::vector<double> v(m);
        if (m == values_.size()) {
            v = values_;
        } else {
            for (std::size_t j = 0; j < m; ++j)
                v[j] = interpolate(two_pi * double(j) / double(m));
        }
        return GridFunction(std::move(v));
    }

    template <class F>
    GridFunction map(F&& f) const {
        std::vector<double> v(values_.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(values_[j]);
        return GridFunction(std::move(v));
    }

    GridFunction& operator+=(const GridFunction& o) { return zip(o, std::plus<>{}); }
    GridFunction& operator-=(const GridFunction& o) { return zip(o, std::minus<>{}); }
    GridFunction& operator*=(double c) {
        for (auto& x : values_) x *= c;
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

  private:
    template <class Op>
    GridFunction& zip(const GridFunction& o, Op op) {
        if (o.size() != values_.size())
            throw input_error("GridFunction: size mismatch in arithmetic");
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] = op(values_[j], o.values_[j]);
        return *this;
    }

    std::vector<double> values_;
};

} // namespace hypmass::periodic
