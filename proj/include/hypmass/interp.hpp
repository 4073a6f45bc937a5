#pragma once

// One-dimensional interpolation in the radial direction: cubic Hermite
// segments with supplied or spline-estimated (not-a-knot) node slopes.
// Node values and node slopes are reproduced exactly, which downstream
// curvature checks at table radii rely on.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace hypmass::interp {

struct Jet1 {
    double v, d1, d2;
};

// Cubic Hermite on [x0, x1] with values y0, y1 and slopes d0, d1.
inline Jet1 hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    Jet1 j;
    j.v = y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) + y1 * (-2 * t3 + 3 * t2) +
          h * d1 * (t3 - t2);
    j.d1 = (y0 * (6 * t2 - 6 * t) + h * d0 * (3 * t2 - 4 * t + 1) + y1 * (-6 * t2 + 6 * t) +
            h * d1 * (3 * t2 - 2 * t)) /
           h;
    j.d2 = (y0 * (12 * t - 6) + h * d0 * (6 * t - 4) + y1 * (6 - 12 * t) + h * d1 * (6 * t - 2)) /
           (h * h);
    return j;
}

// Node slopes of the C2 cubic spline through (x, y) with not-a-knot end
// conditions (the first two and last two segments are single cubics).
inline std::vector<double> spline_slopes(const std::vector<double>& x,
                                         const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw input_error("spline_slopes: need matching arrays, n >= 2");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x[i + 1] > x[i])) throw input_error("spline_slopes: abscissae must increase");
    if (n == 2) {
        const double d = (y[1] - y[0]) / (x[1] - x[0]);
        return {d, d};
    }
    std::vector<double> h(n - 1), slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        slope[i] = (y[i + 1] - y[i]) / h[i];
    }
    // Tridiagonal system for the slopes d_i.
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    diag[0] = h[1];
    sup[0] = h[0] + h[1];
    rhs[0] = ((h[0] + 2 * (h[0] + h[1])) * h[1] * slope[0] + h[0] * h[0] * slope[1]) /
             (h[0] + h[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sub[i] = h[i];
        diag[i] = 2 * (h[i - 1] + h[i]);
        sup[i] = h[i - 1];
        rhs[i] = 3 * (h[i] * slope[i - 1] + h[i - 1] * slope[i]);
    }
    const double ha = h[n - 3], hb = h[n - 2];
    sub[n - 1] = hb + ha;
    diag[n - 1] = ha;
    rhs[n - 1] = ((hb + 2 * (hb + ha)) * ha * slope[n - 2] + hb * hb * slope[n - 3]) / (hb + ha);

    // Thomas elimination.
    std::vector<double> d(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    d[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (rhs[i] - sup[i] * d[i + 1]) / diag[i];
    return d;
}

// A family of scalar profiles tabulated on common radii: column j holds the
// values of profile j at each radius. Evaluation is piecewise cubic Hermite
// using stored slopes; inside each segment the interpolant is C1 across the
// family.
class RadialTable {
  public:
    RadialTable(std::vector<double> radii, std::vector<std::vector<double>> values,
                std::vector<std::vector<double>> slopes)
        : r_(std::move(radii)), y_(std::move(values)), d_(std::move(slopes)) {
        if (r_.size() < 2) throw input_error("RadialTable: need at least 2 radii");
        if (y_.size() != r_.size() || d_.size() != r_.size())
            throw input_error("RadialTable: row count mismatch");
        for (std::size_t i = 0; i + 1 < r_.size(); ++i)
            if (!(r_[i + 1] > r_[i])) throw input_error("RadialTable: radii must increase");
        const std::size_t m = y_.front().size();
        for (std::size_t i = 0; i < r_.size(); ++i)
            if (y_[i].size() != m || d_[i].size() != m)
                throw input_error("RadialTable: column count mismatch");
    }

    // Build slope rows columnwise with the not-a-knot spline.
    static RadialTable with_spline_slopes(std::vector<double> radii,
                                          std::vector<std::vector<double>> values) {
        const std::size_t n = radii.size();
        if (n < 2 || values.size() != n) throw input_error("RadialTable: bad table shape");
        const std::size_t m = values.front().size();
        std::vector<std::vector<double>> slopes(n, std::vector<double>(m));
        std::vector<double> col(n);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = values[i][j];
            auto dj = spline_slopes(radii, col);
            for (std::size_t i = 0; i < n; ++i) slopes[i][j] = dj[i];
        }
        return RadialTable(std::move(radii), std::move(values), std::move(slopes));
    }

    double r_min() const { return r_.front(); }
    double r_max() const { return r_.back(); }
    std::size_t columns() const { return y_.front().size(); }
    const std::vector<double>& radii() const { return r_; }

    bool contains(double r) const {
        const double slack = 1e-12 * std::max(1.0, std::abs(r));
        return r >= r_.front() - slack && r <= r_.back() + slack;
    }

    // Evaluate all columns at radius r; out_* must have size columns().
    void eval(double r, std::vector<double>& value, std::vector<double>& deriv,
              std::vector<double>& second) const {
        if (!contains(r))
            throw domain_error("RadialTable: radius " + std::to_string(r) +
                               " outside table range");
        std::size_t i = segment(r);
        const std::size_t m = columns();
        value.resize(m);
        deriv.resize(m);
        second.resize(m);
        // Exact stored data at table radii (no Hermite roundoff at nodes).
        const int node = (r == r_[i]) ? 0 : (r == r_[i + 1] ? 1 : -1);
        for (std::size_t j = 0; j < m; ++j) {
            const auto jet =
                hermite(r_[i], r_[i + 1], y_[i][j], y_[i + 1][j], d_[i][j], d_[i + 1][j], r);
            value[j] = node < 0 ? jet.v : y_[i + node][j];
            deriv[j] = node < 0 ? jet.d1 : d_[i + node][j];
            second[j] = jet.d2;
        }
    }

  private:
    std::size_t segment(double r) const {
        auto it = std::upper_bound(r_.begin(), r_.end(), r);
        std::size_t i = (it == r_.begin()) ? 0 : std::size_t(it - r_.begin()) - 1;
        if (i + 1 >= r_.size()) i = r_.size() - 2;
        return i;
    }

    std::vector<double> r_;
    std::vector<std::vector<double>> y_;
    std::vector<std::vector<double>> d_;
};

} // namespace hypmass::interp
