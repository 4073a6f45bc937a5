#pragma once

// Small self-contained complex FFT for uniform periodic grids.
//
// Power-of-two sizes use an iterative radix-2 Cooley-Tukey transform; other
// even sizes fall back to a cached-twiddle direct DFT (grids here are tiny,
// N <= a few thousand, so O(N^2) is acceptable off the hot path).
// Twiddle tables are cached per size behind a shared mutex so concurrent
// solvers can share them.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "errors.hpp"

namespace hypmass::fft {

using cplx = std::complex<double>;

namespace detail {

struct Twiddles {
    // roots[j] = exp(-2 pi i j / n), j = 0..n-1
    std::vector<cplx> roots;
};

inline std::shared_ptr<const Twiddles> twiddles_for(std::size_t n) {
    static std::map<std::size_t, std::shared_ptr<const Twiddles>> cache;
    static std::shared_mutex mutex;
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    auto t = std::make_shared<Twiddles>();
    t->roots.resize(n);
    const double step = -2.0 * 3.14159265358979323846264338327950288 / double(n);
    for (std::size_t j = 0; j < n; ++j)
        t->roots[j] = std::polar(1.0, step * double(j));
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(n, std::move(t));
    (void)inserted;
    return it->second;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void bit_reverse_permute(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

} // namespace detail

// In-place transform. Forward uses kernel exp(-2 pi i jk/N); the inverse
// includes the 1/N normalization so inverse(forward(x)) == x.
inline void transform(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0) throw input_error("fft: empty input");
    if (n == 1) return;
    auto tw = detail::twiddles_for(n);
    if (detail::is_pow2(n)) {
        detail::bit_reverse_permute(a);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t stride = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    cplx w = tw->roots[k * stride];
                    if (inverse) w = std::conj(w);
                    const cplx u = a[i + k];
                    const cplx v = a[i + k + len / 2] * w;
                    a[i + k] = u + v;
                    a[i + k + len / 2] = u - v;
                }
            }
        }
    } else {
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                cplx w = tw->roots[(j * k) % n];
                if (inverse) w = std::conj(w);
                acc += a[j] * w;
            }
            out[k] = acc;
        }
        a = std::move(out);
    }
    if (inverse) {
        const double scale = 1.0 / double(n);
        for (auto& x : a) x *= scale;
    }
}

// Signed spectral wavenumber for mode index k of an N-point grid.
inline double wavenumber(std::size_t k, std::size_t n) {
    return (k <= n / 2) ? double(k) : double(k) - double(n);
}

// Derivatives of the trigonometric interpolant, evaluated on the grid.
// order 1 zeroes the Nyquist mode (its interpolant derivative is pure
// imaginary there); order 2 multiplies it by -(N/2)^2.
inline std::vector<double> derivative(const std::vector<double>& values, int order) {
    const std::size_t n = values.size();
    std::vector<cplx> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = values[j];
    transform(a, false);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = wavenumber(k, n);
        if (order == 1) {
            const bool nyquist = (n % 2 == 0) && (k == n / 2);
            a[k] *= nyquist ? cplx{0.0, 0.0} : cplx{0.0, kk};
        } else if (order == 2) {
            a[k] *= -kk * kk;
        } else {
            throw input_error("fft::derivative: order must be 1 or 2");
        }
    }
    transform(a, true);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

} // namespace hypmass::fft
