#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "deadcore/errors.hpp"

namespace deadcore {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
};

namespace detail {

// Gauss(7)/Kronrod(15) pair on [-1,1], QUADPACK constants.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
QuadResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - hw * kGK15Nodes[i]);
        fv[14 - i] = f(c + hw * kGK15Nodes[i]);
    }
    fv[7] = f(c);
    for (double v : fv)
        if (!std::isfinite(v))
            throw std::domain_error("quadrature: integrand is not finite inside the interval");

    double kron = 0.0;
    for (int i = 0; i < 7; ++i) kron += kGK15Weights[i] * (fv[i] + fv[14 - i]);
    kron += kGK15Weights[7] * fv[7];
    kron *= hw;

    // Gauss-7 uses the odd Kronrod nodes (indices 1,3,5,7).
    double gauss = kG7Weights[3] * fv[7];
    gauss += kG7Weights[0] * (fv[1] + fv[13]);
    gauss += kG7Weights[1] * (fv[3] + fv[11]);
    gauss += kG7Weights[2] * (fv[5] + fv[9]);
    gauss *= hw;

    double err = std::pow(200.0 * std::abs(kron - gauss), 1.5);
    return {kron, std::min(err, std::abs(kron - gauss) * 200.0)};
}

template <class F>
void adapt_rec(const F& f, double a, double b, double tol, int depth, QuadResult& acc) {
    QuadResult whole = gk15(f, a, b);
    if (whole.abs_error <= tol || depth >= 48) {
        acc.value += whole.value;
        acc.abs_error += whole.abs_error;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt_rec(f, a, m, 0.5 * tol, depth + 1, acc);
    adapt_rec(f, m, b, 0.5 * tol, depth + 1, acc);
}

} // namespace detail

// Adaptive Gauss-Kronrod on a finite interval with a bounded integrand.
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-12) {
    if (!(b > a)) return {0.0, 0.0};
    QuadResult probe = detail::gk15(f, a, b);
    double tol = std::max(abs_tol, rel_tol * std::abs(probe.value));
    QuadResult acc;
    detail::adapt_rec(f, a, b, tol, 0, acc);
    return acc;
}

struct ImproperResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool infinite = false;
};

// Integral of g over (0, q] where g may blow up at 0 (g finite on every
// [a, q], a > 0).  The interval is split into dyadic cells
// [q/2^(k+1), q/2^k]; divergence is declared when partial sums exceed 1e12
// or the per-level contributions stop decreasing geometrically.
template <class F>
ImproperResult integrate_improper_origin(const F& g, double q,
                                         double rel_tol = 1e-11) {
    if (!(q > 0.0)) throw std::domain_error("integrate_improper_origin: q must be positive");
    constexpr int kLevels = 60;
    constexpr double kBlowup = 1e12;
    constexpr double kRatioFloor = 0.995;

    ImproperResult out;
    std::vector<double> contrib;
    contrib.reserve(kLevels);
    int flat_streak = 0;

    for (int k = 0; k < kLevels; ++k) {
        const double b = q / std::pow(2.0, k);
        const double a = 0.5 * b;
        QuadResult cell = integrate_adaptive(g, a, b, 0.0, rel_tol);
        out.value += cell.value;
        out.abs_error += cell.abs_error;
        contrib.push_back(cell.value);

        if (out.value > kBlowup) {
            out.infinite = true;
            return out;
        }
        if (k >= 1 && contrib[k - 1] > 0.0) {
            const double ratio = contrib[k] / contrib[k - 1];
            flat_streak = (ratio >= kRatioFloor) ? flat_streak + 1 : 0;
            if (k >= 12 && flat_streak >= 3) {
                out.infinite = true;
                return out;
            }
        }
    }

    // Geometric tail estimate from the last two levels.
    const double last = contrib[kLevels - 1];
    const double prev = contrib[kLevels - 2];
    if (last > 0.0 && prev > 0.0) {
        const double r = std::min(last / prev, 0.99);
        const double tail = last * r / (1.0 - r);
        out.value += tail;
        out.abs_error += tail;
    }
    return out;
}

} // namespace deadcore
