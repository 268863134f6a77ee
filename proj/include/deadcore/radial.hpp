#pragma once

#include <cmath>
#include <vector>

#include "deadcore/errors.hpp"
#include "deadcore/potential.hpp"

namespace deadcore {

// Radial grid on [0, R] in ambient dimension n.  The surface-measure
// constant |S^(n-1)| is dropped from all energies: it multiplies every
// admissible profile identically and never changes minimizers.
struct RadialGrid {
    int n = 1;
    double R = 1.0;
    std::vector<double> radii; // radii[0] = 0, radii[N] = R, strictly increasing

    static RadialGrid uniform(int n, double R, int cells) {
        if (n < 1) throw precondition_error("RadialGrid: n must be >= 1");
        if (!(R > 0.0)) throw precondition_error("RadialGrid: R must be positive");
        if (cells < 1) throw precondition_error("RadialGrid: need at least one cell");
        RadialGrid g;
        g.n = n;
        g.R = R;
        g.radii.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) g.radii[i] = R * double(i) / double(cells);
        g.radii.back() = R;
        return g;
    }

    int cells() const { return static_cast<int>(radii.size()) - 1; }
    double dr(int i) const { return radii[i + 1] - radii[i]; }
    double midpoint(int i) const { return 0.5 * (radii[i] + radii[i + 1]); }
    // Cell weight r_mid^(n-1) * dr; the first cell uses (dr/2)^(n-1) which
    // avoids the r = 0 degeneracy and reduces to 1 in n = 1.
    double weight(int i) const {
        return std::pow(midpoint(i), n - 1) * dr(i);
    }
};

// Monotone radial profile h(r) with h(R) = q (boundary class) and the
// perturbation parameter lambda of the scaled-potential functional.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values; // one per node, nondecreasing, in [0, q]
    double lambda = 1.0;
    double energy = 0.0;   // discrete energy, |S^(n-1)| omitted
    int value_levels = 0;  // M of the DP level grid that produced this profile

    int nodes() const { return static_cast<int>(values.size()); }

    // Monotone piecewise-linear evaluation at radius r (clamped to [0, R]).
    double eval(double r) const {
        const auto& rr = grid.radii;
        if (r <= rr.front()) return values.front();
        if (r >= rr.back()) return values.back();
        auto it = std::upper_bound(rr.begin(), rr.end(), r);
        size_t k = static_cast<size_t>(it - rr.begin()) - 1;
        const double t = (r - rr[k]) / (rr[k + 1] - rr[k]);
        return values[k] + t * (values[k + 1] - values[k]);
    }

    double min_value() const {
        double m = values.front();
        for (double v : values) m = std::min(m, v);
        return m;
    }

    bool is_nondecreasing(double tol = 0.0) const {
        for (size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i + 1] < values[i] - tol) return false;
        return true;
    }
};

// Discrete energy: sum over cells of
//   weight(i) * [ 1/2 ((h_{i+1}-h_i)/dr)^2 + lambda * W_rad(h_i) ].
// The potential is sampled at the lower node, consistent with lsc and
// monotone profiles: jumps are underestimated, never overestimated.
inline double discrete_energy(const RadialProfile& profile, const RadialPotential& p) {
    const RadialGrid& g = profile.grid;
    double e = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double dr = g.dr(i);
        const double slope = (profile.values[i + 1] - profile.values[i]) / dr;
        e += g.weight(i) * (0.5 * slope * slope + profile.lambda * p.eval(profile.values[i]));
    }
    return e;
}

} // namespace deadcore
