#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

#include "deadcore/dp_solver.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/potential.hpp"
#include "deadcore/radial.hpp"

namespace deadcore {
namespace oracles {

inline double critical_radius_characteristic_n2(double q) {
    return std::sqrt(2.0 * std::numbers::e) * q;
}

enum class Branch { Upper, Lower };

// Reference profile for the characteristic potential in n = 2, in the form
// stated alongside the critical radius R0 = sqrt(2e) q:
//   R < R0: both branches are identically q;
//   R = R0: Upper is q, Lower is 0 on [0, sqrt(2) q] then 2q ln(r/(sqrt2 q));
//   R > R0: both branches are 0 on [0, R/sqrt(e)] then 2q ln(sqrt(e) r / R).
// Note: for R > R0 this fixes the slope coefficient at 2q, which satisfies
// the free-boundary condition c = sqrt(2) l only at R = R0; see
// CharDiskMinimizerN2 for the profile that is stationary for every R.
struct FixedSlopeDiskProfileN2 {
    double q, R;
    Branch branch;
    double core_edge_ = 0.0; // 0 when the branch is constant q
    double slope_ = 0.0;

    FixedSlopeDiskProfileN2(double q_, double R_, Branch b) : q(q_), R(R_), branch(b) {
        if (!(q > 0.0) || !(R > 0.0))
            throw std::domain_error("FixedSlopeDiskProfileN2: q and R must be positive");
        const double R0 = critical_radius_characteristic_n2(q);
        const double tol = 1e-9 * R0;
        if (R < R0 - tol) {
            core_edge_ = 0.0; // constant-q branch
        } else if (R <= R0 + tol) {
            if (branch == Branch::Upper) {
                core_edge_ = 0.0;
            } else {
                core_edge_ = std::sqrt(2.0) * q;
                slope_ = 2.0 * q;
            }
        } else {
            core_edge_ = R / std::sqrt(std::numbers::e);
            slope_ = 2.0 * q;
        }
    }

    bool constant_branch() const { return core_edge_ == 0.0; }
    double core_edge() const { return core_edge_; }

    double eval(double r) const {
        if (constant_branch()) return q;
        if (r <= core_edge_) return 0.0;
        return std::min(q, slope_ * std::log(r / core_edge_));
    }
    double deriv(double r) const {
        if (constant_branch() || r <= core_edge_) return 0.0;
        return slope_ / r;
    }
    double potential(double r) const { return eval(r) > 0.0 ? 1.0 : 0.0; }
};

// Radial minimizer of the characteristic-potential disk energy (n = 2) in
// the harmonic-log family with a free core edge l: the profile
// c ln(r/l) with c = q / ln(R/l) is stationary in l exactly when
// c = sqrt(2) l, i.e. sqrt(2) l ln(R/l) = q (larger root).  For R below
// the critical radius the constant-q branch is the minimizer.
struct CharDiskMinimizerN2 {
    double q, R;
    double l = 0.0; // core edge; 0 on the constant branch
    double c = 0.0;

    CharDiskMinimizerN2(double q_, double R_, Branch branch = Branch::Lower)
        : q(q_), R(R_) {
        if (!(q > 0.0) || !(R > 0.0))
            throw std::domain_error("CharDiskMinimizerN2: q and R must be positive");
        const double R0 = critical_radius_characteristic_n2(q);
        const double tol = 1e-9 * R0;
        const bool core_branch =
            (R > R0 + tol) || (std::abs(R - R0) <= tol && branch == Branch::Lower);
        if (!core_branch) return; // constant q
        // g(l) = sqrt(2) l ln(R/l) - q is positive at l = R/e (where
        // l ln(R/l) is maximal) and negative at l = R; bisect for the
        // larger root.
        double lo = R / std::numbers::e, hi = R;
        auto g = [&](double x) { return std::sqrt(2.0) * x * std::log(R / x) - q; };
        if (g(lo) <= 0.0)
            throw std::domain_error("CharDiskMinimizerN2: no dead-core branch below the critical radius");
        for (int it = 0; it < 200 && hi - lo > 1e-15 * R; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? lo : hi) = mid;
        }
        l = 0.5 * (lo + hi);
        c = std::sqrt(2.0) * l;
    }

    bool constant_branch() const { return l == 0.0; }
    double core_edge() const { return l; }

    double eval(double r) const {
        if (constant_branch()) return q;
        if (r <= l) return 0.0;
        return std::min(q, c * std::log(r / l));
    }
    double deriv(double r) const {
        if (constant_branch() || r <= l) return 0.0;
        return c / r;
    }
    double potential(double r) const { return eval(r) > 0.0 ? 1.0 : 0.0; }
};

// gamma(s) = integral over (0, s] of dt / sqrt(2 W_rad(t)), evaluated in
// closed form for the built-in kinds (all are exactly integrable).
inline double gamma_sqrt2w(const RadialPotential& p, double s) {
    s = std::clamp(s, 0.0, p.q());
    switch (p.kind()) {
        case PotentialKind::Characteristic:
            return s / std::sqrt(2.0);
        case PotentialKind::PowerLaw: {
            const double a = p.alpha();
            if (a >= 2.0)
                throw precondition_error("gamma_sqrt2w: integral diverges for alpha >= 2");
            return std::pow(s, 1.0 - 0.5 * a) / ((1.0 - 0.5 * a) * std::sqrt(2.0));
        }
        case PotentialKind::Tabulated: {
            std::vector<double> knots{0.0};
            for (auto& [bs, bv] : p.breakpoints())
                if (bs > 0.0 && bs < p.q()) knots.push_back(bs);
            knots.push_back(p.q());
            double acc = 0.0;
            for (size_t i = 0; i + 1 < knots.size(); ++i) {
                const double a = knots[i], b = std::min(knots[i + 1], s);
                if (b <= a) break;
                const double v = p.eval(0.5 * (knots[i] + knots[i + 1]));
                if (v <= 0.0)
                    throw precondition_error("gamma_sqrt2w: potential vanishes on a set of positive measure");
                acc += (b - a) / std::sqrt(2.0 * v);
            }
            return acc;
        }
        case PotentialKind::Quadratic:
            throw precondition_error("gamma_sqrt2w: integral diverges for the quadratic potential");
        case PotentialKind::Zero:
            throw precondition_error("gamma_sqrt2w: potential vanishes on (0,q]");
    }
    return 0.0;
}

// Dead-core profile in n = 1 built from the first integral
// 1/2 |beta'|^2 = W_rad(beta): core edge l = R - gamma(q) and
// beta(r) = gamma^{-1}(r - l) on [l, R].  The inverse is computed by
// bisection on the monotone gamma with 1e-10 radius tolerance.
struct FirstIntegralProfileN1 {
    RadialPotential p;
    double q, R, iq, l;

    FirstIntegralProfileN1(const RadialPotential& pot, double R_)
        : p(pot), q(pot.q()), R(R_) {
        iq = gamma_sqrt2w(p, q);
        if (R < iq)
            throw precondition_error("FirstIntegralProfileN1: R below I_q, no dead-core closed form");
        l = R - iq;
    }

    double core_edge() const { return l; }

    double eval(double r) const {
        if (r <= l) return 0.0;
        const double t = std::min(r - l, iq);
        double lo = 0.0, hi = q;
        while (hi - lo > 1e-14 * std::max(1.0, q)) {
            const double mid = 0.5 * (lo + hi);
            const double gm = gamma_sqrt2w(p, mid);
            if (std::abs(gm - t) <= 1e-10) { lo = hi = mid; break; }
            (gm < t ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    double deriv(double r) const {
        if (r <= l) return 0.0;
        return std::sqrt(2.0 * p.eval(eval(r)));
    }
    double potential(double r) const { return p.eval(eval(r)); }
};

// psi(r) = q cosh(sqrt(2) r) / cosh(sqrt(2) R): the even solution of
// psi'' = 2 psi with psi(R) = q, strictly positive.  Reference for the
// quadratic potential, where the dead-core integral diverges.
struct CoshProfileN1 {
    double q, R;

    CoshProfileN1(double q_, double R_) : q(q_), R(R_) {}

    double core_edge() const { return 0.0; }
    double eval(double r) const {
        return q * std::cosh(std::sqrt(2.0) * r) / std::cosh(std::sqrt(2.0) * R);
    }
    double deriv(double r) const {
        return q * std::sqrt(2.0) * std::sinh(std::sqrt(2.0) * r) /
               std::cosh(std::sqrt(2.0) * R);
    }
    double potential(double r) const {
        const double v = eval(r);
        return v * v;
    }
    // 1/2 psi'^2 - psi^2 is constant, equal to -(q / cosh(sqrt2 R))^2.
    double hamiltonian() const {
        const double a = q / std::cosh(std::sqrt(2.0) * R);
        return -a * a;
    }
};

enum class ClosedFormFamily { FixedSlopeDiskN2, FirstIntegralN1, CoshN1Quadratic };

// Tagged union over the closed-form families, for callers that treat them
// uniformly (sampling, CSV dumps).
struct ClosedFormProfile {
    std::variant<FixedSlopeDiskProfileN2, CharDiskMinimizerN2, FirstIntegralProfileN1, CoshProfileN1> impl;

    double eval(double r) const {
        return std::visit([&](const auto& o) { return o.eval(r); }, impl);
    }
    double deriv(double r) const {
        return std::visit([&](const auto& o) { return o.deriv(r); }, impl);
    }
    double core_edge() const {
        return std::visit([&](const auto& o) { return o.core_edge(); }, impl);
    }
};

template <class Oracle>
RadialProfile sample_profile(const Oracle& o, int n, double R, int cells,
                             double lambda = 1.0) {
    RadialProfile prof;
    prof.grid = RadialGrid::uniform(n, R, cells);
    prof.lambda = lambda;
    prof.values.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) prof.values[i] = o.eval(prof.grid.radii[i]);
    return prof;
}

// Continuum radial energy of a closed-form profile by adaptive quadrature,
// split at the core edge where the potential term jumps.
template <class Oracle>
double continuum_energy(const Oracle& o, const RadialPotential& p, int n, double R,
                        double lambda = 1.0) {
    auto dens = [&](double r) {
        const double d = o.deriv(r);
        return std::pow(r, n - 1) * (0.5 * d * d + lambda * p.eval(std::min(o.eval(r), p.q())));
    };
    const double edge = std::clamp(o.core_edge(), 0.0, R);
    double e = 0.0;
    if (edge > 0.0) e += integrate_adaptive(dens, 0.0, edge).value;
    e += integrate_adaptive(dens, edge, R).value;
    return e;
}

// Exhaustive search over all monotone level assignments with h(R) = q,
// with branch-and-bound pruning (cell costs are nonnegative, so a partial
// sum exceeding the incumbent can never recover; ties are kept).  Used to
// certify solve_dp.  Also accumulates the pointwise envelope of all
// optimal profiles for tie-breaking checks.
struct BruteForceResult {
    RadialProfile best;              // first optimum found in DFS order
    std::vector<double> pointwise_min; // elementwise min over all optima
    std::vector<double> pointwise_max; // elementwise max over all optima
    long long optima_count = 0;
};

inline BruteForceResult brute_force_dp_oracle(const RadialPotential& p, int n, double R,
                                              double lambda, int N, int M,
                                              long long node_budget = 3000000000LL) {
    if (N > 24 || M > 12)
        throw resource_error("brute_force_dp_oracle: instance above the size cap (N<=24, M<=12)");
    // C(N+M, M) leaves; refuse clearly hopeless sizes even before searching.
    double log_states = std::lgamma(double(N + M + 1)) - std::lgamma(double(M + 1)) -
                        std::lgamma(double(N + 1));
    if (log_states > std::log(5e9))
        throw resource_error("brute_force_dp_oracle: state count too large");

    RadialGrid grid = RadialGrid::uniform(n, R, N);
    const double q = p.q();
    std::vector<double> level(M + 1), potC(M + 1), w(N);
    for (int j = 0; j <= M; ++j) {
        level[j] = q * double(j) / double(M);
        potC[j] = lambda * p.eval(level[j]);
    }
    for (int i = 0; i < N; ++i) w[i] = grid.weight(i);
    const double dr = R / N;
    const double grad_coef = 0.5 * (q / (M * dr)) * (q / (M * dr));

    auto cell_cost = [&](int i, int j, int jp) {
        return detail::dp_cell_cost(w[i], grad_coef, potC[j], double(jp - j));
    };

    BruteForceResult out;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> path(N + 1, 0);
    long long visited = 0;

    // Seed the incumbent with cheap admissible profiles (flat at a level,
    // boundary jump at the end) so the pruning has a bound from the start.
    double seed_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= M; ++j) {
        double cost = 0.0;
        for (int i = 0; i + 1 < N; ++i) cost += cell_cost(i, j, j);
        cost += cell_cost(N - 1, j, M);
        seed_best = std::min(seed_best, cost);
    }
    // pruning threshold only; optimal profiles are still enumerated below
    best = std::nextafter(seed_best, std::numeric_limits<double>::infinity());

    // DFS left to right so partial sums accumulate in the same order as
    // the DP recursion: float tie semantics then agree bit for bit.
    // Cell costs are nonnegative, so a partial sum above the incumbent can
    // be pruned without losing ties.
    auto leaf = [&](double cost) {
        if (cost < best) {
            best = cost;
            out.pointwise_min.assign(N + 1, 0.0);
            out.pointwise_max.assign(N + 1, 0.0);
            for (int k = 0; k <= N; ++k)
                out.pointwise_min[k] = out.pointwise_max[k] = level[path[k]];
            out.best.values = out.pointwise_min;
            out.best.energy = cost;
            out.optima_count = 1;
        } else if (cost == best) {
            ++out.optima_count;
            for (int k = 0; k <= N; ++k) {
                out.pointwise_min[k] = std::min(out.pointwise_min[k], level[path[k]]);
                out.pointwise_max[k] = std::max(out.pointwise_max[k], level[path[k]]);
            }
        }
    };
    auto dfs = [&](auto&& self, int i, double cost) -> void {
        if (++visited > node_budget)
            throw resource_error("brute_force_dp_oracle: node budget exhausted");
        if (cost > best) return;
        if (i == N) {
            leaf(cost);
            return;
        }
        if (i + 1 == N) {
            path[N] = M;
            self(self, N, cost + cell_cost(i, path[i], M));
            return;
        }
        for (int jp = path[i]; jp <= M; ++jp) {
            path[i + 1] = jp;
            self(self, i + 1, cost + cell_cost(i, path[i], jp));
        }
    };
    for (int j0 = M; j0 >= 0; --j0) {
        path[0] = j0;
        dfs(dfs, 0, 0.0);
    }

    out.best.grid = std::move(grid);
    out.best.lambda = lambda;
    out.best.value_levels = M;
    return out;
}

} // namespace oracles
} // namespace deadcore
