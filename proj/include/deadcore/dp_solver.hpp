#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "deadcore/errors.hpp"
#include "deadcore/potential.hpp"
#include "deadcore/radial.hpp"

namespace deadcore {

enum class Tie { PreferLow, PreferHigh };

namespace detail {

// Cost of one cell in the level DP.  Shared verbatim between the solver
// and the brute-force oracle so their accumulated sums agree bit for bit
// (criterion: exact energy equality on small instances).
inline double dp_cell_cost(double w, double grad_coef, double pot_j, double d) {
    return w * (grad_coef * d * d + pot_j);
}

// Banded DP over (node, level) with per-node level windows [lo_i, hi_i].
// Profiles are nondecreasing in the level index and end at level M
// (value q).  Tie-breaking picks the lowest (PreferLow) or highest
// (PreferHigh) predecessor level among cost-equal optima.
inline RadialProfile dp_banded(const RadialPotential& p, int n, double R,
                               double lambda, int N, int M, Tie tie,
                               const std::vector<int>& lo, const std::vector<int>& hi) {
    RadialGrid grid = RadialGrid::uniform(n, R, N);
    const double q = p.q();
    const double dr = R / N;
    const double grad_coef = 0.5 * (q / (M * dr)) * (q / (M * dr));

    std::vector<double> potC(M + 1);
    for (int j = 0; j <= M; ++j) potC[j] = lambda * p.eval(q * double(j) / double(M));

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(M + 1, inf), cur(M + 1, inf);
    std::vector<uint16_t> pred(static_cast<size_t>(N) * (M + 1), 0);

    for (int j = lo[0]; j <= hi[0]; ++j) prev[j] = 0.0;

    for (int i = 0; i < N; ++i) {
        const double w = grid.weight(i);
        uint16_t* pd = pred.data() + static_cast<size_t>(i) * (M + 1);
        std::fill(cur.begin(), cur.end(), inf);
        const int jlo_min = lo[i];
        for (int jp = lo[i + 1]; jp <= hi[i + 1]; ++jp) {
            const int jmax = std::min(jp, hi[i]);
            double best = inf;
            int bestj = -1;
            if (tie == Tie::PreferLow) {
                for (int j = jlo_min; j <= jmax; ++j) {
                    const double cand = prev[j] + dp_cell_cost(w, grad_coef, potC[j], double(jp - j));
                    if (cand < best) { best = cand; bestj = j; }
                }
            } else {
                for (int j = jlo_min; j <= jmax; ++j) {
                    const double cand = prev[j] + dp_cell_cost(w, grad_coef, potC[j], double(jp - j));
                    if (cand <= best) { best = cand; bestj = j; }
                }
            }
            if (bestj >= 0) {
                cur[jp] = best;
                pd[jp] = static_cast<uint16_t>(bestj);
            }
        }
        std::swap(prev, cur);
    }

    if (!std::isfinite(prev[M]))
        throw nonconvergence_error("solve_dp: no feasible monotone profile in the given bands");

    RadialProfile out;
    out.grid = std::move(grid);
    out.lambda = lambda;
    out.energy = prev[M];
    out.value_levels = M;
    out.values.resize(N + 1);
    int j = M;
    out.values[N] = q;
    for (int i = N - 1; i >= 0; --i) {
        j = pred[static_cast<size_t>(i) * (M + 1) + j];
        out.values[i] = q * double(j) / double(M);
    }
    return out;
}

} // namespace detail

// Global minimizer of the discrete radial energy over monotone profiles
// with values on the (M+1)-point level grid and h(R) = q, by dynamic
// programming over (node, level).  Cost O(N*M^2).
inline RadialProfile solve_dp(const RadialPotential& p, int n, double R, double lambda,
                              int N, int M, Tie tie = Tie::PreferLow,
                              double budget = 4e9) {
    if (N < 16) throw precondition_error("solve_dp: N must be >= 16");
    if (M < 8) throw precondition_error("solve_dp: M must be >= 8");
    if (M > 65000) throw precondition_error("solve_dp: M too large");
    if (!(lambda > 0.0)) throw precondition_error("solve_dp: lambda must be positive");
    if (double(N) * double(M) * double(M) > budget)
        throw resource_error("solve_dp: N*M^2 exceeds the configured budget");
    std::vector<int> lo(N + 1, 0), hi(N + 1, M);
    lo[N] = M;
    return detail::dp_banded(p, n, R, lambda, N, M, tie, lo, hi);
}

// Two-stage variant: a coarse DP at M/coarse_factor levels, then a second
// DP at full M restricted to a tube of +-tube_coarse coarse levels around
// the coarse solution.  Validated against the full DP on small instances.
inline RadialProfile solve_dp_multires(const RadialPotential& p, int n, double R,
                                       double lambda, int N, int M, Tie tie,
                                       int coarse_factor = 4, int tube_coarse = 3,
                                       double budget = 4e9) {
    const int Mc = std::max(8, M / coarse_factor);
    if (Mc >= M) return solve_dp(p, n, R, lambda, N, M, tie, budget);
    RadialProfile coarse = solve_dp(p, n, R, lambda, N, Mc, tie, budget);

    const double q = p.q();
    const int stride = (M + Mc - 1) / Mc;
    std::vector<int> lo(N + 1), hi(N + 1);
    for (int i = 0; i <= N; ++i) {
        const int jc = static_cast<int>(std::lround(coarse.values[i] / q * Mc));
        lo[i] = std::clamp((jc - tube_coarse) * stride, 0, M);
        hi[i] = std::clamp((jc + tube_coarse) * stride, 0, M);
    }
    // Monotone envelopes keep the band feasible for nondecreasing profiles.
    for (int i = 1; i <= N; ++i) lo[i] = std::max(lo[i], lo[i - 1]);
    for (int i = N - 1; i >= 0; --i) hi[i] = std::min(hi[i], hi[i + 1]);
    lo[N] = hi[N] = M;
    for (int i = 0; i <= N; ++i)
        if (lo[i] > hi[i]) lo[i] = hi[i];
    return detail::dp_banded(p, n, R, lambda, N, M, tie, lo, hi);
}

// Coordinate-descent polish: each free node value is minimized over the
// continuous interval [h_{i-1}, h_{i+1}] by golden-section search on the
// two adjacent cell energies (plus candidates at the interval ends and at
// potential breakpoints, which golden-section alone can miss on lsc
// steps).  Energy never increases; monotonicity is preserved.  Sweeps
// alternate direction, starting from the boundary, so that positivity
// propagates inward in a single pass.
inline RadialProfile refine_local(RadialProfile profile, const RadialPotential& p,
                                  int passes) {
    const RadialGrid& g = profile.grid;
    const int N = g.cells();
    const double lambda = profile.lambda;
    const double gold = 0.5 * (3.0 - std::sqrt(5.0));

    std::vector<double> jump_sites;
    if (p.kind() == PotentialKind::Tabulated)
        for (auto& [s, v] : p.breakpoints()) jump_sites.push_back(s);

    auto local_energy = [&](int i, double v) {
        double e = 0.0;
        if (i > 0) {
            const double dr = g.dr(i - 1);
            const double slope = (v - profile.values[i - 1]) / dr;
            e += g.weight(i - 1) * (0.5 * slope * slope + lambda * p.eval(profile.values[i - 1]));
        }
        const double dr = g.dr(i);
        const double slope = (profile.values[i + 1] - v) / dr;
        e += g.weight(i) * (0.5 * slope * slope + lambda * p.eval(v));
        return e;
    };

    auto relax_node = [&](int i) {
        const double a = (i > 0) ? profile.values[i - 1] : 0.0;
        const double b = profile.values[i + 1];
        if (b - a <= 0.0) return;
        double best_v = profile.values[i];
        double best_e = local_energy(i, best_v);
        auto consider = [&](double v) {
            if (v < a || v > b) return;
            const double e = local_energy(i, v);
            if (e < best_e || (e == best_e && v < best_v)) {
                best_e = e;
                best_v = v;
            }
        };
        consider(a);
        consider(b);
        for (double s : jump_sites) consider(s);
        // Golden-section on [a, b].
        double x0 = a, x3 = b;
        double x1 = a + gold * (b - a);
        double x2 = b - gold * (b - a);
        double f1 = local_energy(i, x1), f2 = local_energy(i, x2);
        for (int it = 0; it < 80 && x3 - x0 > 1e-13 * std::max(1.0, b); ++it) {
            if (f1 < f2) {
                x3 = x2; x2 = x1; f2 = f1;
                x1 = x0 + gold * (x3 - x0);
                f1 = local_energy(i, x1);
            } else {
                x0 = x1; x1 = x2; f1 = f2;
                x2 = x3 - gold * (x3 - x0);
                f2 = local_energy(i, x2);
            }
        }
        consider(x1);
        consider(x2);
        profile.values[i] = best_v;
    };

    for (int pass = 0; pass < passes; ++pass) {
        if (pass % 2 == 0) {
            for (int i = N - 1; i >= 0; --i) relax_node(i);
        } else {
            for (int i = 0; i < N; ++i) relax_node(i);
        }
    }
    profile.energy = discrete_energy(profile, p);
    return profile;
}

// Projected damped Newton for potentials that are C^1 on the positive
// region: there the discrete energy is a smooth function of the free node
// values, and the tridiagonal Newton system resolves both the
// exponentially small tails of the divergent-integral kinds and the
// mid-wavelength ripples a per-node golden-section sweep leaves behind.
// For the characteristic potential the zero set is frozen (lifting a node
// off zero jumps the potential term, which no derivative sees) and the
// positive region is a plain linear solve.  Steps are clamped to [0, q],
// monotonized, and accepted only on energy descent.
inline RadialProfile refine_newton(RadialProfile profile, const RadialPotential& p,
                                   int max_iters = 80) {
    const bool characteristic = p.kind() == PotentialKind::Characteristic;
    if (!p.smooth() && !characteristic)
        throw precondition_error("refine_newton: potential is not C^1 on the positive region");
    // Kinds with a finite dead-core integral have genuine zero sets; their
    // zero rows are frozen so the clamp projection cannot fight the coupled
    // Newton step at the contact.  Divergent-integral kinds have strictly
    // positive minimizers and must be free to lift zeros in the start.
    const bool freeze_zeros =
        characteristic || (p.kind() == PotentialKind::PowerLaw && p.alpha() < 2.0);
    const RadialGrid& g = profile.grid;
    const int N = g.cells();
    const double lam = profile.lambda;
    const double q = p.q();

    std::vector<double> w(N);
    for (int i = 0; i < N; ++i) w[i] = g.weight(i);

    auto wderiv = [&](double s) { return characteristic ? 0.0 : p.deriv(s); };
    auto wsecond = [&](double s) { return characteristic ? 0.0 : p.second_deriv(s); };

    auto energy_of = [&](const std::vector<double>& h) {
        double e = 0.0;
        for (int i = 0; i < N; ++i) {
            const double slope = (h[i + 1] - h[i]) / g.dr(i);
            e += w[i] * (0.5 * slope * slope + lam * p.eval(h[i]));
        }
        return e;
    };

    std::vector<double> diag(N), off(N), rhs(N), cp(N), dx(N), trial(N + 1);
    double energy = energy_of(profile.values);
    for (int it = 0; it < max_iters; ++it) {
        auto& h = profile.values;
        double grad_norm = 0.0;
        for (int i = 0; i < N; ++i) {
            const double dri = g.dr(i);
            double gdr = -w[i] * (h[i + 1] - h[i]) / (dri * dri) + w[i] * lam * wderiv(h[i]);
            double dia = w[i] / (dri * dri) + w[i] * lam * std::min(wsecond(h[i]), 1e12);
            if (i > 0) {
                const double drm = g.dr(i - 1);
                gdr += w[i - 1] * (h[i] - h[i - 1]) / (drm * drm);
                dia += w[i - 1] / (drm * drm);
            }
            if (h[i] <= 0.0 && gdr > 0.0) gdr = 0.0; // active clamp at the core
            rhs[i] = -gdr;
            diag[i] = dia;
            off[i] = -w[i] / (dri * dri); // coupling to h[i+1]
            grad_norm = std::max(grad_norm, std::abs(gdr));
        }
        if (freeze_zeros) {
            // zero rows become identities and the couplings into them are cut
            for (int i = 0; i < N; ++i) {
                if (h[i] > 0.0) continue;
                rhs[i] = 0.0;
                diag[i] = 1.0;
                off[i] = 0.0;
                if (i > 0) off[i - 1] = 0.0;
            }
            grad_norm = 0.0;
            for (int i = 0; i < N; ++i) grad_norm = std::max(grad_norm, std::abs(rhs[i]));
        }
        if (grad_norm < 1e-12 * std::max(1.0, energy)) break;

        // Thomas solve of the tridiagonal Newton system.
        cp[0] = off[0] / diag[0];
        dx[0] = rhs[0] / diag[0];
        for (int i = 1; i < N; ++i) {
            const double m = diag[i] - off[i - 1] * cp[i - 1];
            cp[i] = off[i] / m;
            dx[i] = (rhs[i] - off[i - 1] * dx[i - 1]) / m;
        }
        for (int i = N - 2; i >= 0; --i) dx[i] -= cp[i] * dx[i + 1];

        bool accepted = false;
        for (double damp = 1.0; damp > 1e-8; damp *= 0.5) {
            for (int i = 0; i < N; ++i) trial[i] = std::clamp(h[i] + damp * dx[i], 0.0, q);
            trial[N] = q;
            for (int i = 1; i <= N; ++i) trial[i] = std::max(trial[i], trial[i - 1]);
            const double e2 = energy_of(trial);
            if (e2 <= energy) {
                h = trial;
                energy = e2;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    profile.energy = discrete_energy(profile, p);
    return profile;
}

// Resolution heuristic: the DP represents slopes in integer multiples of
// the unit q*N/(M*R); non-representable slopes pay a convexity penalty of
// up to mu^2/8 per unit weight, which distorts the optimal shape roughly
// like mu_rel^2 * q in value.  mu_rel is the unit over the natural slope
// scale sqrt(2 lambda sup W).
inline int levels_for_mu(const RadialPotential& p, double R, double lambda, int N,
                         double mu_rel) {
    const double slope_scale = std::max(std::sqrt(2.0 * std::max(lambda, 0.5) * p.sup_value()),
                                        2.0 * p.q() / R);
    const int M = static_cast<int>(std::ceil(p.q() * N / (mu_rel * R * slope_scale)));
    return std::clamp(M, 64, std::min(60000, 8 * N));
}

namespace detail {

// Banded stage around a previous solution; widens and retries when the
// result presses against the band (excluding the genuine core at level 0
// and the boundary level M).
inline RadialProfile dp_banded_around(const RadialPotential& p, int n, double R,
                                      double lambda, int N, int M, Tie tie,
                                      const RadialProfile& center, double half_width) {
    const double q = p.q();
    RadialGrid fine_grid = RadialGrid::uniform(n, R, N);
    for (int attempt = 0; attempt < 5; ++attempt, half_width *= 2.0) {
        std::vector<int> lo(N + 1), hi(N + 1);
        for (int i = 0; i <= N; ++i) {
            const double v = center.eval(fine_grid.radii[i]);
            lo[i] = std::clamp(static_cast<int>(std::floor((v - half_width) / q * M)), 0, M);
            hi[i] = std::clamp(static_cast<int>(std::ceil((v + half_width) / q * M)), 0, M);
        }
        for (int i = 1; i <= N; ++i) lo[i] = std::max(lo[i], lo[i - 1]);
        for (int i = N - 1; i >= 0; --i) hi[i] = std::min(hi[i], hi[i + 1]);
        lo[N] = hi[N] = M;
        for (int i = 0; i <= N; ++i)
            if (lo[i] > hi[i]) lo[i] = hi[i];

        RadialProfile fine = dp_banded(p, n, R, lambda, N, M, tie, lo, hi);
        bool touches = false;
        for (int i = 0; i < N && !touches; ++i) {
            const double vlo = q * double(lo[i]) / double(M);
            const double vhi = q * double(hi[i]) / double(M);
            if (lo[i] > 0 && fine.values[i] == vlo) touches = true;
            if (hi[i] < M && fine.values[i] == vhi) touches = true;
        }
        if (!touches) return fine;
    }
    throw nonconvergence_error("solve_radial_auto: band kept saturating while widening");
}

} // namespace detail

// Auto-resolution solve: a cost-capped full DP fixes the global branch
// structure at mu_rel ~ 0.22, then banded stages on the requested grid
// halve mu_rel until the slope quantization is negligible, and a local
// polish finishes below level resolution.
inline RadialProfile solve_radial_auto(const RadialPotential& p, int n, double R,
                                       double lambda, int N, Tie tie,
                                       int refine_passes = 8,
                                       double stage_budget = 2e9,
                                       double mu_target = 0.0) {
    const double q = p.q();
    const double mu0 = 0.22;
    // Slope-quantization artifacts scale with the slope unit; tying the
    // target unit to 1/N makes profile errors genuinely first-order in
    // the grid, which refinement studies rely on.
    if (mu_target <= 0.0) mu_target = std::clamp(24.0 / N, 0.012, 0.05);

    // The Newton polish serves the divergent-integral kinds, whose
    // minimizers are strictly positive with exponentially small tails that
    // the level DP cannot represent.  Potentials with finite I_q develop
    // dead cores with degenerate contact, where a projected Newton can
    // stall on the active set; those go through the band ladder instead.
    const bool tail_regime =
        p.kind() == PotentialKind::Zero || p.kind() == PotentialKind::Quadratic ||
        (p.kind() == PotentialKind::PowerLaw && p.alpha() >= 2.0);
    if (tail_regime && p.smooth()) {
        // Convex case: a light DP fixes the (unique) branch, and the
        // Newton polish is exact on any grid, tails included.
        const int N1 = std::min(N, 400);
        const int M1 = levels_for_mu(p, R, lambda, N1, 0.25);
        RadialProfile coarse = solve_dp(p, n, R, lambda, N1, M1, tie, 4e9);
        RadialProfile out;
        out.grid = RadialGrid::uniform(n, R, N);
        out.lambda = lambda;
        out.value_levels = M1;
        out.values.resize(N + 1);
        for (int i = 0; i <= N; ++i) out.values[i] = coarse.eval(out.grid.radii[i]);
        out = refine_newton(std::move(out), p);
        return refine_local(std::move(out), p, std::min(refine_passes, 2));
    }

    // Nonconvex potentials: distinct branches (constant-height vs dead
    // core) can be nearly energy-degenerate near the critical radius, and
    // the coarse stage's quantization bias could pick the wrong one.  Both
    // branch seeds are therefore carried through the refinement ladder and
    // the winner is decided by the final-resolution energies.
    auto run_ladder = [&](bool force_zero_origin) {
        const double k0 = double(levels_for_mu(p, R, lambda, N, mu0)) / double(N);
        int N1 = std::min(N, std::max(200, static_cast<int>(std::cbrt(stage_budget / (k0 * k0)))));
        int M1 = levels_for_mu(p, R, lambda, N1, mu0);
        std::vector<int> lo(N1 + 1, 0), hi(N1 + 1, M1);
        lo[N1] = M1;
        if (force_zero_origin) hi[0] = 0;
        RadialProfile cur = detail::dp_banded(p, n, R, lambda, N1, M1, tie, lo, hi);
        cur.value_levels = M1;
        double mu_cur = mu0;
        while (N1 != N || mu_cur > mu_target) {
            const double mu_next = (N1 != N) ? mu_cur : std::max(mu_target, 0.4 * mu_cur);
            const int M2 = levels_for_mu(p, R, lambda, N, mu_next);
            const double half_width =
                std::max(6.0 * q / double(cur.value_levels), 1.5 * mu_cur * mu_cur * q);
            cur = detail::dp_banded_around(p, n, R, lambda, N, M2, tie, cur, half_width);
            N1 = N;
            mu_cur = mu_next;
            if (M2 >= std::min(60000, 8 * N)) break; // level grid saturated
        }
        cur = refine_local(std::move(cur), p, refine_passes);
        // Smooth the ladder's sub-level ripples with a Newton pass whenever
        // the potential is differentiable on the positive region (the
        // ladder has already fixed the branch and the zero set, which is
        // where a cold-started Newton could go wrong).
        if (p.smooth() || p.kind() == PotentialKind::Characteristic)
            cur = refine_newton(std::move(cur), p);
        return cur;
    };

    // Prefer a (better, b) outcome under the tie rule: lower profiles win
    // ties for PreferLow, higher for PreferHigh.
    auto better = [&](const RadialProfile& a, const RadialProfile& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return tie == Tie::PreferLow ? a.values[0] < b.values[0] : a.values[0] > b.values[0];
    };

    RadialProfile best = run_ladder(false);

    RadialProfile constq;
    constq.grid = RadialGrid::uniform(n, R, N);
    constq.lambda = lambda;
    constq.value_levels = best.value_levels;
    constq.values.assign(N + 1, q);
    constq.energy = discrete_energy(constq, p);
    if (better(constq, best)) best = constq;

    if (best.values[0] > 1e-6 * q) {
        RadialProfile forced = run_ladder(true);
        if (better(forced, best)) best = std::move(forced);
    }
    return best;
}

// Approximations of the largest/smallest radial minimizers via the
// one-sided lambda limits: the upper function is the refined DP solution
// at lambda = 1 - eps with high tie-breaking, the lower at 1 + eps with
// low tie-breaking.
struct ComparisonPair {
    RadialProfile upper;
    RadialProfile lower;
    std::pair<double, double> lambda_bracket; // (1 - eps, 1 + eps)
};

struct PairParams {
    int N = 800;
    int M = 0; // 0: auto-resolution (slope-scaled levels, banded fine stage)
    double eps = 1e-3;
    int refine_passes = 8;
    double ordering_tolerance = 0.0; // 0 -> 1e-6 * q
    double budget = 4e9;
    bool multires = false;
};

inline ComparisonPair comparison_pair(const RadialPotential& p, int n, double R,
                                      const PairParams& prm = {}) {
    if (!(prm.eps > 0.0 && prm.eps < 0.5))
        throw precondition_error("comparison_pair: eps must lie in (0, 0.5)");
    const double ord_tol = prm.ordering_tolerance > 0.0 ? prm.ordering_tolerance
                                                        : 1e-6 * p.q();
    auto solve = [&](double lambda, Tie tie) {
        if (prm.M == 0)
            return solve_radial_auto(p, n, R, lambda, prm.N, tie, prm.refine_passes,
                                     std::min(prm.budget, 2e9));
        RadialProfile prof = prm.multires
            ? solve_dp_multires(p, n, R, lambda, prm.N, prm.M, tie, 4, 3, prm.budget)
            : solve_dp(p, n, R, lambda, prm.N, prm.M, tie, prm.budget);
        return refine_local(std::move(prof), p, prm.refine_passes);
    };

    for (double eps = prm.eps; eps >= 1e-6; eps *= 0.1) {
        ComparisonPair pair;
        pair.upper = solve(1.0 - eps, Tie::PreferHigh);
        pair.lower = solve(1.0 + eps, Tie::PreferLow);
        pair.lambda_bracket = {1.0 - eps, 1.0 + eps};
        bool ordered = true;
        for (size_t i = 0; i < pair.upper.values.size(); ++i) {
            if (pair.lower.values[i] > pair.upper.values[i] + ord_tol) {
                ordered = false;
                break;
            }
        }
        if (ordered) return pair;
    }
    throw nonconvergence_error("comparison_pair: ordering failed for eps down to 1e-6");
}

struct DeadCoreReport {
    double core_radius = 0.0;      // largest r with upper profile <= zero_tol on [0, r]
    IqResult iq;                   // SqrtW variant (used by the distance threshold)
    IqResult iq_sqrt2w;            // Sqrt2W variant (used by the core-radius bound)
    double theorem2_threshold = 0.0; // (4n + sqrt(2)) * Iq (SqrtW)
    double lemma_core_bound = 0.0;   // R - sqrt(2) * Iq (Sqrt2W)
    bool has_dead_core = false;
    double zero_tolerance = 0.0;
    int n = 0;
    double R = 0.0;
    double q = 0.0;
};

inline double default_zero_tolerance(double q, int M) {
    return q * 1e-3 + q / double(M);
}

// Core radius measured on the upper profile (the conservative side), plus
// the two integral thresholds.  A divergent I_q forces has_dead_core to
// false for every finite R.
inline DeadCoreReport dead_core_report(const ComparisonPair& pair, const RadialPotential& p,
                                       double zero_tolerance = 0.0) {
    const RadialProfile& up = pair.upper;
    DeadCoreReport rep;
    rep.n = up.grid.n;
    rep.R = up.grid.R;
    rep.q = p.q();
    const int M = up.value_levels > 0 ? up.value_levels
                                      : static_cast<int>(up.values.size()) - 1;
    rep.zero_tolerance = zero_tolerance > 0.0 ? zero_tolerance
                                              : default_zero_tolerance(p.q(), M);

    int k = -1;
    for (size_t i = 0; i < up.values.size() && up.values[i] <= rep.zero_tolerance; ++i)
        k = static_cast<int>(i);
    rep.core_radius = (k >= 1) ? up.grid.radii[k] : 0.0;

    try {
        rep.iq = compute_iq(p, IqVariant::SqrtW);
        rep.iq_sqrt2w = compute_iq(p, IqVariant::Sqrt2W);
    } catch (const std::domain_error&) {
        // potential vanishes somewhere on (0,q]: no dead core can form at
        // any radius, which is operationally the divergent case
        rep.iq.infinite = rep.iq_sqrt2w.infinite = true;
        rep.iq.value = rep.iq_sqrt2w.value = std::numeric_limits<double>::infinity();
        rep.iq.variant = IqVariant::SqrtW;
        rep.iq_sqrt2w.variant = IqVariant::Sqrt2W;
    }
    const double sqrt2 = std::sqrt(2.0);
    rep.theorem2_threshold = rep.iq.infinite
        ? std::numeric_limits<double>::infinity()
        : (4.0 * rep.n + sqrt2) * rep.iq.value;
    rep.lemma_core_bound = rep.iq_sqrt2w.infinite
        ? -std::numeric_limits<double>::infinity()
        : rep.R - sqrt2 * rep.iq_sqrt2w.value;

    if (rep.iq.infinite) {
        rep.has_dead_core = false;
        rep.core_radius = 0.0;
    } else {
        rep.has_dead_core = rep.core_radius > 0.0;
    }
    return rep;
}

struct CriticalParams {
    PairParams pair;
    double zero_tolerance = 0.0;
};

// Smallest ball radius at which the upper comparison function develops a
// dead core, located by bisection; core presence is monotone in R.
inline double critical_radius(const RadialPotential& p, int n, double q, double tol,
                              const CriticalParams& prm = {}) {
    if (std::abs(q - p.q()) > 1e-12 * std::max(1.0, q))
        throw precondition_error("critical_radius: q must match the potential's domain");
    IqResult iq = compute_iq(p, IqVariant::SqrtW);
    if (iq.infinite)
        throw bracket_error("critical_radius: I_q divergent, no dead core exists for any radius");
    if (!(tol > 0.0)) throw precondition_error("critical_radius: tol must be positive");

    auto has_core = [&](double R) {
        ComparisonPair pair = comparison_pair(p, n, R, prm.pair);
        return dead_core_report(pair, p, prm.zero_tolerance).has_dead_core;
    };

    const double threshold = (4.0 * n + std::sqrt(2.0)) * iq.value;
    const double cap = 10.0 * threshold;
    double hi = threshold;
    while (!has_core(hi)) {
        hi *= 1.5;
        if (hi > cap)
            throw bracket_error("critical_radius: no dead core found up to 10x the distance threshold");
    }
    double lo = hi;
    while (lo > 1e-6 * threshold) {
        lo *= 0.5;
        if (!has_core(lo)) break;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (has_core(mid)) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace deadcore
