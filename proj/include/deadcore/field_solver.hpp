#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "deadcore/errors.hpp"
#include "deadcore/lattice.hpp"
#include "deadcore/potential.hpp"

namespace deadcore {

// Full lattice energy: forward-difference Dirichlet term over edges whose
// endpoints are both in the domain, plus the nodal potential over Interior
// nodes, each weighted by the cell volume h^n.
inline double grid_energy(const GridField& f, const PotentialSpec& spec) {
    const LatticeDomain& d = f.dom;
    const double hn = std::pow(d.h, d.n);
    const double edge_w = hn / (d.h * d.h);
    double e = 0.0;
    const int nx = d.shape[0], ny = d.shape[1];
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int node = d.idx(i, j);
            if (d.mask[node] == NodeMask::Outside) continue;
            const double* u = f.at(node);
            if (d.mask[node] == NodeMask::Interior)
                e += hn * spec.eval_total(u, f.m);
            if (i + 1 < nx && d.mask[d.idx(i + 1, j)] != NodeMask::Outside) {
                const double* v = f.at(d.idx(i + 1, j));
                double s = 0.0;
                for (int c = 0; c < f.m; ++c) s += (v[c] - u[c]) * (v[c] - u[c]);
                e += 0.5 * edge_w * s;
            }
            if (d.n == 2 && j + 1 < ny && d.mask[d.idx(i, j + 1)] != NodeMask::Outside) {
                const double* v = f.at(d.idx(i, j + 1));
                double s = 0.0;
                for (int c = 0; c < f.m; ++c) s += (v[c] - u[c]) * (v[c] - u[c]);
                e += 0.5 * edge_w * s;
            }
        }
    }
    return e;
}

// Pointwise proximal map of the potential along the ray through the input:
//   argmin over s in [0, q] of (s - z)^2 / (2 tau) + W_rad(s) + W_0(s, xi).
// Monotonicity along rays keeps the search on [0, min(z, q)]; closed forms
// for the smooth kinds, candidate-plus-golden-section search over the lsc
// envelope otherwise.  Ties pick the smaller argmin.
inline double prox_radial_1d(const PotentialSpec& spec, double z, double tau,
                             const double* xi = nullptr) {
    const RadialPotential& p = spec.wrad;
    const double q = p.q();
    z = std::max(z, 0.0);
    const double top = std::min(z, q);

    auto phi = [&](double s) {
        double v = (s - z) * (s - z) / (2.0 * tau) + p.eval(s);
        if (xi && spec.w0 != W0Kind::None) v += spec.eval_w0(s, xi);
        return v;
    };

    const bool plain = (spec.w0 == W0Kind::None) || !xi;
    if (plain) {
        switch (p.kind()) {
            case PotentialKind::Zero:
                return top;
            case PotentialKind::Characteristic: {
                const double at_top = phi(top), at_zero = z * z / (2.0 * tau);
                return at_zero <= at_top ? 0.0 : top;
            }
            case PotentialKind::Quadratic:
                return std::min(z / (1.0 + 2.0 * tau), q);
            case PotentialKind::PowerLaw: {
                const double a = p.alpha();
                if (a == 1.0) return std::clamp(z - tau, 0.0, q);
                if (a == 2.0) return std::min(z / (1.0 + 2.0 * tau), q);
                if (a > 1.0) {
                    // phi'(s) = (s - z)/tau + a s^(a-1) is increasing;
                    // Newton from the upper end with a bisection safeguard.
                    if (top <= 0.0) return 0.0;
                    auto dphi = [&](double s) { return (s - z) / tau + a * std::pow(s, a - 1.0); };
                    if (dphi(top) <= 0.0) return top;
                    double lo = 0.0, hi = top, s = top;
                    for (int it = 0; it < 60; ++it) {
                        const double f = dphi(s);
                        (f < 0.0 ? lo : hi) = s;
                        const double fp = 1.0 / tau + a * (a - 1.0) * std::pow(s, a - 2.0);
                        double next = s - f / fp;
                        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                        if (std::abs(next - s) <= 1e-14 * std::max(1.0, q)) return next;
                        s = next;
                    }
                    return s;
                }
                break; // 0 < a < 1: s = 0 is always a local min, fall through
            }
            case PotentialKind::Tabulated:
                break;
        }
    }

    // Generic path: candidates at the ends, at z, and at breakpoints, plus
    // golden-section (the candidates catch the lsc steps golden-section
    // can straddle).
    double best_s = 0.0, best_v = phi(0.0);
    auto consider = [&](double s) {
        if (s < 0.0 || s > top) return;
        const double v = phi(s);
        if (v < best_v || (v == best_v && s < best_s)) {
            best_v = v;
            best_s = s;
        }
    };
    consider(top);
    if (p.kind() == PotentialKind::Tabulated)
        for (auto& [bs, bv] : p.breakpoints()) consider(bs);
    const double gold = 0.5 * (3.0 - std::sqrt(5.0));
    double x0 = 0.0, x3 = top;
    double x1 = x0 + gold * (x3 - x0), x2 = x3 - gold * (x3 - x0);
    double f1 = phi(x1), f2 = phi(x2);
    for (int it = 0; it < 90 && x3 - x0 > 1e-14 * std::max(1.0, q); ++it) {
        if (f1 < f2) {
            x3 = x2; x2 = x1; f2 = f1;
            x1 = x0 + gold * (x3 - x0);
            f1 = phi(x1);
        } else {
            x0 = x1; x1 = x2; f1 = f2;
            x2 = x3 - gold * (x3 - x0);
            f2 = phi(x2);
        }
    }
    consider(x1);
    consider(x2);
    return best_s;
}

struct SolveStats {
    int iterations = 0;
    double final_energy = 0.0;
    double last_energy_decrease = 0.0;
    double max_constraint_violation_before_projection = 0.0;
    bool converged = false;
    std::vector<double> energy_trace; // energy after init and each accepted iteration
};

enum class FieldInit { Harmonic, Zero, AsGiven };

struct FieldSolveParams {
    int max_iters = 20000;
    double tol = 1e-10;          // stop when the accepted energy decrease falls below
    double step = 0.0;           // 0 -> h^2 / (4n)
    FieldInit init = FieldInit::Harmonic;
    int harmonic_sweeps = 400;   // Jacobi sweeps for the harmonic initialization
    double jitter = 0.0;         // uniform perturbation amplitude on the init
    unsigned seed = 42;
    bool record_trace = false;
};

namespace detail {

inline void harmonic_init(GridField& f, int sweeps) {
    const LatticeDomain& d = f.dom;
    std::vector<double> next(f.values.size());
    const int nx = d.shape[0], ny = d.shape[1];
    for (int s = 0; s < sweeps; ++s) {
        next = f.values;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int node = d.idx(i, j);
                if (d.mask[node] != NodeMask::Interior) continue;
                for (int c = 0; c < f.m; ++c) {
                    double acc = 0.0;
                    int cnt = 0;
                    auto add = [&](int nb) {
                        if (d.mask[nb] != NodeMask::Outside) {
                            acc += f.at(nb)[c];
                            ++cnt;
                        }
                    };
                    if (i > 0) add(d.idx(i - 1, j));
                    if (i + 1 < nx) add(d.idx(i + 1, j));
                    if (d.n == 2 && j > 0) add(d.idx(i, j - 1));
                    if (d.n == 2 && j + 1 < ny) add(d.idx(i, j + 1));
                    if (cnt > 0) next[static_cast<size_t>(node) * f.m + c] = acc / cnt;
                }
            }
        }
        f.values.swap(next);
    }
}

inline void project_ball(GridField& f, double* max_violation) {
    for (int node = 0; node < f.dom.num_nodes(); ++node) {
        if (f.dom.mask[node] != NodeMask::Interior) continue;
        const double norm = f.norm_at(node);
        if (norm > f.q) {
            if (max_violation) *max_violation = std::max(*max_violation, norm - f.q);
            const double scale = f.q / norm;
            for (int c = 0; c < f.m; ++c) f.at(node)[c] *= scale;
        }
    }
}

} // namespace detail

// Constrained minimization of the lattice energy by forward-backward
// splitting: an explicit gradient step on the Dirichlet term, a pointwise
// proximal step on the potential (well defined for every lsc bounded
// potential, no gradient of W needed), and a radial projection onto
// |u| <= q.  Iterations are accepted only when the energy does not
// increase; on an increase the step is halved and the iteration retried,
// so the recorded energy sequence is nonincreasing by construction.
inline std::pair<GridField, SolveStats> minimize_field(GridField f0, const PotentialSpec& spec,
                                                       const FieldSolveParams& prm = {}) {
    GridField f = std::move(f0);
    const LatticeDomain& d = f.dom;
    const int nx = d.shape[0], ny = d.shape[1];
    f.apply_boundary();

    switch (prm.init) {
        case FieldInit::Harmonic: {
            detail::harmonic_init(f, prm.harmonic_sweeps);
            break;
        }
        case FieldInit::Zero: {
            for (int node = 0; node < d.num_nodes(); ++node)
                if (d.mask[node] == NodeMask::Interior)
                    for (int c = 0; c < f.m; ++c) f.at(node)[c] = 0.0;
            break;
        }
        case FieldInit::AsGiven:
            break;
    }
    if (prm.jitter > 0.0) {
        std::mt19937 rng(prm.seed);
        std::uniform_real_distribution<double> u(-prm.jitter, prm.jitter);
        for (int node = 0; node < d.num_nodes(); ++node)
            if (d.mask[node] == NodeMask::Interior)
                for (int c = 0; c < f.m; ++c) f.at(node)[c] += u(rng);
    }
    SolveStats stats;
    detail::project_ball(f, &stats.max_constraint_violation_before_projection);

    double tau = prm.step > 0.0 ? prm.step : d.h * d.h / (4.0 * d.n);
    const double tau_floor = tau * std::pow(2.0, -40);
    double energy = grid_energy(f, spec);
    if (prm.record_trace) stats.energy_trace.push_back(energy);

    GridField trial = f;
    std::vector<double> xi(f.m);

    for (int iter = 0; iter < prm.max_iters; ++iter) {
        trial.values = f.values;
        // (a) explicit gradient step on the Dirichlet term
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int node = d.idx(i, j);
                if (d.mask[node] != NodeMask::Interior) continue;
                const double* u = f.at(node);
                double* t = trial.at(node);
                for (int c = 0; c < f.m; ++c) {
                    double lap = 0.0;
                    auto add = [&](int nb) { lap += f.at(nb)[c] - u[c]; };
                    if (i > 0 && d.mask[d.idx(i - 1, j)] != NodeMask::Outside) add(d.idx(i - 1, j));
                    if (i + 1 < nx && d.mask[d.idx(i + 1, j)] != NodeMask::Outside) add(d.idx(i + 1, j));
                    if (d.n == 2) {
                        if (j > 0 && d.mask[d.idx(i, j - 1)] != NodeMask::Outside) add(d.idx(i, j - 1));
                        if (j + 1 < ny && d.mask[d.idx(i, j + 1)] != NodeMask::Outside) add(d.idx(i, j + 1));
                    }
                    t[c] = u[c] + tau * lap / (d.h * d.h);
                }
            }
        }
        // (b) pointwise proximal step on the potential, on the ray through
        // the gradient-step value; (c) the ray search never leaves the
        // ball, the projection is kept as a safety net.
        double viol = 0.0;
        for (int node = 0; node < d.num_nodes(); ++node) {
            if (d.mask[node] != NodeMask::Interior) continue;
            double* t = trial.at(node);
            double z = 0.0;
            for (int c = 0; c < f.m; ++c) z += t[c] * t[c];
            z = std::sqrt(z);
            viol = std::max(viol, z - f.q);
            if (z == 0.0) continue;
            for (int c = 0; c < f.m; ++c) xi[c] = t[c] / z;
            const double s = prox_radial_1d(spec, z, tau, xi.data());
            for (int c = 0; c < f.m; ++c) t[c] = s * xi[c];
        }
        detail::project_ball(trial, nullptr);

        const double trial_energy = grid_energy(trial, spec);
        if (trial_energy <= energy) {
            stats.max_constraint_violation_before_projection =
                std::max(stats.max_constraint_violation_before_projection, viol);
            stats.last_energy_decrease = energy - trial_energy;
            f.values.swap(trial.values);
            energy = trial_energy;
            ++stats.iterations;
            if (prm.record_trace) stats.energy_trace.push_back(energy);
            if (stats.last_energy_decrease < prm.tol) {
                stats.converged = true;
                break;
            }
        } else {
            tau *= 0.5;
            if (tau < tau_floor) break;
        }
    }
    stats.final_energy = energy;
    return {std::move(f), std::move(stats)};
}

// Bilinear sample of a field at a physical position (component c),
// clamped to the grid hull.
inline double sample_field(const GridField& f, double px, double py, int c) {
    const LatticeDomain& d = f.dom;
    const int nx = d.shape[0], ny = d.shape[1];
    double gx = (px - d.origin[0]) / d.h;
    double gy = d.n == 2 ? (py - d.origin[1]) / d.h : 0.0;
    int i = std::clamp(static_cast<int>(std::floor(gx)), 0, nx - 2);
    int j = d.n == 2 ? std::clamp(static_cast<int>(std::floor(gy)), 0, std::max(0, ny - 2)) : 0;
    double tx = std::clamp(gx - i, 0.0, 1.0);
    double ty = d.n == 2 ? std::clamp(gy - j, 0.0, 1.0) : 0.0;
    const double u00 = f.at(d.idx(i, j))[c];
    const double u10 = f.at(d.idx(i + 1, j))[c];
    if (d.n == 1) return (1 - tx) * u00 + tx * u10;
    const double u01 = f.at(d.idx(i, j + 1))[c];
    const double u11 = f.at(d.idx(i + 1, j + 1))[c];
    return (1 - tx) * (1 - ty) * u00 + tx * (1 - ty) * u10 + (1 - tx) * ty * u01 +
           tx * ty * u11;
}

// Coarse-to-fine driver around minimize_field: solves on a ladder of
// grids (nx -> 2nx-1 -> ...), prolonging each solution as the next warm
// start.  Explicit gradient steps scale like h^2, so most of the descent
// happens on the cheap coarse grids.  Domain and boundary data are
// rebuilt per level by the supplied callbacks.
template <class DomainFn, class BoundaryFn>
std::pair<GridField, SolveStats> minimize_field_cascade(
    const DomainFn& make_domain, const BoundaryFn& set_bc, int nx_final, int m, double q,
    const PotentialSpec& spec, FieldSolveParams prm, int nx_coarse = 51) {
    std::vector<int> ladder{nx_final};
    while (ladder.back() > 2 * nx_coarse) ladder.push_back((ladder.back() + 1) / 2);
    std::reverse(ladder.begin(), ladder.end());

    GridField prev;
    bool have_prev = false;
    SolveStats stats;
    for (int nx : ladder) {
        LatticeDomain dom = make_domain(nx);
        GridField f = GridField::zeros(std::move(dom), m, q);
        set_bc(f);
        FieldSolveParams stage = prm;
        if (have_prev) {
            for (int j = 0; j < f.dom.shape[1]; ++j)
                for (int i = 0; i < f.dom.shape[0]; ++i) {
                    const int node = f.dom.idx(i, j);
                    if (f.dom.mask[node] != NodeMask::Interior) continue;
                    for (int c = 0; c < m; ++c)
                        f.at(node)[c] = sample_field(prev, f.dom.x(i),
                                                     f.dom.n == 2 ? f.dom.y(j) : 0.0, c);
                }
            stage.init = FieldInit::AsGiven;
        }
        auto [sol, st] = minimize_field(std::move(f), spec, stage);
        prev = std::move(sol);
        stats = std::move(st);
        have_prev = true;
    }
    return {std::move(prev), std::move(stats)};
}

} // namespace deadcore
