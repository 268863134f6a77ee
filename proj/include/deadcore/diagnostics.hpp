#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "deadcore/dp_solver.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/field_solver.hpp"
#include "deadcore/lattice.hpp"
#include "deadcore/oracles.hpp"
#include "deadcore/potential.hpp"
#include "deadcore/radial.hpp"

namespace deadcore {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

enum class ComparisonMode { Interior, Boundary };

inline const char* to_string(ComparisonMode m) {
    return m == ComparisonMode::Interior ? "interior" : "boundary";
}

struct ComparisonVerdict {
    double max_violation = -std::numeric_limits<double>::infinity();
    std::array<double, 2> ball_center{0.0, 0.0};
    double ball_radius = 0.0;
    long nodes_checked = 0;
    ComparisonMode mode = ComparisonMode::Interior;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Pass;
};

// Default pass tolerance for lattice comparison checks; a configuration
// default, recorded in every verdict, not a theorem.
inline double comparison_tolerance(double h, double q, int M) {
    return 3.0 * (h + q / double(M));
}

// Pointwise bound |u(x)| <= Psi_upper(|x - x0|) over the test ball.
// Interior mode requires the closed ball inside the domain; Boundary mode
// requires the ball to cut the boundary and the boundary data to vanish on
// the intersection.  Violations beyond tolerance from a descent-computed
// candidate are inconclusive (the candidate may be non-minimizing), not
// refutations; pass `certified` for fields known to be minimizers.
inline ComparisonVerdict verify_comparison(const GridField& f, const ComparisonPair& pair,
                                           std::array<double, 2> center, double R,
                                           ComparisonMode mode, double tolerance,
                                           bool certified = false) {
    const LatticeDomain& d = f.dom;
    if (R <= 0.0) throw geometry_error("verify_comparison: ball radius must be positive");
    if (std::abs(pair.upper.grid.R - R) > 1e-9 * std::max(1.0, R))
        throw precondition_error("verify_comparison: pair was solved for a different radius");

    const double slack = 1e-9 * std::max(1.0, R);
    if (d.domain == DomainShape::Disk) {
        const double dist_center = std::hypot(center[0], center[1]);
        if (mode == ComparisonMode::Interior) {
            if (dist_center + R > d.disk_radius + slack)
                throw geometry_error("verify_comparison: closed ball not contained in the disk");
        } else {
            if (dist_center + R < d.disk_radius - slack)
                throw geometry_error("verify_comparison: ball does not reach the boundary");
        }
    } else {
        // Interval/rectangle: compare against the outer node hull.
        const double x0 = d.x(0), x1 = d.x(d.shape[0] - 1);
        const double y0 = d.n == 2 ? d.y(0) : 0.0, y1 = d.n == 2 ? d.y(d.shape[1] - 1) : 0.0;
        const bool inside = center[0] - R >= x0 - slack && center[0] + R <= x1 + slack &&
                            (d.n == 1 || (center[1] - R >= y0 - slack && center[1] + R <= y1 + slack));
        if (mode == ComparisonMode::Interior && !inside)
            throw geometry_error("verify_comparison: closed ball not contained in the domain");
        if (mode == ComparisonMode::Boundary && inside)
            throw geometry_error("verify_comparison: ball does not reach the boundary");
    }

    if (mode == ComparisonMode::Boundary) {
        for (int j = 0; j < d.shape[1]; ++j) {
            for (int i = 0; i < d.shape[0]; ++i) {
                const int node = d.idx(i, j);
                if (d.mask[node] != NodeMask::Boundary) continue;
                const double dx = d.x(i) - center[0];
                const double dy = d.n == 2 ? d.y(j) - center[1] : 0.0;
                if (std::hypot(dx, dy) > R) continue;
                double norm = 0.0;
                for (int c = 0; c < f.m; ++c) {
                    const double b = f.bc(node)[c];
                    norm += b * b;
                }
                if (std::sqrt(norm) > 1e-12)
                    throw precondition_error(
                        "verify_comparison: boundary data does not vanish on the ball's boundary arc");
            }
        }
    }

    ComparisonVerdict out;
    out.ball_center = center;
    out.ball_radius = R;
    out.mode = mode;
    out.tolerance = tolerance;
    for (int j = 0; j < d.shape[1]; ++j) {
        for (int i = 0; i < d.shape[0]; ++i) {
            const int node = d.idx(i, j);
            if (d.mask[node] != NodeMask::Interior) continue;
            const double dx = d.x(i) - center[0];
            const double dy = d.n == 2 ? d.y(j) - center[1] : 0.0;
            const double dist = std::hypot(dx, dy);
            if (dist > R) continue;
            const double bound = pair.upper.eval(dist);
            out.max_violation = std::max(out.max_violation, f.norm_at(node) - bound);
            ++out.nodes_checked;
        }
    }
    if (out.nodes_checked == 0) out.max_violation = 0.0;
    out.verdict = out.max_violation <= tolerance
                      ? Verdict::Pass
                      : (certified ? Verdict::Fail : Verdict::Inconclusive);
    return out;
}

struct PohozaevRecord {
    double r = 0.0;
    double lhs = 0.0; // bulk: (n-2)/2 |grad u|^2 + n W(u) over B_r
    double rhs = 0.0; // shell: r * (1/2 |grad u|^2 + W - |du/dnu|^2) over dB_r
    double residual = 0.0;
};

// Relative residual with a floor at a millionth of the natural energy
// scale r^n * sup W, so that radii where both sides vanish identically
// read as zero instead of quadrature noise divided by itself.
inline double pohozaev_residual(double lhs, double rhs, double scale = 0.0) {
    return std::abs(lhs - rhs) /
           std::max({std::abs(lhs), std::abs(rhs), 1e-6 * scale, 1e-30});
}

// Bulk/shell integral balance on a discrete radial profile.  Radii are
// snapped to grid nodes; radii within 2*dr of a jump of W(h(r)) are
// excluded (the identity holds a.e., shells on discontinuities are noisy).
inline std::vector<PohozaevRecord> pohozaev_scan(const RadialProfile& prof,
                                                 const RadialPotential& p,
                                                 const std::vector<double>& radii) {
    const RadialGrid& g = prof.grid;
    const int n = g.n, N = g.cells();
    const double lam = prof.lambda;

    std::vector<double> cellW(N), slope(N);
    for (int i = 0; i < N; ++i) {
        cellW[i] = p.eval(prof.values[i]);
        slope[i] = (prof.values[i + 1] - prof.values[i]) / g.dr(i);
    }
    const double wmax = *std::max_element(cellW.begin(), cellW.end());
    const double wmin = *std::min_element(cellW.begin(), cellW.end());
    std::vector<double> jump_radii;
    for (int i = 0; i + 1 < N; ++i)
        if (std::abs(cellW[i + 1] - cellW[i]) > 0.25 * (wmax - wmin) + 1e-14)
            jump_radii.push_back(g.radii[i + 1]);

    std::vector<double> cum(N + 1, 0.0);
    for (int i = 0; i < N; ++i)
        cum[i + 1] =
            cum[i] + g.weight(i) * (0.5 * (n - 2) * slope[i] * slope[i] + n * lam * cellW[i]);

    const double scale_base = lam * std::max(p.sup_value(), 1e-12);
    std::vector<PohozaevRecord> out;
    for (double r : radii) {
        if (r <= 0.0 || r > g.R + 1e-12)
            throw std::domain_error("pohozaev_scan: radius outside (0, R]");
        int k = static_cast<int>(std::lround(r / g.R * N));
        k = std::clamp(k, 1, N - 1);
        const double rk = g.radii[k];
        const double two_dr = 2.0 * g.dr(0);
        bool excluded = false;
        for (double jr : jump_radii)
            if (std::abs(rk - jr) < two_dr) excluded = true;
        if (excluded) continue;

        const double dnu = 0.5 * (slope[k - 1] + slope[k]);
        PohozaevRecord rec;
        rec.r = rk;
        rec.lhs = cum[k];
        rec.rhs = std::pow(rk, n) * (lam * p.eval(prof.values[k]) - 0.5 * dnu * dnu);
        rec.residual = pohozaev_residual(rec.lhs, rec.rhs, std::pow(rk, n) * scale_base);
        out.push_back(rec);
    }
    return out;
}

// Same identity on a closed-form profile, evaluated with the analytic
// derivative and adaptive quadrature split at the core edge.
template <class Oracle>
std::vector<PohozaevRecord> pohozaev_scan_oracle(const Oracle& o, const RadialPotential& p,
                                                 int n, const std::vector<double>& radii,
                                                 double lambda = 1.0) {
    auto bulk_dens = [&](double t) {
        const double dv = o.deriv(t);
        return std::pow(t, n - 1) *
               (0.5 * (n - 2) * dv * dv + n * lambda * p.eval(std::min(o.eval(t), p.q())));
    };
    std::vector<PohozaevRecord> out;
    for (double r : radii) {
        const double edge = std::clamp(o.core_edge(), 0.0, r);
        double lhs = 0.0;
        if (edge > 0.0) lhs += integrate_adaptive(bulk_dens, 0.0, edge).value;
        if (r > edge) lhs += integrate_adaptive(bulk_dens, edge, r).value;
        const double dv = o.deriv(r);
        const double rhs =
            std::pow(r, n) * (lambda * p.eval(std::min(o.eval(r), p.q())) - 0.5 * dv * dv);
        const double scale = std::pow(r, n) * lambda * std::max(p.sup_value(), 1e-12);
        out.push_back({r, lhs, rhs, pohozaev_residual(lhs, rhs, scale)});
    }
    return out;
}

// Lattice version.  Bulk sums cell volumes inside the ball; the shell uses
// 32 arc samples per crossed cell with bilinearly interpolated field
// values and one-sided difference gradients (first-order accuracy).
inline std::vector<PohozaevRecord> pohozaev_scan_field(const GridField& f,
                                                       const PotentialSpec& spec,
                                                       std::array<double, 2> center,
                                                       const std::vector<double>& radii) {
    const LatticeDomain& d = f.dom;
    const int nx = d.shape[0], ny = d.shape[1];
    const double h = d.h;

    auto grad_sq_and_normal = [&](double px, double py, double nux, double nuy,
                                  double& grad_sq, double& normal_sq) {
        // One-sided differences at the cell of (px, py).
        int i = std::clamp(static_cast<int>((px - d.origin[0]) / h), 0, nx - 2);
        int j = d.n == 2 ? std::clamp(static_cast<int>((py - d.origin[1]) / h), 0, ny - 2) : 0;
        grad_sq = 0.0;
        normal_sq = 0.0;
        for (int c = 0; c < f.m; ++c) {
            const double u00 = f.at(d.idx(i, j))[c];
            const double u10 = f.at(d.idx(i + 1, j))[c];
            const double ux = (u10 - u00) / h;
            double uy = 0.0;
            if (d.n == 2) {
                const double u01 = f.at(d.idx(i, j + 1))[c];
                uy = (u01 - u00) / h;
            }
            grad_sq += ux * ux + uy * uy;
            const double un = ux * nux + uy * nuy;
            normal_sq += un * un;
        }
    };

    auto value_at = [&](double px, double py, std::vector<double>& u) {
        int i = std::clamp(static_cast<int>((px - d.origin[0]) / h), 0, nx - 2);
        int j = d.n == 2 ? std::clamp(static_cast<int>((py - d.origin[1]) / h), 0, ny - 2) : 0;
        const double tx = std::clamp((px - d.x(i)) / h, 0.0, 1.0);
        const double ty = d.n == 2 ? std::clamp((py - d.y(j)) / h, 0.0, 1.0) : 0.0;
        for (int c = 0; c < f.m; ++c) {
            const double u00 = f.at(d.idx(i, j))[c];
            const double u10 = f.at(d.idx(i + 1, j))[c];
            if (d.n == 1) {
                u[c] = (1 - tx) * u00 + tx * u10;
            } else {
                const double u01 = f.at(d.idx(i, j + 1))[c];
                const double u11 = f.at(d.idx(i + 1, j + 1))[c];
                u[c] = (1 - tx) * (1 - ty) * u00 + tx * (1 - ty) * u10 +
                       (1 - tx) * ty * u01 + tx * ty * u11;
            }
        }
    };

    std::vector<PohozaevRecord> out;
    std::vector<double> uval(f.m);
    const double hn = std::pow(h, d.n);
    for (double r : radii) {
        // Bulk.
        double lhs = 0.0;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int node = d.idx(i, j);
                if (d.mask[node] == NodeMask::Outside) continue;
                const double dx = d.x(i) - center[0];
                const double dy = d.n == 2 ? d.y(j) - center[1] : 0.0;
                if (std::hypot(dx, dy) > r) continue;
                double grad_sq, normal_sq;
                grad_sq_and_normal(d.x(i), d.n == 2 ? d.y(j) : 0.0, 1.0, 0.0, grad_sq, normal_sq);
                lhs += hn * (0.5 * (d.n - 2) * grad_sq +
                             d.n * spec.eval_total(f.at(node), f.m));
            }
        }
        // Shell.
        double shell = 0.0;
        if (d.n == 1) {
            for (double sgn : {-1.0, 1.0}) {
                const double px = center[0] + sgn * r;
                double grad_sq, normal_sq;
                grad_sq_and_normal(px, 0.0, sgn, 0.0, grad_sq, normal_sq);
                value_at(px, 0.0, uval);
                shell += 0.5 * grad_sq + spec.eval_total(uval.data(), f.m) - normal_sq;
            }
        } else {
            const int samples = std::max(64, 32 * static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
            const double dtheta = 2.0 * std::numbers::pi / samples;
            for (int k = 0; k < samples; ++k) {
                const double th = (k + 0.5) * dtheta;
                const double nux = std::cos(th), nuy = std::sin(th);
                const double px = center[0] + r * nux, py = center[1] + r * nuy;
                double grad_sq, normal_sq;
                grad_sq_and_normal(px, py, nux, nuy, grad_sq, normal_sq);
                value_at(px, py, uval);
                shell += (0.5 * grad_sq + spec.eval_total(uval.data(), f.m) - normal_sq) *
                         (r * dtheta);
            }
        }
        const double rhs = r * shell;
        const double scale =
            std::pow(r, d.n) * std::max(spec.wrad.sup_value(), 1e-12);
        out.push_back({r, lhs, rhs, pohozaev_residual(lhs, rhs, scale)});
    }
    return out;
}

// Scaled ball energies r^-(n-2) * E(B_r); for minimizers the sequence is
// nondecreasing in r up to discretization error.
inline std::vector<std::pair<double, double>> monotonicity_scan(const RadialProfile& prof,
                                                                const RadialPotential& p,
                                                                const std::vector<double>& radii) {
    const RadialGrid& g = prof.grid;
    const int n = g.n, N = g.cells();
    std::vector<double> cum(N + 1, 0.0);
    for (int i = 0; i < N; ++i) {
        const double slope = (prof.values[i + 1] - prof.values[i]) / g.dr(i);
        cum[i + 1] = cum[i] + g.weight(i) * (0.5 * slope * slope +
                                             prof.lambda * p.eval(prof.values[i]));
    }
    std::vector<std::pair<double, double>> out;
    for (double r : radii) {
        int k = std::clamp(static_cast<int>(std::lround(r / g.R * N)), 1, N);
        const double rk = g.radii[k];
        out.emplace_back(rk, std::pow(rk, -(n - 2)) * cum[k]);
    }
    return out;
}

template <class Oracle>
std::vector<std::pair<double, double>> monotonicity_scan_oracle(const Oracle& o,
                                                                const RadialPotential& p, int n,
                                                                const std::vector<double>& radii,
                                                                double lambda = 1.0) {
    std::vector<std::pair<double, double>> out;
    for (double r : radii) {
        const double e = oracles::continuum_energy(o, p, n, r, lambda);
        out.emplace_back(r, std::pow(r, -(n - 2)) * e);
    }
    return out;
}

// Lattice version: ball energy from nodal potential plus forward-edge
// gradient terms whose lower endpoint lies inside the ball.
inline std::vector<std::pair<double, double>> monotonicity_scan_field(
    const GridField& f, const PotentialSpec& spec, std::array<double, 2> center,
    const std::vector<double>& radii) {
    const LatticeDomain& d = f.dom;
    const int nx = d.shape[0], ny = d.shape[1];
    const double hn = std::pow(d.h, d.n);
    const double edge_w = hn / (d.h * d.h);
    std::vector<std::pair<double, double>> out;
    for (double r : radii) {
        double e = 0.0;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int node = d.idx(i, j);
                if (d.mask[node] == NodeMask::Outside) continue;
                const double dx = d.x(i) - center[0];
                const double dy = d.n == 2 ? d.y(j) - center[1] : 0.0;
                if (std::hypot(dx, dy) > r) continue;
                const double* u = f.at(node);
                if (d.mask[node] == NodeMask::Interior)
                    e += hn * spec.eval_total(u, f.m);
                auto edge = [&](int nb) {
                    if (d.mask[nb] == NodeMask::Outside) return;
                    const double* v = f.at(nb);
                    double s = 0.0;
                    for (int c = 0; c < f.m; ++c) s += (v[c] - u[c]) * (v[c] - u[c]);
                    e += 0.5 * edge_w * s;
                };
                if (i + 1 < nx) edge(d.idx(i + 1, j));
                if (d.n == 2 && j + 1 < ny) edge(d.idx(i, j + 1));
            }
        }
        out.emplace_back(r, std::pow(r, -(d.n - 2)) * e);
    }
    return out;
}

// Nondecreasing up to a slack of twice the estimated per-shell
// discretization error (proxied by the second difference of the sequence
// scale).
inline bool monotone_within_slack(const std::vector<std::pair<double, double>>& seq,
                                  double slack_abs) {
    for (size_t i = 0; i + 1 < seq.size(); ++i)
        if (seq[i + 1].second < seq[i].second - slack_abs) return false;
    return true;
}

struct HamiltonianRecord {
    double mean = 0.0;     // mean of 1/2 |h'|^2 - lambda W over the positive region
    double max_dev = 0.0;  // max |cell value - mean|
    int cells = 0;
    bool has_core = false; // profile starts at (numerical) zero
    double zero_tolerance = 0.0;
};

// First-integral check in n = 1: 1/2 |h'|^2 - lambda W_rad(h) should be
// constant on the region where the profile is positive, and zero when a
// dead core is present.  The potential is sampled at the cell-midpoint
// value, which pairs consistently with the midpoint slope (the lower-node
// rule would add an O(dr) skew of its own making).
inline HamiltonianRecord hamiltonian_check(const RadialProfile& prof, const RadialPotential& p,
                                           double zero_tolerance = 0.0) {
    if (prof.grid.n != 1)
        throw precondition_error("hamiltonian_check: requires an n = 1 profile");
    const RadialGrid& g = prof.grid;
    const int N = g.cells();
    const int M = prof.value_levels > 0 ? prof.value_levels : N;
    const double ztol = zero_tolerance > 0.0 ? zero_tolerance
                                             : default_zero_tolerance(p.q(), M);

    std::vector<double> vals;
    for (int i = 0; i < N; ++i) {
        if (prof.values[i] <= ztol) continue;
        const double slope = (prof.values[i + 1] - prof.values[i]) / g.dr(i);
        const double mid = 0.5 * (prof.values[i] + prof.values[i + 1]);
        vals.push_back(0.5 * slope * slope - prof.lambda * p.eval(mid));
    }
    if (vals.empty())
        throw precondition_error("hamiltonian_check: profile has no positive region");

    HamiltonianRecord rec;
    rec.zero_tolerance = ztol;
    rec.cells = static_cast<int>(vals.size());
    rec.has_core = prof.values.front() <= ztol;
    for (double v : vals) rec.mean += v;
    rec.mean /= vals.size();
    for (double v : vals) rec.max_dev = std::max(rec.max_dev, std::abs(v - rec.mean));
    return rec;
}

struct MaxPrincipleResult {
    double min_value = 0.0;
    Verdict verdict = Verdict::Pass;
    int violating_node = -1;
    double floor = 0.0;
};

// Strong-maximum-principle check for scalar fields: with a divergent
// dead-core integral and positive boundary data, the minimizer must be
// strictly positive.  The check is vacuous (an error) when I_q is finite.
inline MaxPrincipleResult maximum_principle_check(const GridField& f, const PotentialSpec& spec,
                                                  double positivity_floor = -1.0) {
    if (f.m != 1)
        throw precondition_error("maximum_principle_check: requires a scalar field");
    if (spec.w0 != W0Kind::None)
        throw precondition_error("maximum_principle_check: requires W_0 = 0");
    IqResult iq = compute_iq(spec.wrad, IqVariant::SqrtW);
    if (!iq.infinite)
        throw precondition_error("maximum_principle_check: I_q is finite, the check is vacuous");

    const LatticeDomain& d = f.dom;
    for (int node = 0; node < d.num_nodes(); ++node)
        if (d.mask[node] == NodeMask::Boundary && f.bc(node)[0] <= 0.0)
            throw precondition_error("maximum_principle_check: boundary data must be positive");

    MaxPrincipleResult out;
    out.floor = positivity_floor >= 0.0 ? positivity_floor : f.q * 1e-6;
    out.min_value = std::numeric_limits<double>::infinity();
    for (int node = 0; node < d.num_nodes(); ++node) {
        if (d.mask[node] != NodeMask::Interior) continue;
        const double v = f.at(node)[0];
        if (v < out.min_value) {
            out.min_value = v;
            out.violating_node = node;
        }
    }
    out.verdict = out.min_value > out.floor ? Verdict::Pass : Verdict::Fail;
    if (out.verdict == Verdict::Pass) out.violating_node = -1;
    return out;
}

} // namespace deadcore
