#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deadcore/errors.hpp"
#include "deadcore/quadrature.hpp"

namespace deadcore {

enum class PotentialKind { PowerLaw, Characteristic, Quadratic, Tabulated, Zero };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::PowerLaw: return "powerlaw";
        case PotentialKind::Characteristic: return "characteristic";
        case PotentialKind::Quadratic: return "quadratic";
        case PotentialKind::Tabulated: return "tabulated";
        case PotentialKind::Zero: return "zero";
    }
    return "?";
}

// Nondecreasing, lower-semicontinuous radial potential on [0, q] with
// W(0) = 0.  Tabulated data is piecewise constant between breakpoints;
// evaluation at a jump returns the left limit (the smaller value), which
// is the lsc envelope of the right-continuous step function.
class RadialPotential {
public:
    static RadialPotential power_law(double alpha, double q = 1.0) {
        if (!(alpha > 0.0)) throw precondition_error("power_law: alpha must be positive");
        RadialPotential p(PotentialKind::PowerLaw, q);
        p.alpha_ = alpha;
        p.sup_value_ = std::pow(q, alpha);
        return p;
    }
    static RadialPotential characteristic(double q = 1.0) {
        RadialPotential p(PotentialKind::Characteristic, q);
        p.sup_value_ = 1.0;
        return p;
    }
    static RadialPotential quadratic(double q = 1.0) {
        RadialPotential p(PotentialKind::Quadratic, q);
        p.sup_value_ = q * q;
        return p;
    }
    static RadialPotential zero(double q = 1.0) {
        RadialPotential p(PotentialKind::Zero, q);
        p.sup_value_ = 0.0;
        return p;
    }
    // breakpoints: (s, value) pairs, s strictly increasing in [0, q],
    // values nonnegative and nondecreasing.
    static RadialPotential tabulated(std::vector<std::pair<double, double>> breakpoints,
                                     double q = 1.0) {
        RadialPotential p(PotentialKind::Tabulated, q);
        double prev_s = -1.0, prev_v = 0.0;
        for (auto& [s, v] : breakpoints) {
            if (s < 0.0 || s > q) throw precondition_error("tabulated: breakpoint outside [0,q]");
            if (s <= prev_s) throw precondition_error("tabulated: breakpoints must be strictly increasing");
            if (v < prev_v) throw precondition_error("tabulated: values must be nondecreasing");
            if (v < 0.0) throw precondition_error("tabulated: values must be nonnegative");
            prev_s = s;
            prev_v = v;
        }
        p.breakpoints_ = std::move(breakpoints);
        p.sup_value_ = p.eval(q);
        return p;
    }

    PotentialKind kind() const { return kind_; }
    double q() const { return q_; }
    double alpha() const { return alpha_; }
    double sup_value() const { return sup_value_; }
    const std::vector<std::pair<double, double>>& breakpoints() const { return breakpoints_; }

    // True when the potential is C^1 on [0, q] (one-sided at the ends), so
    // derivative-based solvers apply.
    bool smooth() const {
        switch (kind_) {
            case PotentialKind::Zero:
            case PotentialKind::Quadratic: return true;
            case PotentialKind::PowerLaw: return alpha_ >= 1.0;
            default: return false;
        }
    }

    double deriv(double s) const {
        s = std::clamp(s, 0.0, q_);
        switch (kind_) {
            case PotentialKind::Zero: return 0.0;
            case PotentialKind::Quadratic: return 2.0 * s;
            case PotentialKind::PowerLaw:
                if (alpha_ == 1.0) return 1.0;
                return s > 0.0 ? alpha_ * std::pow(s, alpha_ - 1.0)
                               : (alpha_ > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
            default:
                throw precondition_error("RadialPotential::deriv: potential is not differentiable");
        }
    }

    double second_deriv(double s) const {
        s = std::clamp(s, 0.0, q_);
        switch (kind_) {
            case PotentialKind::Zero: return 0.0;
            case PotentialKind::Quadratic: return 2.0;
            case PotentialKind::PowerLaw: {
                if (alpha_ == 1.0) return 0.0;
                if (s <= 0.0) return alpha_ < 2.0 ? 1e300 : 0.0;
                return alpha_ * (alpha_ - 1.0) * std::pow(s, alpha_ - 2.0);
            }
            default:
                throw precondition_error("RadialPotential::second_deriv: potential is not differentiable");
        }
    }

    // lsc evaluation; throws std::domain_error outside [0, q] (up to a
    // 1e-12 relative slack that is silently clamped).
    double eval(double s) const {
        const double slack = 1e-12 * std::max(1.0, q_);
        if (s < -slack || s > q_ + slack)
            throw std::domain_error("RadialPotential::eval: argument outside [0,q]");
        s = std::clamp(s, 0.0, q_);
        switch (kind_) {
            case PotentialKind::Zero: return 0.0;
            case PotentialKind::Characteristic: return s > 0.0 ? 1.0 : 0.0;
            case PotentialKind::Quadratic: return s * s;
            case PotentialKind::PowerLaw: return s > 0.0 ? std::pow(s, alpha_) : 0.0;
            case PotentialKind::Tabulated: {
                // Value of the piece strictly to the left of s; this is the
                // left limit at breakpoints and the piece value elsewhere.
                double v = 0.0;
                for (const auto& [bs, bv] : breakpoints_) {
                    if (bs < s) v = bv;
                    else break;
                }
                return v;
            }
        }
        return 0.0;
    }

private:
    RadialPotential(PotentialKind k, double q) : kind_(k), q_(q) {
        if (!(q > 0.0)) throw precondition_error("RadialPotential: q must be positive");
    }

    PotentialKind kind_;
    double q_;
    double alpha_ = 1.0;
    double sup_value_ = 0.0;
    std::vector<std::pair<double, double>> breakpoints_;
};

// Direction-modulated part W_0(s, xi).  "Axis" is s*(1+xi_1)/2: zero at the
// origin and nondecreasing along every ray.
enum class W0Kind { None, Axis };

inline const char* to_string(W0Kind k) {
    return k == W0Kind::None ? "none" : "axis";
}

struct PotentialSpec {
    RadialPotential wrad;
    W0Kind w0 = W0Kind::None;
    int m = 1;

    double q() const { return wrad.q(); }

    double eval_w0(double s, const double* xi) const {
        switch (w0) {
            case W0Kind::None: return 0.0;
            case W0Kind::Axis: return s * 0.5 * (1.0 + xi[0]);
        }
        return 0.0;
    }

    // W(u) = W_rad(|u|) + W_0(u); at u = 0 the angular part is 0 by
    // convention, so the direction u/|u| is never formed there.
    double eval_total(const double* u, int dim) const {
        double s2 = 0.0;
        for (int c = 0; c < dim; ++c) s2 += u[c] * u[c];
        double s = std::sqrt(s2);
        const double slack = 1e-12 * std::max(1.0, q());
        if (s > q() + slack)
            throw std::domain_error("PotentialSpec::eval_total: |u| exceeds q");
        s = std::min(s, q());
        double val = wrad.eval(s);
        if (s > 0.0 && w0 != W0Kind::None) {
            double xi[8];
            for (int c = 0; c < dim && c < 8; ++c) xi[c] = u[c] / s;
            val += eval_w0(s, xi);
        }
        return val;
    }

    double eval_total(const std::vector<double>& u) const {
        return eval_total(u.data(), static_cast<int>(u.size()));
    }
};

enum class IqVariant { SqrtW, Sqrt2W };

inline const char* to_string(IqVariant v) {
    return v == IqVariant::SqrtW ? "sqrt_w" : "sqrt_2w";
}

struct IqResult {
    double value = 0.0; // +inf when infinite
    IqVariant variant = IqVariant::SqrtW;
    double abs_error_estimate = 0.0;
    bool infinite = false;
};

// I_q = integral over (0,q] of ds / sqrt(c * W_rad(s)), c = 1 (SqrtW) or
// 2 (Sqrt2W).  Closed forms are used for every built-in kind; the dyadic
// improper-integral engine remains as the generic fallback.  A potential
// vanishing on a set of positive measure inside (0,q] makes the integrand
// infinite away from the origin and is reported as a domain error; a
// divergent-at-zero integral is reported with the infinite flag, not an
// error.
inline IqResult compute_iq(const RadialPotential& p, IqVariant variant) {
    const double c = (variant == IqVariant::Sqrt2W) ? 2.0 : 1.0;
    const double q = p.q();
    IqResult r;
    r.variant = variant;

    auto inf = [&] {
        r.infinite = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
    };

    switch (p.kind()) {
        case PotentialKind::Zero:
            throw std::domain_error("compute_iq: potential vanishes on (0,q]");
        case PotentialKind::Characteristic:
            r.value = q / std::sqrt(c);
            r.abs_error_estimate = 1e-14 * r.value;
            return r;
        case PotentialKind::Quadratic:
            return inf();
        case PotentialKind::PowerLaw: {
            const double a = p.alpha();
            if (a >= 2.0) return inf();
            r.value = std::pow(q, 1.0 - 0.5 * a) / ((1.0 - 0.5 * a) * std::sqrt(c));
            r.abs_error_estimate = 1e-14 * r.value;
            return r;
        }
        case PotentialKind::Tabulated: {
            // Exact sum over the constant pieces.
            std::vector<double> knots{0.0};
            for (auto& [s, v] : p.breakpoints())
                if (s > 0.0 && s < q) knots.push_back(s);
            knots.push_back(q);
            double total = 0.0;
            for (size_t i = 0; i + 1 < knots.size(); ++i) {
                const double len = knots[i + 1] - knots[i];
                if (len <= 0.0) continue;
                const double v = p.eval(0.5 * (knots[i] + knots[i + 1]));
                if (v <= 0.0)
                    throw std::domain_error("compute_iq: potential vanishes on a set of positive measure");
                total += len / std::sqrt(c * v);
            }
            r.value = total;
            r.abs_error_estimate = 1e-14 * total;
            return r;
        }
    }
    // Generic path (unreachable for the built-in kinds).
    auto g = [&](double s) { return 1.0 / std::sqrt(c * p.eval(s)); };
    ImproperResult ir = integrate_improper_origin(g, q);
    if (ir.infinite) return inf();
    r.value = ir.value;
    r.abs_error_estimate = ir.abs_error;
    return r;
}

} // namespace deadcore
