#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <string>
#include <vector>

#include "deadcore/config.hpp"
#include "deadcore/diagnostics.hpp"
#include "deadcore/dp_solver.hpp"
#include "deadcore/field_solver.hpp"
#include "deadcore/oracles.hpp"
#include "deadcore/serialize.hpp"

namespace deadcore::commands {

namespace fs = std::filesystem;

inline void resolve_defaults(RunConfig& cfg) {
    cfg.set_default("potential", "alpha", "1");
    cfg.set_default("potential", "q", "1");
    cfg.set_default("potential", "breakpoints", "");
    cfg.set_default("potential", "w0_kind", "none");
    cfg.set_default("potential", "m", "1");

    cfg.set_default("geometry", "n", "2");
    cfg.set_default("geometry", "R", "1");
    cfg.set_default("geometry", "domain", "disk");
    cfg.set_default("geometry", "extent", "1");
    cfg.set_default("geometry", "nx", "101");
    cfg.set_default("geometry", "N", "800");
    cfg.set_default("geometry", "M", "0");

    cfg.set_default("solver", "eps", "0.001");
    cfg.set_default("solver", "refine_passes", "8");
    cfg.set_default("solver", "max_iters", "20000");
    cfg.set_default("solver", "tol", "1e-10");
    cfg.set_default("solver", "init", "harmonic");
    cfg.set_default("solver", "cascade", "true");
    cfg.set_default("solver", "jitter", "0");
    cfg.set_default("solver", "seed", "42");
    cfg.set_default("solver", "threads", "1");
    cfg.set_default("solver", "zero_tol", "0");
    cfg.set_default("solver", "critical_tol", "0");
    cfg.set_default("solver", "budget", "4e9");

    cfg.set_default("boundary", "type", "constant");
    cfg.set_default("boundary", "value", "1");
    cfg.set_default("boundary", "arc_center", "3.14159265358979");
    cfg.set_default("boundary", "arc_halfwidth", "-1");
    cfg.set_default("boundary", "edges", "1,1,1,1");

    cfg.set_default("verify", "checks", "comparison");
    cfg.set_default("verify", "balls", "");
    cfg.set_default("verify", "boundary_balls", "");
    cfg.set_default("verify", "radii", "");
    cfg.set_default("verify", "positivity_floor", "0");

    cfg.set_default("output", "prefix", "run");
}

inline void validate_radial(const RunConfig& cfg) {
    if (cfg.integer("geometry", "N") < 16)
        throw config_error("geometry.N must be at least 16");
    const int M = cfg.integer("geometry", "M");
    if (M != 0 && M < 8)
        throw config_error("geometry.M must be 0 (automatic) or at least 8");
    const double eps = cfg.num("solver", "eps");
    if (!(eps > 0.0 && eps < 0.5))
        throw config_error("solver.eps must lie in (0, 0.5)");
    if (!(cfg.num("geometry", "R") > 0.0))
        throw config_error("geometry.R must be positive");
    if (!(cfg.num("potential", "q") > 0.0))
        throw config_error("potential.q must be positive");
    const int n = cfg.integer("geometry", "n");
    if (n < 1) throw config_error("geometry.n must be at least 1");
}

inline PairParams pair_params(const RunConfig& cfg) {
    PairParams pp;
    pp.N = cfg.integer("geometry", "N");
    pp.M = cfg.integer("geometry", "M");
    pp.eps = cfg.num("solver", "eps");
    pp.refine_passes = cfg.integer("solver", "refine_passes");
    pp.budget = cfg.num("solver", "budget");
    return pp;
}

// ---------------------------------------------------------------------------
// profile: comparison pair + dead-core report

inline int run_profile(RunConfig cfg, const fs::path& outdir) {
    resolve_defaults(cfg);
    validate_radial(cfg);
    auto p = cfg.potential();
    const int n = cfg.integer("geometry", "n");
    const double R = cfg.num("geometry", "R");
    const std::string prefix = cfg.str("output", "prefix");

    auto pair = comparison_pair(p, n, R, pair_params(cfg));
    auto rep = dead_core_report(pair, p, cfg.num("solver", "zero_tol"));

    fs::create_directories(outdir);
    write_text_file(outdir / (prefix + "_upper.csv"), profile_to_csv(pair.upper));
    write_text_file(outdir / (prefix + "_lower.csv"), profile_to_csv(pair.lower));
    json j = dead_core_to_json(rep, pair.upper.grid.cells(), pair.upper.value_levels,
                               pair.lambda_bracket);
    j["config"] = cfg.to_json();
    write_text_file(outdir / (prefix + "_deadcore.json"), j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// critical: bisection for the smallest dead-core radius

inline int run_critical(RunConfig cfg, const fs::path& outdir) {
    resolve_defaults(cfg);
    validate_radial(cfg);
    auto p = cfg.potential();
    const int n = cfg.integer("geometry", "n");
    const double q = p.q();
    const std::string prefix = cfg.str("output", "prefix");

    IqResult iq = compute_iq(p, IqVariant::SqrtW);
    if (iq.infinite)
        throw bracket_error("I_q divergent: no dead core exists for any radius");

    CriticalParams prm;
    prm.pair = pair_params(cfg);
    prm.zero_tolerance = cfg.num("solver", "zero_tol");
    double tol = cfg.num("solver", "critical_tol");
    if (tol <= 0.0) tol = 0.01 * iq.value;

    const double rc = critical_radius(p, n, q, tol, prm);

    json j;
    j["critical_radius"] = rc;
    j["bracket_width"] = tol;
    j["iq_value"] = iq.value;
    if (p.kind() == PotentialKind::Characteristic && n == 2)
        j["theory"] = std::sqrt(2.0 * std::numbers::e) * q;
    else
        j["theory"] = nullptr;
    j["n"] = n;
    j["q"] = q;
    j["N"] = cfg.integer("geometry", "N");
    j["M"] = cfg.integer("geometry", "M");
    j["config"] = cfg.to_json();
    fs::create_directories(outdir);
    write_text_file(outdir / (prefix + "_critical.json"), j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// verify: field solve plus the requested diagnostic checks

namespace detail {

inline LatticeDomain make_domain(const RunConfig& cfg, int nx) {
    const std::string domain = cfg.str("geometry", "domain");
    if (domain == "disk") return LatticeDomain::disk(cfg.num("geometry", "R"), nx);
    const auto ext = cfg.num_list("geometry", "extent");
    if (domain == "interval") {
        if (ext.size() == 1) return LatticeDomain::interval(0.0, ext[0], nx);
        if (ext.size() == 2) return LatticeDomain::interval(ext[0], ext[1], nx);
        throw config_error("geometry.extent for an interval needs one or two numbers");
    }
    if (domain == "rectangle") {
        const double lx = ext.at(0);
        const double ly = ext.size() > 1 ? ext[1] : lx;
        const int ny = 1 + static_cast<int>(std::lround((nx - 1) * ly / lx));
        return LatticeDomain::rectangle(lx, ly, nx, ny);
    }
    throw config_error("geometry.domain must be disk, rectangle or interval");
}

inline void apply_boundary(const RunConfig& cfg, GridField& f) {
    const std::string type = cfg.str("boundary", "type");
    if (type == "constant") {
        auto v = cfg.num_list("boundary", "value");
        if (static_cast<int>(v.size()) != f.m)
            throw config_error("boundary.value needs one entry per field component");
        set_boundary_constant(f, v);
    } else if (type == "hedgehog") {
        set_boundary_hedgehog(f, cfg.num("boundary", "arc_center"),
                              cfg.num("boundary", "arc_halfwidth"));
    } else if (type == "edges") {
        auto e = cfg.num_list("boundary", "edges");
        if (e.size() != 4) throw config_error("boundary.edges needs left,right,bottom,top");
        set_boundary_edges(f, e[0], e[1], e[2], e[3]);
    } else {
        throw config_error("boundary.type must be constant, hedgehog or edges");
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        const auto a = cell.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = cell.find_last_not_of(" \t");
        out.push_back(cell.substr(a, b - a + 1));
    }
    return out;
}

} // namespace detail

inline int run_verify(RunConfig cfg, const fs::path& outdir) {
    resolve_defaults(cfg);
    validate_radial(cfg);
    if (cfg.integer("geometry", "nx") < 3) throw config_error("geometry.nx must be at least 3");
    auto spec = cfg.potential_spec();
    const double q = spec.q();
    const std::string prefix = cfg.str("output", "prefix");
    const int nx = cfg.integer("geometry", "nx");
    const auto checks = detail::split_list(cfg.str("verify", "checks"));
    const auto balls = cfg.ball_list("verify", "balls");
    const auto bballs = cfg.ball_list("verify", "boundary_balls");
    const auto radii = cfg.num_list("verify", "radii");
    const int threads = std::max(1, cfg.integer("solver", "threads"));

    FieldSolveParams fprm;
    fprm.max_iters = cfg.integer("solver", "max_iters");
    fprm.tol = cfg.num("solver", "tol");
    fprm.jitter = cfg.num("solver", "jitter");
    fprm.seed = static_cast<unsigned>(cfg.integer("solver", "seed"));
    const std::string init = cfg.str("solver", "init");
    if (init == "harmonic") fprm.init = FieldInit::Harmonic;
    else if (init == "zero") fprm.init = FieldInit::Zero;
    else throw config_error("solver.init must be harmonic or zero");

    auto domain_of = [&](int k) { return detail::make_domain(cfg, k); };
    auto bc_of = [&](GridField& f) { detail::apply_boundary(cfg, f); };

    GridField field;
    SolveStats stats;
    if (cfg.str("solver", "cascade") == "true") {
        auto [f, st] = minimize_field_cascade(domain_of, bc_of, nx, spec.m, q, spec, fprm);
        field = std::move(f);
        stats = std::move(st);
    } else {
        GridField f0 = GridField::zeros(domain_of(nx), spec.m, q);
        bc_of(f0);
        auto [f, st] = minimize_field(std::move(f0), spec, fprm);
        field = std::move(f);
        stats = std::move(st);
    }

    json report;
    report["command"] = "verify";
    report["solver"] = {{"iterations", stats.iterations},
                        {"final_energy", stats.final_energy},
                        {"last_energy_decrease", stats.last_energy_decrease},
                        {"max_constraint_violation_before_projection",
                         stats.max_constraint_violation_before_projection},
                        {"converged", stats.converged}};
    json entries = json::array();

    auto want = [&](const std::string& name) {
        for (auto& c : checks)
            if (c == name) return true;
        return false;
    };

    if (want("comparison")) {
        struct BallJob {
            std::array<double, 3> ball;
            ComparisonMode mode;
        };
        std::vector<BallJob> jobs;
        for (auto& b : balls) jobs.push_back({b, ComparisonMode::Interior});
        for (auto& b : bballs) jobs.push_back({b, ComparisonMode::Boundary});

        // Pairs for distinct ball radii are independent solves; run them
        // across the requested worker count, results kept in job order.
        std::vector<ComparisonVerdict> verdicts(jobs.size());
        std::vector<int> pairM(jobs.size());
        std::atomic<size_t> next{0};
        const int dim = field.dom.n;
        auto worker = [&] {
            for (size_t k; (k = next.fetch_add(1)) < jobs.size();) {
                auto pair = comparison_pair(spec.wrad, dim, jobs[k].ball[2], pair_params(cfg));
                const double tol = comparison_tolerance(field.dom.h, q, pair.upper.value_levels);
                pairM[k] = pair.upper.value_levels;
                verdicts[k] = verify_comparison(field, pair, {jobs[k].ball[0], jobs[k].ball[1]},
                                                jobs[k].ball[2], jobs[k].mode, tol);
            }
        };
        std::vector<std::future<void>> pool;
        for (int t = 1; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
        worker();
        for (auto& fut : pool) fut.get();

        for (size_t k = 0; k < jobs.size(); ++k) {
            const auto& v = verdicts[k];
            entries.push_back({{"check", "comparison"},
                               {"mode", to_string(v.mode)},
                               {"ball_center", {v.ball_center[0], v.ball_center[1]}},
                               {"ball_radius", v.ball_radius},
                               {"pair_levels", pairM[k]},
                               {"nodes_checked", v.nodes_checked},
                               {"max_violation", v.max_violation},
                               {"tolerance", v.tolerance},
                               {"verdict", to_string(v.verdict)}});
        }
    }

    if (want("pohozaev")) {
        if (radii.empty()) throw config_error("verify.radii required for the pohozaev check");
        auto recs = pohozaev_scan_field(field, spec, {0.0, 0.0}, radii);
        for (auto& rec : recs) {
            const bool ok = rec.residual <= 0.1;
            entries.push_back({{"check", "pohozaev"},
                               {"r", rec.r},
                               {"lhs", rec.lhs},
                               {"rhs", rec.rhs},
                               {"residual", rec.residual},
                               {"tolerance", 0.1},
                               {"verdict", ok ? "pass" : "inconclusive"}});
        }
    }

    if (want("monotonicity")) {
        if (radii.empty()) throw config_error("verify.radii required for the monotonicity check");
        auto seq = monotonicity_scan_field(field, spec, {0.0, 0.0}, radii);
        double worst_drop = 0.0;
        json values = json::array();
        for (size_t k = 0; k < seq.size(); ++k) {
            values.push_back({seq[k].first, seq[k].second});
            if (k > 0) worst_drop = std::max(worst_drop, seq[k - 1].second - seq[k].second);
        }
        const double slack = 2.0 * field.dom.h * std::max(1.0, std::abs(seq.back().second));
        entries.push_back({{"check", "monotonicity"},
                           {"values", values},
                           {"worst_drop", worst_drop},
                           {"tolerance", slack},
                           {"verdict", worst_drop <= slack ? "pass" : "inconclusive"}});
    }

    if (want("maxprinciple")) {
        auto res = maximum_principle_check(field, spec, cfg.num("verify", "positivity_floor") > 0
                                                            ? cfg.num("verify", "positivity_floor")
                                                            : -1.0);
        entries.push_back({{"check", "maxprinciple"},
                           {"min_value", res.min_value},
                           {"floor", res.floor},
                           {"verdict", to_string(res.verdict)}});
    }

    report["checks"] = entries;
    report["config"] = cfg.to_json();

    fs::create_directories(outdir);
    write_text_file(outdir / (prefix + "_field.csv"), field_to_csv(field));
    write_text_file(outdir / (prefix + "_field_meta.json"), field_metadata(field).dump(2) + "\n");
    write_text_file(outdir / (prefix + "_report.json"), report.dump(2) + "\n");
    return stats.converged ? 0 : 3;
}

// ---------------------------------------------------------------------------
// plotdata: downsampled overlay/heat-map CSVs plus a gnuplot script

inline int run_plotdata(RunConfig cfg, const fs::path& outdir) {
    resolve_defaults(cfg);
    const std::string prefix = cfg.str("output", "prefix");
    const bool have_profile = cfg.has("plotdata", "profile");
    const bool have_field = cfg.has("plotdata", "field");
    if (!have_profile && !have_field)
        throw config_error("plotdata needs plotdata.profile or plotdata.field");

    // Validate the inputs before producing any output file.
    if (have_profile) {
        const fs::path src(cfg.str("plotdata", "profile"));
        if (!fs::exists(src)) throw config_error("plotdata.profile: no such file: " + src.string());
    }
    if (have_field) {
        const fs::path src(cfg.str("plotdata", "field"));
        if (!fs::exists(src)) throw config_error("plotdata.field: no such file: " + src.string());
    }
    if (cfg.has("plotdata", "reference")) {
        const fs::path src(cfg.str("plotdata", "reference"));
        if (!fs::exists(src))
            throw config_error("plotdata.reference: no such file: " + src.string());
    }

    fs::create_directories(outdir);

    // Optional closed-form reference, sampled from [potential]/[geometry]
    // and dumped as a CSV; it doubles as the overlay reference when no
    // explicit one is configured.
    if (cfg.has("plotdata", "oracle")) {
        const std::string which = cfg.str("plotdata", "oracle");
        const double R = cfg.num("geometry", "R");
        const double q = cfg.num("potential", "q");
        const int samples = std::max(64, cfg.integer("geometry", "N"));
        std::string csv;
        if (which == "disk_fixed_slope") {
            csv = oracle_to_csv(oracles::FixedSlopeDiskProfileN2(q, R, oracles::Branch::Lower), R,
                                samples);
        } else if (which == "disk_free_boundary") {
            csv = oracle_to_csv(oracles::CharDiskMinimizerN2(q, R), R, samples);
        } else if (which == "first_integral") {
            csv = oracle_to_csv(oracles::FirstIntegralProfileN1(cfg.potential(), R), R, samples);
        } else if (which == "cosh") {
            csv = oracle_to_csv(oracles::CoshProfileN1(q, R), R, samples);
        } else {
            throw config_error("plotdata.oracle must be disk_fixed_slope, disk_free_boundary, "
                               "first_integral or cosh");
        }
        const fs::path opath = outdir / (prefix + "_oracle.csv");
        write_text_file(opath, csv);
        if (!cfg.has("plotdata", "reference")) cfg.set("plotdata", "reference", opath.string());
    }

    std::string script = "set datafile separator ','\nset key autotitle columnhead\n";

    if (have_profile) {
        const fs::path src = cfg.str("plotdata", "profile");
        if (!fs::exists(src)) throw config_error("plotdata.profile: no such file: " + src.string());
        CsvTable prof = read_csv(read_text_file(src));
        if (prof.rows.empty()) throw config_error("plotdata.profile: empty input file");

        CsvTable ref;
        bool have_ref = cfg.has("plotdata", "reference");
        if (have_ref) {
            const fs::path rsrc = cfg.str("plotdata", "reference");
            if (!fs::exists(rsrc))
                throw config_error("plotdata.reference: no such file: " + rsrc.string());
            ref = read_csv(read_text_file(rsrc));
            if (ref.rows.empty()) throw config_error("plotdata.reference: empty input file");
        }
        auto ref_at = [&](double r) {
            size_t k = 1;
            while (k < ref.rows.size() && ref.rows[k][0] < r) ++k;
            if (k == ref.rows.size()) return ref.rows.back()[1];
            if (k == 0) return ref.rows.front()[1];
            const auto &a = ref.rows[k - 1], &b = ref.rows[k];
            const double t = b[0] > a[0] ? (r - a[0]) / (b[0] - a[0]) : 0.0;
            return a[1] + t * (b[1] - a[1]);
        };

        const size_t stride = std::max<size_t>(1, prof.rows.size() / 512);
        std::string csv = have_ref ? "r,computed,reference\n" : "r,computed\n";
        for (size_t k = 0; k < prof.rows.size(); k += stride) {
            csv += fmt17(prof.rows[k][0]) + "," + fmt17(prof.rows[k][1]);
            if (have_ref) csv += "," + fmt17(ref_at(prof.rows[k][0]));
            csv += "\n";
        }
        write_text_file(outdir / (prefix + "_overlay.csv"), csv);
        script += "set xlabel 'r'\nset ylabel 'h'\n";
        script += "plot '" + prefix + "_overlay.csv' using 1:2 with lines";
        if (have_ref) script += ", '' using 1:3 with lines";
        script += "\n";
    }

    if (have_field) {
        const fs::path src = cfg.str("plotdata", "field");
        if (!fs::exists(src)) throw config_error("plotdata.field: no such file: " + src.string());
        CsvTable tab = read_csv(read_text_file(src));
        if (tab.rows.empty()) throw config_error("plotdata.field: empty input file");
        const bool two_d = !tab.header.empty() && tab.header.size() > 1 && tab.header[1] == "j";
        const size_t comp0 = two_d ? 2 : 1;
        std::string csv = two_d ? "i,j,modulus\n" : "i,modulus\n";
        const size_t stride = std::max<size_t>(1, tab.rows.size() / (512 * 512));
        for (size_t k = 0; k < tab.rows.size(); k += stride) {
            const auto& row = tab.rows[k];
            double s = 0.0;
            for (size_t c = comp0; c < row.size(); ++c) s += row[c] * row[c];
            csv += fmt17(row[0]);
            if (two_d) csv += "," + fmt17(row[1]);
            csv += "," + fmt17(std::sqrt(s)) + "\n";
        }
        write_text_file(outdir / (prefix + "_heatmap.csv"), csv);
        script += two_d ? "plot '" + prefix + "_heatmap.csv' using 1:2:3 with image\n"
                        : "plot '" + prefix + "_heatmap.csv' using 1:2 with lines\n";
    }

    write_text_file(outdir / (prefix + "_plot.gp"), script);
    return 0;
}

// Maps thrown errors onto the documented exit codes: 2 for configuration
// and validation problems, 3 for numerical failures.
template <class Fn>
int dispatch(Fn&& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const geometry_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nonconvergence_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const bracket_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected failure: %s\n", e.what());
        return 3;
    }
}

} // namespace deadcore::commands
