#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "deadcore/commands.hpp"

using namespace deadcore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("deadcore_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& command, const std::string& ini, const fs::path& outdir) {
    return commands::dispatch([&]() -> int {
        RunConfig cfg = RunConfig::parse(ini);
        if (command == "profile") return commands::run_profile(std::move(cfg), outdir);
        if (command == "critical") return commands::run_critical(std::move(cfg), outdir);
        if (command == "verify") return commands::run_verify(std::move(cfg), outdir);
        if (command == "plotdata") return commands::run_plotdata(std::move(cfg), outdir);
        return 2;
    });
}

} // namespace

TEST_CASE("config parsing", "[cli][config]") {
    SECTION("sections, comments, trimming") {
        auto cfg = RunConfig::parse("[potential]\nkind = powerlaw  # comment\n  alpha=1.5\n");
        CHECK(cfg.str("potential", "kind") == "powerlaw");
        CHECK(cfg.num("potential", "alpha") == 1.5);
    }
    SECTION("malformed input") {
        CHECK_THROWS_AS(RunConfig::parse("kind = x\n"), config_error);
        CHECK_THROWS_AS(RunConfig::parse("[potential\nkind = x\n"), config_error);
        CHECK_THROWS_AS(RunConfig::parse("[potential]\njust a line\n"), config_error);
    }
    SECTION("json round trip preserves everything") {
        auto cfg = RunConfig::parse("[a]\nx = 1\ny = two\n[b]\nz = 3.5\n");
        auto back = RunConfig::from_json(cfg.to_json());
        CHECK(back.to_json() == cfg.to_json());
    }
    SECTION("tabulated potential from config") {
        auto cfg = RunConfig::parse(
            "[potential]\nkind = tabulated\nq = 1\nbreakpoints = 0:0.5, 0.4:2\n");
        auto p = cfg.potential();
        CHECK(p.eval(0.2) == 0.5);
        CHECK(p.eval(0.7) == 2.0);
    }
}

TEST_CASE("profile command", "[cli][profile]") {
    TempDir tmp;
    SECTION("dead core above the critical radius") {
        const int rc = run("profile",
                           "[potential]\nkind = characteristic\nq = 1\n"
                           "[geometry]\nn = 2\nR = 4.7\nN = 400\n"
                           "[output]\nprefix = t\n",
                           tmp.path);
        REQUIRE(rc == 0);
        REQUIRE(fs::exists(tmp.path / "t_upper.csv"));
        REQUIRE(fs::exists(tmp.path / "t_lower.csv"));
        auto j = json::parse(read_text_file(tmp.path / "t_deadcore.json"));
        CHECK(j["has_dead_core"] == true);
        CHECK(j["core_radius"].get<double>() > 3.0);
        CHECK(j["config"]["potential"]["kind"] == "characteristic");
    }
    SECTION("zero potential: both profiles constant q") {
        const int rc = run("profile",
                           "[potential]\nkind = zero\nq = 1\n"
                           "[geometry]\nn = 1\nR = 1\nN = 64\nM = 16\n"
                           "[output]\nprefix = z\n",
                           tmp.path);
        REQUIRE(rc == 0);
        auto table = read_csv(read_text_file(tmp.path / "z_upper.csv"));
        REQUIRE(table.header == std::vector<std::string>{"r", "h"});
        for (auto& row : table.rows) CHECK(row[1] == 1.0);
    }
    SECTION("level count below the minimum exits 2") {
        CHECK(run("profile",
                  "[potential]\nkind = zero\n[geometry]\nM = 4\n", tmp.path) == 2);
    }
    SECTION("malformed config exits 2 and writes nothing") {
        TempDir fresh;
        CHECK(run("profile", "[potential]\nkind = nosuch\n", fresh.path) == 2);
        CHECK(fs::is_empty(fresh.path));
    }
}

TEST_CASE("critical command", "[cli][critical]") {
    TempDir tmp;
    SECTION("characteristic potential in two dimensions") {
        const int rc = run("critical",
                           "[potential]\nkind = characteristic\nq = 1\n"
                           "[geometry]\nn = 2\nN = 320\n"
                           "[solver]\ncritical_tol = 0.02\n"
                           "[output]\nprefix = c\n",
                           tmp.path);
        REQUIRE(rc == 0);
        auto j = json::parse(read_text_file(tmp.path / "c_critical.json"));
        const double est = j["critical_radius"].get<double>();
        const double theory = j["theory"].get<double>();
        CHECK(theory == Approx(std::sqrt(2.0 * std::numbers::e)));
        CHECK(est == Approx(theory).epsilon(0.02));
    }
    SECTION("divergent integral exits 3") {
        CHECK(run("critical", "[potential]\nkind = quadratic\n", tmp.path) == 3);
    }
    SECTION("linear power law in one dimension") {
        const int rc = run("critical",
                           "[potential]\nkind = powerlaw\nalpha = 1\nq = 1\n"
                           "[geometry]\nn = 1\nN = 320\n"
                           "[solver]\ncritical_tol = 0.01\n"
                           "[output]\nprefix = p\n",
                           tmp.path);
        REQUIRE(rc == 0);
        auto j = json::parse(read_text_file(tmp.path / "p_critical.json"));
        CHECK(j["critical_radius"].get<double>() == Approx(std::sqrt(2.0)).epsilon(0.02));
        CHECK(j["theory"].is_null());
    }
}

TEST_CASE("verify command", "[cli][verify]") {
    TempDir tmp;
    SECTION("1d quadratic scenario: all checks pass") {
        const std::string ini =
            "[potential]\nkind = quadratic\nq = 1\nm = 1\n"
            "[geometry]\ndomain = interval\nextent = -1,1\nnx = 401\nN = 400\n"
            "[solver]\nmax_iters = 200000\ntol = 1e-12\ninit = harmonic\n"
            "[boundary]\ntype = constant\nvalue = 1\n"
            "[verify]\nchecks = comparison,pohozaev,monotonicity,maxprinciple\n"
            "balls = 0,0,1\nradii = 0.4,0.8\n"
            "[output]\nprefix = v\n";
        const int rc = run("verify", ini, tmp.path);
        REQUIRE(rc == 0);
        auto rep = json::parse(read_text_file(tmp.path / "v_report.json"));
        REQUIRE(rep["checks"].size() >= 4);
        for (auto& entry : rep["checks"]) {
            INFO(entry.dump());
            CHECK(entry["verdict"] == "pass");
        }
        CHECK(fs::exists(tmp.path / "v_field.csv"));
        CHECK(fs::exists(tmp.path / "v_field_meta.json"));
    }
    SECTION("malformed config exits 2 without partial files") {
        TempDir fresh;
        CHECK(run("verify", "[potential]\nkind = quadratic\n[boundary]\ntype = bad\n",
                  fresh.path) == 2);
        CHECK(fs::is_empty(fresh.path));
    }
}

TEST_CASE("plotdata command", "[cli][plotdata]") {
    TempDir tmp;
    const fs::path prof = tmp.path / "prof.csv";
    write_text_file(prof, "r,h\n0,0\n0.5,0.25\n1,1\n");
    const fs::path ref = tmp.path / "ref.csv";
    write_text_file(ref, "r,h\n0,0\n1,1\n");

    SECTION("profile overlay with a reference") {
        const int rc = run("plotdata",
                           "[plotdata]\nprofile = " + prof.string() +
                               "\nreference = " + ref.string() + "\n[output]\nprefix = o\n",
                           tmp.path);
        REQUIRE(rc == 0);
        auto tab = read_csv(read_text_file(tmp.path / "o_overlay.csv"));
        REQUIRE(tab.header == std::vector<std::string>{"r", "computed", "reference"});
        REQUIRE(tab.rows.size() == 3);
        CHECK(tab.rows[1][2] == Approx(0.5));
        CHECK(fs::exists(tmp.path / "o_plot.gp"));
    }
    SECTION("field modulus heat map") {
        const fs::path fld = tmp.path / "field.csv";
        write_text_file(fld, "i,j,u1,u2\n0,0,0.6,0.8\n1,0,1,0\n");
        const int rc = run("plotdata",
                           "[plotdata]\nfield = " + fld.string() + "\n[output]\nprefix = f\n",
                           tmp.path);
        REQUIRE(rc == 0);
        auto tab = read_csv(read_text_file(tmp.path / "f_heatmap.csv"));
        REQUIRE(tab.rows.size() == 2);
        CHECK(tab.rows[0][2] == Approx(1.0));
    }
    SECTION("empty input exits 2") {
        const fs::path empty = tmp.path / "empty.csv";
        write_text_file(empty, "");
        CHECK(run("plotdata", "[plotdata]\nprofile = " + empty.string() + "\n", tmp.path) == 2);
    }
    SECTION("missing input exits 2") {
        CHECK(run("plotdata", "[plotdata]\nprofile = /no/such/file.csv\n", tmp.path) == 2);
    }
}

TEST_CASE("determinism and config round trip", "[cli][determinism]") {
    const std::string ini =
        "[potential]\nkind = characteristic\nq = 1\n"
        "[geometry]\nn = 2\nR = 3.5\nN = 200\n"
        "[output]\nprefix = d\n";
    TempDir a, b;
    REQUIRE(run("profile", ini, a.path) == 0);
    REQUIRE(run("profile", ini, b.path) == 0);
    CHECK(read_text_file(a.path / "d_upper.csv") == read_text_file(b.path / "d_upper.csv"));
    CHECK(read_text_file(a.path / "d_lower.csv") == read_text_file(b.path / "d_lower.csv"));
    CHECK(read_text_file(a.path / "d_deadcore.json") ==
          read_text_file(b.path / "d_deadcore.json"));

    // Re-running from the embedded config reproduces the report byte for byte.
    auto j = json::parse(read_text_file(a.path / "d_deadcore.json"));
    RunConfig embedded = RunConfig::from_json(j["config"]);
    TempDir c;
    REQUIRE(commands::dispatch([&] {
                return commands::run_profile(std::move(embedded), c.path);
            }) == 0);
    CHECK(read_text_file(a.path / "d_deadcore.json") ==
          read_text_file(c.path / "d_deadcore.json"));
}
