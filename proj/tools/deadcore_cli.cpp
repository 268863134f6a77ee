// Command-line front end: profile, critical, verify and plotdata
// subcommands around one INI configuration file.

#include <string>

#include <CLI11.hpp>

#include "deadcore/commands.hpp"

using namespace deadcore;

int main(int argc, char** argv) {
    CLI::App app{"radial comparison minimizers, dead cores and diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "./out";
    long long seed = -1;
    int threads = 0;
    app.add_option("--config", config_path, "configuration file (INI)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "override solver.seed");
    app.add_option("--threads", threads, "override solver.threads");

    auto* cmd_profile = app.add_subcommand("profile", "comparison profiles and dead-core report");
    auto* cmd_critical = app.add_subcommand("critical", "critical dead-core radius search");
    auto* cmd_verify = app.add_subcommand("verify", "field minimization plus diagnostic checks");
    auto* cmd_plotdata = app.add_subcommand("plotdata", "plot-ready CSVs and a gnuplot script");
    for (auto* sub : {cmd_profile, cmd_critical, cmd_verify, cmd_plotdata}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    return commands::dispatch([&]() -> int {
        RunConfig cfg = RunConfig::parse(read_text_file(config_path));
        if (seed >= 0) cfg.set("solver", "seed", std::to_string(seed));
        if (threads > 0) cfg.set("solver", "threads", std::to_string(threads));

        if (cmd_profile->parsed()) return commands::run_profile(std::move(cfg), out_dir);
        if (cmd_critical->parsed()) return commands::run_critical(std::move(cfg), out_dir);
        if (cmd_verify->parsed()) return commands::run_verify(std::move(cfg), out_dir);
        if (cmd_plotdata->parsed()) return commands::run_plotdata(std::move(cfg), out_dir);
        return 2;
    });
}
