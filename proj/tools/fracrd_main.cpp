#include "fracrd/cli_io.hpp"
#include "fracrd/errors.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <iostream>

using namespace fracrd;

int main(int argc, char** argv) {
    CLI::App app{"fracrd: space-time fractional reaction-diffusion solver"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string out = "out";
    std::uint64_t seed = 0;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config, "key = value run configuration");
        if (needs_config) {
            c->required()->check(CLI::ExistingFile);
        }
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--threads", opt.threads, "worker threads")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "overrides the config seed");
    };

    auto* run = app.add_subcommand("run", "simulate one configuration");
    common(run, true);
    auto* eigen = app.add_subcommand("eigen", "first eigenpair of the fractional operator");
    common(eigen, true);
    auto* blowup = app.add_subcommand("blowup", "blow-up time against its predicted window");
    common(blowup, true);

    auto* sweep = app.add_subcommand("sweep", "isolated runs over one parameter axis");
    common(sweep, true);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "config key to vary")->required();
    sweep->add_option("--values", values, "values of the axis")->required()->delimiter(',');

    auto* verify = app.add_subcommand("verify", "acceptance checks");
    common(verify, false);
    std::string suite = "all";
    verify->add_option("suite", suite, "all, quick or a comma list of criterion ids")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    opt.out = out;
    opt.seed_set = app.get_subcommands().front()->count("--seed") > 0;
    opt.seed = seed;

    try {
        if (verify->parsed()) {
            omp_set_num_threads(opt.threads);
            return cmd_verify(suite, opt);
        }
        const RunConfig cfg = load_config(opt.config);
        if (sweep->parsed()) {
            return cmd_sweep(cfg, opt, axis, values);
        }
        omp_set_num_threads(opt.threads);
        if (run->parsed()) {
            return cmd_run(cfg, opt);
        }
        if (eigen->parsed()) {
            return cmd_eigen(cfg, opt);
        }
        return cmd_blowup(cfg, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
