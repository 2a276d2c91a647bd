#include <iostream>

#include <CLI11.hpp>

#include "ersatz/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ersatz: monotone explicit solver for cutoff-modified "
                 "fully nonlinear parabolic equations"};
    app.require_subcommand(1);

    ersatz::DriverOptions opt;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", opt.config_path, "config file");
        if (needs_config) cfg->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--threads", opt.threads,
                        "worker threads (ERSATZ_THREADS as fallback)");
        sub->add_option("--seed", seed_flag, "seed override")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* solve = app.add_subcommand("solve", "march a single problem");
    add_common(solve, true);
    auto* sweep = app.add_subcommand("sweep-k", "solve across the K list");
    add_common(sweep, true);
    auto* refine = app.add_subcommand("refine-h", "solve across the h list");
    add_common(refine, true);
    auto* verify = app.add_subcommand(
        "verify", "run assumption checkers and estimate measurement");
    add_common(verify, true);

    auto* decompose = app.add_subcommand(
        "decompose", "stencil decomposition of a symmetric matrix");
    std::vector<double> entries;
    double delta = 0.5, hat_delta = 0.125;
    decompose->add_option("--matrix", entries, "row-major entries")->required();
    decompose->add_option("--delta", delta, "ellipticity class bound");
    decompose->add_option("--hat-delta", hat_delta, "window parameter")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : ersatz::kExitValidation;
    }

    if (seed_set) opt.seed = seed_flag;

    if (solve->parsed()) return ersatz::cmd_solve(opt, std::cout, std::cerr);
    if (sweep->parsed()) return ersatz::cmd_sweep_k(opt, std::cout, std::cerr);
    if (refine->parsed()) return ersatz::cmd_refine_h(opt, std::cout, std::cerr);
    if (verify->parsed()) return ersatz::cmd_verify(opt, std::cout, std::cerr);
    return ersatz::cmd_decompose(entries, delta, hat_delta, std::cout,
                                 std::cerr);
}
