#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirac/acceptance.hpp"
#include "dirac/scenario.hpp"
#include "dirac/types.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Discretized one-dimensional Dirac operators: scenarios and acceptance checks"};
    app.set_version_flag("--version", std::string(dirac::kVersion));
    app.require_subcommand(1);

    std::string config;
    std::string out_root;
    bool builtin = false;
    auto* run = app.add_subcommand("run", "Run a scenario config and write CSV artifacts");
    run->add_option("config", config, "JSON config path (or builtin name with --builtin)")->required();
    run->add_flag("--builtin", builtin, "Treat <config> as a builtin scenario name");
    run->add_option("--out", out_root, "Artifact root (default: $DIRAC_ARTIFACTS or ./artifacts)");

    std::string show_name;
    auto* list = app.add_subcommand("scenarios", "List builtin scenarios");
    list->add_option("--show", show_name, "Print the config of one builtin");

    std::vector<int> only;
    bool verbose = false;
    auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
    accept->add_option("criteria", only, "Criterion numbers (default: all)");
    accept->add_flag("-v,--verbose", verbose, "Per-step diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*list) {
        try {
            if (!show_name.empty()) {
                std::cout << dirac::builtin_scenario_text(show_name) << '\n';
                return 0;
            }
        } catch (const dirac::ConfigError& e) {
            std::cerr << "dirac: " << e.what() << '\n';
            return 2;
        }
        for (const auto& n : dirac::builtin_scenarios()) std::cout << n << '\n';
        return 0;
    }

    if (*accept) {
        dirac::AcceptanceOptions opt;
        opt.only = only;
        opt.verbose = verbose;
        const auto lines = dirac::run_acceptance(std::cout, opt);
        int failed = 0;
        for (const auto& l : lines) failed += l.pass ? 0 : 1;
        std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed"
                             : std::string("acceptance: all criteria passed"))
                  << '\n';
        return failed ? 1 : 0;
    }

    dirac::Scenario sc;
    try {
        sc = builtin ? dirac::parse_scenario(dirac::builtin_scenario_text(config), "builtin:" + config)
                     : dirac::load_scenario(config);
    } catch (const dirac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    try {
        const auto res = dirac::run_scenario(sc, out_root.empty() ? dirac::artifact_root() : out_root);
        for (const auto& t : res.tasks)
            std::cout << (t.ok ? "ok     " : "FAILED ") << t.label << ": " << t.message << '\n';
        std::cout << "artifacts: " << res.directory << '\n';
        return res.ok() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
