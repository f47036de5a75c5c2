// pdocalc: scenario runner over the C interface.
//
//   pdocalc <task> --config run.json [--output DIR] [--seed N] [--threads N]
//
// PDO_CONFIG, PDO_OUTPUT, PDO_SEED and PDO_THREADS stand in for the flags.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pdo/pdocalc.h"

namespace {

struct Flags {
    std::string config;
    std::string output;
    long long seed = -1;
    int threads = -1;
};

const char* task_help(const std::string& task) {
    if (task == "seminorm") return "evaluate one seminorm p_{alpha,beta,gamma,m}";
    if (task == "class-check") return "tabulate seminorms and refinement stability";
    if (task == "resolvent") return "resolvent symbol (a - lambda)^-1";
    if (task == "param-elliptic") return "resolvent estimate sweep along a curve";
    if (task == "parametrix") return "parametrix residual study";
    if (task == "funcalc") return "Dunford-Riesz integral of a registry function";
    if (task == "power") return "complex power or square root of a positive symbol";
    if (task == "garding") return "certify the Garding inequality";
    if (task == "interpolate") return "interpolation constant C_eps";
    return "solve the diffusion Cauchy problem and check energy bounds";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-differential calculus scenario runner"};
    app.set_version_flag("--version", std::string(pdo_version()));
    app.require_subcommand(1);

    Flags flags;
    const char* tasks[] = {"seminorm", "class-check", "resolvent", "param-elliptic", "parametrix",
                           "funcalc",  "power",       "garding",   "interpolate",    "diffuse"};
    for (const char* task : tasks) {
        auto* sub = app.add_subcommand(task, task_help(task));
        sub->add_option("--config", flags.config, "scenario config (JSON)")->envname("PDO_CONFIG")->required();
        sub->add_option("--output", flags.output, "output directory")->envname("PDO_OUTPUT");
        sub->add_option("--seed", flags.seed, "random seed")->envname("PDO_SEED")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", flags.threads, "worker threads, 0 = auto")
            ->envname("PDO_THREADS")
            ->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string task = app.get_subcommands().front()->get_name();
    std::ifstream in(flags.config);
    if (!in) {
        std::cerr << "pdocalc: cannot read config '" << flags.config << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    const pdo_status st = pdo_run_scenario(task.c_str(), buf.str().c_str(),
                                           flags.output.empty() ? nullptr : flags.output.c_str(),
                                           static_cast<int64_t>(flags.seed), flags.threads);
    if (st != PDO_OK) {
        std::cerr << "pdocalc: " << pdo_status_name(st) << " error: " << pdo_last_error_message() << "\n";
        return pdo_status_exit_code(st);
    }
    return 0;
}
