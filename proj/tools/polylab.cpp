#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "polylab/cli.hpp"

namespace {

int finish(const polylab::cli::RunResult& result) {
    if (result.exit_code != 0) {
        std::cerr << result.error_payload;
    } else {
        for (const auto& a : result.artifacts)
            std::cout << "wrote " << a << "\n";
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polylab: divided differences, trajectory perturbation, "
                 "Pfaffian return maps, Khovanskii-Rolle counting, and "
                 "stratification diagnostics"};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path, "run a JSON experiment config");

    // perturb with direct flags, per the documented usage
    auto* perturb = app.add_subcommand("perturb", "periodic-point counting");
    std::string map_name = "logistic";
    int n_max = 8;
    std::uint64_t seed = 0;
    std::string output = "perturb.csv";
    long long resolution = 0;
    double delta = 0.0;
    bool minimal = false;
    perturb->add_option("--map", map_name, "logistic|halving");
    perturb->add_option("--n-max", n_max, "largest period");
    perturb->add_option("--seed", seed, "rng seed");
    perturb->add_option("--output", output, "output CSV path");
    perturb->add_option("--resolution", resolution, "grid cells (0 = auto)");
    perturb->add_option("--delta", delta, "growth-fit exponent offset");
    perturb->add_flag("--minimal-period", minimal, "filter lower periods");

    // cycles with direct flags
    auto* cycles = app.add_subcommand("cycles", "polycycle limit-cycle counts");
    std::string model_path;
    double delta1 = 1e-3, delta2 = 0.0;
    std::uint64_t cseed = 0;
    std::string coutput = "cycles.json";
    cycles->add_option("--model", model_path, "model JSON path")->required();
    cycles->add_option("--delta1", delta1, "first displacement");
    cycles->add_option("--delta2", delta2, "second displacement (0 = delta1/10)");
    cycles->add_option("--seed", cseed, "rng seed");
    cycles->add_option("--output", coutput, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    if (!config_path.empty())
        return finish(polylab::cli::run_config_file(config_path));

    if (perturb->parsed()) {
        nlohmann::ordered_json config;
        config["subcommand"] = "perturb";
        config["seed"] = seed;
        config["output"] = output;
        config["params"]["map"] = map_name;
        config["params"]["n_max"] = n_max;
        config["params"]["delta"] = delta;
        if (resolution > 0) config["params"]["resolution"] = resolution;
        if (minimal) config["params"]["minimal_period"] = true;
        return finish(polylab::cli::run_config(config));
    }
    if (cycles->parsed()) {
        nlohmann::ordered_json config;
        config["subcommand"] = "cycles";
        config["seed"] = cseed;
        config["output"] = coutput;
        config["params"]["model_path"] = model_path;
        config["params"]["deltas"] = {delta1,
                                      delta2 != 0.0 ? delta2 : delta1 / 10.0};
        return finish(polylab::cli::run_config(config));
    }

    std::cerr << app.help();
    return 2;
}
