#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "polylab/normalforms.hpp"
#include "polylab/polynomial.hpp"

namespace polylab::cli {

// Schema violations carry the path to the offending field; the CLI maps
// them to exit code 2 (module errors map to exit 1).
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, std::string message)
        : std::runtime_error(message + " at " + path), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunResult {
    int exit_code = 0;
    std::string error_payload;          // JSON, non-empty on failure
    std::vector<std::string> artifacts; // files written
};

// Executes a validated experiment config. Identical config + seed produce
// byte-identical artifacts.
RunResult run_config(const nlohmann::ordered_json& config,
                     const std::string& base_dir = ".");
RunResult run_config_file(const std::string& path);

// JSON codecs shared with the tests.
Polynomial polynomial_from_json(const nlohmann::ordered_json& j,
                                const std::string& path);
nlohmann::ordered_json polynomial_to_json(const Polynomial& p);

normalforms::NormalFormSpec normal_form_from_json(const nlohmann::ordered_json& j,
                                                  const std::string& path);
nlohmann::ordered_json normal_form_to_json(const normalforms::NormalFormSpec& s);

normalforms::PolycycleModel model_from_json(const nlohmann::ordered_json& j,
                                            const std::string& path);

int thread_cap(); // POLYLAB_THREADS, defaulting to hardware concurrency

} // namespace polylab::cli
