#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirac/potentials.hpp"

namespace dirac {

struct GridParams {
    double length = 20.0;  // half-length on the line, length on the half-line
    double dx = 0.02;
};

struct OperatorParams {
    double xi = 0.0;
    double k = 0.5;
    double mass = 0.0;
    std::optional<double> alpha;
};

struct Task {
    std::string type;
    nlohmann::ordered_json params;
};

struct Scenario {
    std::string name;
    unsigned seed = 1;
    PotentialSpec potential;
    GridParams grid;
    OperatorParams op;
    std::vector<Task> tasks;
};

// Parses and validates a JSON scenario. Errors raise ConfigError with a
// "source:line: message" prefix.
Scenario parse_scenario(const std::string& text, const std::string& source = "<config>");
Scenario load_scenario(const std::string& path);

std::vector<std::string> builtin_scenarios();
std::string builtin_scenario_text(const std::string& name);  // throws ConfigError if unknown

struct TaskStatus {
    std::string label;  // "03-hs-scan"
    bool ok = false;
    std::string message;
    std::vector<std::string> files;
};

struct RunResult {
    std::string directory;
    std::vector<TaskStatus> tasks;
    bool ok() const;
};

// Artifact root: $DIRAC_ARTIFACTS, or ./artifacts when unset.
std::string artifact_root();

// Runs every task, writing CSVs, plot scripts and manifest.csv into
// <root>/<scenario name>/. Task failures are recorded, not thrown.
RunResult run_scenario(const Scenario& sc, const std::string& root);

}  // namespace dirac
