#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/evolve.hpp"
#include "ascal/grid.hpp"

namespace ascal {

// Knobs consumed by the study drivers rather than the solver itself. q_list
// entries may be inf; `datum` names one of the initial-data builders.
struct StudyParams {
    std::string kind = "decay";
    std::vector<double> q_list{2.0, std::numeric_limits<double>::infinity()};
    int lambda = 2;
    std::vector<double> amplitudes{0.05, 0.2, 0.8};
    std::vector<double> perturbations{0.001, 0.01, 0.1};
    bool with_l1 = true;
    std::string datum = "bump";
};

struct OutputParams {
    std::string directory = ".";
    std::string prefix = "run";
};

// 256^2 box of side 16*pi centered at the origin: the reference setup every
// config starts from before its own keys are applied.
Grid default_grid();

struct RunConfig {
    Grid grid = default_grid();
    SolverConfig solver;
    CouplingSpec coupling;
    StudyParams study;
    OutputParams output;
};

// Parses INI-like text: sections [grid], [equation], [coupling], [time],
// [study], [output], lines of `key = value`, '#' comments. Unknown sections
// or keys, malformed values, and failed invariants all raise ConfigError
// carrying the 1-based line number and the section.key name.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

// Canonical text form with every default filled in. Parsing the echo and
// echoing again reproduces the identical string, so reports can embed it.
std::string echo_config(const RunConfig& config);

}  // namespace ascal
