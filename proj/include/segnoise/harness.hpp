#pragma once

#include "segnoise/corrupt.hpp"
#include "segnoise/learner.hpp"
#include "segnoise/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace segnoise {

struct GridCell {
    std::string family;      // experiment family, e.g. "warp"
    std::string param;       // label written to the results table
    double param_value = 0;  // numeric x-axis position
    CorruptionSpec spec;
};

struct ExperimentConfig {
    SynthConfig synth;
    TrainConfig train;
    int dataset_size = 400;
    int repetitions = 3;
    double train_fraction = 0.7;
    double val_fraction = 0.1;
    double test_fraction = 0.2;
    std::uint64_t experiment_seed = 17;
    std::vector<GridCell> grid; // empty -> default_grid()
};

/// Clean baseline plus the standard sweeps: warp sigma {0,2,5,10,20},
/// shift n {0,2,5,10,30}, crop {left, rand_0.5, rand_0},
/// permute/discard fraction {0,0.1,0.25,0.5}.
std::vector<GridCell> default_grid();

nlohmann::json experiment_config_to_json(ExperimentConfig const &config);
ExperimentConfig experiment_config_from_json(nlohmann::json const &j);

struct ResultRow {
    std::string experiment;
    std::string param;
    int rep = 0;
    double dice = 0.0;     // test pooled Dice of this repetition
    double relative = 0.0; // cell mean / clean-cell mean
    double variance = 0.0; // propagated variance of the cell ratio
};

struct ResultTable {
    nlohmann::json config_echo;
    std::vector<ResultRow> rows;
};

/// Train every grid cell for every repetition, evaluate pooled Dice on the
/// untouched clean test split, and report performance relative to the clean
/// cell of the same table. Fully deterministic in experiment_seed.
ResultTable run(ExperimentConfig const &config);

/// Paired Permute/Discard sweep over the given fractions, sharing data seeds.
ResultTable permute_vs_discard(ExperimentConfig const &config,
                               std::vector<double> const &fractions);

/// Write results.csv, results.json, and one SVG chart per experiment family.
/// Byte-deterministic given the table.
void emit(ResultTable const &table, std::filesystem::path const &directory);

} // namespace segnoise
