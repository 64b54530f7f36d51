#pragma once

// Named sweeps that regenerate the evaluation figures as CSV files plus a
// manifest describing axes, series and trial budgets.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dandelion/config.hpp"
#include "dandelion/parallel.hpp"

namespace dandelion {

struct Sweep {
    std::string file;                 // CSV file name inside the output directory
    std::string x_axis;               // CSV column on the horizontal axis
    std::vector<std::string> series;  // columns that split the data into curves
    std::vector<std::string> bands;   // aux keys drawn as bound bands
    std::vector<ExperimentConfig> configs;
};

struct Preset {
    std::string name;   // content name, e.g. partial-deployment-recall
    std::string alias;  // short alias, e.g. fig9
    std::string description;
    double budget_minutes = 30.0;
    std::vector<Sweep> sweeps;
};

struct PresetInfo {
    std::string_view alias;
    std::string_view name;
};

std::span<const PresetInfo> preset_catalog();

// Accepts either the alias or the content name; ConfigError for unknown names.
// Overrides apply to every configuration of every sweep.
Preset make_preset(std::string_view name, const Overrides& overrides = {});

struct PresetOutput {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path manifest;
};

PresetOutput run_preset(const Preset& preset, const std::filesystem::path& out_dir,
                        ExecutionPolicy policy = ExecutionPolicy::parallel);

std::string manifest_json(const Preset& preset);

}  // namespace dandelion
