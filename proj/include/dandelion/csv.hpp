#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dandelion/experiment.hpp"

namespace dandelion {

inline constexpr std::string_view kCsvHeader =
    "experiment,topology,n,eta,d,p,q,beta,scheme,estimator,mode,m,trial,seed,avg_precision,avg_recall,aux_key,aux_value";

// One line per aux pair (a single line with empty aux fields when a row has none).
std::string format_csv(const std::vector<TrialRow>& rows);
void write_csv(const std::vector<TrialRow>& rows, const std::filesystem::path& path);

// Inverse of format_csv: consecutive lines of the same trial are merged back.
std::vector<TrialRow> parse_csv(std::string_view text, const std::string& origin);
std::vector<TrialRow> read_csv(const std::filesystem::path& path);

}  // namespace dandelion
