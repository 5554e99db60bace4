#pragma once

#include "hessmc/config.hpp"
#include "hessmc/report.hpp"

#include <json.hpp>

#include <vector>

namespace hessmc {

struct SuiteResult {
    std::vector<ReportRow> rows;
    /// Suite-specific members merged into the JSON summary.
    nlohmann::json extra = nlohmann::json::object();
};

/// Runs one suite. threads = 0 uses the OpenMP default; the rows do not
/// depend on it. Throws EstimatorError when an ensemble is unusable.
SuiteResult run_suite(const ExperimentConfig& cfg, int threads = 0);

}  // namespace hessmc
