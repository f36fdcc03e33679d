#pragma once

#include <string>
#include <vector>

#include "sdr/experiment.hpp"

namespace sdr {

// Writes replicates.csv, summary.csv, and config.json into dir; when rows are
// present also boxplot.svg with one box per (method, criterion, n) group.
// config_json is written verbatim. Output bytes depend only on the inputs.
void emit_outputs(const std::vector<ReplicateResult>& rows,
                  const std::vector<SummaryRow>& summary, const std::string& dir,
                  const std::string& config_json);

}  // namespace sdr
