#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ptspec/config.hpp"

namespace ptspec::io {

struct RunOptions {
  std::string cache_dir;      // empty -> cache disabled
  bool no_cache = false;
  std::optional<double> epsilon_override;
  std::string out_dir_override;
  bool write_files = true;    // report.json, csv, plot data
  bool dump_matrices = false; // also write h0.mat, h1.mat, j.mat
  bool timestamp = true;      // false pins the field for reproducibility tests
};

// Dispatch a loaded config to the module pipelines, write the outputs
// and return the report document. Hypothesis violations and operational
// errors propagate as exceptions; the CLI maps them to exit codes.
nlohmann::ordered_json run_task(const RunConfig& cfg, const RunOptions& opts);

}  // namespace ptspec::io
