#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptspec/operator_family.hpp"

// Line-oriented "key = value" configuration with [section] headers.
// Strict: unknown keys, duplicate keys and malformed values are errors.

namespace ptspec::io {

struct RunConfig {
  std::string path;
  std::string raw_text;  // echoed verbatim into reports
  std::uint64_t content_hash = 0;

  // [problem]
  family::ProblemSpec problem;
  bool has_problem = false;
  std::string h1_matrix_path;  // resolved relative to the config file
  std::string j_matrix_path;

  // [task]
  std::string task;  // spectrum | classify | reality | sweep | doublewell-fit
  std::vector<double> epsilons;
  std::optional<double> level;
  std::optional<double> level2;
  double cluster_tolerance = 0.0;  // 0 -> 1e-8 (1 + |level|)
  int trusted_count = 0;
  double eps_min = 0.0, eps_max = 0.0;
  int eps_count = 0;
  bool window_is_interval = false;
  int window_count = 6;
  double window_lo = 0.0, window_hi = 0.0;
  std::optional<std::pair<double, double>> bracket;
  std::string dw_family;            // hbar | g
  std::vector<double> dw_values;

  // [output]
  std::string out_dir = ".";
};

RunConfig load_config(const std::string& path);

}  // namespace ptspec::io
