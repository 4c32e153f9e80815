#pragma once

#include <optional>
#include <string>

#include "conelab/config.hpp"
#include "conelab/entropy.hpp"
#include "conelab/error.hpp"
#include "conelab/geometry.hpp"
#include "conelab/link.hpp"

namespace conelab {

struct RunOutcome {
  int exit_code = 1;    // 0 pass, 2 property check failed, 1 operational error
  std::string status;   // pass, fail, error
  std::string report_path;
  std::string message;
  std::optional<ErrorCode> error;
};

LinkData build_link(const RunConfig& cfg);
RadialMetric build_metric(const RunConfig& cfg, const LinkData& link);
EntropyOptions entropy_options(const RunConfig& cfg);

/// Finalizes a copy of the config, runs the subcommand and writes its artifacts.
/// Library errors are caught and returned as exit code 1.
RunOutcome run(const RunConfig& cfg);

}  // namespace conelab
