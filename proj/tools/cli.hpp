#ifndef TAILINV_CLI_HPP
#define TAILINV_CLI_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tailinv::cli {

/// Runs the command line given argv-style arguments (args[0] is the program
/// name).  Returns the process exit code: 0 success, 1 validation error,
/// 2 computation error.  Reports are JSON ("schema_version": 1), data files
/// are CSV; diagnostics go to stderr only.
int run(const std::vector<std::string>& args);

/// Writes plot-ready CSV files for a report produced by run(); returns the
/// paths written.  Dispatches on report["command"]: mellin profiles,
/// tail-ratio curves, and oscillation traces.
std::vector<std::string> emit_plot_data(const nlohmann::json& report, const std::string& prefix);

} // namespace tailinv::cli

#endif
