#ifndef SYNCCTL_COMMANDS_H_
#define SYNCCTL_COMMANDS_H_

// Command dispatch and output files for the syncctl tool.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "syncctl/config.h"

namespace syncctl {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNotSynchronizable = 2,
  kExitSolverFailure = 3,
};

// One CSV file: a header line and rows of already formatted cells.
struct CsvTable {
  std::string file_name;
  std::string header;
  std::vector<std::vector<std::string>> rows;

  std::string Render() const;
};

struct RunReport {
  std::string command;
  int exit_code = kExitOk;
  nlohmann::ordered_json json;
  std::vector<CsvTable> tables;
};

inline constexpr std::string_view kCommands[] = {
    "classify", "simulate", "min-norm", "norm-curve", "min-time"};

bool IsCommand(std::string_view name);

// %.17g, which reads back to the same double.
std::string FormatNumber(double v);

// Control samples in the control.csv layout. The row for step j carries
// t = t_{j+1}, the right end of the interval the value holds on.
CsvTable ControlTable(const ControlSignal& control, const SpatialGrid& grid);

// Reads a control.csv body back onto `time` x grid. Entries absent from the
// file are zero; entries off the time or space grid are an error.
ControlSignal ReadControlCsv(const std::filesystem::path& path,
                             const TimeGrid& time, int m,
                             const SpatialGrid& grid, const OmegaMask& mask);

// Runs one command. Solver outcomes are folded into the report and its exit
// code; configuration problems (for example min-time without mintime.M)
// throw SyncError.
RunReport RunCommand(std::string_view command, const ProblemConfig& config);

// Writes report.json and the CSV tables selected by config.formats into dir.
// Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> WriteOutputs(
    const RunReport& report, const std::filesystem::path& dir,
    const std::vector<std::string>& formats);

}  // namespace syncctl

#endif  // SYNCCTL_COMMANDS_H_
