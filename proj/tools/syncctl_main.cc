// syncctl <command> --config <path> [--out <dir>]

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "syncctl/commands.h"
#include "syncctl/config.h"
#include "syncctl/errors.h"

int main(int argc, char** argv) {
  CLI::App app{"Synchronization controls for coupled parabolic systems"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  app.add_option("command", command,
                 "classify | simulate | min-norm | norm-curve | min-time")
      ->required()
      ->check(CLI::IsMember({"classify", "simulate", "min-norm", "norm-curve",
                             "min-time"}));
  app.add_option("--config", config_path, "Problem configuration (JSON)")
      ->required();
  app.add_option("--out", out_dir, "Output directory (default: outputs.dir)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : syncctl::kExitUsage;
  }

  try {
    const syncctl::ProblemConfig config = syncctl::LoadConfig(config_path);
    const syncctl::RunReport report = syncctl::RunCommand(command, config);
    std::filesystem::path dir = out_dir.empty()
                                    ? config.base_dir / config.output_dir
                                    : std::filesystem::path(out_dir);
    syncctl::WriteOutputs(report, dir, config.formats);

    const auto& cls = report.json["classification"];
    std::cout << command << ": hypothesis "
              << cls["hypothesis"].get<std::string>() << ", rank "
              << cls["rank"].get<int>() << " of "
              << cls["rank_target"].get<int>();
    if (report.json.contains("result") &&
        report.json["result"].contains("status")) {
      std::cout << ", status "
                << report.json["result"]["status"].get<std::string>();
    }
    std::cout << "\n";
    if (report.json.contains("error")) {
      std::cerr << report.json["error"]["message"].get<std::string>() << "\n";
    }
    std::cout << "wrote " << dir.string() << "\n";
    return report.exit_code;
  } catch (const syncctl::SyncError& e) {
    std::cerr << "syncctl: " << e.what() << "\n";
    return syncctl::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "syncctl: " << e.what() << "\n";
    return syncctl::kExitUsage;
  }
}
