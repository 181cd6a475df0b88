#ifndef SYNCCTL_CONFIG_H_
#define SYNCCTL_CONFIG_H_

// Problem configuration: a single JSON object, strictly validated. Unknown
// keys are rejected so that typos never fall back to defaults silently.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "syncctl/grid.h"
#include "syncctl/min_norm.h"
#include "syncctl/min_time.h"
#include "syncctl/sync_algebra.h"

namespace syncctl {

struct InitialComponent {
  enum class Kind { kSin, kConst, kValues };
  Kind kind = Kind::kConst;
  int mode = 1;        // sin(mode * pi * x / L)
  double value = 0.0;  // const
  std::string file;    // values: nx numbers, whitespace or comma separated

  bool operator==(const InitialComponent&) const = default;
};

struct ProblemConfig {
  int n = 0;
  int m = 0;
  std::vector<double> a;  // row-major n x n
  std::vector<double> b;  // row-major n x m

  double length = 1.0;
  int nx = 0;

  std::vector<Interval> omega;

  std::optional<double> horizon;
  int nt_ref = 200;
  double post_horizon = 0.5;
  std::vector<double> t_values;

  std::vector<InitialComponent> initial_state;

  double cg_tol = 1e-10;
  int cg_max_iter = 500;
  double eps_reg = 0.0;
  double rq_cutoff = 1e-12;
  std::optional<double> target_tol;

  std::optional<double> budget;  // mintime.M
  double t_lo = 1e-2;
  double t_hi = 2.0;
  double bisect_tol = 1e-3;
  double t_max = 8.0;

  std::optional<std::string> control_file;  // simulate.control_file

  std::string output_dir = "out";
  std::vector<std::string> formats{"json", "csv"};
  int snapshot_stride = 10;

  // Directory used to resolve relative file references. Not serialized.
  std::filesystem::path base_dir;

  bool operator==(const ProblemConfig& other) const;
};

ProblemConfig ParseConfig(const std::string& text,
                          const std::filesystem::path& base_dir = {});
ProblemConfig LoadConfig(const std::filesystem::path& path);
nlohmann::ordered_json ToJson(const ProblemConfig& config);

// FNV-1a over the canonical serialization.
std::uint64_t ConfigHash(const ProblemConfig& config);

CouplingPair MakeCouplingPair(const ProblemConfig& config);
SpatialGrid MakeGrid(const ProblemConfig& config);
OmegaMask MakeMask(const ProblemConfig& config, const SpatialGrid& grid);
StateField MakeInitialState(const ProblemConfig& config,
                            const SpatialGrid& grid);
HumOptions MakeHumOptions(const ProblemConfig& config);
MinTimeOptions MakeMinTimeOptions(const ProblemConfig& config);

}  // namespace syncctl

#endif  // SYNCCTL_CONFIG_H_
