#include "syncctl/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "syncctl/errors.h"
#include "syncctl/min_norm.h"
#include "syncctl/min_time.h"
#include "syncctl/pde.h"

namespace syncctl {
namespace {

using OJson = nlohmann::ordered_json;

OJson MatrixJson(const Matrix& m) {
  OJson rows = OJson::array();
  for (int i = 0; i < m.rows(); ++i) {
    OJson row = OJson::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

OJson ClassificationJson(const SyncStructure& s) {
  OJson j;
  j["hypothesis"] = std::string(HypothesisName(s.hypothesis));
  j["row_condition"] = s.row_condition;
  j["row_sums"] = std::vector<double>(s.row_sums.begin(), s.row_sums.end());
  j["rank"] = s.rank_value;
  j["rank_target"] = s.rank_target;
  j["rank_near_cutoff"] = s.rank_near_cutoff;
  j["a_reduced"] = s.a_reduced ? MatrixJson(*s.a_reduced) : OJson(nullptr);
  return j;
}

OJson MinNormJson(const MinNormResult& r) {
  OJson j;
  j["horizon"] = r.control.time().horizon;
  j["nt"] = r.control.time().nt;
  j["norm"] = r.norm_value;
  j["residual"] = r.residual;
  j["relative_residual"] =
      r.initial_norm > 0.0 ? r.residual / r.initial_norm : 0.0;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["stop_reason"] = r.stop_reason;
  j["eps_reg"] = r.eps_reg;
  j["gramian_scale"] = r.gramian_scale;
  j["target_tol"] = r.target_tol;
  j["initial_norm"] = r.initial_norm;
  j["noise_estimate"] = r.noise_estimate;
  j["active_fraction"] = r.active_fraction;
  j["objective_history"] = r.objective_history;
  return j;
}

OJson VerificationJson(const VerificationReport& v) {
  OJson j;
  j["horizon"] = v.horizon;
  j["sync_residual"] = v.sync_residual;
  j["null_residual"] = v.null_residual;
  j["persistence_residual"] = v.persistence_residual;
  j["control_norm"] = v.control_norm;
  j["reference_norm"] = v.reference_norm;
  j["norm_relative_error"] = v.norm_relative_error;
  j["within_budget"] = v.within_budget;
  j["support_ok"] = v.support_ok;
  return j;
}

CsvTable TrajectoryTable(const Trajectory& traj, const SpatialGrid& grid,
                         int stride) {
  CsvTable t{"trajectory.csv", "t,component,x,value", {}};
  const int last = static_cast<int>(traj.snapshots.size()) - 1;
  for (int j = 0; j <= last; ++j) {
    if (j % stride != 0 && j != last) continue;
    const StateField& y = traj.snapshots[j];
    for (int c = 0; c < y.k(); ++c) {
      for (int i = 0; i < grid.nx; ++i) {
        t.rows.push_back({FormatNumber(traj.time.t(j)), std::to_string(c),
                          FormatNumber(grid.x(i)), FormatNumber(y(c, i))});
      }
    }
  }
  return t;
}

CsvTable ResidualTable(const VerificationReport& v) {
  CsvTable t{"sync_residual.csv", "t,residual", {}};
  for (const auto& [time, value] : v.series) {
    t.rows.push_back({FormatNumber(time), FormatNumber(value)});
  }
  return t;
}

Trajectory ControlledTrajectory(const CouplingPair& pair,
                                const SpatialGrid& grid, const OmegaMask& mask,
                                const StateField& y0,
                                const ControlSignal& control) {
  if (control.time().nt == 0) {
    return Trajectory{control.time(), {y0}};
  }
  const ParabolicSystem full(pair.a, pair.b, grid, control.time(), mask);
  return full.Forward(y0, &control);
}

double RequireHorizon(const ProblemConfig& c, std::string_view command) {
  if (!c.horizon) {
    throw SyncError(ErrorCode::kValidationError,
                    "time.T: required for " + std::string(command));
  }
  return *c.horizon;
}

struct Problem {
  CouplingPair pair;
  SyncStructure structure;
  SpatialGrid grid;
  OmegaMask mask;
  StateField y0;
};

Problem Setup(const ProblemConfig& c) {
  Problem p;
  p.pair = MakeCouplingPair(c);
  Validate(p.pair);
  p.structure = Classify(p.pair);
  p.grid = MakeGrid(c);
  p.mask = MakeMask(c, p.grid);
  p.y0 = MakeInitialState(c, p.grid);
  return p;
}

void RunSimulate(const ProblemConfig& c, const Problem& p, RunReport& rep) {
  const double horizon = RequireHorizon(c, "simulate");
  const TimeGrid time = BuildTimeGrid(horizon, c.nt_ref);
  ControlSignal control =
      c.control_file
          ? ReadControlCsv(c.base_dir / *c.control_file, time, p.pair.m(),
                           p.grid, p.mask)
          : ControlSignal(time, p.pair.m(), p.grid.nx, p.mask);
  const Trajectory traj =
      ControlledTrajectory(p.pair, p.grid, p.mask, p.y0, control);
  const VerificationReport v =
      VerifyControl(p.pair, p.structure, p.grid, p.mask, p.y0, control, 0.0,
                    false, c.post_horizon, c.nt_ref);
  OJson r;
  r["horizon"] = horizon;
  r["nt"] = time.nt;
  r["controlled"] = c.control_file.has_value();
  r["control_norm"] = control.Norm(p.grid.dx);
  r["final_sync_residual"] = v.sync_residual;
  r["final_null_residual"] = v.null_residual;
  rep.json["result"] = r;
  rep.tables.push_back(TrajectoryTable(traj, p.grid, c.snapshot_stride));
  rep.tables.push_back(ResidualTable(v));
}

MinNormSolver MakeSolver(const ProblemConfig& c, const Problem& p) {
  return MinNormSolver(MakeOperatingSystem(p.pair, p.structure), p.grid,
                       p.mask, MakeHumOptions(c));
}

void RunMinNorm(const ProblemConfig& c, const Problem& p, RunReport& rep) {
  const double horizon = RequireHorizon(c, "min-norm");
  const MinNormSolver solver = MakeSolver(c, p);
  const MinNormResult r = solver.Solve(horizon, p.y0);
  OJson j = MinNormJson(r);
  const StateField z0 = solver.OperatorFor(horizon).InitialState(p.y0);
  const double n2 = r.norm_value * r.norm_value;
  j["optimality_gap"] =
      n2 > 0.0 ? std::abs(n2 + Inner(r.psi0, z0, p.grid.dx)) / n2 : 0.0;
  rep.json["result"] = j;
  const VerificationReport v =
      VerifySolution(r, p.pair, p.structure, solver, p.y0, c.post_horizon);
  rep.json["verification"] = VerificationJson(v);
  rep.tables.push_back(ControlTable(r.control, p.grid));
  rep.tables.push_back(TrajectoryTable(
      ControlledTrajectory(p.pair, p.grid, p.mask, p.y0, r.control), p.grid,
      c.snapshot_stride));
  rep.tables.push_back(ResidualTable(v));
  if (!r.converged) rep.exit_code = kExitSolverFailure;
}

void RunNormCurve(const ProblemConfig& c, const Problem& p, RunReport& rep) {
  const MinNormSolver solver = MakeSolver(c, p);
  const std::vector<NormCurvePoint> points =
      solver.NormCurve(c.t_values, p.y0);
  CsvTable t{"norm_curve.csv", "T,N,converged,iters", {}};
  OJson rows = OJson::array();
  bool all_converged = true;
  for (const NormCurvePoint& pt : points) {
    t.rows.push_back({FormatNumber(pt.horizon), FormatNumber(pt.norm_value),
                      pt.converged ? "1" : "0",
                      std::to_string(pt.iterations)});
    rows.push_back({{"T", pt.horizon},
                    {"N", pt.norm_value},
                    {"converged", pt.converged},
                    {"iterations", pt.iterations},
                    {"residual", pt.residual},
                    {"noise_estimate", pt.noise_estimate}});
    all_converged = all_converged && pt.converged;
  }
  rep.json["result"] = {{"points", rows}};
  rep.tables.push_back(std::move(t));
  if (!all_converged) rep.exit_code = kExitSolverFailure;
}

void RunMinTime(const ProblemConfig& c, const Problem& p, RunReport& rep) {
  if (!c.budget) {
    throw SyncError(ErrorCode::kValidationError,
                    "mintime.M: required for min-time");
  }
  const MinNormSolver solver = MakeSolver(c, p);
  const MinTimeResult r =
      SolveMinTime(*c.budget, p.y0, solver, MakeMinTimeOptions(c));
  OJson j;
  j["status"] = std::string(StatusName(r.status));
  j["budget"] = r.budget;
  j["m_limit_estimate"] = r.m_limit_estimate;
  j["limit_gap"] = r.limit_gap;
  j["inconclusive"] = r.inconclusive;
  if (r.status == MinTimeStatus::kSolved ||
      r.status == MinTimeStatus::kTrivialZero) {
    j["t_star"] = r.t_star;
    j["achieved_norm"] = r.achieved_norm;
  } else {
    j["t_star"] = nullptr;
  }
  j["bisection_iters"] = r.bisection_iters;
  OJson brackets = OJson::array();
  for (const BracketStep& b : r.brackets) {
    brackets.push_back({{"T_lo", b.t_lo},
                        {"T_hi", b.t_hi},
                        {"N_lo", b.n_lo},
                        {"N_hi", b.n_hi}});
  }
  j["brackets"] = brackets;
  if (r.status == MinTimeStatus::kSolved) {
    j["min_norm"] = MinNormJson(r.min_norm);
  }
  rep.json["result"] = j;
  if (r.status == MinTimeStatus::kNoOptimalControl) return;

  const VerificationReport v =
      VerifySolution(r, p.pair, p.structure, solver, p.y0, c.post_horizon);
  rep.json["verification"] = VerificationJson(v);
  rep.tables.push_back(ControlTable(r.control, p.grid));
  rep.tables.push_back(TrajectoryTable(
      ControlledTrajectory(p.pair, p.grid, p.mask, p.y0, r.control), p.grid,
      c.snapshot_stride));
  rep.tables.push_back(ResidualTable(v));
}

std::string HexHash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::string CsvTable::Render() const {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

bool IsCommand(std::string_view name) {
  return std::find(std::begin(kCommands), std::end(kCommands), name) !=
         std::end(kCommands);
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable ControlTable(const ControlSignal& control, const SpatialGrid& grid) {
  CsvTable t{"control.csv", "t,component,x,value", {}};
  const TimeGrid& time = control.time();
  const std::vector<double>& mask = control.support().mask;
  for (int j = 0; j < time.nt; ++j) {
    for (int c = 0; c < control.m(); ++c) {
      for (int i = 0; i < grid.nx; ++i) {
        if (mask[i] == 0.0) continue;
        t.rows.push_back({FormatNumber(time.t(j + 1)), std::to_string(c),
                          FormatNumber(grid.x(i)),
                          FormatNumber(control(j, c, i))});
      }
    }
  }
  return t;
}

ControlSignal ReadControlCsv(const std::filesystem::path& path,
                             const TimeGrid& time, int m,
                             const SpatialGrid& grid, const OmegaMask& mask) {
  std::ifstream in(path);
  if (!in) {
    throw SyncError(ErrorCode::kIoError,
                    "cannot open control file " + path.string());
  }
  ControlSignal u(time, m, grid.nx, mask);
  std::string line;
  if (!std::getline(in, line) || line != "t,component,x,value") {
    throw SyncError(ErrorCode::kParseError,
                    path.string() + ": expected header t,component,x,value");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != 4) {
      throw SyncError(ErrorCode::kParseError, where + ": expected 4 cells");
    }
    double t, x, value;
    int c;
    try {
      t = std::stod(cells[0]);
      c = std::stoi(cells[1]);
      x = std::stod(cells[2]);
      value = std::stod(cells[3]);
    } catch (const std::exception&) {
      throw SyncError(ErrorCode::kParseError, where + ": not a number");
    }
    const long long j = std::llround(t / time.dt) - 1;
    const long long i = std::llround(x / grid.dx) - 1;
    if (j < 0 || j >= time.nt ||
        std::abs(t - time.t(static_cast<int>(j) + 1)) > 1e-9 * time.dt) {
      throw SyncError(ErrorCode::kValidationError,
                      where + ": t is not a step end on the time grid");
    }
    if (i < 0 || i >= grid.nx ||
        std::abs(x - grid.x(static_cast<int>(i))) > 1e-9 * grid.dx) {
      throw SyncError(ErrorCode::kValidationError,
                      where + ": x is not a grid node");
    }
    if (c < 0 || c >= m) {
      throw SyncError(ErrorCode::kValidationError,
                      where + ": component out of range");
    }
    if (mask.mask[i] == 0.0 && value != 0.0) {
      throw SyncError(ErrorCode::kValidationError,
                      where + ": nonzero control outside omega");
    }
    u(static_cast<int>(j), c, static_cast<int>(i)) = value;
  }
  return u;
}

RunReport RunCommand(std::string_view command, const ProblemConfig& config) {
  if (!IsCommand(command)) {
    throw SyncError(ErrorCode::kValidationError,
                    "unknown command '" + std::string(command) + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.command = std::string(command);
  rep.json["command"] = rep.command;
  rep.json["config_hash"] = HexHash(ConfigHash(config));
  rep.json["config"] = ToJson(config);

  const Problem p = Setup(config);
  rep.json["classification"] = ClassificationJson(p.structure);
  try {
    if (command == "simulate") {
      RunSimulate(config, p, rep);
    } else if (command == "min-norm") {
      RunMinNorm(config, p, rep);
    } else if (command == "norm-curve") {
      RunNormCurve(config, p, rep);
    } else if (command == "min-time") {
      RunMinTime(config, p, rep);
    }
  } catch (const SyncError& e) {
    switch (e.code()) {
      case ErrorCode::kNotSynchronizable:
        rep.exit_code = kExitNotSynchronizable;
        if (command == "min-time") {
          rep.json["result"] = {
              {"status", StatusName(MinTimeStatus::kNotSynchronizable)}};
        }
        break;
      case ErrorCode::kNotConverged:
      case ErrorCode::kBracketFailure:
      case ErrorCode::kLinearSolveFailure:
        rep.exit_code = kExitSolverFailure;
        break;
      default:
        throw;
    }
    rep.json["error"] = {{"code", ErrorCodeName(e.code())},
                         {"message", e.what()}};
  }
  rep.json["exit_code"] = rep.exit_code;
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  rep.json["timings"] = {{"wall_seconds", elapsed.count()}};
  return rep;
}

std::vector<std::filesystem::path> WriteOutputs(
    const RunReport& report, const std::filesystem::path& dir,
    const std::vector<std::string>& formats) {
  auto wants = [&](std::string_view f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw SyncError(ErrorCode::kIoError,
                    "cannot create " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path,
                   const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    out.close();
    if (!out) {
      throw SyncError(ErrorCode::kIoError, "cannot write " + path.string());
    }
    written.push_back(path);
  };
  if (wants("json")) write(dir / "report.json", report.json.dump(2) + "\n");
  if (wants("csv")) {
    for (const CsvTable& t : report.tables) {
      write(dir / t.file_name, t.Render());
    }
  }
  return written;
}

}  // namespace syncctl
