#include "syncctl/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "syncctl/errors.h"
#include "syncctl/parallel.h"

namespace syncctl {
namespace {

using Json = nlohmann::json;

[[noreturn]] void Invalid(const std::string& path, const std::string& what) {
  throw SyncError(ErrorCode::kValidationError, path + ": " + what);
}

// Object view that records which keys were consumed and rejects the rest.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Invalid(path_, "expected an object");
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  const Json& Required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) Invalid(Path(key), "required field missing");
    return j_.at(key);
  }

  const Json* Optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void RejectUnknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw SyncError(ErrorCode::kUnknownField,
                        Path(it.key()) + ": unknown field");
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double Number(const Json& j, const std::string& path) {
  if (!j.is_number()) Invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Invalid(path, "expected a finite number");
  return v;
}

int Integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) Invalid(path, "expected an integer");
  return j.get<int>();
}

std::string String(const Json& j, const std::string& path) {
  if (!j.is_string()) Invalid(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> NumberArray(const Json& j, const std::string& path) {
  if (!j.is_array()) Invalid(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void ParseMatrices(const Json& j, ProblemConfig& c) {
  Section s(j, "matrices");
  c.n = Integer(s.Required("n"), "matrices.n");
  c.m = Integer(s.Required("m"), "matrices.m");
  c.a = NumberArray(s.Required("A"), "matrices.A");
  c.b = NumberArray(s.Required("B"), "matrices.B");
  s.RejectUnknown();
  if (c.n < 2) Invalid("matrices.n", "must be >= 2");
  if (c.m < 1) Invalid("matrices.m", "must be >= 1");
  if (c.a.size() != std::size_t(c.n) * c.n) {
    Invalid("matrices.A",
            "expected " + std::to_string(c.n * c.n) + " entries");
  }
  if (c.b.size() != std::size_t(c.n) * c.m) {
    Invalid("matrices.B",
            "expected " + std::to_string(c.n * c.m) + " entries");
  }
}

void ParseDomain(const Json& j, ProblemConfig& c) {
  Section s(j, "domain");
  c.length = Number(s.Required("length"), "domain.length");
  c.nx = Integer(s.Required("nx"), "domain.nx");
  s.RejectUnknown();
  if (!(c.length > 0.0)) Invalid("domain.length", "must be > 0");
  if (c.nx < 3) Invalid("domain.nx", "must be >= 3");
}

void ParseOmega(const Json& j, ProblemConfig& c) {
  if (!j.is_array() || j.empty()) {
    Invalid("omega", "expected a non-empty array of [a, b] intervals");
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "omega[" + std::to_string(i) + "]";
    const std::vector<double> ab = NumberArray(j[i], path);
    if (ab.size() != 2) Invalid(path, "expected [a, b]");
    if (!(0.0 <= ab[0] && ab[0] < ab[1] && ab[1] <= c.length)) {
      Invalid(path, "need 0 <= a < b <= domain.length");
    }
    c.omega.push_back({ab[0], ab[1]});
  }
}

void ParseTime(const Json& j, ProblemConfig& c) {
  Section s(j, "time");
  if (const Json* v = s.Optional("T")) {
    c.horizon = Number(*v, "time.T");
    if (!(*c.horizon > 0.0)) Invalid("time.T", "must be > 0");
  }
  if (const Json* v = s.Optional("nt_ref")) {
    c.nt_ref = Integer(*v, "time.nt_ref");
    if (c.nt_ref < 1) Invalid("time.nt_ref", "must be >= 1");
  }
  if (const Json* v = s.Optional("post_horizon")) {
    c.post_horizon = Number(*v, "time.post_horizon");
    if (c.post_horizon < 0.0) Invalid("time.post_horizon", "must be >= 0");
  }
  if (const Json* v = s.Optional("T_values")) {
    c.t_values = NumberArray(*v, "time.T_values");
    for (std::size_t i = 0; i < c.t_values.size(); ++i) {
      if (!(c.t_values[i] > 0.0) ||
          (i > 0 && !(c.t_values[i] > c.t_values[i - 1]))) {
        Invalid("time.T_values", "must be positive and strictly ascending");
      }
    }
  }
  s.RejectUnknown();
}

void ParseInitialState(const Json& j, ProblemConfig& c) {
  if (!j.is_array()) Invalid("initial_state", "expected an array");
  if (j.size() != std::size_t(c.n)) {
    Invalid("initial_state",
            "expected " + std::to_string(c.n) + " components");
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "initial_state[" + std::to_string(i) + "]";
    Section s(j[i], path);
    const std::string type = String(s.Required("type"), path + ".type");
    InitialComponent comp;
    if (type == "sin") {
      comp.kind = InitialComponent::Kind::kSin;
      comp.mode = Integer(s.Required("k"), path + ".k");
      if (comp.mode < 1) Invalid(path + ".k", "must be >= 1");
    } else if (type == "const") {
      comp.kind = InitialComponent::Kind::kConst;
      comp.value = Number(s.Required("c"), path + ".c");
    } else if (type == "values") {
      comp.kind = InitialComponent::Kind::kValues;
      comp.file = String(s.Required("file"), path + ".file");
    } else {
      Invalid(path + ".type", "expected one of sin, const, values");
    }
    s.RejectUnknown();
    c.initial_state.push_back(std::move(comp));
  }
}

void ParseSolver(const Json& j, ProblemConfig& c) {
  Section s(j, "solver");
  if (const Json* v = s.Optional("cg_tol")) {
    c.cg_tol = Number(*v, "solver.cg_tol");
    if (!(c.cg_tol > 0.0 && c.cg_tol < 1.0)) {
      Invalid("solver.cg_tol", "must lie in (0, 1)");
    }
  }
  if (const Json* v = s.Optional("cg_max_iter")) {
    c.cg_max_iter = Integer(*v, "solver.cg_max_iter");
    if (c.cg_max_iter < 1) Invalid("solver.cg_max_iter", "must be >= 1");
  }
  if (const Json* v = s.Optional("eps_reg")) {
    c.eps_reg = Number(*v, "solver.eps_reg");
    if (c.eps_reg < 0.0) Invalid("solver.eps_reg", "must be >= 0");
  }
  if (const Json* v = s.Optional("rq_cutoff")) {
    c.rq_cutoff = Number(*v, "solver.rq_cutoff");
    if (c.rq_cutoff < 0.0) Invalid("solver.rq_cutoff", "must be >= 0");
  }
  if (const Json* v = s.Optional("target_tol")) {
    c.target_tol = Number(*v, "solver.target_tol");
    if (!(*c.target_tol > 0.0)) Invalid("solver.target_tol", "must be > 0");
  }
  s.RejectUnknown();
}

void ParseMinTime(const Json& j, ProblemConfig& c) {
  Section s(j, "mintime");
  if (const Json* v = s.Optional("M")) {
    c.budget = Number(*v, "mintime.M");
    if (!(*c.budget > 0.0)) Invalid("mintime.M", "must be > 0");
  }
  if (const Json* v = s.Optional("T_lo")) c.t_lo = Number(*v, "mintime.T_lo");
  if (const Json* v = s.Optional("T_hi")) c.t_hi = Number(*v, "mintime.T_hi");
  if (const Json* v = s.Optional("bisect_tol")) {
    c.bisect_tol = Number(*v, "mintime.bisect_tol");
  }
  if (const Json* v = s.Optional("T_max")) {
    c.t_max = Number(*v, "mintime.T_max");
  }
  s.RejectUnknown();
  if (!(c.t_lo > 0.0 && c.t_lo < c.t_hi && c.t_hi <= c.t_max)) {
    Invalid("mintime", "need 0 < T_lo < T_hi <= T_max");
  }
  if (!(c.bisect_tol > 0.0 && c.bisect_tol < 1.0)) {
    Invalid("mintime.bisect_tol", "must lie in (0, 1)");
  }
}

void ParseSimulate(const Json& j, ProblemConfig& c) {
  Section s(j, "simulate");
  if (const Json* v = s.Optional("control_file")) {
    c.control_file = String(*v, "simulate.control_file");
  }
  s.RejectUnknown();
}

void ParseOutputs(const Json& j, ProblemConfig& c) {
  Section s(j, "outputs");
  if (const Json* v = s.Optional("dir")) c.output_dir = String(*v, "outputs.dir");
  if (const Json* v = s.Optional("formats")) {
    if (!v->is_array()) Invalid("outputs.formats", "expected an array");
    c.formats.clear();
    for (const Json& f : *v) {
      const std::string name = String(f, "outputs.formats");
      if (name != "json" && name != "csv") {
        Invalid("outputs.formats", "unknown format '" + name + "'");
      }
      c.formats.push_back(name);
    }
  }
  if (const Json* v = s.Optional("snapshot_stride")) {
    c.snapshot_stride = Integer(*v, "outputs.snapshot_stride");
    if (c.snapshot_stride < 1) {
      Invalid("outputs.snapshot_stride", "must be >= 1");
    }
  }
  s.RejectUnknown();
}

}  // namespace

bool ProblemConfig::operator==(const ProblemConfig& o) const {
  auto same_intervals = [](const std::vector<Interval>& x,
                           const std::vector<Interval>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].a != y[i].a || x[i].b != y[i].b) return false;
    }
    return true;
  };
  return n == o.n && m == o.m && a == o.a && b == o.b &&
         length == o.length && nx == o.nx &&
         same_intervals(omega, o.omega) && horizon == o.horizon &&
         nt_ref == o.nt_ref && post_horizon == o.post_horizon &&
         t_values == o.t_values && initial_state == o.initial_state &&
         cg_tol == o.cg_tol && cg_max_iter == o.cg_max_iter &&
         eps_reg == o.eps_reg && rq_cutoff == o.rq_cutoff &&
         target_tol == o.target_tol && budget == o.budget &&
         t_lo == o.t_lo && t_hi == o.t_hi && bisect_tol == o.bisect_tol &&
         t_max == o.t_max && control_file == o.control_file &&
         output_dir == o.output_dir && formats == o.formats &&
         snapshot_stride == o.snapshot_stride;
}

ProblemConfig ParseConfig(const std::string& text,
                          const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SyncError(ErrorCode::kParseError,
                    "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  ProblemConfig c;
  c.base_dir = base_dir;
  Section s(root, "");
  ParseMatrices(s.Required("matrices"), c);
  ParseDomain(s.Required("domain"), c);
  ParseOmega(s.Required("omega"), c);
  if (const Json* v = s.Optional("time")) ParseTime(*v, c);
  ParseInitialState(s.Required("initial_state"), c);
  if (const Json* v = s.Optional("solver")) ParseSolver(*v, c);
  if (const Json* v = s.Optional("mintime")) ParseMinTime(*v, c);
  if (const Json* v = s.Optional("simulate")) ParseSimulate(*v, c);
  if (const Json* v = s.Optional("outputs")) ParseOutputs(*v, c);
  s.RejectUnknown();
  return c;
}

ProblemConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SyncError(ErrorCode::kIoError,
                    "cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), path.parent_path());
}

nlohmann::ordered_json ToJson(const ProblemConfig& c) {
  nlohmann::ordered_json j;
  j["matrices"] = {{"n", c.n}, {"m", c.m}, {"A", c.a}, {"B", c.b}};
  j["domain"] = {{"length", c.length}, {"nx", c.nx}};
  nlohmann::ordered_json omega = nlohmann::ordered_json::array();
  for (const Interval& iv : c.omega) omega.push_back({iv.a, iv.b});
  j["omega"] = omega;
  nlohmann::ordered_json time;
  if (c.horizon) time["T"] = *c.horizon;
  time["nt_ref"] = c.nt_ref;
  time["post_horizon"] = c.post_horizon;
  time["T_values"] = c.t_values;
  j["time"] = time;
  nlohmann::ordered_json init = nlohmann::ordered_json::array();
  for (const InitialComponent& comp : c.initial_state) {
    switch (comp.kind) {
      case InitialComponent::Kind::kSin:
        init.push_back({{"type", "sin"}, {"k", comp.mode}});
        break;
      case InitialComponent::Kind::kConst:
        init.push_back({{"type", "const"}, {"c", comp.value}});
        break;
      case InitialComponent::Kind::kValues:
        init.push_back({{"type", "values"}, {"file", comp.file}});
        break;
    }
  }
  j["initial_state"] = init;
  nlohmann::ordered_json solver = {{"cg_tol", c.cg_tol},
                                   {"cg_max_iter", c.cg_max_iter},
                                   {"eps_reg", c.eps_reg},
                                   {"rq_cutoff", c.rq_cutoff}};
  if (c.target_tol) solver["target_tol"] = *c.target_tol;
  j["solver"] = solver;
  nlohmann::ordered_json mintime;
  if (c.budget) mintime["M"] = *c.budget;
  mintime["T_lo"] = c.t_lo;
  mintime["T_hi"] = c.t_hi;
  mintime["bisect_tol"] = c.bisect_tol;
  mintime["T_max"] = c.t_max;
  j["mintime"] = mintime;
  nlohmann::ordered_json simulate = nlohmann::ordered_json::object();
  if (c.control_file) simulate["control_file"] = *c.control_file;
  j["simulate"] = simulate;
  j["outputs"] = {{"dir", c.output_dir},
                  {"formats", c.formats},
                  {"snapshot_stride", c.snapshot_stride}};
  return j;
}

std::uint64_t ConfigHash(const ProblemConfig& config) {
  const std::string text = ToJson(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

CouplingPair MakeCouplingPair(const ProblemConfig& c) {
  CouplingPair pair{Matrix(c.n, c.n), Matrix(c.n, c.m)};
  for (int i = 0; i < c.n; ++i) {
    for (int j = 0; j < c.n; ++j) pair.a(i, j) = c.a[i * c.n + j];
    for (int j = 0; j < c.m; ++j) pair.b(i, j) = c.b[i * c.m + j];
  }
  return pair;
}

SpatialGrid MakeGrid(const ProblemConfig& c) {
  return BuildGrid(c.length, c.nx);
}

OmegaMask MakeMask(const ProblemConfig& c, const SpatialGrid& grid) {
  return MakeOmegaMask(grid, c.omega);
}

StateField MakeInitialState(const ProblemConfig& c, const SpatialGrid& grid) {
  StateField y0(c.n, grid.nx);
  for (int comp = 0; comp < c.n; ++comp) {
    const InitialComponent& spec = c.initial_state.at(comp);
    auto values = y0.component(comp);
    switch (spec.kind) {
      case InitialComponent::Kind::kSin:
        for (int i = 0; i < grid.nx; ++i) {
          values[i] = std::sin(spec.mode * M_PI * grid.x(i) / grid.length);
        }
        break;
      case InitialComponent::Kind::kConst:
        std::fill(values.begin(), values.end(), spec.value);
        break;
      case InitialComponent::Kind::kValues: {
        const std::filesystem::path path = c.base_dir / spec.file;
        std::ifstream in(path);
        if (!in) {
          throw SyncError(ErrorCode::kIoError,
                          "cannot open initial-state file " + path.string());
        }
        std::vector<double> read;
        std::string token;
        while (in >> token) {
          std::stringstream parts(token);
          std::string item;
          while (std::getline(parts, item, ',')) {
            if (item.empty()) continue;
            try {
              read.push_back(std::stod(item));
            } catch (const std::exception&) {
              throw SyncError(ErrorCode::kParseError,
                              path.string() + ": not a number '" + item + "'");
            }
          }
        }
        if (read.size() != std::size_t(grid.nx)) {
          Invalid("initial_state[" + std::to_string(comp) + "].file",
                  "expected " + std::to_string(grid.nx) + " values, got " +
                      std::to_string(read.size()));
        }
        std::copy(read.begin(), read.end(), values.begin());
        break;
      }
    }
  }
  return y0;
}

HumOptions MakeHumOptions(const ProblemConfig& c) {
  HumOptions o;
  o.cg_tol = c.cg_tol;
  o.cg_max_iter = c.cg_max_iter;
  o.eps_reg = c.eps_reg;
  o.rq_cutoff = c.rq_cutoff;
  o.target_tol = c.target_tol;
  o.nt_ref = c.nt_ref;
  o.threads = DefaultThreadCount();
  return o;
}

MinTimeOptions MakeMinTimeOptions(const ProblemConfig& c) {
  return MinTimeOptions{c.t_lo, c.t_hi, c.bisect_tol, c.t_max};
}

}  // namespace syncctl
