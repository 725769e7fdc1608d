#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topo/algebra.hpp"
#include "topo/expr.hpp"
#include "topo/grid.hpp"

namespace topo {

/// How a check is judged.
///   convergence: observed order >= scheme order - 0.2 and finest L-inf <= 1e-3,
///                or finest L-inf below the zero floor (order reported as null)
///   exact:       L-inf <= 1e-10 on every level
///   algebraic:   L-inf <= 1e-12 on every level
enum class CheckMode { convergence, exact, algebraic };

struct Tolerance {
  double linf = 0;
  double min_order = 0;  // convergence only
  double zero_floor = 0; // convergence only
};

struct GeneratorSpec {
  std::string generator;
  Expression param;
};

struct ScenarioSpec {
  std::string name;
  std::string description;
  SignatureConfig config;
  std::vector<std::string> coordinates;
  std::map<std::string, double> constants;
  std::vector<AxisSpec> axes;
  std::vector<std::vector<Expression>> frame;  // frame[a][mu] = e^a_mu
  std::vector<Expression> gauge_potential;     // empty: A = 0
  struct Polar {
    Expression phi;
    std::optional<Expression> angle;
    std::vector<GeneratorSpec> L;
  };
  std::optional<Polar> polar;
  double m = 1.0;
  double q = 1.0;
  std::vector<std::string> checks;
  std::vector<std::string> diagnostics;
  std::map<std::string, Expression> expected;  // e.g. ricci_scalar
  std::map<std::string, Tolerance> tolerances;  // per-check overrides
  int scheme_order = 2;
  int refinements = 1;
  nlohmann::json source;  // the parsed file, for hashing
};

/// Parses and validates a scenario document. Errors name the offending field.
ScenarioSpec parse_scenario(const nlohmann::json& doc);
ScenarioSpec load_scenario(const std::string& path);

struct RunOptions {
  std::optional<std::size_t> grid;  // replaces every axis count
  std::optional<int> order;
  std::optional<int> refinements;
  std::optional<std::string> fields_dir;
  Exec exec;
  bool timings = false;  // adds wall-clock runtimes (breaks byte-identical output)
};

struct LevelStats {
  std::vector<std::size_t> grid;
  double linf = 0;
  double l2 = 0;
};

struct CheckRecord {
  std::string scenario;
  std::string check;
  std::string kind;
  std::string anchor;
  CheckMode mode = CheckMode::convergence;
  bool gating = true;
  int order = 2;
  std::vector<LevelStats> levels;
  std::optional<double> observed_order;
  Tolerance tolerance;
  bool passed = false;
  std::optional<std::string> error;
  double runtime = 0;
};

struct VerificationReport {
  std::string scenario;
  std::string config;
  std::string scenario_hash;
  std::string conventions_hash;
  int order = 2;
  int refinements = 1;
  std::vector<CheckRecord> records;
  bool passed() const;
};

/// Names of all known checks, in catalogue order.
std::vector<std::string> check_names();
/// True if the check applies to the configuration.
bool check_applies(const std::string& check, Config c);

VerificationReport run_suite(const ScenarioSpec& spec, const RunOptions& opts = {});

nlohmann::json report_to_json(const VerificationReport& r, bool timings = false);

/// Effective scenario hash: the source document plus the option overrides.
std::string scenario_hash(const ScenarioSpec& spec, const RunOptions& opts);

}  // namespace topo
