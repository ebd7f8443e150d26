#pragma once

// Model configuration read from a JSON file, e.g.
//
// {
//   "d": 2,
//   "potential": {"kind": "sos", "beta": 2.4},
//   "space": {"kind": "window", "radius": 60},
//   "A": [0, 5],
//   "tolerances": {"inner": 1e-13, "outer": 1e-11, "max_iter": 100000, "tail": 1e-12},
//   "seed": 1,
//   "samples": {"trees": 1000, "depth": 3}
// }
//
// A cyclic space {"kind": "cyclic", "q": 5, "radius": 30} puts A in Z_q and
// builds Q on the window of the given radius before folding it mod q.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "treegibbs/gradient.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/seqspace.hpp"
#include "treegibbs/solver.hpp"

namespace treegibbs::cli {

struct PotentialConfig {
  std::string kind = "sos";  // sos | log | psos | identity | custom
  double beta = 0;
  double p = 1;
  std::vector<double> table;  // custom: values on [-L, L]
};

struct SpaceConfig {
  std::string kind = "window";  // window | cyclic
  std::int64_t radius = 0;      // 0: choose from the tail tolerance
  std::int64_t q = 0;
};

struct Tolerances {
  double inner = 1e-13;
  double outer = 1e-11;
  int max_iter = 100000;
  double tail = 1e-12;
};

struct SampleConfig {
  std::size_t trees = 1000;
  int depth = 3;
  std::size_t branches = 100;
  int length = 10000;
  std::size_t deloc_samples = 10000;
  std::vector<int> n_grid{4, 8, 16, 32, 64};
  Element k = 0;
  std::size_t top_cells = 20;
};

struct ModelConfig {
  int d = 2;
  PotentialConfig potential;
  SpaceConfig space;
  std::vector<Element> A;
  Tolerances tol;
  std::uint64_t seed = 1;
  SampleConfig samples;
};

/// Parses and validates; throws InvalidArgument with the offending key.
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);

/// Built-in configuration used when no file is given:
/// SOS, d = 2, beta = 2.4, window radius 60, A = {0, 5}.
ModelConfig default_config();

/// Window radius actually used for the Z-level operator.
std::int64_t window_radius(const ModelConfig& c);

/// Q on the Z window.
TransferOperator base_operator(const ModelConfig& c);

/// The localization problem on the configured space (folded mod q for a
/// cyclic space).
LocalizationProblem make_problem(const ModelConfig& c);

FuzzyOptions fuzzy_options(const ModelConfig& c);

nlohmann::json to_json(const ModelConfig& c);

}  // namespace treegibbs::cli
