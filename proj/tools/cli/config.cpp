#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "treegibbs/error.hpp"

namespace treegibbs::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw InvalidArgument("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("bad value for '" + std::string(key) + "' in " + where);
  }
}

const json& object_at(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_object()) throw InvalidArgument(std::string("'") + key + "' must be an object");
  return v;
}

TransferOperator::Family family_of(const std::string& kind) {
  if (kind == "sos") return TransferOperator::Family::SOS;
  if (kind == "log") return TransferOperator::Family::Log;
  if (kind == "psos") return TransferOperator::Family::PSOS;
  return TransferOperator::Family::Custom;
}

}  // namespace

ModelConfig parse_config(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(j, {"d", "potential", "space", "A", "tolerances", "seed", "samples"},
                 "config");
  ModelConfig c;
  c.d = get<int>(j, "d", "config", c.d);
  if (c.d < 2) throw InvalidArgument("d must be >= 2");

  if (!j.contains("potential")) throw InvalidArgument("config needs 'potential'");
  {
    const json& p = object_at(j, "potential");
    reject_unknown(p, {"kind", "beta", "p", "table"}, "potential");
    c.potential.kind = get<std::string>(p, "kind", "potential", "sos");
    c.potential.beta = get<double>(p, "beta", "potential", 0.0);
    c.potential.p = get<double>(p, "p", "potential", 1.0);
    c.potential.table = get<std::vector<double>>(p, "table", "potential", {});
    const std::string& k = c.potential.kind;
    if (k != "sos" && k != "log" && k != "psos" && k != "identity" && k != "custom")
      throw InvalidArgument("potential.kind must be sos, log, psos, identity or custom");
    if ((k == "sos" || k == "log" || k == "psos") && !(c.potential.beta > 0))
      throw InvalidArgument("potential.beta must be positive");
    if (k == "psos" && !(c.potential.p > 0))
      throw InvalidArgument("potential.p must be positive");
    if (k == "custom" && c.potential.table.size() % 2 == 0)
      throw InvalidArgument("potential.table must have odd length 2L+1");
  }

  if (j.contains("space")) {
    const json& s = object_at(j, "space");
    reject_unknown(s, {"kind", "radius", "q"}, "space");
    c.space.kind = get<std::string>(s, "kind", "space", "window");
    c.space.radius = get<std::int64_t>(s, "radius", "space", 0);
    c.space.q = get<std::int64_t>(s, "q", "space", 0);
    if (c.space.kind != "window" && c.space.kind != "cyclic")
      throw InvalidArgument("space.kind must be window or cyclic");
    if (c.space.radius < 0) throw InvalidArgument("space.radius must be >= 0");
    if (c.space.kind == "cyclic" && c.space.q < 2)
      throw InvalidArgument("space.q must be >= 2 for a cyclic space");
  }
  if (c.potential.kind == "custom") {
    const auto L = static_cast<std::int64_t>(c.potential.table.size() / 2);
    if (c.space.radius != 0 && c.space.radius != L)
      throw InvalidArgument("space.radius disagrees with the custom table length");
    c.space.radius = L;
  }

  c.A = get<std::vector<Element>>(j, "A", "config", {});
  if (c.A.empty()) throw InvalidArgument("config needs a nonempty 'A'");

  if (j.contains("tolerances")) {
    const json& t = object_at(j, "tolerances");
    reject_unknown(t, {"inner", "outer", "max_iter", "tail"}, "tolerances");
    c.tol.inner = get<double>(t, "inner", "tolerances", c.tol.inner);
    c.tol.outer = get<double>(t, "outer", "tolerances", c.tol.outer);
    c.tol.max_iter = get<int>(t, "max_iter", "tolerances", c.tol.max_iter);
    c.tol.tail = get<double>(t, "tail", "tolerances", c.tol.tail);
    if (!(c.tol.inner > 0) || !(c.tol.outer > 0) || !(c.tol.tail > 0) ||
        c.tol.max_iter < 1)
      throw InvalidArgument("tolerances must be positive");
  }

  c.seed = get<std::uint64_t>(j, "seed", "config", c.seed);

  if (j.contains("samples")) {
    const json& s = object_at(j, "samples");
    reject_unknown(s, {"trees", "depth", "branches", "length", "deloc_samples",
                       "n_grid", "k", "top_cells"},
                   "samples");
    auto& m = c.samples;
    m.trees = get<std::size_t>(s, "trees", "samples", m.trees);
    m.depth = get<int>(s, "depth", "samples", m.depth);
    m.branches = get<std::size_t>(s, "branches", "samples", m.branches);
    m.length = get<int>(s, "length", "samples", m.length);
    m.deloc_samples = get<std::size_t>(s, "deloc_samples", "samples", m.deloc_samples);
    m.n_grid = get<std::vector<int>>(s, "n_grid", "samples", m.n_grid);
    m.k = get<Element>(s, "k", "samples", m.k);
    m.top_cells = get<std::size_t>(s, "top_cells", "samples", m.top_cells);
    if (m.depth < 0 || m.length < 1 || m.trees < 1 || m.branches < 1 ||
        m.deloc_samples < 1)
      throw InvalidArgument("sample counts must be positive");
    if (!std::is_sorted(m.n_grid.begin(), m.n_grid.end()) || m.n_grid.empty() ||
        m.n_grid.front() < 1)
      throw InvalidArgument("samples.n_grid must be increasing and positive");
  }
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

ModelConfig default_config() {
  ModelConfig c;
  c.potential.kind = "sos";
  c.potential.beta = 2.4;
  c.space.radius = 60;
  c.A = {0, 5};
  return c;
}

std::int64_t window_radius(const ModelConfig& c) {
  if (c.space.radius > 0) return c.space.radius;
  const auto& k = c.potential.kind;
  if (k == "identity") {
    std::int64_t r = 1;
    if (c.space.kind == "window")
      for (Element a : c.A) r = std::max<std::int64_t>(r, a < 0 ? -a : a);
    return r;
  }
  const std::vector<Element> none;
  const std::span<const Element> A =
      c.space.kind == "window" ? std::span<const Element>(c.A) : std::span<const Element>(none);
  return default_window_radius(family_of(k), c.potential.beta, c.potential.p, c.d, A,
                               c.tol.tail);
}

TransferOperator base_operator(const ModelConfig& c) {
  const GroupSpace w = GroupSpace::window(window_radius(c));
  const auto& k = c.potential.kind;
  if (k == "sos") return TransferOperator::sos(w, c.potential.beta);
  if (k == "log") return TransferOperator::log(w, c.potential.beta);
  if (k == "psos") return TransferOperator::psos(w, c.potential.beta, c.potential.p);
  if (k == "identity") return TransferOperator::identity(w);
  return TransferOperator::custom(SeqFn(w, c.potential.table));
}

LocalizationProblem make_problem(const ModelConfig& c) {
  TransferOperator Q = base_operator(c);
  if (c.space.kind == "cyclic") Q = fuzzy_operator(Q, c.space.q, c.tol.tail).op;
  std::vector<Element> A = c.A;
  for (Element& a : A) a = Q.space().reduce(a);
  return LocalizationProblem{c.d, Q, A, c.tol.inner, c.tol.outer, c.tol.max_iter,
                             c.tol.tail};
}

FuzzyOptions fuzzy_options(const ModelConfig& c) {
  return FuzzyOptions{c.tol.inner, c.tol.outer, c.tol.max_iter, c.tol.tail};
}

nlohmann::json to_json(const ModelConfig& c) {
  json j;
  j["d"] = c.d;
  j["potential"] = {{"kind", c.potential.kind}, {"beta", c.potential.beta},
                    {"p", c.potential.p}};
  if (!c.potential.table.empty()) j["potential"]["table"] = c.potential.table;
  j["space"] = {{"kind", c.space.kind}, {"radius", window_radius(c)}};
  if (c.space.kind == "cyclic") j["space"]["q"] = c.space.q;
  j["A"] = c.A;
  j["tolerances"] = {{"inner", c.tol.inner}, {"outer", c.tol.outer},
                     {"max_iter", c.tol.max_iter}, {"tail", c.tol.tail}};
  j["seed"] = c.seed;
  const auto& s = c.samples;
  j["samples"] = {{"trees", s.trees},       {"depth", s.depth},
                  {"branches", s.branches}, {"length", s.length},
                  {"deloc_samples", s.deloc_samples}, {"n_grid", s.n_grid},
                  {"k", s.k},               {"top_cells", s.top_cells}};
  return j;
}

}  // namespace treegibbs::cli
