#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"
#include "treegibbs/gibbs.hpp"
#include "treegibbs/gradient.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/random.hpp"
#include "treegibbs/solver.hpp"

namespace treegibbs::cli {
namespace {

using nlohmann::json;

// Sub-streams of the master seed used by the commands.
constexpr std::uint64_t kTreeStream = 1;
constexpr std::uint64_t kDelocStream = 2;
constexpr std::uint64_t kBranchStream = 3;
constexpr std::uint64_t kDlrStream = 4;

constexpr double kReversibilityTol = 1e-12;
constexpr double kFormulaTol = 1e-10;
constexpr double kDlrTol = 1e-8;
constexpr double kMarginalizationTol = 1e-8;

// Shortest round-trip representation; locale independent.
std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json envelope(const std::string& command) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

json checks_json(const std::vector<BoundCheck>& v) {
  json a = json::array();
  for (const auto& c : v)
    a.push_back({{"name", c.name}, {"measured", num(c.measured)},
                 {"bound", num(c.bound)}, {"pass", c.pass}});
  return a;
}

json elements_json(const GroupSpace& s) {
  json a = json::array();
  for (std::size_t k = 0; k < s.size(); ++k) a.push_back(s.element(k));
  return a;
}

json values_json(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void bound_rows(std::ostringstream& os, const std::string& source,
                const std::vector<BoundCheck>& v) {
  for (const auto& c : v)
    os << source << ",\"" << c.name << "\"," << fmt(c.measured) << ','
       << fmt(c.bound) << ',' << (c.pass ? 1 : 0) << '\n';
}

struct Instance {
  LocalizationProblem problem;
  BoundaryLawSolution sol;
  MarkovChainGibbs chain;
  TheoremReport report;
};

Instance solve_instance(const ModelConfig& c) {
  LocalizationProblem problem = make_problem(c);
  BoundaryLawSolution sol = solve(problem);
  MarkovChainGibbs chain = MarkovChainGibbs::from_boundary_law(sol, problem.Q);
  TheoremReport report = verify_theorem_bounds(chain, sol.A, sol.epsilon);
  return {std::move(problem), std::move(sol), std::move(chain), std::move(report)};
}

// Measure identities of the chain as bound records.
std::vector<BoundCheck> chain_checks(const MarkovChainGibbs& chain) {
  std::vector<BoundCheck> out;
  const double rs = row_sum_defect(chain), rt = row_sum_tolerance(chain);
  out.push_back({"row sums equal 1", rs, rt, rs <= rt});
  const double rv = reversibility_defect(chain);
  out.push_back({"reversibility", rv, kReversibilityTol, rv < kReversibilityTol});
  const double fd = transition_formula_defect(chain);
  out.push_back({"transition formula from marginal", fd, kFormulaTol, fd < kFormulaTol});
  double min_delta = kInfinity;
  const auto delta = chain.delta();
  for (Element a : chain.A())
    min_delta = std::min(min_delta, delta[chain.space().index(a)]);
  // Laziness is only asserted where the diagonal dominates.
  const bool applies = min_delta > 0.5;
  out.push_back({"lazy on A (argmax of row is the diagonal)", min_delta, 0.5,
                 !applies || lazy_on_A(chain)});
  double pi_sum = 0.0, pi_min = kInfinity;
  for (double p : chain.pi().values()) {
    pi_sum += p;
    pi_min = std::min(pi_min, p);
  }
  out.push_back({"pi sums to 1", std::abs(pi_sum - 1.0), 1e-12,
                 std::abs(pi_sum - 1.0) <= 1e-12 && pi_min >= 0.0});
  return out;
}

bool all_pass(const std::vector<BoundCheck>& v) {
  return std::all_of(v.begin(), v.end(), [](const BoundCheck& c) { return c.pass; });
}

json solution_json(const BoundaryLawSolution& s) {
  const auto& k = s.constants;
  return {{"d", s.d},
          {"A", s.A},
          {"space", s.xbar.space().describe()},
          {"elements", elements_json(s.xbar.space())},
          {"xbar", values_json(s.xbar.values())},
          {"epsilon", num(s.epsilon)},
          {"deviation",
           {{"exponent", num(s.deviation.exponent)},
            {"windowed", num(s.deviation.windowed)},
            {"tail", num(s.deviation.tail)},
            {"value", num(s.deviation.value)},
            {"closed_form", s.deviation.closed_form ? num(*s.deviation.closed_form)
                                                    : json(nullptr)}}},
          {"constants",
           {{"lambda", num(k.lambda)}, {"mu", num(k.mu)}, {"rho", num(k.rho)},
            {"eta", num(k.eta)}, {"theta", num(k.theta)}, {"c1", num(k.c1)},
            {"c2", num(k.c2)}, {"c3", num(k.c3)}, {"c4", num(k.c4)},
            {"c5", num(k.c5)}, {"c6", num(k.c6)}, {"c7", num(k.c7)}}},
          {"r_q", num(s.r_q)},
          {"residual", num(s.residual)},
          {"outer_iterations", s.outer_iterations},
          {"inner_iterations", s.inner_iterations},
          {"bracket_width", num(s.bracket_width)},
          {"outer_residual", num(s.outer_residual)},
          {"max_inner_ratio", num(s.max_inner_ratio)},
          {"contraction_bound", num(s.contraction_bound)},
          {"checks", checks_json(s.checks)}};
}

json chain_json(const MarkovChainGibbs& c) {
  return {{"space", c.space().describe()},
          {"elements", elements_json(c.space())},
          {"pi", values_json(c.pi().values())},
          {"P", values_json(c.P())},
          {"delta", values_json(c.delta())}};
}

json report_json(const TheoremReport& r) {
  return {{"epsilon", num(r.epsilon)}, {"n", r.n}, {"bounds", checks_json(r.bounds)},
          {"pass", r.all_pass()}};
}

std::string threshold_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

ModelConfig resolve_config(const GlobalOptions& g, bool fuzzy_default) {
  ModelConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else {
    c = default_config();
    if (fuzzy_default) {
      c.space = {"cyclic", 30, 5};
      c.A = {0, 1};
    }
  }
  if (g.seed) c.seed = *g.seed;
  return c;
}

CommandResult cmd_thresholds(const ThresholdOptions& t, const GlobalOptions& g) {
  if (t.model != "sos" && t.model != "log" && t.model != "both")
    throw InvalidArgument("--model must be sos, log or both");
  for (int d : t.d)
    if (d < 2) throw InvalidArgument("every d must be >= 2");
  for (int n : t.n)
    if (n < 1) throw InvalidArgument("every n must be >= 1");
  std::vector<std::string> models;
  if (t.model != "log") models.push_back("sos");
  if (t.model != "sos") models.push_back("log");

  std::ostringstream text, csv;
  json j = envelope("thresholds");
  j["tables"] = json::array();
  csv << "model,d,n,beta\n";
  for (const auto& m : models) {
    text << (m == "sos" ? "SOS" : "Log") << " threshold beta(d,n)\n";
    text << "   d \\ n";
    for (int n : t.n) {
      char cell[16];
      std::snprintf(cell, sizeof cell, "%8d", n);
      text << cell;
    }
    text << '\n';
    json rows = json::array();
    for (int d : t.d) {
      char head[16];
      std::snprintf(head, sizeof head, "%4d    ", d);
      text << head;
      for (int n : t.n) {
        const double b = m == "sos" ? sos_threshold(d, n) : log_threshold(d, n);
        char cell[32];
        std::snprintf(cell, sizeof cell, "%8s", threshold_cell(b).c_str());
        text << cell;
        csv << m << ',' << d << ',' << n << ',' << threshold_cell(b) << '\n';
        rows.push_back({{"d", d}, {"n", n}, {"beta", num(b)}});
      }
      text << '\n';
    }
    text << '\n';
    j["tables"].push_back({{"model", m}, {"entries", rows}});
  }
  CommandResult r;
  r.files.push_back({"thresholds.txt", text.str()});
  if (g.format == "csv")
    r.files.push_back({"thresholds.csv", csv.str()});
  else
    r.files.push_back({"thresholds.json", dump(j)});
  r.primary = 1;
  return r;
}

CommandResult cmd_solve(const GlobalOptions& g) {
  const ModelConfig c = resolve_config(g, false);
  const Instance in = solve_instance(c);
  const auto cc = chain_checks(in.chain);
  const bool pass = in.sol.all_pass() && in.report.all_pass() && all_pass(cc);

  CommandResult r;
  r.exit_code = pass ? kOk : kBoundFailure;
  if (g.format == "csv") {
    std::ostringstream sol, trans, bounds;
    sol << "element,xbar,pi,delta\n";
    const auto delta = in.chain.delta();
    for (std::size_t k = 0; k < in.chain.size(); ++k)
      sol << in.chain.space().element(k) << ',' << fmt(in.chain.xbar()[k]) << ','
          << fmt(in.chain.pi()[k]) << ',' << fmt(delta[k]) << '\n';
    trans << "i,j,P\n";
    for (std::size_t a = 0; a < in.chain.size(); ++a)
      for (std::size_t b = 0; b < in.chain.size(); ++b)
        trans << in.chain.space().element(a) << ',' << in.chain.space().element(b) << ','
              << fmt(in.chain.P(a, b)) << '\n';
    bounds << "source,name,measured,bound,pass\n";
    bound_rows(bounds, "solver", in.sol.checks);
    bound_rows(bounds, "chain", cc);
    bound_rows(bounds, "theorem", in.report.bounds);
    r.files = {{"solution.csv", sol.str()},
               {"transition.csv", trans.str()},
               {"bounds.csv", bounds.str()}};
  } else {
    json j = envelope("solve");
    j["config"] = to_json(c);
    j["solution"] = solution_json(in.sol);
    j["chain"] = chain_json(in.chain);
    j["chain_checks"] = checks_json(cc);
    j["report"] = report_json(in.report);
    j["pass"] = pass;
    r.files = {{"solve.json", dump(j)}};
  }
  return r;
}

CommandResult cmd_verify(const GlobalOptions& g) {
  const ModelConfig c = resolve_config(g, false);

  std::vector<CheckResult> constants;
  for (int d = 2; d <= 10; ++d)
    for (int n = 1; n <= 50; ++n) {
      auto s = shape_suite(d, n);
      constants.insert(constants.end(), s.begin(), s.end());
    }
  {
    auto s = eta_bounds_suite(2, 10, 1, 50);
    constants.insert(constants.end(), s.begin(), s.end());
  }

  const Instance in = solve_instance(c);
  std::vector<BoundCheck> solver = in.sol.checks;
  std::vector<BoundCheck> gibbs = chain_checks(in.chain);
  for (const auto& b : in.report.bounds) gibbs.push_back(b);

  // Brute-force DLR comparison for one vertex.
  const DlrReport dlr =
      dlr_oracle_check(in.chain, in.sol, 1000000, 20000, stream_seed(c.seed, kDlrStream));
  gibbs.push_back({"DLR single-vertex violation", dlr.max_violation, kDlrTol,
                   dlr.max_violation < kDlrTol});

  // A shifted set A' must give a marginal far from pi_A in total variation.
  {
    const GroupSpace& s = in.problem.space();
    std::vector<Element> shifted;
    bool fits = true;
    for (Element a : in.sol.A) {
      const Element b = s.is_cyclic() ? s.add(a, 1) : a + 1;
      fits = fits && s.contains(b);
      shifted.push_back(b);
    }
    if (!fits)
      for (Element& b : shifted) b -= 2;
    LocalizationProblem p2 = in.problem;
    p2.A = shifted;
    const BoundaryLawSolution sol2 = solve(p2);
    const MarkovChainGibbs ch2 = MarkovChainGibbs::from_boundary_law(sol2, p2.Q);
    double tv = 0.0;
    for (std::size_t k = 0; k < ch2.size(); ++k)
      tv += std::abs(in.chain.pi()[k] - ch2.pi()[k]);
    tv *= 0.5;
    auto min_on = [&](const MarkovChainGibbs& ch, std::span<const Element> A) {
      double m = kInfinity;
      for (Element a : A) m = std::min(m, ch.pi()[s.index(a)]);
      return m;
    };
    const double theta = in.sol.constants.theta;
    const double gap = min_on(in.chain, in.sol.A) - theta * min_on(ch2, sol2.A);
    gibbs.push_back({"total variation between pi_A and pi_A'", tv, gap,
                     gap > 0.0 && tv > gap});
  }

  bool pass = all_pass(solver) && all_pass(gibbs);
  for (const auto& k : constants) pass = pass && k.pass;

  CommandResult r;
  r.exit_code = pass ? kOk : kBoundFailure;
  if (g.format == "csv") {
    std::ostringstream os;
    os << "suite,name,measured,bound,pass\n";
    for (const auto& k : constants)
      os << "constants,\"" << k.name << "\"," << fmt(k.worst) << ",," << (k.pass ? 1 : 0)
         << '\n';
    bound_rows(os, "solver", solver);
    bound_rows(os, "gibbs", gibbs);
    r.files = {{"verify.csv", os.str()}};
  } else {
    json j = envelope("verify");
    j["config"] = to_json(c);
    json cs = json::array();
    for (const auto& k : constants)
      cs.push_back({{"name", k.name}, {"pass", k.pass}, {"worst", num(k.worst)},
                    {"detail", k.detail}});
    j["suites"] = {{"constants", cs}, {"solver", checks_json(solver)},
                   {"gibbs", checks_json(gibbs)}};
    j["dlr"] = {{"max_violation", num(dlr.max_violation)},
                {"chain_violation", num(dlr.chain_violation)},
                {"finite_violation", num(dlr.finite_violation)},
                {"configurations", dlr.configurations},
                {"skipped", dlr.skipped},
                {"exhaustive", dlr.exhaustive}};
    j["pass"] = pass;
    r.files = {{"verify.json", dump(j)}};
  }
  return r;
}

CommandResult cmd_sample(const GlobalOptions& g) {
  const ModelConfig c = resolve_config(g, false);
  const Instance in = solve_instance(c);
  const auto& s = c.samples;
  const auto trees =
      sample_trees(in.chain, s.depth, s.trees, stream_seed(c.seed, kTreeStream));
  const SeqFn emp = empirical_marginal(in.chain.space(), trees);
  const auto se = tree_fraction_stderr(in.chain, s.depth, s.trees);

  std::ostringstream samples;
  write_samples_csv(samples, trees);

  CommandResult r;
  r.files.push_back({"samples.csv", samples.str()});
  if (g.format == "csv") {
    std::ostringstream os;
    os << "element,pi,empirical,se\n";
    for (std::size_t k = 0; k < emp.size(); ++k)
      os << in.chain.space().element(k) << ',' << fmt(in.chain.pi()[k]) << ','
         << fmt(emp[k]) << ',' << fmt(se[k]) << '\n';
    r.files.push_back({"marginal.csv", os.str()});
  } else {
    json j = envelope("sample");
    j["config"] = to_json(c);
    j["trees"] = s.trees;
    j["depth"] = s.depth;
    j["elements"] = elements_json(in.chain.space());
    j["pi"] = values_json(in.chain.pi().values());
    j["empirical"] = values_json(emp.values());
    j["se"] = values_json(se);
    r.files.push_back({"marginal.json", dump(j)});
  }
  return r;
}

CommandResult cmd_ggm(const GlobalOptions& g) {
  const ModelConfig c = resolve_config(g, true);
  if (c.space.kind != "cyclic")
    throw InvalidArgument("ggm needs a cyclic space {\"kind\": \"cyclic\", \"q\": ...}");
  const auto& s = c.samples;
  const FuzzyChain fc =
      build_fuzzy_chain(base_operator(c), c.space.q, c.d, c.A, fuzzy_options(c));

  const auto deloc = delocalization_stat(fc, s.n_grid, s.k, s.deloc_samples,
                                         stream_seed(c.seed, kDelocStream));
  const auto branches =
      sample_branches(fc, s.length, s.branches, stream_seed(c.seed, kBranchStream));
  std::size_t violations = 0;
  for (const auto& b : branches) violations += congruence_violations(fc, b);

  // Closed-form pair masses, their marginals, and the top cells.
  struct Cell {
    Element a, c;
    double mass;
  };
  const GroupSpace& base = fc.base_Q.space();
  std::vector<Cell> cells;
  double total = 0.0, row_defect = 0.0;
  for (Element a = 0; a < fc.q; ++a) {
    double row = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      const double m = pair_limit_formula(fc, a, base.element(k));
      row += m;
      cells.push_back({a, base.element(k), m});
    }
    row_defect = std::max(row_defect, std::abs(row - fc.chain.pi()[static_cast<std::size_t>(a)]));
    total += row;
  }
  const double total_defect = std::abs(total - 1.0);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& x, const Cell& y) { return x.mass > y.mass; });
  cells.resize(std::min(cells.size(), s.top_cells));

  struct Row {
    Cell cell;
    Estimate e;
  };
  std::vector<Row> table;
  for (const auto& cell : cells)
    table.push_back({cell, pair_empirical(branches, fc.q, cell.a, cell.c)});

  const bool pass = violations == 0 && row_defect <= kMarginalizationTol &&
                    total_defect <= kMarginalizationTol;
  CommandResult r;
  r.exit_code = pass ? kOk : kBoundFailure;
  std::ostringstream path;
  write_path_csv(path, branches.front());

  if (g.format == "csv") {
    std::ostringstream dl, pairs;
    dl << "n,k,p,se\n";
    for (const auto& p : deloc)
      dl << p.n << ',' << s.k << ',' << fmt(p.p.value) << ',' << fmt(p.p.se) << '\n';
    pairs << "abar,c,formula,empirical,se\n";
    for (const auto& t : table)
      pairs << t.cell.a << ',' << t.cell.c << ',' << fmt(t.cell.mass) << ','
            << fmt(t.e.value) << ',' << fmt(t.e.se) << '\n';
    r.files = {{"pairs.csv", pairs.str()},
               {"delocalization.csv", dl.str()},
               {"path.csv", path.str()}};
  } else {
    json j = envelope("ggm");
    j["config"] = to_json(c);
    j["fuzzy"] = {{"q", fc.q},
                  {"epsilon", num(fc.epsilon)},
                  {"eta", num(fc.eta)},
                  {"zero_class", num(fc.fuzzy.zero_class)},
                  {"tail_mass", num(fc.fuzzy.tail_mass)},
                  {"pi", values_json(fc.chain.pi().values())},
                  {"P", values_json(fc.chain.P())}};
    json dj = json::array();
    for (const auto& p : deloc)
      dj.push_back({{"n", p.n}, {"k", s.k}, {"p", num(p.p.value)}, {"se", num(p.p.se)}});
    j["delocalization"] = dj;
    json pj = json::array();
    for (const auto& t : table)
      pj.push_back({{"abar", t.cell.a}, {"c", t.cell.c}, {"formula", num(t.cell.mass)},
                    {"empirical", num(t.e.value)}, {"se", num(t.e.se)}});
    j["pairs"] = pj;
    j["marginalization"] = {{"row_defect", num(row_defect)},
                            {"total_defect", num(total_defect)},
                            {"tolerance", kMarginalizationTol}};
    j["congruence_violations"] = violations;
    j["branches"] = s.branches;
    j["length"] = s.length;
    j["pass"] = pass;
    r.files = {{"ggm.json", dump(j)}, {"path.csv", path.str()}};
  }
  return r;
}

CommandResult error_result(const std::exception& e) {
  json j = envelope("error");
  j["message"] = e.what();
  int code = kConfigError;
  std::string name = "InvalidArgument";
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    name = std::string(err->name());
    switch (err->kind()) {
      case ErrorKind::InvalidArgument: code = kConfigError; break;
      case ErrorKind::ThresholdExceeded: code = kThresholdExceeded; break;
      case ErrorKind::BracketOpen: code = kBracketOpen; break;
      case ErrorKind::IterationLimit: code = kIterationLimit; break;
      case ErrorKind::PostconditionViolation: code = kPostcondition; break;
      case ErrorKind::TruncationError: code = kTruncation; break;
    }
    if (const auto* t = dynamic_cast<const ThresholdExceeded*>(&e)) {
      j["measured"] = num(t->measured);
      j["required"] = num(t->required);
    } else if (const auto* b = dynamic_cast<const BracketOpen*>(&e)) {
      j["width"] = num(b->width);
    } else if (const auto* tr = dynamic_cast<const TruncationError*>(&e)) {
      j["tail"] = num(tr->tail);
    }
  } else if (!dynamic_cast<const nlohmann::json::exception*>(&e)) {
    name = "InternalError";
    code = kPostcondition;
  }
  j["error"] = name;
  j["exit_code"] = code;
  CommandResult r;
  r.exit_code = code;
  r.files = {{"error.json", dump(j)}};
  return r;
}

int emit(const CommandResult& r, const GlobalOptions& g) {
  if (g.out.empty()) {
    if (!r.files.empty()) std::cout << r.files[r.primary].content << std::flush;
    return r.exit_code;
  }
  std::filesystem::create_directories(g.out);
  for (const auto& f : r.files) {
    std::ofstream os(std::filesystem::path(g.out) / f.name, std::ios::binary);
    os << f.content;
    if (!os) {
      std::cerr << "cannot write " << f.name << " under " << g.out << '\n';
      return kConfigError;
    }
  }
  // Short summary; the text table for thresholds, file list otherwise.
  if (r.files.size() > 0 && r.files.front().name == "thresholds.txt")
    std::cout << r.files.front().content;
  for (const auto& f : r.files) std::cout << "wrote " << f.name << '\n';
  return r.exit_code;
}

}  // namespace treegibbs::cli
