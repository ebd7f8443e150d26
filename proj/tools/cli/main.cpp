#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace treegibbs::cli;

int main(int argc, char** argv) {
  CLI::App app{"treegibbs: localized Gibbs measures on regular trees"};
  app.require_subcommand(1);

  GlobalOptions g;
  ThresholdOptions t;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON model configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", g.seed, "64-bit master seed (overrides the config)");
    sub->add_option("--out", g.out, "output directory; primary artifact to stdout if absent");
    sub->add_option("--format", g.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* th = app.add_subcommand("thresholds", "SOS and log-potential thresholds beta(d,n)");
  add_common(th);
  th->add_option("--d", t.d, "tree parameters d")->delimiter(',');
  th->add_option("--n", t.n, "localization set sizes n")->delimiter(',');
  th->add_option("--model", t.model, "sos, log or both")
      ->check(CLI::IsMember({"sos", "log", "both"}));

  auto* so = app.add_subcommand("solve", "solve for the boundary law and check every bound");
  add_common(so);
  auto* ve = app.add_subcommand("verify", "run the invariant suites");
  add_common(ve);
  auto* sa = app.add_subcommand("sample", "sample tree configurations");
  add_common(sa);
  auto* gg = app.add_subcommand("ggm", "fuzzy chain, delocalization and pair statistics");
  add_common(gg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  CommandResult r = run_guarded([&]() -> CommandResult {
    if (th->parsed()) return cmd_thresholds(t, g);
    if (so->parsed()) return cmd_solve(g);
    if (ve->parsed()) return cmd_verify(g);
    if (sa->parsed()) return cmd_sample(g);
    return cmd_ggm(g);
  });
  if (!r.files.empty() && r.files.front().name == "error.json") {
    const auto j = nlohmann::json::parse(r.files.front().content);
    std::cerr << "treegibbs: " << j.at("error").get<std::string>() << ": "
              << j.at("message").get<std::string>() << '\n';
  }
  return emit(r, g);
}
