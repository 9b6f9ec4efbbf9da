#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idm/commands.hpp"
#include "idm/config.hpp"
#include "idm/scenario.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Flags {
  std::string scenario;
  std::string variant;
  std::optional<double> horizon;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::string out = "out";
  std::string eps = "0.2:0.2:1.8";
  std::optional<int> round;
};

void add_common(CLI::App* cmd, Flags& f, bool with_variant = true) {
  cmd->add_option("--horizon", f.horizon, "Simulation horizon T [s]");
  cmd->add_option("--rel-tol", f.rel_tol, "Relative error tolerance");
  cmd->add_option("--abs-tol", f.abs_tol, "Absolute error tolerance");
  if (with_variant) cmd->add_option("--variant", f.variant, "Model variant (default: the scenario's own)");
}

idm::Overrides overrides(const Flags& f) {
  idm::Overrides o;
  if (!f.variant.empty()) o.variant = f.variant;
  o.horizon = f.horizon;
  o.rel_tol = f.rel_tol;
  o.abs_tol = f.abs_tol;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intelligent Driver Model simulator"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "Integrate one scenario and write CSVs and report.txt");
  run->add_option("--scenario", f.scenario, "Builtin scenario name or config file")->required();
  add_common(run, f);
  run->add_option("--out", f.out, "Output directory");
  run->add_option("--round", f.round, "Decimals for report numbers");

  std::string compare_scenarios = "case1,case2,case3";
  std::string compare_variants = "acceleration-projected,velocity-regularized,distance-regularized,discontinuous";
  auto* cmp = app.add_subcommand("compare", "Average gap and variance per variant and scenario");
  cmp->add_option("--scenario", compare_scenarios, "Comma separated scenario list");
  cmp->add_option("--variant", compare_variants, "Comma separated variant list (may be empty)");
  add_common(cmp, f, false);
  cmp->add_option("--out", f.out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Recovery time over initial gaps eps");
  f.scenario = "eps-sweep";
  sweep->add_option("--scenario", f.scenario, "Base scenario name or config file");
  add_common(sweep, f);
  sweep->add_option("--eps", f.eps, "Comma separated list or start:step:stop");
  sweep->add_option("--out", f.out, "Output directory");

  auto* bounds = app.add_subcommand("bounds", "Print the theoretical bounds of a scenario");
  bounds->add_option("--scenario", f.scenario, "Builtin scenario name or config file")->required();
  add_common(bounds, f);
  bounds->add_option("--round", f.round, "Decimals for printed numbers");

  auto* list = app.add_subcommand("list-scenarios", "List builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) return idm::cmd_list_scenarios(std::cout);
    if (cmp->parsed())
      return idm::cmd_compare(split_list(compare_scenarios), split_list(compare_variants), overrides(f), f.out,
                              std::cout);
    const idm::Scenario s = idm::apply_overrides(idm::resolve_scenario(f.scenario), overrides(f));
    if (run->parsed()) return idm::cmd_run(s, f.out, f.round, std::cout);
    if (sweep->parsed()) return idm::cmd_sweep(s, idm::parse_eps(f.eps), f.out, std::cout);
    if (bounds->parsed()) return idm::cmd_bounds(s, f.round, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
