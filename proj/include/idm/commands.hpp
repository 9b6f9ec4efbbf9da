#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "idm/analysis.hpp"
#include "idm/integrator.hpp"
#include "idm/types.hpp"

namespace idm {

/// Command-line overrides applied on top of a resolved scenario.
struct Overrides {
  std::optional<std::string> variant;
  std::optional<double> horizon;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
};

Scenario apply_overrides(Scenario s, const Overrides& o);

/// 0 Completed, 2 Blowup or GapCollapse, 3 for the remaining early stops.
int exit_code(TerminationKind kind);

/// Report numbers: full precision, or fixed with `round` decimals.
std::string format_report_number(double v, std::optional<int> round);

std::string format_report(const Scenario& s, const Trajectory& tr, std::optional<int> round);

/// Integrates and writes positions/velocities/accelerations CSVs and report.txt
/// into out_dir. Returns the exit code.
int cmd_run(const Scenario& s, const std::filesystem::path& out_dir, std::optional<int> round, std::ostream& log);

struct CompareRow {
  std::string variant;
  std::string scenario;
  RunMetrics metrics;
  Termination termination;
  double vehicle_length = 0.0;
};

/// One row per (variant, scenario), variants outermost, in input order.
std::vector<CompareRow> compare(const std::vector<std::string>& scenarios, const std::vector<std::string>& variants,
                                const Overrides& o);

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);

int cmd_compare(const std::vector<std::string>& scenarios, const std::vector<std::string>& variants,
                const Overrides& o, const std::filesystem::path& out_dir, std::ostream& log);

/// "0.2,0.4" or "start:step:stop" (inclusive of stop up to rounding).
std::vector<double> parse_eps(const std::string& spec);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

int cmd_sweep(const Scenario& base, const std::vector<double>& eps, const std::filesystem::path& out_dir,
              std::ostream& log);

void print_bounds(const Scenario& s, const TheoreticalBounds& b, std::optional<int> round, std::ostream& out);

int cmd_bounds(const Scenario& s, std::optional<int> round, std::ostream& out);

int cmd_list_scenarios(std::ostream& out);

}  // namespace idm
