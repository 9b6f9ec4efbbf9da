#include "idm/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "idm/config.hpp"
#include "idm/csv.hpp"
#include "idm/scenario.hpp"

namespace idm {

Scenario apply_overrides(Scenario s, const Overrides& o) {
  if (o.variant) s.variant.kind = default_variant(*o.variant, s.params);
  if (o.horizon) s.horizon = *o.horizon;
  if (o.rel_tol) s.solver.rel_tol = *o.rel_tol;
  if (o.abs_tol) s.solver.abs_tol = *o.abs_tol;
  return s;
}

int exit_code(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::Completed: return 0;
    case TerminationKind::Blowup:
    case TerminationKind::GapCollapse: return 2;
    case TerminationKind::LeaderVelocityNegative:
    case TerminationKind::StepLimitReached: return 3;
  }
  return 3;
}

std::string format_report_number(double v, std::optional<int> round) {
  if (!round) return format_number(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", *round, v);
  return buf;
}

namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string check_line(const std::string& name, std::optional<bool> held) {
  return "check " + name + ": " + (!held ? "not applicable" : *held ? "held" : "violated") + "\n";
}

}  // namespace

std::string format_report(const Scenario& s, const Trajectory& tr, std::optional<int> round) {
  auto num = [&](double v) { return format_report_number(v, round); };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string("none"); };
  std::ostringstream os;
  os << "scenario: " << s.name << "\n";
  os << "variant: " << variant_name(s.variant.kind) << "\n";
  os << "leader: " << leader_profile_name(s.leader) << "\n";
  os << "vehicles: " << s.initial.vehicles.size() << "\n";
  os << "horizon: " << num(s.horizon) << "\n";
  os << "termination: " << to_string(tr.termination.kind) << " at t = " << num(tr.termination.t) << "\n";
  os << "samples: " << tr.samples.size() << "\n";
  os << "events: " << tr.events.size() << "\n";
  for (const auto& e : tr.events) os << "  " << to_string(e.kind) << " vehicle " << e.vehicle + 1 << " t = " << num(e.t) << "\n";

  for (std::size_t i = 1; i < tr.vehicle_count(); ++i) {
    const auto m = compute_metrics(tr, {i - 1, i});
    os << "\n[metrics vehicles " << i << "-" << i + 1 << "]\n";
    os << "avg_gap = " << num(m.avg_gap) << "\n";
    os << "gap_variance = " << num(m.gap_variance) << "\n";
    os << "min_gap = " << num(m.min_gap) << "\n";
    os << "min_velocity = " << num(m.min_velocity) << "\n";
    os << "t_first_negative_v = " << opt(m.t_first_negative_v) << "\n";
    os << "t_blowup_est = " << opt(m.t_blowup_est) << "\n";
    os << "t_recover_positive_v = " << opt(m.t_recover_positive_v) << "\n";
  }

  const auto b = compute_bounds(s);
  os << "\n[bounds]\n";
  print_bounds(s, b, round, os);

  const auto c = classify_run(s, tr, b);
  os << "\n[checks]\n";
  os << "initial_gap_below_s0 = " << yes_no(c.initial_gap_below_s0) << "\n";
  os << "negative_velocity_observed = " << yes_no(c.negative_velocity_observed) << "\n";
  os << "min_gap_observed = " << num(c.min_gap_observed) << "\n";
  os << "equilibrium_hypotheses = " << yes_no(c.equilibrium_hypotheses) << "\n";
  os << "equilibrium_time = " << opt(c.equilibrium_time) << "\n";

  std::optional<bool> cap;
  std::optional<bool> nonneg;
  const bool classic = std::holds_alternative<Classic>(s.variant.kind);
  bool cap_applies = classic;
  for (std::size_t i = 1; i < s.initial.vehicles.size(); ++i)
    if (s.initial.vehicles[i].v > s.params.v_free) cap_applies = false;
  const bool nonneg_applies = std::holds_alternative<VelocityRegularized>(s.variant.kind) ||
                              std::holds_alternative<DistanceRegularized>(s.variant.kind) ||
                              std::holds_alternative<Discontinuous>(s.variant.kind);
  if (cap_applies || nonneg_applies) {
    bool cap_ok = true;
    bool nonneg_ok = true;
    for (const auto& smp : tr.samples) {
      for (std::size_t i = 1; i < smp.state.vehicles.size(); ++i) {
        const double v = smp.state.vehicles[i].v;
        const double limit = std::max(s.initial.vehicles[i].v, s.params.v_free);
        if (v > limit + 1e-6) cap_ok = false;
        if (v < -1e-6) nonneg_ok = false;
      }
    }
    if (cap_applies) cap = cap_ok;
    if (nonneg_applies) nonneg = nonneg_ok;
  }
  os << check_line("velocity_cap", cap);
  os << check_line("nonnegative_velocity", nonneg);
  os << check_line("gap_lower_bound", c.gap_bound_held);
  return os.str();
}

int cmd_run(const Scenario& s, const std::filesystem::path& out_dir, std::optional<int> round, std::ostream& log) {
  const Trajectory tr = integrate(s);
  std::filesystem::create_directories(out_dir);
  write_series_csv(out_dir / "positions.csv", tr, Series::Position);
  write_series_csv(out_dir / "velocities.csv", tr, Series::Velocity);
  write_series_csv(out_dir / "accelerations.csv", tr, Series::Acceleration);
  const std::string report = format_report(s, tr, round);
  std::ofstream(out_dir / "report.txt", std::ios::binary) << report;
  log << s.name << ": " << to_string(tr.termination.kind) << " at t = " << format_report_number(tr.termination.t, round)
      << " (" << tr.samples.size() << " samples) -> " << out_dir.string() << "\n";
  return exit_code(tr.termination.kind);
}

std::vector<CompareRow> compare(const std::vector<std::string>& scenarios, const std::vector<std::string>& variants,
                                const Overrides& o) {
  std::vector<std::future<CompareRow>> jobs;
  for (const auto& variant : variants) {
    for (const auto& name : scenarios) {
      Overrides per = o;
      per.variant = variant;
      Scenario s = apply_overrides(resolve_scenario(name), per);
      jobs.push_back(std::async(std::launch::async, [s = std::move(s), variant, name] {
        const Trajectory tr = integrate(s);
        return CompareRow{variant, name, compute_metrics(tr), tr.termination, tr.vehicle_length};
      }));
    }
  }
  std::vector<CompareRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "variant,scenario,avg_gap,gap_variance,avg_spacing,termination\n";
  for (const auto& r : rows)
    out << r.variant << ',' << r.scenario << ',' << format_number(r.metrics.avg_gap) << ','
        << format_number(r.metrics.gap_variance) << ',' << format_number(r.metrics.avg_gap + r.vehicle_length) << ','
        << to_string(r.termination.kind) << '\n';
}

int cmd_compare(const std::vector<std::string>& scenarios, const std::vector<std::string>& variants,
                const Overrides& o, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto rows = compare(scenarios, variants, o);
  std::filesystem::create_directories(out_dir);
  write_compare_csv(out_dir / "compare.csv", rows);
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %-14s avg_gap %10.4f  variance %10.4f\n", r.variant.c_str(),
                  r.scenario.c_str(), r.metrics.avg_gap, r.metrics.gap_variance);
    log << buf;
  }
  log << rows.size() << " rows -> " << (out_dir / "compare.csv").string() << "\n";
  return 0;
}

namespace {

double to_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("'" + text + "' is not a number");
  return v;
}

}  // namespace

std::vector<double> parse_eps(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_double(item));
    if (parts.size() != 3) throw std::invalid_argument("eps range must be start:step:stop");
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("eps range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  }
  if (out.empty()) throw std::invalid_argument("no eps values given");
  return out;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "eps,t_recover_positive_v,min_velocity\n";
  for (const auto& p : points)
    out << format_number(p.eps) << ','
        << (p.metrics.t_recover_positive_v ? format_number(*p.metrics.t_recover_positive_v) : "nan") << ','
        << format_number(p.metrics.min_velocity) << '\n';
}

int cmd_sweep(const Scenario& base, const std::vector<double>& eps, const std::filesystem::path& out_dir,
              std::ostream& log) {
  for (double e : eps)
    if (!(e > 0.0 && e < base.params.s0))
      throw std::invalid_argument("eps = " + format_number(e) + " lies outside (0, s0)");
  const auto points = epsilon_sweep(base, eps);
  std::filesystem::create_directories(out_dir);
  write_sweep_csv(out_dir / "sweep.csv", points);
  for (const auto& p : points) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "eps %-8.4g t_recover %-12.6g min_velocity %.6g\n", p.eps,
                  p.metrics.t_recover_positive_v.value_or(NAN), p.metrics.min_velocity);
    log << buf;
  }
  log << points.size() << " rows -> " << (out_dir / "sweep.csv").string() << "\n";
  return 0;
}

void print_bounds(const Scenario& s, const TheoreticalBounds& b, std::optional<int> round, std::ostream& out) {
  auto num = [&](double v) { return format_report_number(v, round); };
  out << "scenario = " << s.name << "\n";
  out << "v_max = " << num(b.v_max) << "\n";
  out << "delta_star = " << num(b.delta_star) << "\n";
  out << "eps0_star (statement) = " << num(b.eps0_star) << "\n";
  out << "eps0_star (proof) = " << num(b.eps0_star_proof_variant) << "\n";
  out << "eps0_star (conservative) = " << num(b.conservative_eps0()) << "\n";
  out << "safe_distancing_ok = " << yes_no(b.safe_distancing_ok) << "\n";
  out << "global_wellposed_ok = " << yes_no(b.global_wellposed_ok) << "\n";
}

int cmd_bounds(const Scenario& s, std::optional<int> round, std::ostream& out) {
  print_bounds(s, compute_bounds(s), round, out);
  return 0;
}

int cmd_list_scenarios(std::ostream& out) {
  for (const auto& [name, s] : builtin_scenarios()) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-22s %-24s %-18s vehicles %zu  T %g\n", name.c_str(),
                  variant_name(s.variant.kind).c_str(), leader_profile_name(s.leader).c_str(),
                  s.initial.vehicles.size(), s.horizon);
    out << buf;
  }
  out << "aliases: case1 = neg-velocity, case2 = blowup, case3 = stop-and-go\n";
  return 0;
}

}  // namespace idm
