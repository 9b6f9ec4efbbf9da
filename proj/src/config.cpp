#include "idm/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "idm/scenario.hpp"

namespace idm {

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"name", "horizon"}},
      {"params", {"a", "b", "v_free", "tau", "s0", "l", "delta"}},
      {"variant", {"name", "a_min", "eps_v", "eps_d", "signed_power_term"}},
      {"leader", {"profile", "u", "schedule", "amplitude", "threshold", "angular_divisor"}},
      {"initial", {"positions", "velocities"}},
      {"solver",
       {"rel_tol", "abs_tol", "dt_init", "dt_min", "dt_max", "blowup_speed_threshold", "event_tol", "max_steps",
        "leader_velocity_tol", "continue_after_collapse"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Section> sections)
      : source_(std::move(source)), sections_(std::move(sections)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigError(source_, line, msg); }

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& need(const std::string& sec, const std::string& key) const {
    if (const auto* e = find(sec, key)) return *e;
    fail(0, "missing required key '" + key + "' in [" + sec + "]");
  }

  double number(const Entry& e, const std::string& key, bool velocity = false) const {
    return parse_number(e.value, e.line, key, velocity);
  }

  double parse_number(const std::string& text, int line, const std::string& key, bool velocity) const {
    std::string body = trim(text);
    double scale = 1.0;
    for (const auto& [suffix, factor] : {std::pair{"km/h", 1.0 / 3.6}, std::pair{"m/s", 1.0}}) {
      const std::string sfx = suffix;
      if (body.size() > sfx.size() && body.compare(body.size() - sfx.size(), sfx.size(), sfx) == 0) {
        if (!velocity) fail(line, "unit suffix '" + sfx + "' is only allowed on velocities (key '" + key + "')");
        body = trim(body.substr(0, body.size() - sfx.size()));
        scale = factor;
        break;
      }
    }
    double value = 0.0;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (!body.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (body.empty() || ec != std::errc() || ptr != last)
      fail(line, "'" + trim(text) + "' is not a number (key '" + key + "')");
    return value * scale;
  }

  std::vector<double> list(const Entry& e, const std::string& key, bool velocity = false) const {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, e.line, key, velocity));
    if (out.empty()) fail(e.line, "'" + key + "' needs at least one value");
    return out;
  }

  bool boolean(const Entry& e, const std::string& key) const {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, "'" + e.value + "' is not true/false (key '" + key + "')");
  }

  // Keys of a section that are only meaningful for some choice must not appear otherwise.
  void forbid(const std::string& sec, const std::set<std::string>& keys, const std::string& why) const {
    for (const auto& k : keys)
      if (const auto* e = find(sec, k)) fail(e->line, "key '" + k + "' is not used " + why);
  }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

std::map<std::string, Section> tokenize(std::istream& in, const std::string& source) {
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(source, line, "malformed section header '" + text + "'");
      current = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!allowed_keys().contains(current)) throw ConfigError(source, line, "unknown section [" + current + "]");
      if (sections.contains(current)) throw ConfigError(source, line, "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value', got '" + text + "'");
    if (current.empty()) throw ConfigError(source, line, "key outside of any section");
    std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (current == "params" && key == "d") key = "delta";
    if (!allowed_keys().at(current).contains(key))
      throw ConfigError(source, line, "unknown key '" + key + "' in [" + current + "]");
    if (value.empty()) throw ConfigError(source, line, "empty value for '" + key + "'");
    auto& sec = sections[current];
    if (sec.contains(key)) throw ConfigError(source, line, "duplicate key '" + key + "' in [" + current + "]");
    sec.emplace(key, Entry{value, line});
  }
  return sections;
}

}  // namespace

VariantKind default_variant(const std::string& name, const ModelParams& p) {
  if (name == "classic") return Classic{};
  if (name == "velocity-projected") return VelocityProjected{};
  if (name == "acceleration-projected") return AccelerationProjected{p.a};
  if (name == "velocity-regularized") return VelocityRegularized{0.1};
  if (name == "distance-regularized") return DistanceRegularized{0.5};
  if (name == "discontinuous") return Discontinuous{};
  throw std::invalid_argument("unknown variant '" + name +
                              "' (known: classic, velocity-projected, acceleration-projected, velocity-regularized, "
                              "distance-regularized, discontinuous)");
}

Scenario parse_config(std::istream& in, const std::string& source) {
  const Reader r(source, tokenize(in, source));
  Scenario s;
  s.name = r.find("run", "name") ? r.need("run", "name").value : source;
  s.horizon = r.number(r.need("run", "horizon"), "horizon");

  auto& p = s.params;
  p.a = r.number(r.need("params", "a"), "a");
  p.b = r.number(r.need("params", "b"), "b");
  p.v_free = r.number(r.need("params", "v_free"), "v_free", true);
  p.tau = r.number(r.need("params", "tau"), "tau");
  p.s0 = r.number(r.need("params", "s0"), "s0");
  p.l = r.number(r.need("params", "l"), "l");
  p.delta = r.number(r.need("params", "delta"), "delta");

  const auto& vname = r.need("variant", "name");
  const std::set<std::string> variant_extras = {"a_min", "eps_v", "eps_d"};
  auto only = [&](const std::string& key) {
    std::set<std::string> others = variant_extras;
    others.erase(key);
    r.forbid("variant", others, "by variant '" + vname.value + "'");
    return r.number(r.need("variant", key), key);
  };
  if (vname.value == "classic") {
    r.forbid("variant", variant_extras, "by variant 'classic'");
    s.variant.kind = Classic{};
  } else if (vname.value == "velocity-projected") {
    r.forbid("variant", variant_extras, "by variant 'velocity-projected'");
    s.variant.kind = VelocityProjected{};
  } else if (vname.value == "acceleration-projected") {
    s.variant.kind = AccelerationProjected{only("a_min")};
  } else if (vname.value == "velocity-regularized") {
    s.variant.kind = VelocityRegularized{only("eps_v")};
  } else if (vname.value == "distance-regularized") {
    s.variant.kind = DistanceRegularized{only("eps_d")};
  } else if (vname.value == "discontinuous") {
    r.forbid("variant", variant_extras, "by variant 'discontinuous'");
    s.variant.kind = Discontinuous{};
  } else {
    r.fail(vname.line, "unknown variant '" + vname.value + "'");
  }
  if (const auto* e = r.find("variant", "signed_power_term")) s.variant.signed_power_term = r.boolean(*e, "signed_power_term");

  const auto& profile = r.need("leader", "profile");
  const std::set<std::string> leader_extras = {"u", "schedule", "amplitude", "threshold", "angular_divisor"};
  auto leader_forbid = [&](std::set<std::string> allowed) {
    std::set<std::string> others;
    for (const auto& k : leader_extras)
      if (!allowed.contains(k)) others.insert(k);
    r.forbid("leader", others, "by profile '" + profile.value + "'");
  };
  if (profile.value == "free-flow") {
    leader_forbid({});
    s.leader = FreeFlow{};
  } else if (profile.value == "constant-accel") {
    leader_forbid({"u"});
    s.leader = ConstantAccel{r.number(r.need("leader", "u"), "u")};
  } else if (profile.value == "piecewise-constant") {
    leader_forbid({"schedule"});
    const auto& e = r.need("leader", "schedule");
    PiecewiseConstant pc;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) r.fail(e.line, "schedule entries are 't:accel', got '" + trim(item) + "'");
      pc.schedule.emplace_back(r.parse_number(item.substr(0, colon), e.line, "schedule", false),
                               r.parse_number(item.substr(colon + 1), e.line, "schedule", false));
    }
    s.leader = std::move(pc);
  } else if (profile.value == "stop-and-go-sine") {
    leader_forbid({"amplitude", "threshold", "angular_divisor"});
    StopAndGoSine sg;
    sg.amplitude = r.number(r.need("leader", "amplitude"), "amplitude");
    if (const auto* e = r.find("leader", "threshold")) sg.threshold = r.number(*e, "threshold");
    if (const auto* e = r.find("leader", "angular_divisor")) sg.angular_divisor = r.number(*e, "angular_divisor");
    s.leader = sg;
  } else {
    r.fail(profile.line, "unknown leader profile '" + profile.value + "'");
  }

  const auto& pos_entry = r.need("initial", "positions");
  const auto positions = r.list(pos_entry, "positions");
  const auto velocities = r.list(r.need("initial", "velocities"), "velocities", true);
  if (positions.size() != velocities.size())
    r.fail(pos_entry.line, "positions and velocities list different vehicle counts");
  for (std::size_t i = 0; i < positions.size(); ++i) s.initial.vehicles.push_back({positions[i], velocities[i]});

  auto& sol = s.solver;
  auto opt = [&](const char* key, double& field, bool velocity = false) {
    if (const auto* e = r.find("solver", key)) field = r.number(*e, key, velocity);
  };
  opt("rel_tol", sol.rel_tol);
  opt("abs_tol", sol.abs_tol);
  opt("dt_init", sol.dt_init);
  opt("dt_min", sol.dt_min);
  opt("dt_max", sol.dt_max);
  opt("event_tol", sol.event_tol);
  opt("leader_velocity_tol", sol.leader_velocity_tol, true);
  if (const auto* e = r.find("solver", "blowup_speed_threshold"))
    sol.blowup_speed_threshold = r.number(*e, "blowup_speed_threshold", true);
  if (const auto* e = r.find("solver", "max_steps")) {
    const double n = r.number(*e, "max_steps");
    if (n != static_cast<double>(static_cast<long>(n))) r.fail(e->line, "max_steps must be an integer");
    sol.max_steps = static_cast<long>(n);
  }
  if (const auto* e = r.find("solver", "continue_after_collapse"))
    sol.continue_after_collapse = r.boolean(*e, "continue_after_collapse");
  return s;
}

Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  Scenario s = parse_config(in, path.string());
  if (s.name == path.string()) s.name = path.stem().string();
  return s;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string joined(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + fmt(items[i]);
  return out;
}

}  // namespace

std::string format_config(const Scenario& s) {
  std::ostringstream os;
  os << "[run]\nname = " << s.name << "\nhorizon = " << num(s.horizon) << "\n\n";
  const auto& p = s.params;
  os << "[params]\na = " << num(p.a) << "\nb = " << num(p.b) << "\nv_free = " << num(p.v_free) << "\ntau = " << num(p.tau)
     << "\ns0 = " << num(p.s0) << "\nl = " << num(p.l) << "\ndelta = " << num(p.delta) << "\n\n";

  os << "[variant]\nname = " << variant_name(s.variant.kind) << "\n";
  if (const auto* ap = std::get_if<AccelerationProjected>(&s.variant.kind)) os << "a_min = " << num(ap->a_min) << "\n";
  if (const auto* vr = std::get_if<VelocityRegularized>(&s.variant.kind)) os << "eps_v = " << num(vr->eps_v) << "\n";
  if (const auto* dr = std::get_if<DistanceRegularized>(&s.variant.kind)) os << "eps_d = " << num(dr->eps_d) << "\n";
  os << "signed_power_term = " << (s.variant.signed_power_term ? "true" : "false") << "\n\n";

  os << "[leader]\nprofile = " << leader_profile_name(s.leader) << "\n";
  if (const auto* c = std::get_if<ConstantAccel>(&s.leader)) os << "u = " << num(c->u) << "\n";
  if (const auto* pc = std::get_if<PiecewiseConstant>(&s.leader))
    os << "schedule = " << joined(pc->schedule, [](const auto& e) { return num(e.first) + ":" + num(e.second); }) << "\n";
  if (const auto* sg = std::get_if<StopAndGoSine>(&s.leader))
    os << "amplitude = " << num(sg->amplitude) << "\nthreshold = " << num(sg->threshold)
       << "\nangular_divisor = " << num(sg->angular_divisor) << "\n";
  os << "\n";

  os << "[initial]\npositions = " << joined(s.initial.vehicles, [](const VehicleState& v) { return num(v.x); })
     << "\nvelocities = " << joined(s.initial.vehicles, [](const VehicleState& v) { return num(v.v); }) << "\n\n";

  const auto& sol = s.solver;
  os << "[solver]\nrel_tol = " << num(sol.rel_tol) << "\nabs_tol = " << num(sol.abs_tol) << "\ndt_init = "
     << num(sol.dt_init) << "\ndt_min = " << num(sol.dt_min) << "\ndt_max = " << num(sol.dt_max) << "\n";
  if (sol.blowup_speed_threshold) os << "blowup_speed_threshold = " << num(*sol.blowup_speed_threshold) << "\n";
  os << "event_tol = " << num(sol.event_tol) << "\nmax_steps = " << sol.max_steps
     << "\nleader_velocity_tol = " << num(sol.leader_velocity_tol)
     << "\ncontinue_after_collapse = " << (sol.continue_after_collapse ? "true" : "false") << "\n";
  return os.str();
}

Scenario resolve_scenario(const std::string& ref) {
  const auto& cat = builtin_scenarios();
  static const std::set<std::string> aliases = {"case1", "case2", "case3"};
  if (cat.contains(ref) || aliases.contains(ref)) return builtin_scenario(ref);
  if (std::filesystem::exists(ref)) return load_config(ref);
  return builtin_scenario(ref);  // throws with the list of known names
}

}  // namespace idm
