#include "dcmu/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace dcmu {

namespace {

// A value is either a number, a bare word or a (possibly nested) list.
struct Value {
  enum class Kind { number, word, list } kind{Kind::number};
  double number{0.0};
  std::string word;
  std::vector<Value> items;
};

class ValueParser {
 public:
  explicit ValueParser(std::string_view s) : s_(s) {}

  std::optional<Value> parse() {
    auto v = value();
    skip_ws();
    if (!v || pos_ != s_.size()) return std::nullopt;
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::optional<Value> value() {
    skip_ws();
    if (pos_ >= s_.size()) return std::nullopt;
    if (s_[pos_] == '[') return list();
    if (s_[pos_] == '"') return quoted();
    return scalar();
  }

  std::optional<Value> list() {
    Value v;
    v.kind = Value::Kind::list;
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      auto item = value();
      if (!item) return std::nullopt;
      v.items.push_back(std::move(*item));
      skip_ws();
      if (pos_ >= s_.size()) return std::nullopt;
      if (s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      return std::nullopt;
    }
  }

  std::optional<Value> quoted() {
    const std::size_t end = s_.find('"', pos_ + 1);
    if (end == std::string_view::npos) return std::nullopt;
    Value v;
    v.kind = Value::Kind::word;
    v.word = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return v;
  }

  std::optional<Value> scalar() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' &&
           s_[pos_] != '\t') {
      ++pos_;
    }
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok.empty()) return std::nullopt;
    Value v;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v.number);
    if (ec == std::errc() && ptr == last) return v;
    v.kind = Value::Kind::word;
    v.word = std::string(tok);
    return v;
  }

  std::string_view s_;
  std::size_t pos_{0};
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  Value value;
  int line{0};
};

struct Section {
  std::string name;
  int line{0};
  std::map<std::string, Entry> entries;
};

class Reader {
 public:
  Reader(const Section& sec, std::string origin) : sec_(sec), origin_(std::move(origin)) {}

  [[noreturn]] void fail(int line, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": key '" << key << "': " << msg;
    throw ScenarioParseError(os.str());
  }

  int line_of(const std::string& key) const {
    const auto it = sec_.entries.find(key);
    return it == sec_.entries.end() ? sec_.line : it->second.line;
  }

  bool has(const std::string& key) const { return sec_.entries.count(key) != 0; }

  const Entry& need(const std::string& key) const {
    const auto it = sec_.entries.find(key);
    if (it == sec_.entries.end()) {
      fail(sec_.line, key, "missing required key in [" + sec_.name + "]");
    }
    return it->second;
  }

  double number(const std::string& key) const {
    const Entry& e = need(key);
    if (e.value.kind != Value::Kind::number || !std::isfinite(e.value.number)) {
      fail(e.line, key, "expected a finite number");
    }
    return e.value.number;
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::string word(const std::string& key) const {
    const Entry& e = need(key);
    if (e.value.kind != Value::Kind::word) fail(e.line, key, "expected a word");
    return e.value.word;
  }

  Mat2 matrix(const std::string& key) const {
    const Entry& e = need(key);
    if (e.value.kind == Value::Kind::number) {
      if (!std::isfinite(e.value.number)) fail(e.line, key, "expected a finite number");
      return Mat2::scaled_identity(e.value.number);
    }
    const auto rows = points(e, key);
    if (rows.size() != 2) fail(e.line, key, "expected a scalar or [[a, b], [c, d]]");
    return {rows[0].x, rows[0].y, rows[1].x, rows[1].y};
  }

  std::vector<Vec2> points(const Entry& e, const std::string& key) const {
    if (e.value.kind != Value::Kind::list) fail(e.line, key, "expected a list of [x, y] pairs");
    std::vector<Vec2> out;
    for (const Value& item : e.value.items) {
      if (item.kind != Value::Kind::list || item.items.size() != 2 ||
          item.items[0].kind != Value::Kind::number || item.items[1].kind != Value::Kind::number ||
          !std::isfinite(item.items[0].number) || !std::isfinite(item.items[1].number)) {
        fail(e.line, key, "expected a list of [x, y] pairs");
      }
      out.push_back({item.items[0].number, item.items[1].number});
    }
    return out;
  }

  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [key, e] : sec_.entries) {
      if (allowed.count(key) == 0) fail(e.line, key, "unknown key in [" + sec_.name + "]");
    }
  }

 private:
  const Section& sec_;
  std::string origin_;
};

std::vector<Section> split_sections(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line_no << ": " << msg;
    throw ScenarioParseError(os.str());
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[params]" || line == "[[obstacle]]" || line == "[[robot]]") {
      const std::string name = line.substr(line.find_first_not_of('['),
                                           line.find(']') - line.find_first_not_of('['));
      if (name == "params") {
        for (const Section& s : sections) {
          if (s.name == "params") fail("duplicate [params] section");
        }
      }
      sections.push_back({name, line_no, {}});
      continue;
    }
    if (line.front() == '[') fail("unknown section " + line);
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string rhs = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (sections.empty()) fail("key '" + key + "' outside of any section");
    auto value = ValueParser(rhs).parse();
    if (!value) fail("key '" + key + "': malformed value '" + rhs + "'");
    Section& sec = sections.back();
    if (sec.entries.count(key) != 0) fail("key '" + key + "': duplicate key");
    sec.entries.emplace(key, Entry{std::move(*value), line_no});
  }
  return sections;
}

void parse_params(const Reader& r, SimParams& p) {
  r.reject_unknown({"rho", "rho0", "d_beta_min", "d_beta_max", "d_gamma_min", "d_gamma_max", "s",
                    "epsilon", "collision_radius", "dt", "v_max", "duration", "q", "r", "p0",
                    "k_fb", "consensus_rounds", "consensus_shift_margin", "consensus_seed",
                    "algo"});
  GraphParams& g = p.graph;
  g.rho = r.number("rho");
  g.rho0 = r.number("rho0");
  g.d_beta_min = r.number("d_beta_min");
  g.d_beta_max = r.number("d_beta_max");
  g.d_gamma_min = r.number("d_gamma_min");
  g.d_gamma_max = r.number("d_gamma_max");
  g.s = r.number("s");
  g.epsilon = r.number("epsilon");
  g.collision_radius = r.number_or("collision_radius", 0.5);
  p.dt = r.number("dt");
  p.v_max = r.number("v_max");
  p.duration = r.number("duration");
  p.noise.Q = r.matrix("q");
  p.noise.R = r.matrix("r");
  p.P0 = r.matrix("p0");
  p.K_fb = r.matrix("k_fb");
  p.consensus_shift_margin = r.number_or("consensus_shift_margin", 1.0);

  const double rounds = r.number_or("consensus_rounds", 200.0);
  if (rounds < 1.0 || rounds != std::floor(rounds) || rounds > 1e9) {
    r.fail(r.line_of("consensus_rounds"), "consensus_rounds", "must be a positive integer");
  }
  p.consensus_rounds = static_cast<int>(rounds);
  const double cseed = r.number_or("consensus_seed", 0.0);
  if (cseed < 0.0 || cseed != std::floor(cseed) || cseed > 9.007199254740992e15) {
    r.fail(r.line_of("consensus_seed"), "consensus_seed", "must be a non-negative integer");
  }
  p.consensus_seed = static_cast<std::uint64_t>(cseed);
  if (r.has("algo")) {
    try {
      p.algo = parse_algorithm(r.word("algo"));
    } catch (const std::invalid_argument& e) {
      r.fail(r.line_of("algo"), "algo", e.what());
    }
  }

  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) r.fail(r.line_of(key), key, msg);
  };
  check(g.rho0 > 0.0, "rho0", "rho0 must be > 0");
  check(g.rho0 < g.rho, "rho0", "rho0 must be < rho");
  check(g.d_beta_min > 0.0, "d_beta_min", "d_beta_min must be > 0");
  check(g.d_beta_min < g.d_beta_max, "d_beta_min", "d_beta_min must be < d_beta_max");
  check(g.d_gamma_min > 0.0, "d_gamma_min", "d_gamma_min must be > 0");
  check(g.d_gamma_min < g.d_gamma_max, "d_gamma_min", "d_gamma_min must be < d_gamma_max");
  check(g.s >= 0.0, "s", "s must be >= 0");
  check(g.epsilon > 0.0, "epsilon", "epsilon must be > 0");
  check(g.collision_radius >= 0.0, "collision_radius", "collision_radius must be >= 0");
  check(p.dt > 0.0, "dt", "dt must be > 0 (seconds)");
  check(p.v_max > 0.0, "v_max", "v_max must be > 0 (m/s)");
  check(p.duration > 0.0, "duration", "duration must be > 0 (seconds)");
  const double ratio = p.duration / p.dt;
  check(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio), "duration",
        "duration must be an integer multiple of dt");
  check(p.consensus_shift_margin > 0.0, "consensus_shift_margin",
        "consensus_shift_margin must be > 0");
  for (const char* key : {"q", "r", "p0"}) {
    const Mat2 m = r.matrix(key);
    check(m.xy == m.yx && m.min_sym_eigenvalue() >= -1e-12, key,
          "must be symmetric positive semidefinite (m^2)");
  }
}

Obstacle parse_obstacle(const Reader& r) {
  r.reject_unknown({"cx", "cy", "r"});
  Obstacle o{{r.number("cx"), r.number("cy")}, r.number("r")};
  if (!(o.radius > 0.0)) r.fail(r.line_of("r"), "r", "obstacle radius must be > 0 (m)");
  return o;
}

RobotSpec parse_robot(const Reader& r, double v_max) {
  r.reject_unknown({"role", "x", "y", "x_hat", "y_hat", "speed", "waypoints"});
  RobotSpec spec;
  const std::string role = r.word("role");
  if (role == "leader") {
    spec.role = Role::leader;
  } else if (role == "follower") {
    spec.role = Role::follower;
  } else {
    r.fail(r.line_of("role"), "role", "expected leader or follower, got '" + role + "'");
  }
  spec.position = {r.number("x"), r.number("y")};
  spec.estimate = {r.number_or("x_hat", spec.position.x), r.number_or("y_hat", spec.position.y)};
  if (spec.role == Role::leader) {
    spec.speed = r.number("speed");
    if (spec.speed < 0.0 || spec.speed > v_max) {
      r.fail(r.line_of("speed"), "speed", "leader speed must be in [0, v_max] (m/s)");
    }
    spec.waypoints = r.points(r.need("waypoints"), "waypoints");
    if (spec.waypoints.empty()) {
      r.fail(r.line_of("waypoints"), "waypoints", "leaders need at least one waypoint");
    }
  } else {
    for (const char* key : {"speed", "waypoints"}) {
      if (r.has(key)) r.fail(r.line_of(key), key, "only leaders take this key");
    }
  }
  return spec;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_matrix(const Mat2& m) {
  if (m.xy == 0.0 && m.yx == 0.0 && m.xx == m.yy) return fmt_number(m.xx);
  return "[[" + fmt_number(m.xx) + ", " + fmt_number(m.xy) + "], [" + fmt_number(m.yx) + ", " +
         fmt_number(m.yy) + "]]";
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  const std::vector<Section> sections = split_sections(text, origin);
  Scenario sc;
  bool have_params = false;
  for (const Section& s : sections) {
    if (s.name == "params") {
      parse_params(Reader(s, origin), sc.params);
      have_params = true;
    }
  }
  if (!have_params) throw ScenarioParseError(origin + ": missing [params] section");
  for (const Section& s : sections) {
    const Reader r(s, origin);
    if (s.name == "obstacle") sc.obstacles.push_back(parse_obstacle(r));
    if (s.name == "robot") sc.robots.push_back(parse_robot(r, sc.params.v_max));
  }
  if (sc.robots.empty()) throw ScenarioParseError(origin + ": at least one [[robot]] is required");
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioParseError(origin + ": " + e.what());
  }
  return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ScenarioParseError(path.string() + ": read error");
  return parse_scenario_text(ss.str(), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
  const SimParams& p = sc.params;
  const GraphParams& g = p.graph;
  std::ostringstream os;
  os << "[params]\n";
  os << "rho = " << fmt_number(g.rho) << "\n";
  os << "rho0 = " << fmt_number(g.rho0) << "\n";
  os << "d_beta_min = " << fmt_number(g.d_beta_min) << "\n";
  os << "d_beta_max = " << fmt_number(g.d_beta_max) << "\n";
  os << "d_gamma_min = " << fmt_number(g.d_gamma_min) << "\n";
  os << "d_gamma_max = " << fmt_number(g.d_gamma_max) << "\n";
  os << "s = " << fmt_number(g.s) << "\n";
  os << "epsilon = " << fmt_number(g.epsilon) << "\n";
  os << "collision_radius = " << fmt_number(g.collision_radius) << "\n";
  os << "dt = " << fmt_number(p.dt) << "\n";
  os << "v_max = " << fmt_number(p.v_max) << "\n";
  os << "duration = " << fmt_number(p.duration) << "\n";
  os << "q = " << fmt_matrix(p.noise.Q) << "\n";
  os << "r = " << fmt_matrix(p.noise.R) << "\n";
  os << "p0 = " << fmt_matrix(p.P0) << "\n";
  os << "k_fb = " << fmt_matrix(p.K_fb) << "\n";
  os << "consensus_rounds = " << p.consensus_rounds << "\n";
  os << "consensus_shift_margin = " << fmt_number(p.consensus_shift_margin) << "\n";
  os << "consensus_seed = " << p.consensus_seed << "\n";
  os << "algo = " << to_string(p.algo) << "\n";
  for (const Obstacle& o : sc.obstacles) {
    os << "\n[[obstacle]]\n";
    os << "cx = " << fmt_number(o.center.x) << "\ncy = " << fmt_number(o.center.y)
       << "\nr = " << fmt_number(o.radius) << "\n";
  }
  for (const RobotSpec& r : sc.robots) {
    os << "\n[[robot]]\n";
    os << "role = " << (r.role == Role::leader ? "leader" : "follower") << "\n";
    os << "x = " << fmt_number(r.position.x) << "\ny = " << fmt_number(r.position.y) << "\n";
    os << "x_hat = " << fmt_number(r.estimate.x) << "\ny_hat = " << fmt_number(r.estimate.y)
       << "\n";
    if (r.role == Role::leader) {
      os << "speed = " << fmt_number(r.speed) << "\n";
      os << "waypoints = [";
      for (std::size_t k = 0; k < r.waypoints.size(); ++k) {
        os << (k ? ", " : "") << "[" << fmt_number(r.waypoints[k].x) << ", "
           << fmt_number(r.waypoints[k].y) << "]";
      }
      os << "]\n";
    }
  }
  return os.str();
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_scenario(scenario)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dcmu
