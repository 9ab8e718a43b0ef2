#include "nematowave/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "nematowave/errors.hpp"

namespace nematowave {

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::Simulate:
      return "simulate";
    case Command::Lifespan:
      return "lifespan";
    case Command::Blowup1d:
      return "blowup1d";
    case Command::Converge:
      return "converge";
    case Command::VerifyAlgebra:
      return "verify-algebra";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Simulate, Command::Lifespan, Command::Blowup1d, Command::Converge, Command::VerifyAlgebra})
    if (name == to_string(c)) return c;
  throw ConfigError("unknown command '" + name + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

struct Key {
  const char* section;
  const char* name;
  const char* fallback;  // nullptr: required
  const char* help;
};

// Every accepted key. Defaults here are the documented ones.
const Key kKeys[] = {
    {"constants", "alpha", nullptr, "splay constant, > 0"},
    {"constants", "beta", nullptr, "twist constant, > 0"},
    {"constants", "gamma", nullptr, "bend constant, > 0"},
    {"grid", "dim", nullptr, "1, 2 or 3"},
    {"grid", "points", nullptr, "points per axis (one value or a comma list), >= 8"},
    {"grid", "extent", nullptr, "half-width per axis (one value or a comma list), > 0"},
    {"family", "profile", "bump", "bump | steep_bump | custom"},
    {"family", "amplitude", "0.05", "epsilon, >= 0"},
    {"family", "support_radius", "1", "support radius r, < extent"},
    {"family", "steepness", "1", "steep_bump: max |d1 u| = amplitude*steepness/r, >= 1"},
    {"family", "velocity", "zero", "zero | right_moving (v = -c1(u) d1 u)"},
    {"family", "snapshot", "", "custom: path of a snapshot holding (u, v)"},
    {"solver", "t_final", nullptr, "final time, > 0"},
    {"solver", "cfl_safety", "0.4", "in (0, 1]"},
    {"solver", "record_every", "1", "steps between diagnostics records, >= 1"},
    {"solver", "blowup_gradient_factor", "100", "> 1"},
    {"solver", "blowup_absolute_cap", "1e6", "> 0"},
    {"solver", "scheme", "conservative", "conservative | pointwise"},
    {"solver", "fixed_steps", "0", "explicit step count (0: from the CFL number)"},
    {"solver", "gamma_order", "1", "largest N of recorded Gamma-norms, 0..2"},
    {"solver", "modified_energy", "auto", "auto | true | false (true needs alpha <= gamma)"},
    {"solver", "modified_order", "1", "largest k of the modified energy, 0..1"},
    {"solver", "probes", "false", "record decay and product probe ratios"},
    {"solver", "source", "none", "none | gaussian | affine (manufactured solution)"},
    {"solver", "source_amplitude", "0.2", "gaussian amplitude"},
    {"solver", "source_omega", "1", "gaussian time frequency"},
    {"solver", "source_width", "1", "gaussian width"},
    {"run", "amplitudes", "", "lifespan: comma list of distinct positive amplitudes"},
    {"run", "refine", "false", "blowup1d: repeat at h/2 and report the T_num shift"},
    {"run", "snapshot_every", "0", "write a snapshot every n-th record (0: final state only)"},
    {"run", "threads", "0", "OpenMP workers (0: runtime default)"},
    {"run", "samples", "10000", "verify-algebra: sample count"},
    {"run", "seed", "7", "verify-algebra: sampling seed"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line of `key` inside [section] (1-based), 0 if not found.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream is(text);
  std::string line, current;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

class Reader {
 public:
  Reader(const std::string& text, const boost::property_tree::ptree& tree) : text_(text) {
    for (const auto& [sec, body] : tree) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("key '" + sec + "' is outside any section", locate(text, "", sec), sec);
      bool known_section = false;
      for (const auto& k : kKeys) known_section = known_section || sec == k.section;
      if (!known_section) throw ConfigError("unknown section [" + sec + "]", 0, sec);
      for (const auto& [key, val] : body) {
        const std::string full = sec + "." + key;
        bool known = false;
        for (const auto& k : kKeys) known = known || (sec == k.section && key == k.name);
        if (!known) throw ConfigError("unknown key '" + full + "'", locate(text, sec, key), full);
        values_[full] = trim(val.data());
      }
    }
  }

  std::string raw(const char* section, const char* name) const {
    const std::string full = std::string(section) + "." + name;
    auto it = values_.find(full);
    if (it != values_.end()) return it->second;
    for (const auto& k : kKeys)
      if (full == std::string(k.section) + "." + k.name) {
        if (!k.fallback) throw ConfigError("missing required key '" + full + "'", 0, full);
        return k.fallback;
      }
    throw ConfigError("internal: undeclared key " + full, 0, full);
  }

  bool has(const char* section, const char* name) const {
    return values_.count(std::string(section) + "." + name) > 0;
  }

  [[noreturn]] void fail(const char* section, const char* name, const std::string& why) const {
    const std::string full = std::string(section) + "." + name;
    throw ConfigError(full + ": " + why, locate(text_, section, name), full);
  }

  double number(const char* section, const char* name) const {
    const std::string s = raw(section, name);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) fail(section, name, "expected a number, got '" + s + "'");
    return v;
  }

  std::size_t count(const char* section, const char* name) const {
    const double v = number(section, name);
    if (v < 0.0 || v != std::floor(v) || v > 1e15) fail(section, name, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const char* section, const char* name) const {
    const std::string s = raw(section, name);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(section, name, "expected true or false, got '" + s + "'");
  }

  std::vector<double> list(const char* section, const char* name) const {
    const std::string s = raw(section, name);
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
      item = trim(item);
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v))
        fail(section, name, "expected a comma-separated list of numbers");
      out.push_back(v);
    }
    return out;
  }

  std::string word(const char* section, const char* name, std::initializer_list<const char*> allowed) const {
    const std::string s = raw(section, name);
    for (const char* a : allowed)
      if (s == a) return s;
    std::string opts;
    for (const char* a : allowed) opts += std::string(opts.empty() ? "" : " | ") + a;
    fail(section, name, "expected one of " + opts + ", got '" + s + "'");
  }

 private:
  const std::string& text_;
  std::map<std::string, std::string> values_;
};

}  // namespace

RunConfig parse_config(const std::string& text, Command command) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("syntax error: " + e.message(), static_cast<int>(e.line()));
  }
  const Reader rd(text, tree);
  RunConfig rc;
  rc.command = command;

  auto& c = rc.experiment.solver.constants;
  c.alpha = rd.number("constants", "alpha");
  c.beta = rd.number("constants", "beta");
  c.gamma = rd.number("constants", "gamma");
  for (auto [name, val] : {std::pair{"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}})
    if (!(val > 0.0)) rd.fail("constants", name, "elastic constants must be positive");

  const std::size_t dim = rd.count("grid", "dim");
  if (dim < 1 || dim > 3) rd.fail("grid", "dim", "must be 1, 2 or 3");
  const auto pts = rd.list("grid", "points");
  const auto ext = rd.list("grid", "extent");
  auto expand = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != 1 && v.size() != dim) rd.fail("grid", name, "give one value or one per axis");
    std::array<double, 3> out{};
    for (std::size_t a = 0; a < dim; ++a) out[a] = v.size() == 1 ? v[0] : v[a];
    return out;
  };
  const auto pa = expand(pts, "points");
  const auto ea = expand(ext, "extent");
  std::array<std::size_t, 3> pn{1, 1, 1};
  for (std::size_t a = 0; a < dim; ++a) {
    if (pa[a] < static_cast<double>(kMinPoints) || pa[a] != std::floor(pa[a]))
      rd.fail("grid", "points", "each axis needs an integer count >= 8");
    if (!(ea[a] > 0.0)) rd.fail("grid", "extent", "must be positive");
    pn[a] = static_cast<std::size_t>(pa[a]);
  }
  rc.experiment.grid = GridSpec(static_cast<int>(dim), ea, pn);

  auto& f = rc.experiment.family;
  const std::string prof = rd.word("family", "profile", {"bump", "steep_bump", "custom"});
  f.profile = prof == "bump"         ? InitialDataFamily::Profile::Bump
              : prof == "steep_bump" ? InitialDataFamily::Profile::SteepBump
                                     : InitialDataFamily::Profile::Custom;
  f.amplitude = rd.number("family", "amplitude");
  if (!(f.amplitude >= 0.0)) rd.fail("family", "amplitude", "must be nonnegative");
  f.support_radius = rd.number("family", "support_radius");
  if (!(f.support_radius > 0.0)) rd.fail("family", "support_radius", "must be positive");
  for (std::size_t a = 0; a < dim; ++a)
    if (f.profile != InitialDataFamily::Profile::Custom && !(f.support_radius < ea[a]))
      rd.fail("family", "support_radius", "support must fit inside the grid extent");
  f.steepness = rd.number("family", "steepness");
  if (!(f.steepness >= 1.0)) rd.fail("family", "steepness", "must be at least 1");
  f.velocity = rd.word("family", "velocity", {"zero", "right_moving"}) == "zero"
                   ? InitialDataFamily::Velocity::Zero
                   : InitialDataFamily::Velocity::RightMoving;
  f.custom_path = rd.raw("family", "snapshot");
  if (f.profile == InitialDataFamily::Profile::Custom && f.custom_path.empty())
    rd.fail("family", "snapshot", "custom profile needs a snapshot path");

  auto& s = rc.experiment.solver;
  s.t_final = rd.number("solver", "t_final");
  if (!(s.t_final > 0.0)) rd.fail("solver", "t_final", "must be positive");
  s.cfl_safety = rd.number("solver", "cfl_safety");
  if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) rd.fail("solver", "cfl_safety", "must lie in (0, 1]");
  s.record_every = rd.count("solver", "record_every");
  if (s.record_every < 1) rd.fail("solver", "record_every", "must be at least 1");
  s.blowup_gradient_factor = rd.number("solver", "blowup_gradient_factor");
  if (!(s.blowup_gradient_factor > 1.0)) rd.fail("solver", "blowup_gradient_factor", "must exceed 1");
  s.blowup_absolute_cap = rd.number("solver", "blowup_absolute_cap");
  if (!(s.blowup_absolute_cap > 0.0)) rd.fail("solver", "blowup_absolute_cap", "must be positive");
  s.scheme = rd.word("solver", "scheme", {"conservative", "pointwise"}) == "conservative" ? Scheme::Conservative
                                                                                          : Scheme::Pointwise;
  s.fixed_steps = rd.count("solver", "fixed_steps");
  const std::size_t go = rd.count("solver", "gamma_order");
  if (go > 2) rd.fail("solver", "gamma_order", "must be 0, 1 or 2");
  s.diagnostics.gamma_order = static_cast<int>(go);
  const std::string me = rd.word("solver", "modified_energy", {"auto", "true", "false"});
  if (me == "true" && c.alpha > c.gamma)
    rd.fail("solver", "modified_energy",
            "the rescaled matrix behind the modified energy assumes alpha <= gamma (got alpha > gamma)");
  s.diagnostics.modified_energy = me == "true" || (me == "auto" && c.alpha <= c.gamma);
  const std::size_t mo = rd.count("solver", "modified_order");
  if (mo > 1) rd.fail("solver", "modified_order", "must be 0 or 1");
  s.diagnostics.modified_order = static_cast<int>(mo);
  s.diagnostics.probes = rd.boolean("solver", "probes");
  const std::string src = rd.word("solver", "source", {"none", "gaussian", "affine"});
  if (src != "none") {
    ManufacturedSolution m;
    m.kind = src == "gaussian" ? ManufacturedSolution::Kind::Gaussian : ManufacturedSolution::Kind::Affine;
    m.amplitude = rd.number("solver", "source_amplitude");
    m.omega = rd.number("solver", "source_omega");
    m.width = rd.number("solver", "source_width");
    if (!(m.width > 0.0)) rd.fail("solver", "source_width", "must be positive");
    s.source = m;
  }

  rc.amplitudes = rd.has("run", "amplitudes") ? rd.list("run", "amplitudes") : std::vector<double>{};
  rc.refine = rd.boolean("run", "refine");
  rc.snapshot_every = rd.count("run", "snapshot_every");
  rc.threads = static_cast<int>(rd.count("run", "threads"));
  rc.samples = rd.count("run", "samples");
  if (rc.samples < 1) rd.fail("run", "samples", "must be at least 1");
  rc.seed = rd.count("run", "seed");

  switch (command) {
    case Command::Lifespan: {
      if (rc.amplitudes.empty()) rd.fail("run", "amplitudes", "lifespan needs at least one amplitude");
      std::vector<double> a = rc.amplitudes;
      for (double x : a)
        if (!(x > 0.0)) rd.fail("run", "amplitudes", "amplitudes must be positive");
      std::sort(a.begin(), a.end());
      if (std::adjacent_find(a.begin(), a.end()) != a.end()) rd.fail("run", "amplitudes", "amplitudes must be distinct");
      if (s.source) rd.fail("solver", "source", "lifespan runs take no manufactured source");
      break;
    }
    case Command::Blowup1d:
      if (dim != 1) rd.fail("grid", "dim", "blowup1d runs in one dimension");
      if (c.alpha == c.gamma) rd.fail("constants", "gamma", "blowup1d needs alpha != gamma");
      if (s.source) rd.fail("solver", "source", "blowup1d takes no manufactured source");
      break;
    case Command::Converge:
      if (!s.source) rd.fail("solver", "source", "converge needs a manufactured source");
      break;
    case Command::Simulate:
    case Command::VerifyAlgebra:
      break;
  }
  return rc;
}

std::string config_reference() {
  std::ostringstream os;
  os << "Configuration keys (INI, flat sections; unknown keys are errors):\n";
  const char* sec = "";
  for (const auto& k : kKeys) {
    if (std::string(sec) != k.section) {
      sec = k.section;
      os << "  [" << sec << "]\n";
    }
    os << "    " << k.name << " = " << (k.fallback ? (*k.fallback ? k.fallback : "\"\"") : "(required)") << "  ; "
       << k.help << '\n';
  }
  return os.str();
}

}  // namespace nematowave
