#include "motilab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "motilab/format.hpp"

namespace motilab {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      fail(line, "expected 'key = value', got '" + s + "'");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "empty value for key '" + key + "'");
    entries.push_back({std::move(key), std::move(value), line});
  }
  return entries;
}

double to_scalar(const Entry& e) {
  try {
    return parse_double(e.value);
  } catch (const std::invalid_argument&) {
    fail(e.line, "key '" + e.key + "': '" + e.value + "' is not a number");
  }
}

long long to_integer(const Entry& e) {
  long long out = 0;
  const char* b = e.value.data();
  const char* ed = b + e.value.size();
  auto [p, ec] = std::from_chars(b, ed, out);
  if (ec != std::errc() || p != ed) {
    fail(e.line, "key '" + e.key + "': '" + e.value + "' is not an integer");
  }
  return out;
}

std::uint64_t to_unsigned(const Entry& e) {
  std::uint64_t out = 0;
  const char* b = e.value.data();
  const char* ed = b + e.value.size();
  auto [p, ec] = std::from_chars(b, ed, out);
  if (ec != std::errc() || p != ed) {
    fail(e.line,
         "key '" + e.key + "': '" + e.value + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, "key '" + e.key + "': expected true or false");
}

// Keys whose presence depends on another key; checked after dispatch.
struct Seen {
  std::map<std::string, int> line_of;
  bool has(const std::string& k) const { return line_of.count(k) != 0; }
  int line(const std::string& k) const { return line_of.at(k); }
};

void require(const Seen& seen, const std::string& key) {
  if (!seen.has(key)) {
    throw ConfigError("missing required key '" + key + "'");
  }
}

void forbid(const Seen& seen, const std::string& key,
            const std::string& reason) {
  if (seen.has(key)) {
    fail(seen.line(key), "key '" + key + "' " + reason);
  }
}

// Deterministic uniform in [-1, 1); independent of library distribution
// internals so seeds reproduce across platforms.
double unit_draw(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

Grid RunConfig::make_grid() const {
  if (dimension == 1) return Grid::line(extent_x, vertices_x);
  return Grid::rectangle(extent_x, extent_y, vertices_x, vertices_y);
}

MotilityFunction RunConfig::make_motility() const {
  if (motility_family == "exponential") {
    return MotilityFunction::exponential(motility_alpha);
  }
  if (motility_family == "inverse_power") {
    return MotilityFunction::inverse_power(motility_epsilon, motility_alpha);
  }
  return MotilityFunction::constant(motility_c);
}

Field RunConfig::make_u0(const Grid& g) const {
  switch (u0.preset) {
    case U0Spec::Preset::constant:
      return Field::constant(g, u0.value);
    case U0Spec::Preset::cosine: {
      const double a = u0.amplitude;
      const double kx = u0.mode * M_PI / extent_x;
      const double ky = u0.mode * M_PI / extent_y;
      const bool two_d = dimension == 2;
      return Field::from_function(g, [=](double x, double y) {
        double f = std::cos(kx * x);
        if (two_d) f *= std::cos(ky * y);
        return 1.0 + a * f;
      });
    }
    case U0Spec::Preset::random_smooth:
      break;
  }
  // low-mode cosine series with seeded coefficients, normalized so the
  // deviation from 1 has sup norm exactly `amplitude` on the grid
  std::mt19937_64 rng(u0.seed);
  Field f = Field::zeros(g);
  if (dimension == 1) {
    for (int m = 1; m <= 4; ++m) {
      double c = unit_draw(rng) / (m * m);
      double k = m * M_PI / extent_x;
      for (int i = 0; i < g.vertices(0); ++i) {
        f.values[static_cast<std::size_t>(i)] +=
            c * std::cos(k * i * g.spacing(0));
      }
    }
  } else {
    for (int m = 0; m <= 3; ++m) {
      for (int l = 0; l <= 3; ++l) {
        if (m == 0 && l == 0) continue;
        double c = unit_draw(rng) / (1.0 + m * m + l * l);
        double kx = m * M_PI / extent_x;
        double ky = l * M_PI / extent_y;
        for (int j = 0; j < g.vertices(1); ++j) {
          for (int i = 0; i < g.vertices(0); ++i) {
            f.values[g.index(i, j)] += c * std::cos(kx * i * g.spacing(0)) *
                                       std::cos(ky * j * g.spacing(1));
          }
        }
      }
    }
  }
  double sup = 0.0;
  for (double v : f.values) sup = std::max(sup, std::fabs(v));
  const double scale = sup > 0.0 ? u0.amplitude / sup : 0.0;
  for (double& v : f.values) v = 1.0 + scale * v;
  return f;
}

std::string RunConfig::echo_text() const {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto putd = [&](const std::string& key, double v) {
    put(key, format_double(v));
  };

  put("grid.dimension", std::to_string(dimension));
  putd("grid.extent_x", extent_x);
  put("grid.vertices_x", std::to_string(vertices_x));
  if (dimension == 2) {
    putd("grid.extent_y", extent_y);
    put("grid.vertices_y", std::to_string(vertices_y));
  }

  put("motility.family", motility_family);
  if (motility_family == "exponential") {
    putd("motility.alpha", motility_alpha);
  } else if (motility_family == "inverse_power") {
    putd("motility.epsilon", motility_epsilon);
    putd("motility.alpha", motility_alpha);
  } else {
    putd("motility.value", motility_c);
  }
  putd("mu", mu);

  switch (u0.preset) {
    case U0Spec::Preset::constant:
      put("u0.preset", "constant");
      putd("u0.value", u0.value);
      break;
    case U0Spec::Preset::cosine:
      put("u0.preset", "cosine");
      putd("u0.amplitude", u0.amplitude);
      put("u0.mode", std::to_string(u0.mode));
      break;
    case U0Spec::Preset::random_smooth:
      put("u0.preset", "random_smooth");
      putd("u0.amplitude", u0.amplitude);
      put("u0.seed", std::to_string(u0.seed));
      break;
  }

  put("scheme.form", scheme.form == SpatialForm::conservative
                         ? "conservative"
                         : "non_divergence");
  if (scheme.regularization_n) {
    putd("scheme.regularization_n", *scheme.regularization_n);
  }
  putd("scheme.cfl_safety", scheme.cfl_safety);
  putd("scheme.t_end", scheme.t_end);
  put("scheme.output_stride", std::to_string(scheme.output_stride));
  if (scheme.fixed_dt) putd("scheme.fixed_dt", *scheme.fixed_dt);

  put("envelope.auto", envelope.auto_straddle ? "true" : "false");
  if (envelope.auto_straddle) {
    putd("envelope.delta", envelope.delta);
  } else {
    putd("envelope.lo0", envelope.lo0);
    putd("envelope.hi0", envelope.hi0);
  }
  switch (envelope.a_source) {
    case EnvelopeSpec::Source::measured:
      put("envelope.a_source", "measured");
      break;
    case EnvelopeSpec::Source::closed_bound:
      put("envelope.a_source", "closed_bound");
      break;
    case EnvelopeSpec::Source::zero:
      put("envelope.a_source", "zero");
      break;
  }
  putd("envelope.dt", envelope.dt);
  if (envelope.c_omega) putd("envelope.c_omega", *envelope.c_omega);
  putd("envelope.c_omega_safety", envelope.c_omega_safety);

  if (diagnostics.t_check) putd("diagnostics.t_check", *diagnostics.t_check);
  putd("diagnostics.eps", diagnostics.eps);
  putd("diagnostics.c_tol", diagnostics.c_tol);
  putd("diagnostics.positivity_tol", diagnostics.positivity_tol);
  putd("diagnostics.decay_rel_tol", diagnostics.decay_rel_tol);
  putd("diagnostics.lp_p", diagnostics.lp_p);

  put("constants.samples", std::to_string(constants_samples));
  put("constants.seed", std::to_string(constants_seed));
  putd("audit.s_max", audit_s_max);
  put("output.dir", output_dir);
  return out;
}

std::string RunConfig::echo_json() const {
  nlohmann::ordered_json j;
  j["grid"] = {{"dimension", dimension},
               {"extent_x", extent_x},
               {"vertices_x", vertices_x}};
  if (dimension == 2) {
    j["grid"]["extent_y"] = extent_y;
    j["grid"]["vertices_y"] = vertices_y;
  }
  j["motility"]["family"] = motility_family;
  if (motility_family == "exponential") {
    j["motility"]["alpha"] = motility_alpha;
  } else if (motility_family == "inverse_power") {
    j["motility"]["epsilon"] = motility_epsilon;
    j["motility"]["alpha"] = motility_alpha;
  } else {
    j["motility"]["value"] = motility_c;
  }
  j["mu"] = mu;
  switch (u0.preset) {
    case U0Spec::Preset::constant:
      j["u0"] = {{"preset", "constant"}, {"value", u0.value}};
      break;
    case U0Spec::Preset::cosine:
      j["u0"] = {{"preset", "cosine"},
                 {"amplitude", u0.amplitude},
                 {"mode", u0.mode}};
      break;
    case U0Spec::Preset::random_smooth:
      j["u0"] = {{"preset", "random_smooth"},
                 {"amplitude", u0.amplitude},
                 {"seed", u0.seed}};
      break;
  }
  j["scheme"]["form"] = scheme.form == SpatialForm::conservative
                            ? "conservative"
                            : "non_divergence";
  if (scheme.regularization_n) {
    j["scheme"]["regularization_n"] = *scheme.regularization_n;
  }
  j["scheme"]["cfl_safety"] = scheme.cfl_safety;
  j["scheme"]["t_end"] = scheme.t_end;
  j["scheme"]["output_stride"] = scheme.output_stride;
  if (scheme.fixed_dt) j["scheme"]["fixed_dt"] = *scheme.fixed_dt;
  j["envelope"]["auto"] = envelope.auto_straddle;
  if (envelope.auto_straddle) {
    j["envelope"]["delta"] = envelope.delta;
  } else {
    j["envelope"]["lo0"] = envelope.lo0;
    j["envelope"]["hi0"] = envelope.hi0;
  }
  j["envelope"]["a_source"] =
      envelope.a_source == EnvelopeSpec::Source::measured
          ? "measured"
          : envelope.a_source == EnvelopeSpec::Source::closed_bound
                ? "closed_bound"
                : "zero";
  j["envelope"]["dt"] = envelope.dt;
  if (envelope.c_omega) j["envelope"]["c_omega"] = *envelope.c_omega;
  j["envelope"]["c_omega_safety"] = envelope.c_omega_safety;
  if (diagnostics.t_check) j["diagnostics"]["t_check"] = *diagnostics.t_check;
  j["diagnostics"]["eps"] = diagnostics.eps;
  j["diagnostics"]["c_tol"] = diagnostics.c_tol;
  j["diagnostics"]["positivity_tol"] = diagnostics.positivity_tol;
  j["diagnostics"]["decay_rel_tol"] = diagnostics.decay_rel_tol;
  j["diagnostics"]["lp_p"] = diagnostics.lp_p;
  j["constants"] = {{"samples", constants_samples}, {"seed", constants_seed}};
  j["audit"] = {{"s_max", audit_s_max}};
  j["output"] = {{"dir", output_dir}};
  return j.dump(2);
}

RunConfig parse_config(const std::string& text) {
  std::vector<Entry> entries = tokenize(text);
  RunConfig cfg;
  Seen seen;

  for (const Entry& e : entries) {
    if (seen.has(e.key)) {
      fail(e.line, "duplicate key '" + e.key + "' (first on line " +
                       std::to_string(seen.line(e.key)) + ")");
    }
    seen.line_of[e.key] = e.line;

    if (e.key == "grid.dimension") {
      long long d = to_integer(e);
      if (d != 1 && d != 2) fail(e.line, "grid.dimension must be 1 or 2");
      cfg.dimension = static_cast<int>(d);
    } else if (e.key == "grid.extent_x") {
      cfg.extent_x = to_scalar(e);
      if (!(cfg.extent_x > 0.0) || !std::isfinite(cfg.extent_x)) {
        fail(e.line, "grid.extent_x must be positive and finite");
      }
    } else if (e.key == "grid.extent_y") {
      cfg.extent_y = to_scalar(e);
      if (!(cfg.extent_y > 0.0) || !std::isfinite(cfg.extent_y)) {
        fail(e.line, "grid.extent_y must be positive and finite");
      }
    } else if (e.key == "grid.vertices_x") {
      long long n = to_integer(e);
      if (n < 2) fail(e.line, "grid.vertices_x must be at least 2");
      cfg.vertices_x = static_cast<int>(n);
    } else if (e.key == "grid.vertices_y") {
      long long n = to_integer(e);
      if (n < 2) fail(e.line, "grid.vertices_y must be at least 2");
      cfg.vertices_y = static_cast<int>(n);
    } else if (e.key == "motility.family") {
      if (e.value != "exponential" && e.value != "inverse_power" &&
          e.value != "constant") {
        fail(e.line,
             "motility.family must be exponential, inverse_power, or "
             "constant");
      }
      cfg.motility_family = e.value;
    } else if (e.key == "motility.alpha") {
      cfg.motility_alpha = to_scalar(e);
      if (!(cfg.motility_alpha > 0.0) || !std::isfinite(cfg.motility_alpha)) {
        fail(e.line, "motility.alpha must be positive and finite");
      }
    } else if (e.key == "motility.epsilon") {
      cfg.motility_epsilon = to_scalar(e);
      if (!(cfg.motility_epsilon > 0.0) ||
          !std::isfinite(cfg.motility_epsilon)) {
        fail(e.line, "motility.epsilon must be positive and finite");
      }
    } else if (e.key == "motility.value") {
      cfg.motility_c = to_scalar(e);
      if (!(cfg.motility_c > 0.0) || !std::isfinite(cfg.motility_c)) {
        fail(e.line, "motility.value must be positive and finite");
      }
    } else if (e.key == "mu") {
      cfg.mu = to_scalar(e);
      if (!(cfg.mu > 0.0) || !std::isfinite(cfg.mu)) {
        fail(e.line, "mu must be positive and finite");
      }
    } else if (e.key == "u0.preset") {
      if (e.value == "constant") {
        cfg.u0.preset = U0Spec::Preset::constant;
      } else if (e.value == "cosine") {
        cfg.u0.preset = U0Spec::Preset::cosine;
      } else if (e.value == "random_smooth") {
        cfg.u0.preset = U0Spec::Preset::random_smooth;
      } else {
        fail(e.line,
             "u0.preset must be constant, cosine, or random_smooth");
      }
    } else if (e.key == "u0.value") {
      cfg.u0.value = to_scalar(e);
      if (!(cfg.u0.value > 0.0) || !std::isfinite(cfg.u0.value)) {
        fail(e.line, "u0.value must be positive and finite");
      }
    } else if (e.key == "u0.amplitude") {
      cfg.u0.amplitude = to_scalar(e);
      if (!(std::fabs(cfg.u0.amplitude) < 1.0)) {
        fail(e.line, "u0.amplitude must satisfy |A| < 1 to keep u0 positive");
      }
    } else if (e.key == "u0.mode") {
      long long m = to_integer(e);
      if (m < 1) fail(e.line, "u0.mode must be a positive integer");
      cfg.u0.mode = static_cast<int>(m);
    } else if (e.key == "u0.seed") {
      cfg.u0.seed = to_unsigned(e);
    } else if (e.key == "scheme.form") {
      if (e.value == "conservative") {
        cfg.scheme.form = SpatialForm::conservative;
      } else if (e.value == "non_divergence") {
        cfg.scheme.form = SpatialForm::non_divergence;
      } else {
        fail(e.line, "scheme.form must be conservative or non_divergence");
      }
    } else if (e.key == "scheme.regularization_n") {
      double n = to_scalar(e);
      if (!(n >= 1.0)) {
        fail(e.line, "scheme.regularization_n must be at least 1");
      }
      cfg.scheme.regularization_n = n;
    } else if (e.key == "scheme.cfl_safety") {
      cfg.scheme.cfl_safety = to_scalar(e);
      if (!(cfg.scheme.cfl_safety > 0.0) || !(cfg.scheme.cfl_safety <= 1.0)) {
        fail(e.line, "scheme.cfl_safety must lie in (0, 1]");
      }
    } else if (e.key == "scheme.t_end") {
      cfg.scheme.t_end = to_scalar(e);
      if (!(cfg.scheme.t_end >= 0.0) || !std::isfinite(cfg.scheme.t_end)) {
        fail(e.line, "scheme.t_end must be non-negative and finite");
      }
    } else if (e.key == "scheme.output_stride") {
      long long s = to_integer(e);
      if (s < 1) fail(e.line, "scheme.output_stride must be at least 1");
      cfg.scheme.output_stride = s;
    } else if (e.key == "scheme.fixed_dt") {
      double dt = to_scalar(e);
      if (!(dt > 0.0) || !std::isfinite(dt)) {
        fail(e.line, "scheme.fixed_dt must be positive and finite");
      }
      cfg.scheme.fixed_dt = dt;
    } else if (e.key == "envelope.auto") {
      cfg.envelope.auto_straddle = to_bool(e);
    } else if (e.key == "envelope.delta") {
      cfg.envelope.delta = to_scalar(e);
      if (!(cfg.envelope.delta >= 0.0) || !(cfg.envelope.delta < 1.0)) {
        fail(e.line, "envelope.delta must lie in [0, 1)");
      }
    } else if (e.key == "envelope.lo0") {
      cfg.envelope.lo0 = to_scalar(e);
    } else if (e.key == "envelope.hi0") {
      cfg.envelope.hi0 = to_scalar(e);
    } else if (e.key == "envelope.a_source") {
      if (e.value == "measured") {
        cfg.envelope.a_source = EnvelopeSpec::Source::measured;
      } else if (e.value == "closed_bound") {
        cfg.envelope.a_source = EnvelopeSpec::Source::closed_bound;
      } else if (e.value == "zero") {
        cfg.envelope.a_source = EnvelopeSpec::Source::zero;
      } else {
        fail(e.line,
             "envelope.a_source must be measured, closed_bound, or zero");
      }
    } else if (e.key == "envelope.dt") {
      cfg.envelope.dt = to_scalar(e);
      if (!(cfg.envelope.dt > 0.0) || !std::isfinite(cfg.envelope.dt)) {
        fail(e.line, "envelope.dt must be positive and finite");
      }
    } else if (e.key == "envelope.c_omega") {
      double c = to_scalar(e);
      if (!(c >= 0.0) || !std::isfinite(c)) {
        fail(e.line, "envelope.c_omega must be non-negative and finite");
      }
      cfg.envelope.c_omega = c;
    } else if (e.key == "envelope.c_omega_safety") {
      cfg.envelope.c_omega_safety = to_scalar(e);
      if (!(cfg.envelope.c_omega_safety > 0.0) ||
          !std::isfinite(cfg.envelope.c_omega_safety)) {
        fail(e.line, "envelope.c_omega_safety must be positive and finite");
      }
    } else if (e.key == "diagnostics.t_check") {
      double t = to_scalar(e);
      if (!(t >= 0.0) || !std::isfinite(t)) {
        fail(e.line, "diagnostics.t_check must be non-negative and finite");
      }
      cfg.diagnostics.t_check = t;
    } else if (e.key == "diagnostics.eps") {
      cfg.diagnostics.eps = to_scalar(e);
      if (!(cfg.diagnostics.eps > 0.0)) {
        fail(e.line, "diagnostics.eps must be positive");
      }
    } else if (e.key == "diagnostics.c_tol") {
      cfg.diagnostics.c_tol = to_scalar(e);
      if (!(cfg.diagnostics.c_tol > 0.0)) {
        fail(e.line, "diagnostics.c_tol must be positive");
      }
    } else if (e.key == "diagnostics.positivity_tol") {
      cfg.diagnostics.positivity_tol = to_scalar(e);
      if (!(cfg.diagnostics.positivity_tol >= 0.0)) {
        fail(e.line, "diagnostics.positivity_tol must be non-negative");
      }
    } else if (e.key == "diagnostics.decay_rel_tol") {
      cfg.diagnostics.decay_rel_tol = to_scalar(e);
      if (!(cfg.diagnostics.decay_rel_tol >= 0.0)) {
        fail(e.line, "diagnostics.decay_rel_tol must be non-negative");
      }
    } else if (e.key == "diagnostics.lp_p") {
      cfg.diagnostics.lp_p = to_scalar(e);
      if (!(cfg.diagnostics.lp_p >= 4.0)) {
        fail(e.line, "diagnostics.lp_p must be at least 4");
      }
    } else if (e.key == "constants.samples") {
      long long n = to_integer(e);
      if (n < 1) fail(e.line, "constants.samples must be at least 1");
      cfg.constants_samples = static_cast<int>(n);
    } else if (e.key == "constants.seed") {
      cfg.constants_seed = to_unsigned(e);
    } else if (e.key == "audit.s_max") {
      cfg.audit_s_max = to_scalar(e);
      if (!(cfg.audit_s_max > 0.0) || !std::isfinite(cfg.audit_s_max)) {
        fail(e.line, "audit.s_max must be positive and finite");
      }
    } else if (e.key == "output.dir") {
      cfg.output_dir = e.value;
    } else {
      fail(e.line, "unknown key '" + e.key + "'");
    }
  }

  require(seen, "grid.vertices_x");
  require(seen, "motility.family");
  require(seen, "mu");
  require(seen, "u0.preset");

  if (cfg.dimension == 2) {
    require(seen, "grid.vertices_y");
  } else {
    forbid(seen, "grid.vertices_y", "is only meaningful for dimension = 2");
    forbid(seen, "grid.extent_y", "is only meaningful for dimension = 2");
  }

  if (cfg.motility_family == "exponential") {
    require(seen, "motility.alpha");
    forbid(seen, "motility.epsilon",
           "is not a parameter of the exponential family");
    forbid(seen, "motility.value",
           "is not a parameter of the exponential family");
  } else if (cfg.motility_family == "inverse_power") {
    require(seen, "motility.alpha");
    require(seen, "motility.epsilon");
    forbid(seen, "motility.value",
           "is not a parameter of the inverse_power family");
  } else {
    require(seen, "motility.value");
    forbid(seen, "motility.alpha",
           "is not a parameter of the constant family");
    forbid(seen, "motility.epsilon",
           "is not a parameter of the constant family");
  }

  switch (cfg.u0.preset) {
    case U0Spec::Preset::constant:
      forbid(seen, "u0.amplitude", "applies to cosine or random_smooth u0");
      forbid(seen, "u0.mode", "applies to cosine u0");
      forbid(seen, "u0.seed", "applies to random_smooth u0");
      break;
    case U0Spec::Preset::cosine:
      forbid(seen, "u0.value", "applies to constant u0");
      forbid(seen, "u0.seed", "applies to random_smooth u0");
      break;
    case U0Spec::Preset::random_smooth:
      forbid(seen, "u0.value", "applies to constant u0");
      forbid(seen, "u0.mode", "applies to cosine u0");
      if (!(cfg.u0.amplitude >= 0.0)) {
        fail(seen.line("u0.amplitude"),
             "u0.amplitude must be non-negative for random_smooth u0");
      }
      break;
  }

  if (cfg.envelope.auto_straddle) {
    forbid(seen, "envelope.lo0", "requires envelope.auto = false");
    forbid(seen, "envelope.hi0", "requires envelope.auto = false");
    if (cfg.envelope.delta == 0.0) {
      const bool u0_is_one =
          (cfg.u0.preset == U0Spec::Preset::constant &&
           cfg.u0.value == 1.0) ||
          (cfg.u0.preset != U0Spec::Preset::constant &&
           cfg.u0.amplitude == 0.0);
      if (u0_is_one) {
        throw ConfigError(
            "envelope straddle impossible: envelope.delta = 0 while u0 is "
            "identically 1");
      }
    }
  } else {
    forbid(seen, "envelope.delta", "requires envelope.auto = true");
    require(seen, "envelope.lo0");
    require(seen, "envelope.hi0");
    if (!(cfg.envelope.lo0 > 0.0) || !(cfg.envelope.lo0 < 1.0) ||
        !(cfg.envelope.hi0 > 1.0) || !std::isfinite(cfg.envelope.hi0)) {
      throw ConfigError(
          "explicit envelope must satisfy 0 < envelope.lo0 < 1 < "
          "envelope.hi0");
    }
  }

  return cfg;
}

std::vector<SweepPoint> expand_sweep(const std::string& text) {
  // pull sweep.* lines out, keep everything else verbatim so parse errors
  // still point at the original line numbers
  std::vector<std::string> base_lines;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  {
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    std::set<std::string> seen_axes;
    while (std::getline(is, raw)) {
      ++line;
      std::string stripped = raw;
      std::size_t hash = stripped.find('#');
      if (hash != std::string::npos) stripped.erase(hash);
      stripped = trim(stripped);
      std::size_t eq = stripped.find('=');
      std::string key =
          eq == std::string::npos ? "" : trim(stripped.substr(0, eq));
      if (key.rfind("sweep.", 0) != 0) {
        base_lines.push_back(raw);
        continue;
      }
      std::string target = key.substr(6);
      if (target.empty()) fail(line, "empty sweep key");
      if (!seen_axes.insert(target).second) {
        fail(line, "duplicate sweep key '" + target + "'");
      }
      std::vector<std::string> values;
      std::string list = trim(stripped.substr(eq + 1));
      std::size_t pos = 0;
      while (pos <= list.size()) {
        std::size_t comma = list.find(',', pos);
        std::string v = trim(list.substr(
            pos, comma == std::string::npos ? std::string::npos
                                            : comma - pos));
        if (v.empty()) {
          fail(line, "sweep list for '" + target + "' has an empty entry");
        }
        values.push_back(std::move(v));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      axes.emplace_back(std::move(target), std::move(values));
      base_lines.push_back("# sweep axis expanded");
    }
  }
  if (axes.empty()) {
    throw ConfigError("sweep requires at least one sweep.KEY = v1, v2 line");
  }

  std::size_t total = 1;
  for (const auto& [key, values] : axes) total *= values.size();

  std::vector<SweepPoint> points;
  points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    // first axis outermost
    std::vector<std::pair<std::string, std::string>> overrides;
    std::size_t rem = idx;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& [key, values] = axes[a];
      overrides.emplace_back(key, values[rem % values.size()]);
      rem /= values.size();
    }
    std::reverse(overrides.begin(), overrides.end());

    std::vector<std::string> lines = base_lines;
    for (const auto& [key, value] : overrides) {
      bool replaced = false;
      for (auto& l : lines) {
        std::string stripped = l;
        std::size_t hash = stripped.find('#');
        if (hash != std::string::npos) stripped.erase(hash);
        stripped = trim(stripped);
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) continue;
        if (trim(stripped.substr(0, eq)) == key) {
          l = key + " = " + value;
          replaced = true;
          break;
        }
      }
      if (!replaced) lines.push_back(key + " = " + value);
    }

    std::string doc;
    for (const auto& l : lines) {
      doc += l;
      doc += '\n';
    }

    SweepPoint p;
    p.overrides = overrides;
    for (const auto& [key, value] : overrides) {
      if (!p.label.empty()) p.label += "__";
      std::string v = value;
      for (char& ch : v) {
        if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
      }
      p.label += key + "=" + v;
    }
    try {
      p.config = parse_config(doc);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep point '" + p.label + "': " + e.what());
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace motilab
