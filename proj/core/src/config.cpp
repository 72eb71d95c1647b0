#include "magsurf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace magsurf {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid config (" << v.size() << " violation"
     << (v.size() == 1 ? "" : "s") << "):";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

class Validator {
 public:
  std::vector<std::string> errs;

  void fail(const std::string& key, const std::string& what) {
    errs.push_back(key + ": " + what);
  }

  void check_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : allowed)
        if (it.key() == k) ok = true;
      if (!ok) fail(where + "." + it.key(), "unknown key");
    }
  }

  double num(const json& obj, const std::string& where, const char* key,
             double fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(where + "." + key, "missing required key");
      return fallback;
    }
    if (!obj[key].is_number()) {
      fail(where + "." + key, "expected a number");
      return fallback;
    }
    return obj[key].get<double>();
  }

  int integer(const json& obj, const std::string& where, const char* key,
              int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
      fail(where + "." + key, "expected an integer");
      return fallback;
    }
    return obj[key].get<int>();
  }

  std::string str(const json& obj, const std::string& where, const char* key,
                  const std::string& fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(where + "." + key, "missing required key");
      return fallback;
    }
    if (!obj[key].is_string()) {
      fail(where + "." + key, "expected a string");
      return fallback;
    }
    return obj[key].get<std::string>();
  }

  Vec2 vec2(const json& obj, const std::string& where, const char* key,
            Vec2 fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(where + "." + key, "missing required key");
      return fallback;
    }
    const json& a = obj[key];
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() ||
        !a[1].is_number()) {
      fail(where + "." + key, "expected [x, y]");
      return fallback;
    }
    return {a[0].get<double>(), a[1].get<double>()};
  }

  std::optional<Bump> bump(const json& obj, const std::string& where) {
    if (!obj.contains("bump")) return std::nullopt;
    const json& b = obj["bump"];
    const std::string w = where + ".bump";
    if (!b.is_object()) {
      fail(w, "expected an object");
      return std::nullopt;
    }
    check_keys(b, w, {"center", "radius", "amplitude"});
    Bump out;
    out.center = vec2(b, w, "center", {0, 0}, true);
    out.radius = num(b, w, "radius", 0.0, true);
    out.amplitude = num(b, w, "amplitude", 0.0, true);
    if (out.radius <= 0) fail(w + ".radius", "must be > 0");
    return out;
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

std::string to_string(ExperimentType e) {
  switch (e) {
    case ExperimentType::trace: return "trace";
    case ExperimentType::exit_event_: return "exit";
    case ExperimentType::scatter: return "scatter";
    case ExperimentType::jacobi: return "jacobi";
    case ExperimentType::conjugates: return "conjugates";
    case ExperimentType::index: return "index";
    case ExperimentType::convexity: return "convexity";
    case ExperimentType::simplicity: return "simplicity";
    case ExperimentType::closure: return "closure";
    case ExperimentType::compare_scatter: return "compare-scatter";
  }
  return "?";
}

std::optional<ExperimentType> experiment_from_name(const std::string& name) {
  for (ExperimentType e :
       {ExperimentType::trace, ExperimentType::exit_event_,
        ExperimentType::scatter, ExperimentType::jacobi,
        ExperimentType::conjugates, ExperimentType::index,
        ExperimentType::convexity, ExperimentType::simplicity,
        ExperimentType::closure, ExperimentType::compare_scatter})
    if (to_string(e) == name) return e;
  return std::nullopt;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("json parse error: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level: expected an object"});

  Validator v;
  RunConfig cfg;

  v.check_keys(root, "config",
               {"schema_version", "chart", "field", "domain", "integrator",
                "grid", "seed", "experiment"});

  cfg.schema_version = v.str(root, "config", "schema_version", "", true);
  if (!cfg.schema_version.empty() && cfg.schema_version != "1")
    v.fail("config.schema_version",
           "unsupported version '" + cfg.schema_version +
               "' (this build reads version \"1\"; re-export the config)");

  // chart
  if (!root.contains("chart") || !root["chart"].is_object()) {
    v.fail("config.chart", "missing required object");
  } else {
    const json& c = root["chart"];
    v.check_keys(c, "chart",
                 {"kind", "curvature", "lambda_expression", "validity_radius",
                  "bump"});
    const std::string kind = v.str(c, "chart", "kind", "euclidean");
    const double K = v.num(c, "chart", "curvature", 0.0);
    try {
      if (kind == "euclidean") {
        cfg.sys.chart = ChartMetric::euclidean();
      } else if (kind == "spherical") {
        cfg.sys.chart = ChartMetric::spherical(K);
      } else if (kind == "hyperbolic") {
        cfg.sys.chart = ChartMetric::hyperbolic(K);
      } else if (kind == "custom") {
        const std::string le =
            v.str(c, "chart", "lambda_expression", "", true);
        if (!le.empty())
          cfg.sys.chart = ChartMetric::custom(
              Expr::parse(le), v.num(c, "chart", "validity_radius", 0.0));
      } else {
        v.fail("chart.kind", "unknown kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      v.fail("chart", e.what());
    }
    if (c.contains("validity_radius") && kind != "custom") {
      const double r = v.num(c, "chart", "validity_radius", 0.0);
      if (r < 0) v.fail("chart.validity_radius", "must be >= 0");
      else if (r > 0) cfg.sys.chart.set_validity_radius(r);
    }
    if (auto b = v.bump(c, "chart")) cfg.sys.chart.set_bump(*b);
  }

  // field
  if (!root.contains("field") || !root["field"].is_object()) {
    v.fail("config.field", "missing required object");
  } else {
    const json& f = root["field"];
    v.check_keys(f, "field", {"constant", "expression", "bump"});
    if (f.contains("constant") && f.contains("expression"))
      v.fail("field", "give either constant or expression, not both");
    if (f.contains("expression")) {
      try {
        cfg.sys.field =
            FieldStrength::expression(Expr::parse(v.str(f, "field", "expression", "0")));
      } catch (const std::exception& e) {
        v.fail("field.expression", e.what());
      }
    } else {
      cfg.sys.field = FieldStrength::constant(v.num(f, "field", "constant", 0.0));
    }
    if (auto b = v.bump(f, "field")) cfg.sys.field.set_bump(*b);
  }

  // domain (optional globally; required per experiment below)
  if (root.contains("domain")) {
    const json& d = root["domain"];
    if (!d.is_object()) {
      v.fail("config.domain", "expected an object");
    } else {
      v.check_keys(d, "domain", {"circle"});
      if (!d.contains("circle") || !d["circle"].is_object()) {
        v.fail("domain", "only circle domains are configurable");
      } else {
        const json& ci = d["circle"];
        v.check_keys(ci, "domain.circle", {"center", "radius"});
        Vec2 ctr = v.vec2(ci, "domain.circle", "center", {0, 0});
        const double r = v.num(ci, "domain.circle", "radius", 1.0, true);
        if (r <= 0) v.fail("domain.circle.radius", "must be > 0");
        else cfg.domain = DomainSpec::circle(ctr, r);
      }
    }
  }

  // integrator
  if (root.contains("integrator")) {
    const json& it = root["integrator"];
    if (!it.is_object()) {
      v.fail("config.integrator", "expected an object");
    } else {
      v.check_keys(it, "integrator",
                   {"step_scale", "adaptive", "adaptive_tol"});
      cfg.ctrl.step_scale = v.num(it, "integrator", "step_scale", 1e-3);
      if (cfg.ctrl.step_scale <= 0 || cfg.ctrl.step_scale > 1)
        v.fail("integrator.step_scale", "must be in (0, 1]");
      if (it.contains("adaptive")) {
        if (!it["adaptive"].is_boolean())
          v.fail("integrator.adaptive", "expected a boolean");
        else
          cfg.ctrl.adaptive = it["adaptive"].get<bool>();
      }
      cfg.ctrl.adaptive_tol = v.num(it, "integrator", "adaptive_tol", 1e-12);
      if (cfg.ctrl.adaptive_tol <= 0)
        v.fail("integrator.adaptive_tol", "must be > 0");
    }
  }

  // grid
  if (root.contains("grid")) {
    const json& g = root["grid"];
    if (!g.is_object()) {
      v.fail("config.grid", "expected an object");
    } else {
      v.check_keys(g, "grid", {"boundary", "angle"});
      cfg.grid_boundary = v.integer(g, "grid", "boundary", 16);
      cfg.grid_angle = v.integer(g, "grid", "angle", 16);
      if (cfg.grid_boundary < 1) v.fail("grid.boundary", "must be >= 1");
      if (cfg.grid_angle < 1) v.fail("grid.angle", "must be >= 1");
    }
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0)
      v.fail("config.seed", "expected a nonnegative integer");
    else
      cfg.seed = root["seed"].get<unsigned long>();
  }

  // experiment
  bool needs_domain = false;
  bool needs_start = false;
  if (!root.contains("experiment") || !root["experiment"].is_object()) {
    v.fail("config.experiment", "missing required object");
  } else {
    const json& e = root["experiment"];
    v.check_keys(e, "experiment",
                 {"type", "start", "velocity", "duration", "tmax", "segments",
                  "gauss_points", "samples", "J0", "J0p", "strip_bumps"});
    const std::string type = v.str(e, "experiment", "type", "", true);
    auto et = experiment_from_name(type);
    if (!et) {
      if (!type.empty())
        v.fail("experiment.type", "unknown experiment '" + type + "'");
    } else {
      cfg.experiment = *et;
    }

    cfg.start.pos = v.vec2(e, "experiment", "start", cfg.start.pos);
    cfg.start.vel = v.vec2(e, "experiment", "velocity", cfg.start.vel);
    cfg.duration = v.num(e, "experiment", "duration", cfg.duration);
    cfg.tmax = v.num(e, "experiment", "tmax", cfg.tmax);
    cfg.segments = v.integer(e, "experiment", "segments", cfg.segments);
    cfg.gauss_pts = v.integer(e, "experiment", "gauss_points", cfg.gauss_pts);
    cfg.convexity_samples =
        v.integer(e, "experiment", "samples", cfg.convexity_samples);
    cfg.jacobi_J0 = v.vec2(e, "experiment", "J0", cfg.jacobi_J0);
    cfg.jacobi_J0p = v.vec2(e, "experiment", "J0p", cfg.jacobi_J0p);
    if (e.contains("strip_bumps")) {
      if (!e["strip_bumps"].is_boolean())
        v.fail("experiment.strip_bumps", "expected a boolean");
      else
        cfg.strip_bumps_baseline = e["strip_bumps"].get<bool>();
    }

    if (et) {
      switch (*et) {
        case ExperimentType::trace:
        case ExperimentType::jacobi:
        case ExperimentType::index:
          needs_start = true;
          if (cfg.duration <= 0) v.fail("experiment.duration", "must be > 0");
          break;
        case ExperimentType::conjugates:
          needs_start = true;
          if (cfg.tmax <= 0) v.fail("experiment.tmax", "must be > 0");
          break;
        case ExperimentType::exit_event_:
          needs_start = true;
          needs_domain = true;
          break;
        case ExperimentType::scatter:
        case ExperimentType::convexity:
        case ExperimentType::simplicity:
        case ExperimentType::closure:
        case ExperimentType::compare_scatter:
          needs_domain = true;
          break;
      }
    }
    if (cfg.tmax < 0) v.fail("experiment.tmax", "must be >= 0");
    if (cfg.segments < 2) v.fail("experiment.segments", "must be >= 2");
    if (cfg.gauss_pts != 4 && cfg.gauss_pts != 8 && cfg.gauss_pts != 16)
      v.fail("experiment.gauss_points", "must be 4, 8 or 16");
    if (cfg.convexity_samples < 8) v.fail("experiment.samples", "must be >= 8");
    if (needs_start && norm(cfg.start.vel) == 0.0)
      v.fail("experiment.velocity", "must be nonzero");
  }

  if (needs_domain && !cfg.domain)
    v.fail("config.domain", "this experiment requires a domain");

  if (!v.errs.empty()) throw ConfigError(std::move(v.errs));

  cfg.canonical = root.dump();  // object keys are stored sorted
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

uint64_t config_hash(const RunConfig& cfg) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : cfg.canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

}  // namespace magsurf
