#include "arraycav/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace arraycav {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& path,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw config_error(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error(path + ": unknown key '" + it.key() + "'");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error(path + ": expected a number");
  return j.get<double>();
}

StarkConfig parse_stark(const json& j, const std::string& path) {
  require_keys(j, path, {"alpha", "w_stark"});
  StarkConfig s;
  if (!j.contains("alpha") || !j.contains("w_stark"))
    throw config_error(path + ": alpha and w_stark are required");
  s.alpha = get_number(j["alpha"], path + ".alpha");
  s.w_stark = get_number(j["w_stark"], path + ".w_stark");
  if (!(s.w_stark > 0.0)) throw config_error(path + ".w_stark: must be > 0");
  return s;
}

GeometryConfig parse_geometry(const json& j) {
  require_keys(j, "geometry", {"a", "N", "L", "w0", "stark"});
  GeometryConfig g;
  if (j.contains("a")) g.a = get_number(j["a"], "geometry.a");
  if (j.contains("N")) {
    if (!j["N"].is_number_integer())
      throw config_error("geometry.N: expected an integer");
    g.n = j["N"].get<int>();
  }
  if (j.contains("L")) g.length = get_number(j["L"], "geometry.L");
  if (j.contains("w0")) {
    if (j["w0"].is_string()) {
      if (j["w0"].get<std::string>() != "flat")
        throw config_error("geometry.w0: expected a number or \"flat\"");
    } else {
      g.w0 = get_number(j["w0"], "geometry.w0");
      if (!(*g.w0 > 0.0)) throw config_error("geometry.w0: must be > 0");
    }
  }
  if (j.contains("stark")) g.stark = parse_stark(j["stark"], "geometry.stark");
  if (!(g.a > 0.0)) throw config_error("geometry.a: must be > 0");
  if (g.n < 1) throw config_error("geometry.N: must be >= 1");
  if (!(g.length > 0.0)) throw config_error("geometry.L: must be > 0");
  return g;
}

RamanSettings parse_raman(const json& j, const std::string& path) {
  require_keys(j, path, {"Omega", "Delta1", "Delta2"});
  RamanSettings r;
  if (j.contains("Omega")) r.rabi = get_number(j["Omega"], path + ".Omega");
  if (j.contains("Delta1")) r.delta1 = get_number(j["Delta1"], path + ".Delta1");
  if (j.contains("Delta2")) r.delta2 = get_number(j["Delta2"], path + ".Delta2");
  if (r.delta2 == 0.0) throw config_error(path + ".Delta2: must be nonzero");
  return r;
}

TargetSettings parse_target(const json& j, const std::string& path) {
  require_keys(j, path, {"position", "gamma_a", "detuning", "raman"});
  TargetSettings t;
  if (j.contains("position")) {
    const json& p = j["position"];
    if (!p.is_array() || p.size() != 3)
      throw config_error(path + ".position: expected [x, y, z]");
    for (int i = 0; i < 3; ++i)
      t.position[i] = get_number(p[i], path + ".position");
  }
  if (j.contains("gamma_a"))
    t.gamma_a = get_number(j["gamma_a"], path + ".gamma_a");
  if (!(t.gamma_a > 0.0)) throw config_error(path + ".gamma_a: must be > 0");
  if (j.contains("detuning"))
    t.detuning = get_number(j["detuning"], path + ".detuning");
  if (j.contains("raman")) t.raman = parse_raman(j["raman"], path + ".raman");
  return t;
}

MotionSettings parse_motion(const json& j) {
  require_keys(j, "motion",
               {"regime", "sigma", "trap", "n_realizations", "seed", "axes"});
  MotionSettings m;
  if (j.contains("regime")) {
    if (!j["regime"].is_string())
      throw config_error("motion.regime: expected a string");
    m.regime = j["regime"].get<std::string>();
    if (m.regime != "none" && m.regime != "frozen" && m.regime != "fast")
      throw config_error("motion.regime: expected none|frozen|fast");
  }
  if (j.contains("sigma")) {
    m.sigma = get_number(j["sigma"], "motion.sigma");
    if (*m.sigma < 0.0) throw config_error("motion.sigma: must be >= 0");
  }
  if (j.contains("trap")) {
    require_keys(j["trap"], "motion.trap", {"V0_over_Er"});
    TrapSettings trap;
    if (j["trap"].contains("V0_over_Er"))
      trap.v0_over_er = get_number(j["trap"]["V0_over_Er"], "motion.trap.V0_over_Er");
    if (!(trap.v0_over_er > 0.0))
      throw config_error("motion.trap.V0_over_Er: must be > 0");
    m.trap = trap;
  }
  if (j.contains("n_realizations")) {
    if (!j["n_realizations"].is_number_integer())
      throw config_error("motion.n_realizations: expected an integer");
    m.n_realizations = j["n_realizations"].get<int>();
    if (m.n_realizations < 2)
      throw config_error("motion.n_realizations: must be >= 2");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw config_error("motion.seed: expected an integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("axes")) {
    if (!j["axes"].is_string()) throw config_error("motion.axes: expected a string");
    m.axes = j["axes"].get<std::string>();
    if (m.axes.empty() || m.axes.find_first_not_of("xyz") != std::string::npos)
      throw config_error("motion.axes: expected a combination of x, y, z");
  }
  if (m.regime != "none" && !m.sigma && !m.trap)
    throw config_error("motion: frozen/fast regimes need sigma or trap");
  return m;
}

SweepSettings parse_sweep(const json& j) {
  require_keys(j, "sweep", {"variable", "values"});
  SweepSettings s;
  if (!j.contains("variable") || !j["variable"].is_string())
    throw config_error("sweep.variable: expected a string");
  s.variable = j["variable"].get<std::string>();
  static const std::set<std::string> known{"w0", "a", "L", "alpha", "sigma",
                                           "delta", "epsilon"};
  if (!known.count(s.variable))
    throw config_error("sweep.variable: unknown variable '" + s.variable + "'");
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
    throw config_error("sweep.values: expected a non-empty array");
  for (const auto& v : j["values"])
    s.values.push_back(get_number(v, "sweep.values"));
  return s;
}

OutputSettings parse_output(const json& j) {
  require_keys(j, "output", {"directory", "far_field"});
  OutputSettings o;
  if (j.contains("directory")) {
    if (!j["directory"].is_string())
      throw config_error("output.directory: expected a string");
    o.directory = j["directory"].get<std::string>();
  }
  if (j.contains("far_field")) {
    if (!j["far_field"].is_boolean())
      throw config_error("output.far_field: expected a boolean");
    o.far_field = j["far_field"].get<bool>();
  }
  return o;
}

ExperimentConfig parse_config_json(const json& j) {
  require_keys(j, "config", {"geometry", "targets", "motion", "sweep", "output"});
  ExperimentConfig c;
  if (j.contains("geometry")) c.geometry = parse_geometry(j["geometry"]);
  if (j.contains("targets")) {
    if (!j["targets"].is_array())
      throw config_error("targets: expected an array");
    int idx = 0;
    for (const auto& t : j["targets"])
      c.targets.push_back(parse_target(t, "targets[" + std::to_string(idx++) + "]"));
  }
  if (j.contains("motion")) c.motion = parse_motion(j["motion"]);
  if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"]);
  if (j.contains("output")) c.output = parse_output(j["output"]);
  return c;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["geometry"]["a"] = c.geometry.a;
  j["geometry"]["N"] = c.geometry.n;
  j["geometry"]["L"] = c.geometry.length;
  if (c.geometry.w0)
    j["geometry"]["w0"] = *c.geometry.w0;
  else
    j["geometry"]["w0"] = "flat";
  if (c.geometry.stark) {
    j["geometry"]["stark"]["alpha"] = c.geometry.stark->alpha;
    j["geometry"]["stark"]["w_stark"] = c.geometry.stark->w_stark;
  }
  j["targets"] = json::array();
  for (const auto& t : c.targets) {
    json jt;
    jt["position"] = {t.position.x(), t.position.y(), t.position.z()};
    jt["gamma_a"] = t.gamma_a;
    if (t.detuning) jt["detuning"] = *t.detuning;
    if (t.raman) {
      if (t.raman->rabi) jt["raman"]["Omega"] = *t.raman->rabi;
      if (t.raman->delta1) jt["raman"]["Delta1"] = *t.raman->delta1;
      jt["raman"]["Delta2"] = t.raman->delta2;
    }
    j["targets"].push_back(jt);
  }
  j["motion"]["regime"] = c.motion.regime;
  if (c.motion.sigma) j["motion"]["sigma"] = *c.motion.sigma;
  if (c.motion.trap) j["motion"]["trap"]["V0_over_Er"] = c.motion.trap->v0_over_er;
  j["motion"]["n_realizations"] = c.motion.n_realizations;
  j["motion"]["seed"] = c.motion.seed;
  j["motion"]["axes"] = c.motion.axes;
  if (c.sweep) {
    j["sweep"]["variable"] = c.sweep->variable;
    j["sweep"]["values"] = c.sweep->values;
  }
  j["output"]["directory"] = c.output.directory;
  j["output"]["far_field"] = c.output.far_field;
  return j.dump(2);
}

}  // namespace arraycav
