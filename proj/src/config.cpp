#include "mmdesign/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmdesign {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config error at " + path + ": " + msg);
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

ResponseModel RunConfig::model_for(Estimator est, double alpha) const {
  ResponseModel m{num_vars, responses, SymMatrix(v0), alpha, est};
  return m;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;

  const json& jm = need(j, "", "model");
  cfg.num_vars = as_int(need(jm, "model", "num_vars"), "model.num_vars");
  if (cfg.num_vars < 1) fail("model.num_vars", "must be >= 1");

  const json& jr = need(jm, "model", "responses");
  if (!jr.is_array() || jr.empty()) fail("model.responses", "expected a nonempty array of basis strings");
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const std::string path = "model.responses[" + std::to_string(i) + "]";
    if (!jr[i].is_string()) fail(path, "expected a basis string");
    const std::string s = jr[i].get<std::string>();
    if (s.empty()) fail(path, "basis string is empty");
    try {
      cfg.responses.push_back(parse_basis(s, cfg.num_vars));
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
    cfg.response_texts.push_back(s);
  }

  const json& jv = need(jm, "model", "v0");
  const auto m = cfg.responses.size();
  if (!jv.is_array() || jv.size() != m) fail("model.v0", "expected an m x m array, m = response count");
  cfg.v0.resize(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto row = as_number_list(jv[r], "model.v0[" + std::to_string(r) + "]");
    if (row.size() != m) fail("model.v0[" + std::to_string(r) + "]", "wrong row length");
    for (std::size_t c = 0; c < m; ++c) cfg.v0(r, c) = row[c];
  }

  const json& ja = need(jm, "model", "alpha");
  if (ja.is_number()) {
    cfg.alphas.push_back(ja.get<double>());
  } else {
    cfg.alphas = as_number_list(ja, "model.alpha");
  }
  for (double a : cfg.alphas) {
    if (!(a >= 0.0)) fail("model.alpha", "alpha values must be >= 0");
  }

  const json& je = need(jm, "model", "estimator");
  if (!je.is_string()) fail("model.estimator", "expected \"glse\", \"olse\" or \"both\"");
  const std::string est = je.get<std::string>();
  if (est == "both") {
    cfg.estimators = {Estimator::GLSE, Estimator::OLSE};
  } else {
    try {
      cfg.estimators = {estimator_from_string(est)};
    } catch (const std::exception& e) {
      fail("model.estimator", e.what());
    }
  }

  const json& js = need(j, "", "space");
  const json& jf = need(js, "space", "factors");
  if (!jf.is_array() || jf.empty()) fail("space.factors", "expected a nonempty array");
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string path = "space.factors[" + std::to_string(i) + "]";
    const json& f = jf[i];
    try {
      if (f.contains("grid")) {
        const auto g = as_number_list(f.at("grid"), path + ".grid");
        if (g.size() != 3) fail(path + ".grid", "expected [lo, hi, count]");
        cfg.factors.push_back(FactorSpec::grid(g[0], g[1], static_cast<int>(g[2])));
      } else if (f.contains("levels")) {
        cfg.factors.push_back(FactorSpec::level_set(as_number_list(f.at("levels"), path + ".levels")));
      } else {
        fail(path, "expected either \"grid\" or \"levels\"");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }
  if (static_cast<int>(cfg.factors.size()) != cfg.num_vars) {
    fail("space.factors", "factor count must equal model.num_vars");
  }
  if (js.contains("max_points")) {
    cfg.max_points = static_cast<std::int64_t>(as_number(js.at("max_points"), "space.max_points"));
  }

  if (j.contains("solver")) {
    const json& so = j.at("solver");
    if (so.contains("eta1")) cfg.solver.eta1 = as_number(so.at("eta1"), "solver.eta1");
    if (so.contains("inner_gap_tol"))
      cfg.solver.inner_gap_tol = as_number(so.at("inner_gap_tol"), "solver.inner_gap_tol");
    if (so.contains("max_outer")) cfg.solver.max_outer = as_int(so.at("max_outer"), "solver.max_outer");
    if (so.contains("max_inner")) cfg.solver.max_inner = as_int(so.at("max_inner"), "solver.max_inner");
    if (so.contains("support_threshold"))
      cfg.solver.support_threshold = as_number(so.at("support_threshold"), "solver.support_threshold");
    if (so.contains("multi_start")) cfg.solver.multi_start = as_int(so.at("multi_start"), "solver.multi_start");
    if (cfg.solver.eta1 <= 0 || cfg.solver.inner_gap_tol <= 0) fail("solver", "tolerances must be > 0");
    if (cfg.solver.max_outer < 1 || cfg.solver.max_inner < 1) fail("solver", "iteration caps must be >= 1");
  }
  if (j.contains("verify") && j.at("verify").contains("eta2")) {
    cfg.eta2 = as_number(j.at("verify").at("eta2"), "verify.eta2");
    if (cfg.eta2 <= 0) fail("verify.eta2", "must be > 0");
  }

  if (j.contains("symmetry")) {
    const json& sy = need(j.at("symmetry"), "symmetry", "axes");
    if (sy.is_string()) {
      const std::string mode = sy.get<std::string>();
      if (mode == "auto") {
        cfg.symmetry = SymmetryMode::Auto;
      } else if (mode == "off") {
        cfg.symmetry = SymmetryMode::Off;
      } else {
        fail("symmetry.axes", "expected \"auto\", \"off\" or an axis list");
      }
    } else if (sy.is_array()) {
      cfg.symmetry = SymmetryMode::Explicit;
      for (std::size_t i = 0; i < sy.size(); ++i) {
        const int axis = as_int(sy[i], "symmetry.axes[" + std::to_string(i) + "]");
        if (axis < 1 || axis > cfg.num_vars) {
          fail("symmetry.axes[" + std::to_string(i) + "]", "axis out of range");
        }
        cfg.symmetry_axes_explicit.push_back(axis);
      }
    } else {
      fail("symmetry.axes", "expected \"auto\", \"off\" or an axis list");
    }
  }

  if (j.contains("output")) {
    const json& jo = j.at("output");
    if (jo.contains("dir")) {
      if (!jo.at("dir").is_string()) fail("output.dir", "expected a string");
      cfg.output_dir = jo.at("dir").get<std::string>();
    }
    if (jo.contains("plot_data")) {
      if (!jo.at("plot_data").is_boolean()) fail("output.plot_data", "expected a boolean");
      cfg.plot_data = jo.at("plot_data").get<bool>();
    }
  }

  // model-level invariants surface early with config-style messages
  try {
    validate_model(cfg.model_for(cfg.estimators.front(), cfg.alphas.front()));
  } catch (const std::exception& e) {
    fail("model", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace mmdesign
