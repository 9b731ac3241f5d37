#include "fpsi/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace fpsi {

using nlohmann::json;

const char* to_string(ElementFamily family) {
  return family == ElementFamily::LowerOrder ? "lower" : "higher";
}

ElementFamily family_from_string(const std::string& name) {
  if (name == "lower") return ElementFamily::LowerOrder;
  if (name == "higher") return ElementFamily::HigherOrder;
  throw std::invalid_argument("unknown element family '" + name + "' (lower|higher)");
}

double parse_h(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      const double h = std::stod(text);
      if (!(h > 0)) throw std::invalid_argument("");
      return h;
    }
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (!(num > 0) || !(den > 0)) throw std::invalid_argument("");
    return num / den;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid grid spacing '" + text + "' (use e.g. 1/8 or 0.125)");
  }
}

namespace {

void reject_unknown(const json& object, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get_if(const json& object, const char* key, T& target) {
  if (object.contains(key)) target = object.at(key).get<T>();
}

void parse_coefficients(const json& object, ProblemCoefficients& coef) {
  reject_unknown(object,
                 {"rho_f", "mu_f", "rho_p", "lambda_p", "mu_p", "alpha", "s0", "K", "alpha_bjs",
                  "xi"},
                 "coefficients");
  get_if(object, "rho_f", coef.rho_f);
  get_if(object, "mu_f", coef.mu_f);
  get_if(object, "rho_p", coef.rho_p);
  get_if(object, "lambda_p", coef.lambda_p);
  get_if(object, "mu_p", coef.mu_p);
  get_if(object, "alpha", coef.alpha);
  get_if(object, "s0", coef.s0);
  get_if(object, "alpha_bjs", coef.alpha_bjs);
  get_if(object, "xi", coef.xi);
  if (object.contains("K")) {
    const auto& K = object.at("K");
    if (!K.is_array() || K.size() != 2 || !K[0].is_array() || K[0].size() != 2 ||
        K[1].size() != 2)
      throw std::invalid_argument("config: 'K' must be a 2x2 array");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) coef.K[i][j] = K[i][j].get<double>();
  }
  coef.validate();
}

json coefficients_to_json(const ProblemCoefficients& coef) {
  json out;
  out["rho_f"] = coef.rho_f;
  out["mu_f"] = coef.mu_f;
  out["rho_p"] = coef.rho_p;
  out["lambda_p"] = coef.lambda_p;
  out["mu_p"] = coef.mu_p;
  out["alpha"] = coef.alpha;
  out["s0"] = coef.s0;
  out["alpha_bjs"] = coef.alpha_bjs;
  out["xi"] = coef.xi;
  out["K"] = {{coef.K[0][0], coef.K[0][1]}, {coef.K[1][0], coef.K[1][1]}};
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("config: ") + err.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(root, {"converge", "arterial", "small_data", "solve"}, "top level");

  RunConfig config;
  if (root.contains("converge")) {
    const json& c = root.at("converge");
    reject_unknown(c, {"family", "hmax", "levels", "dt", "T", "output"}, "converge");
    if (c.contains("family")) config.converge.family = family_from_string(c.at("family"));
    if (c.contains("hmax")) {
      if (c.at("hmax").is_string())
        config.converge.hmax = parse_h(c.at("hmax").get<std::string>());
      else
        config.converge.hmax = c.at("hmax").get<double>();
    }
    get_if(c, "levels", config.converge.levels);
    get_if(c, "dt", config.converge.dt);
    get_if(c, "T", config.converge.T);
    get_if(c, "output", config.converge.output);
    if (config.converge.levels < 1) throw std::invalid_argument("config: converge.levels >= 1");
    if (!(config.converge.dt > 0)) throw std::invalid_argument("config: converge.dt > 0");
    if (!(config.converge.hmax > 0)) throw std::invalid_argument("config: converge.hmax > 0");
  }
  if (root.contains("arterial")) {
    const json& a = root.at("arterial");
    reject_unknown(a,
                   {"R", "L", "r_p", "P_max", "T_max", "T", "dt", "nx", "ny_f", "ny_wall",
                    "snapshot_times", "output_dir", "magnify", "coefficients"},
                   "arterial");
    get_if(a, "R", config.arterial.R);
    get_if(a, "L", config.arterial.L);
    get_if(a, "r_p", config.arterial.r_p);
    get_if(a, "P_max", config.arterial.P_max);
    get_if(a, "T_max", config.arterial.T_max);
    get_if(a, "T", config.arterial.T);
    get_if(a, "dt", config.arterial.dt);
    get_if(a, "nx", config.arterial.nx);
    get_if(a, "ny_f", config.arterial.ny_f);
    get_if(a, "ny_wall", config.arterial.ny_wall);
    get_if(a, "output_dir", config.arterial.output_dir);
    get_if(a, "magnify", config.arterial.magnify_displacement);
    if (a.contains("snapshot_times")) {
      const auto& times = a.at("snapshot_times");
      if (!times.is_array() || times.size() != 3)
        throw std::invalid_argument("config: arterial.snapshot_times must have 3 entries");
      for (int i = 0; i < 3; ++i) config.arterial.snapshot_times[i] = times[i].get<double>();
    }
    if (a.contains("coefficients")) parse_coefficients(a.at("coefficients"), config.arterial.coefficients);
    config.arterial.validate();
  }
  if (root.contains("small_data")) {
    const json& s = root.at("small_data");
    reject_unknown(s, {"family", "cells", "dt", "T", "S_f", "K_f", "beta_p"}, "small_data");
    if (s.contains("family")) config.small_data.family = family_from_string(s.at("family"));
    get_if(s, "cells", config.small_data.cells);
    get_if(s, "dt", config.small_data.dt);
    get_if(s, "T", config.small_data.T);
    get_if(s, "S_f", config.small_data.S_f);
    get_if(s, "K_f", config.small_data.K_f);
    get_if(s, "beta_p", config.small_data.beta_p);
    if (!(config.small_data.S_f > 0 && config.small_data.K_f > 0 && config.small_data.beta_p > 0))
      throw std::invalid_argument("config: small_data constants must be positive");
  }
  if (root.contains("solve")) {
    const json& s = root.at("solve");
    reject_unknown(s, {"mesh", "family", "coefficients", "sources", "dt", "T", "output_dir"},
                   "solve");
    get_if(s, "mesh", config.solve.mesh_path);
    if (s.contains("family")) config.solve.family = family_from_string(s.at("family"));
    if (s.contains("coefficients")) parse_coefficients(s.at("coefficients"), config.solve.coefficients);
    get_if(s, "sources", config.solve.sources);
    get_if(s, "dt", config.solve.dt);
    get_if(s, "T", config.solve.T);
    get_if(s, "output_dir", config.solve.output_dir);
    if (config.solve.sources != "zero" && config.solve.sources != "mms")
      throw std::invalid_argument("config: solve.sources must be 'zero' or 'mms'");
    if (!(config.solve.dt > 0)) throw std::invalid_argument("config: solve.dt > 0");
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
  json root;
  root["converge"] = {{"family", to_string(config.converge.family)},
                      {"hmax", config.converge.hmax},
                      {"levels", config.converge.levels},
                      {"dt", config.converge.dt},
                      {"T", config.converge.T},
                      {"output", config.converge.output}};
  root["arterial"] = {{"R", config.arterial.R},
                      {"L", config.arterial.L},
                      {"r_p", config.arterial.r_p},
                      {"P_max", config.arterial.P_max},
                      {"T_max", config.arterial.T_max},
                      {"T", config.arterial.T},
                      {"dt", config.arterial.dt},
                      {"nx", config.arterial.nx},
                      {"ny_f", config.arterial.ny_f},
                      {"ny_wall", config.arterial.ny_wall},
                      {"snapshot_times", config.arterial.snapshot_times},
                      {"output_dir", config.arterial.output_dir},
                      {"magnify", config.arterial.magnify_displacement},
                      {"coefficients", coefficients_to_json(config.arterial.coefficients)}};
  root["small_data"] = {{"family", to_string(config.small_data.family)},
                        {"cells", config.small_data.cells},
                        {"dt", config.small_data.dt},
                        {"T", config.small_data.T},
                        {"S_f", config.small_data.S_f},
                        {"K_f", config.small_data.K_f},
                        {"beta_p", config.small_data.beta_p}};
  root["solve"] = {{"mesh", config.solve.mesh_path},
                   {"family", to_string(config.solve.family)},
                   {"coefficients", coefficients_to_json(config.solve.coefficients)},
                   {"sources", config.solve.sources},
                   {"dt", config.solve.dt},
                   {"T", config.solve.T},
                   {"output_dir", config.solve.output_dir}};
  return root.dump(2);
}

}  // namespace fpsi
