#pragma once

#include <string>

#include "fpsi/arterial.hpp"

namespace fpsi {

struct ConvergeConfig {
  ElementFamily family = ElementFamily::LowerOrder;
  double hmax = 0.125;  // coarsest grid spacing; cells per unit = round(1/h)
  int levels = 4;
  double dt = 2.5e-4;
  double T = 0.1;
  std::string output;  // CSV file; empty writes to stdout only
};

struct SmallDataConfig {
  ElementFamily family = ElementFamily::LowerOrder;
  int cells = 8;
  double dt = 2.5e-4;
  double T = 0.1;
  double S_f = 1.0;
  double K_f = 1.0;
  double beta_p = 1.0;
};

struct SolveCommandConfig {
  std::string mesh_path;
  ElementFamily family = ElementFamily::LowerOrder;
  ProblemCoefficients coefficients;
  std::string sources = "zero";  // "zero" or "mms"
  double dt = 1e-2;
  double T = 0.1;
  std::string output_dir;
};

struct RunConfig {
  ConvergeConfig converge;
  ArterialConfig arterial = ArterialConfig::defaults();
  SmallDataConfig small_data;
  SolveCommandConfig solve;
};

/// Parse the JSON config text. Unknown keys are rejected with the offending
/// key name; parse errors carry the location reported by the JSON parser.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Canonical JSON form; parse(serialize(x)) reproduces x.
std::string serialize_config(const RunConfig& config);

/// Grid spacing given as a fraction "1/8" or a plain decimal.
double parse_h(const std::string& text);

const char* to_string(ElementFamily family);
ElementFamily family_from_string(const std::string& name);

}  // namespace fpsi
