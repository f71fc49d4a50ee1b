#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulledfront/model.hpp"

namespace pf {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Decimal text with 17 significant digits; parses back to the same double.
std::string format_real(double v);
double parse_real(const std::string& s);

std::string sha256_hex(const std::string& data);

json to_json(const ModelParameters& p);
json to_json(const DerivedConstants& dc);
ModelParameters params_from_json(const json& j);
DerivedConstants constants_from_json(const json& j);

// Doubles inside the value are replaced by format_real strings so that the
// dump is exact and deterministic.
json exact_numbers(const json& j);

struct RunConfig {
  int schema_version = kSchemaVersion;
  ModelParameters params;
  std::optional<double> delta;

  double front_L = 80.0;
  int front_n = 8000;
  double front_tol = 1e-10;
  double relax_T = 3000.0;

  int spectrum_n = 4000;
  double spectrum_L = 80.0;

  double sim_L = 400.0;
  double sim_h = 0.1;
  double sim_dt = 0.05;
  double sim_T = 200.0;
  double sim_eps = 1e-2;
  double sim_xc = 8.0;

  std::string out_dir = ".";
  std::string profile_path;
  std::optional<std::pair<double, double>> lambda;
  bool quiet = false;

  std::string source_text;  // raw config as read, hashed into reports
};

// JSON object or key=value lines ('#' starts a comment). Unknown keys and
// malformed values throw ConfigInvalid; a schema_version other than the
// supported one throws SchemaVersionUnknown.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_hash(const RunConfig& cfg);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Worker count: hardware concurrency capped by PULLEDFRONT_THREADS.
unsigned thread_budget();

}  // namespace pf
