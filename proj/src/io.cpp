#include "pulledfront/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "pulledfront/error.hpp"

namespace pf {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

double parse_real(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::ConfigInvalid, "bad number '" + s + "'");
  return v;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::ConfigInvalid, "sha256 failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

json to_json(const ModelParameters& p) {
  return {{"a", p.a}, {"b", p.b}, {"sigma", p.sigma}, {"r", p.r}};
}

json to_json(const DerivedConstants& dc) {
  json j;
  auto put = [&](const char* k, double v) {
    j[k] = std::isfinite(v) ? json(v) : json(nullptr);
  };
  put("c_star", dc.c_star);
  put("gamma_star", dc.gamma_star);
  put("delta", dc.delta);
  put("alpha", dc.alpha);
  put("iota", dc.iota);
  put("M_s", dc.M_s);
  put("M_l", dc.M_l);
  put("delta0", dc.delta0);
  put("delta1", dc.delta1);
  put("theta", dc.theta);
  put("eta_plus", dc.eta_plus);
  put("eta_minus", dc.eta_minus);
  return j;
}

namespace {

double number_of(const json& j) {
  if (j.is_null()) return DerivedConstants::unset;
  if (j.is_string()) return parse_real(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw Error(ErrorKind::ConfigInvalid, "expected a number");
}

}  // namespace

ModelParameters params_from_json(const json& j) {
  ModelParameters p;
  p.a = number_of(j.at("a"));
  p.b = number_of(j.at("b"));
  p.sigma = number_of(j.at("sigma"));
  p.r = number_of(j.at("r"));
  return p;
}

DerivedConstants constants_from_json(const json& j) {
  DerivedConstants dc;
  auto get = [&](const char* k, double& v) {
    if (j.contains(k)) v = number_of(j.at(k));
  };
  get("c_star", dc.c_star);
  get("gamma_star", dc.gamma_star);
  get("delta", dc.delta);
  get("alpha", dc.alpha);
  get("iota", dc.iota);
  get("M_s", dc.M_s);
  get("M_l", dc.M_l);
  get("delta0", dc.delta0);
  get("delta1", dc.delta1);
  get("theta", dc.theta);
  get("eta_plus", dc.eta_plus);
  get("eta_minus", dc.eta_minus);
  return dc;
}

json exact_numbers(const json& j) {
  if (j.is_number_float()) return format_real(j.get<double>());
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = exact_numbers(it.value());
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(exact_numbers(v));
    return out;
  }
  return j;
}

namespace {

void apply_key(RunConfig& c, const std::string& key, const json& v) {
  auto real = [&]() { return number_of(v); };
  auto integer = [&]() {
    const double d = real();
    if (d != std::floor(d) || std::abs(d) > 1e9)
      throw Error(ErrorKind::ConfigInvalid, key + " must be an integer");
    return static_cast<int>(d);
  };
  auto text = [&]() { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (key == "schema_version") c.schema_version = integer();
  else if (key == "a") c.params.a = real();
  else if (key == "b") c.params.b = real();
  else if (key == "sigma") c.params.sigma = real();
  else if (key == "r") c.params.r = real();
  else if (key == "delta") c.delta = real();
  else if (key == "front_L") c.front_L = real();
  else if (key == "front_n") c.front_n = integer();
  else if (key == "front_tol") c.front_tol = real();
  else if (key == "relax_T") c.relax_T = real();
  else if (key == "spectrum_n") c.spectrum_n = integer();
  else if (key == "spectrum_L") c.spectrum_L = real();
  else if (key == "sim_L") c.sim_L = real();
  else if (key == "sim_h") c.sim_h = real();
  else if (key == "sim_dt") c.sim_dt = real();
  else if (key == "sim_T") c.sim_T = real();
  else if (key == "sim_eps") c.sim_eps = real();
  else if (key == "sim_xc") c.sim_xc = real();
  else if (key == "out") c.out_dir = text();
  else if (key == "profile") c.profile_path = text();
  else if (key == "quiet") c.quiet = v.is_boolean() ? v.get<bool>() : (text() == "true" || text() == "1");
  else if (key == "lambda") {
    const std::string s = text();
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "lambda must be RE,IM");
    c.lambda = std::make_pair(parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1)));
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  c.source_text = text;
  const std::string head = trim(text);
  if (!head.empty() && head.front() == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) apply_key(c, it.key(), it.value());
  } else {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::ConfigInvalid, fmt::format("line {}: expected key=value", lineno));
      apply_key(c, trim(line.substr(0, eq)), json(trim(line.substr(eq + 1))));
    }
  }
  if (c.schema_version != kSchemaVersion)
    throw Error(ErrorKind::SchemaVersionUnknown,
                fmt::format("config schema_version {} not supported", c.schema_version));
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.source_text); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigInvalid, "cannot write '" + path + "'");
  out << contents;
}

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PULLEDFRONT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

}  // namespace pf
