#include "ionsync/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "ionsync/labcalc.hpp"

namespace ionsync {

namespace {

using Keys = std::vector<KeySpec>;

Keys join(std::initializer_list<Keys> parts) {
  Keys out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const Keys kDrive = {
    {"Omega1", "--omega1", ValueKind::number, "sideband Rabi frequency of ion 1 (units of gamma)"},
    {"Gamma", "--Gamma", ValueKind::number, "phonon damping rate (units of gamma)"},
    {"gamma_ratio", "--gamma-ratio", ValueKind::number, "gamma/Gamma; sets Gamma = 1/value"},
};
const Keys kPair = {
    {"Omega2", "--omega2", ValueKind::number, "sideband Rabi frequency of ion 2 (units of gamma)"},
    {"Delta", "--delta", ValueKind::number, "trap detuning omega2 - omega1 (units of gamma)"},
    {"J", "--j", ValueKind::number, "phonon-phonon coupling (units of gamma)"},
};
const Keys kNumerics = {
    {"cutoff", "--cutoff", ValueKind::integer, "Fock cutoff N per mode"},
    {"workers", "--workers", ValueKind::integer, "maximum concurrent sweep points"},
    {"gate", "--gate", ValueKind::boolean, "run the convergence gate (true/false)"},
    {"convergence_step", "--convergence-step", ValueKind::integer, "cutoff increment of the gate"},
    {"convergence_tol", "--convergence-tol", ValueKind::number, "absolute tolerance of the gate"},
};
const Keys kLabFrame = {
    {"model", "--model", ValueKind::choice, "rwa or validation", {"rwa", "validation"}},
    {"eta", "--eta", ValueKind::number, "Lamb-Dicke parameter (validation model)"},
    {"omega_mean", "--omega-mean", ValueKind::number, "mean trap frequency (units of gamma, validation model)"},
};
const Keys kGrid = {
    {"extent", "--extent", ValueKind::number, "Wigner grid half-width in x and p"},
    {"grid_points", "--grid-points", ValueKind::integer, "Wigner grid points per axis"},
};
const Keys kRange = {
    {"from", "--from", ValueKind::number, "first axis value"},
    {"to", "--to", ValueKind::number, "last axis value"},
    {"points", "--points", ValueKind::integer, "number of axis values"},
};

const std::map<std::string, Keys>& tables() {
  static const std::map<std::string, Keys> t = {
      {"single", join({kDrive, kNumerics, kGrid})},
      {"pair", join({kDrive, kPair, kNumerics, kLabFrame})},
      {"sweep", join({kDrive, kPair, kNumerics, kLabFrame, kRange,
                      Keys{{"n_ions", "--n-ions", ValueKind::integer, "1 or 2"},
                           {"axis", "--axis", ValueKind::choice, "swept parameter",
                            {"Gamma", "Delta", "Omega1", "J", "gamma_ratio"}},
                           {"observables", "--observables", ValueKind::names, "comma-separated observables"}}})},
      {"fig2", join({Keys{kDrive[0], kDrive[1]}, kNumerics, kGrid, kRange})},
      {"fig3", join({Keys{kDrive[1], kDrive[2], kPair[0], kPair[2]}, kNumerics,
                     Keys{{"delta_max", "--delta-max", ValueKind::number, "upper end of the detuning axis"},
                          {"delta_points", "--delta-points", ValueKind::integer, "points on the detuning axis"},
                          {"ratio_max", "--ratio-max", ValueKind::number, "upper end of the Omega1/Omega2 axis"},
                          {"ratio_points", "--ratio-points", ValueKind::integer, "points on the ratio axis"}}})},
      {"fig4", join({Keys{kDrive[1], kDrive[2], kPair[0], kPair[2]}, kNumerics,
                     Keys{kLabFrame[1], kLabFrame[2],
                          {"balanced", "--balanced", ValueKind::choice, "both, true or false", {"both", "true", "false"}},
                          {"overlay", "--overlay", ValueKind::boolean, "add the validation-model overlay"},
                          {"delta_max", "--delta-max", ValueKind::number, "upper end of the detuning axis"},
                          {"points", "--points", ValueKind::integer, "points on the detuning axis"},
                          {"validation_cutoff", "--validation-cutoff", ValueKind::integer,
                           "cutoff of the validation overlay"}}})},
      {"validate", join({kDrive, kPair, kNumerics, Keys{kLabFrame[1], kLabFrame[2]}, kRange})},
      {"wigner", join({kDrive, kPair, kNumerics, kGrid,
                       Keys{{"n_ions", "--n-ions", ValueKind::integer, "1 or 2"},
                            {"ion", "--ion", ValueKind::integer, "ion whose mode is shown"},
                            {"projection", "--projection", ValueKind::choice, "spin projection before tracing",
                             {"none", "x+", "x-", "y+", "y-", "z+", "z-"}}}})},
      {"lab", Keys{{"Omega_D", "--omega-d", ValueKind::angular, "dressing Rabi frequency"},
                   {"Delta_D", "--delta-d", ValueKind::angular, "dressing detuning"},
                   {"Gamma_1", "--gamma-1", ValueKind::angular, "auxiliary decay to ground"},
                   {"Gamma_2", "--gamma-2", ValueKind::angular, "auxiliary decay to the metastable level"},
                   {"Omega_c", "--omega-c", ValueKind::angular, "cooling Rabi frequency"},
                   {"Delta_c", "--delta-c", ValueKind::angular, "cooling detuning"},
                   {"Gamma_c", "--gamma-c", ValueKind::angular, "cooling linewidth"},
                   {"eta", "--eta", ValueKind::number, "Lamb-Dicke parameter"},
                   {"omega_trap", "--omega-trap", ValueKind::angular, "trap frequency"},
                   {"wavelength", "--wavelength", ValueKind::length, "drive wavelength"},
                   {"ion_mass", "--ion-mass", ValueKind::mass, "ion mass"},
                   {"J", "--j", ValueKind::angular, "phonon-phonon coupling"},
                   {"cooling_source", "--cooling-source", ValueKind::choice,
                    "which cooling rate feeds the ratios", {"direct", "quoted"}}}},
  };
  return t;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string json_scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt::format("{:.17g}", v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError("config key '" + key + "': list entries must be strings");
      out += (out.empty() ? "" : ",") + e.get<std::string>();
    }
    return out;
  }
  throw ConfigError("config key '" + key + "': unsupported value type");
}

const KeySpec* find_key(const std::string& subcommand, const std::string& key) {
  for (const auto& k : accepted_keys(subcommand))
    if (k.key == key) return &k;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"single", "pair", "sweep", "fig2", "fig3",
                                             "fig4",   "validate", "wigner", "lab"};
  return s;
}

const std::vector<KeySpec>& accepted_keys(const std::string& subcommand) {
  const auto it = tables().find(subcommand);
  if (it == tables().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

std::string accepted_key_list(const std::string& subcommand) {
  std::string out;
  for (const auto& k : accepted_keys(subcommand)) out += (out.empty() ? "" : ", ") + k.key;
  return out;
}

std::string canonical_value(const KeySpec& spec, const std::string& raw) {
  const std::string value = trim(raw);
  auto bad = [&](const std::string& why) {
    return ConfigError("value '" + raw + "' for '" + spec.key + "': " + why);
  };
  switch (spec.kind) {
    case ValueKind::number: {
      size_t used = 0;
      double v;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        throw bad("not a number");
      }
      if (used != value.size() || !std::isfinite(v)) throw bad("not a finite number");
      return fmt::format("{:.17g}", v);
    }
    case ValueKind::integer: {
      size_t used = 0;
      long v;
      try {
        v = std::stol(value, &used);
      } catch (const std::exception&) {
        throw bad("not an integer");
      }
      if (used != value.size()) throw bad("not an integer");
      return std::to_string(v);
    }
    case ValueKind::boolean: {
      std::string v = value;
      std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
      if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
      if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
      throw bad("expected true or false");
    }
    case ValueKind::choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string list;
        for (const auto& c : spec.choices) list += (list.empty() ? "" : ", ") + c;
        throw bad("expected one of " + list);
      }
      return value;
    case ValueKind::names: {
      std::string out, item;
      std::string rest = value + ",";
      for (char c : rest) {
        if (c != ',') {
          item += c;
          continue;
        }
        item = trim(item);
        if (item.empty()) throw bad("empty list entry");
        out += (out.empty() ? "" : ",") + item;
        item.clear();
      }
      return out;
    }
    case ValueKind::angular:
    case ValueKind::length:
    case ValueKind::mass:
      try {
        if (spec.kind == ValueKind::angular) parse_angular(value);
        else if (spec.kind == ValueKind::length) parse_length(value);
        else parse_mass(value);
      } catch (const std::invalid_argument& e) {
        throw bad(e.what());
      }
      return value;
  }
  return value;
}

double RunConfig::number(const std::string& key, double fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : std::stod(it->second);
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : std::stoi(it->second);
}

bool RunConfig::boolean(const std::string& key, bool fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second == "true";
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second;
}

std::vector<std::string> RunConfig::names(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  std::vector<std::string> out;
  size_t start = 0;
  const std::string& s = it->second;
  while (start <= s.size()) {
    const size_t end = s.find(',', start);
    out.push_back(s.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

FileConfig file_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const nlohmann::json& body = j.contains("config") ? j.at("config") : j;
  FileConfig fc;
  const nlohmann::json* params = &body;
  if (body.contains("parameters")) {
    params = &body.at("parameters");
    if (body.contains("subcommand")) fc.subcommand = body.at("subcommand").get<std::string>();
    if (body.contains("output")) fc.output = body.at("output").get<std::string>();
    if (body.contains("format")) fc.format = body.at("format").get<std::string>();
  }
  if (!params->is_object()) throw ConfigError("config parameters must be a JSON object");
  for (const auto& [k, v] : params->items()) {
    if (params == &body && (k == "subcommand" || k == "output" || k == "format")) {
      if (!v.is_string()) throw ConfigError("config key '" + k + "' must be a string");
      if (k == "subcommand") fc.subcommand = v.get<std::string>();
      else if (k == "output") fc.output = v.get<std::string>();
      else fc.format = v.get<std::string>();
      continue;
    }
    fc.parameters[k] = json_scalar_text(v, k);
  }
  return fc;
}

FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return file_config_from_json(j);
}

RunConfig make_config(const std::string& subcommand, const FileConfig& file,
                      const std::map<std::string, std::string>& flags, const std::optional<std::string>& output,
                      const std::optional<std::string>& format) {
  RunConfig c;
  c.subcommand = subcommand;
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  if (file.subcommand && *file.subcommand != subcommand)
    throw ConfigError("config file is for '" + *file.subcommand + "', not '" + subcommand + "'");

  auto put = [&](const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(subcommand, key);
    if (!spec)
      throw ConfigError("unknown key '" + key + "' for " + subcommand + "; accepted keys: " +
                        accepted_key_list(subcommand));
    c.parameters[key] = canonical_value(*spec, value);
  };
  for (const auto& [k, v] : file.parameters) put(k, v);
  for (const auto& [k, v] : flags) put(k, v);
  if (c.has("Gamma") && c.has("gamma_ratio")) throw ConfigError("give either Gamma or gamma_ratio, not both");

  if (output) c.output = *output;
  else if (file.output) c.output = *file.output;
  else if (const char* env = std::getenv("IONSYNC_OUTPUT"); env && *env) c.output = env;
  else c.output = "ionsync-out";

  c.format = format ? *format : file.format.value_or("csv");
  if (c.format != "csv" && c.format != "json" && c.format != "both")
    throw ConfigError("format must be csv, json or both; got '" + c.format + "'");
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : c.parameters) {
    const KeySpec* spec = find_key(c.subcommand, k);
    if (spec && spec->kind == ValueKind::number) params[k] = std::stod(v);
    else if (spec && spec->kind == ValueKind::integer) params[k] = std::stol(v);
    else if (spec && spec->kind == ValueKind::boolean) params[k] = v == "true";
    else params[k] = v;
  }
  return {{"subcommand", c.subcommand}, {"parameters", params}, {"output", c.output}, {"format", c.format}};
}

}  // namespace ionsync
