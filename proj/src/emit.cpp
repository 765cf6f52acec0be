#include "ionsync/emit.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ionsync/lindblad.hpp"

namespace ionsync {

namespace fs = std::filesystem;

const char* software_version() { return "ionsync 1.0.0"; }

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17e}", v);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  for (size_t k = 0; k < columns.size(); ++k) buffer_ += (k ? "," : "") + columns[k];
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CsvWriter: row width differs from header in " + path_);
  for (size_t k = 0; k < values.size(); ++k) buffer_ += (k ? "," : "") + format_real(values[k]);
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values, bool flag) {
  if (values.size() + 1 != columns_) throw std::logic_error("CsvWriter: row width differs from header in " + path_);
  for (double v : values) buffer_ += format_real(v) + ",";
  buffer_ += flag ? "1\n" : "0\n";
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path_ + "' for writing");
  out << buffer_;
  if (!out) throw std::runtime_error("write failed for '" + path_ + "'");
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  CsvWriter w(path);
  std::vector<std::string> cols = {to_string(r.spec.axis)};
  cols.insert(cols.end(), r.spec.observables.begin(), r.spec.observables.end());
  cols.insert(cols.end(), {"residual", "min_eig", "converged"});
  w.header(cols);
  for (const auto& p : r.points) {
    std::vector<double> v = {p.axis_value};
    v.insert(v.end(), p.values.begin(), p.values.end());
    v.push_back(p.failed ? NAN : p.residual);
    v.push_back(p.failed ? NAN : p.min_eig);
    w.row(v, p.converged && !p.failed);
  }
  w.close();
}

nlohmann::json sweep_to_json(const SweepResult& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json vals = nlohmann::json::object();
    for (size_t k = 0; k < r.spec.observables.size(); ++k)
      vals[r.spec.observables[k]] = std::isfinite(p.values[k]) ? nlohmann::json(p.values[k]) : nlohmann::json();
    pts.push_back({{"axis_value", p.axis_value},
                   {"values", vals},
                   {"residual", p.residual},
                   {"residual_bound", p.residual_bound},
                   {"min_eig", p.min_eig},
                   {"cutoff_used", p.cutoff_used},
                   {"converged", p.converged && !p.failed},
                   {"failed", p.failed},
                   {"max_delta", p.max_delta},
                   {"note", p.note},
                   {"solver",
                    {{"backend", p.stats.backend},
                     {"method", p.stats.method},
                     {"unknowns", p.stats.unknowns},
                     {"real_parametrization", p.stats.real_parametrization},
                     {"iterations", p.stats.inverse_iterations}}}});
  }
  nlohmann::json j = {{"spec", spec_json(r.spec)}, {"points", pts}};
  j["flatness_floor"] = r.flatness_floor ? nlohmann::json(*r.flatness_floor) : nlohmann::json();
  return j;
}

void write_phase_csv(const std::string& path, const PhaseSpectrum& spec, int points) {
  const auto phi = phase_axis(points);
  const auto p = eval_phase(spec, points);
  CsvWriter w(path);
  w.header({"phi", "P"});
  for (int j = 0; j < points; ++j) w.row({phi[j], p[j]});
  w.close();
}

void write_wigner_csv(const std::string& path, const WignerGrid& g) {
  CsvWriter w(path);
  w.header({"x", "p", "W"});
  for (size_t i = 0; i < g.x_axis.size(); ++i)
    for (size_t j = 0; j < g.p_axis.size(); ++j) w.row({g.x_axis[i], g.p_axis[j], g.values(i, j)});
  w.close();
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

nlohmann::json conventions_json() {
  return {{"vectorization", "column-stacking"},
          {"single_ion_index", "i = s*N + n, s = 0 for down, 1 for up"},
          {"two_ion_index", "g = i1*(2N) + i2, ion 1 outermost"},
          {"sigma_z", "diag(-1, +1) in (down, up)"},
          {"sigma_minus", "|down><up|"},
          {"detuning_sign", "ion 1 carries -Delta/4, ion 2 +Delta/4; Delta = omega2 - omega1"},
          {"units", "rates in units of gamma; lab subcommand in rad/s"},
          {"relative_phase", "phi = phi1 - phi2, P(phi) = sum_k p_k exp(i k phi)"},
          {"phase_grid_points", kPhaseGrid},
          {"wigner_alpha", "alpha = (x + i p)/2, W normalized over d^2 alpha"},
          {"csv", "comma, '.', LF, %.17e reals, converged as 1/0"}};
}

nlohmann::json params_json(const ModelParams& p) {
  nlohmann::json j = {{"gamma", p.gamma}, {"Gamma", p.Gamma}, {"Omega1", p.Omega1},
                      {"Omega2", p.Omega2}, {"Delta", p.Delta}, {"J", p.J}};
  if (p.eta) j["eta"] = *p.eta;
  if (p.omega_mean) j["omega_mean"] = *p.omega_mean;
  return j;
}

nlohmann::json spec_json(const SweepSpec& s) {
  return {{"model", to_string(s.model)},
          {"n_ions", s.n_ions},
          {"base", params_json(s.base)},
          {"axis", to_string(s.axis)},
          {"values", s.values},
          {"observables", s.observables},
          {"cutoff", s.cutoff},
          {"gate", s.gate},
          {"convergence_step", s.convergence_step},
          {"convergence_tol", s.convergence_tol}};
}

nlohmann::json base_meta(const RunConfig& config) {
  return {{"software", software_version()},
          {"sparse_lu_backend", sparse_lu_backend()},
          {"vectorization", "column-stacking"},
          {"conventions", conventions_json()},
          {"config", to_json(config)}};
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path))
    throw std::runtime_error("cannot create output directory '" + path + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

}  // namespace ionsync
