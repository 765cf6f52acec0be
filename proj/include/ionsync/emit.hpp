#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ionsync/config.hpp"
#include "ionsync/observables.hpp"
#include "ionsync/phase.hpp"
#include "ionsync/sweeps.hpp"

namespace ionsync {

/// Version string recorded in meta.json.
const char* software_version();

/// CSV contract: comma delimiter, '.' decimals, LF endings, a header row,
/// reals as %.17e, booleans as 1/0, NaN as "nan".
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Last column is written as 1/0.
  void row(const std::vector<double>& values, bool flag);
  void close();
  ~CsvWriter();

 private:
  std::string path_;
  std::string buffer_;
  size_t columns_ = 0;
  bool closed_ = false;
};

std::string format_real(double v);

/// Axis column, observables, residual, min_eig, converged.
void write_sweep_csv(const std::string& path, const SweepResult& r);
nlohmann::json sweep_to_json(const SweepResult& r);
/// (phi, P) on `points` grid points.
void write_phase_csv(const std::string& path, const PhaseSpectrum& spec, int points = kPhaseGrid);
/// (x, p, W), x-major.
void write_wigner_csv(const std::string& path, const WignerGrid& g);
void write_json(const std::string& path, const nlohmann::json& j);

/// Conventions block shared by every meta.json.
nlohmann::json conventions_json();
nlohmann::json params_json(const ModelParams& p);
nlohmann::json spec_json(const SweepSpec& s);

/// meta.json skeleton: version, backend, conventions and the config block
/// that parse_config reads back.
nlohmann::json base_meta(const RunConfig& config);

/// Creates the directory (and parents); throws std::runtime_error with the
/// path on failure.
void ensure_directory(const std::string& path);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace ionsync
