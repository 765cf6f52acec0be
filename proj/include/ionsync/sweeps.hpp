#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ionsync/lindblad.hpp"
#include "ionsync/model.hpp"
#include "ionsync/phase.hpp"

namespace ionsync {

enum class ModelKind { rwa, validation };

/// Swept parameter. gamma_ratio sets Gamma = gamma / value.
enum class SweepAxis { Gamma, Delta, Omega1, J, gamma_ratio };

const char* to_string(ModelKind m);
const char* to_string(SweepAxis a);
ModelKind model_kind_from_string(const std::string& s);
SweepAxis sweep_axis_from_string(const std::string& s);

/// Default cutoffs: single ion, pair, and pair under the validation model.
constexpr int kSingleCutoff = 15;
constexpr int kPairCutoff = 12;
constexpr int kValidationCutoff = 10;
/// Single ion over gamma/Gamma up to 9: <n> reaches 4 and N = 15 fails the gate.
constexpr int kLasingSweepCutoff = 20;

int default_cutoff(ModelKind model, int n_ions);

/// Observables a sweep can record. Phonon statistics refer to ion 1
/// (mean_n2 to ion 2); C_* are spin-spin correlators for pairs and
/// |C(sigma^alpha, a)|, |C(sigma^alpha, n)| (C_xa ... C_zn) for ion 1.
const std::vector<std::string>& known_observables(int n_ions);

struct SweepSpec {
  ModelKind model = ModelKind::rwa;
  int n_ions = 2;
  ModelParams base;
  SweepAxis axis = SweepAxis::Delta;
  std::vector<double> values;
  std::vector<std::string> observables;
  int cutoff = kPairCutoff;
  bool gate = true;
  int convergence_step = 3;
  double convergence_tol = 1e-4;
  int workers = 0;  // 0: hardware concurrency
  bool keep_spectra = false;
  double memory_budget_bytes = 3.0 * 1024 * 1024 * 1024;

  /// Throws std::invalid_argument on empty or non-finite axes, unknown or
  /// empty observables, and bad cutoffs.
  void validate() const;
};

struct PointRecord {
  double axis_value = 0;
  std::vector<double> values;  // aligned with SweepSpec::observables
  double residual = 0;
  double residual_bound = 0;
  double min_eig = 0;
  int cutoff_used = 0;
  bool converged = false;
  bool failed = false;
  std::string note;  // failure or gate reason
  double max_delta = 0;
  SolverStats stats;
  std::optional<PhaseSpectrum> spectrum;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<PointRecord> points;
  /// max |P - 1/2pi| at J = 0 for the sweep's base parameters; pairs only.
  std::optional<double> flatness_floor;

  bool all_converged() const;
  /// Column of one observable across points.
  std::vector<double> column(const std::string& name) const;
};

/// Parameters at one axis value.
ModelParams params_at(const ModelParams& base, SweepAxis axis, double value);

ModelTerms build_model(ModelKind model, const ModelParams& p, const BasisSpec& basis);
SteadyStateOptions solver_options(ModelKind model, const ModelTerms& terms);

/// Steady state plus observables for one parameter set.
struct PointEvaluation {
  SteadyStateResult solve;
  std::map<std::string, double> values;
  std::optional<PhaseSpectrum> spectrum;
};

PointEvaluation evaluate_point(ModelKind model, const ModelParams& p, int n_ions, int cutoff,
                               const std::vector<std::string>& observables, double flatness_floor,
                               double memory_budget_bytes = 3.0 * 1024 * 1024 * 1024);

/// One solve per axis value (two with the gate); failures are recorded per
/// point. Output is in axis order and independent of the worker count.
SweepResult run_sweep(const SweepSpec& spec);

/// Recomputes `spec.observables` at cutoff + convergence_step. Returns true
/// iff every observable moved by less than convergence_tol; `reason` says
/// why not.
bool convergence_gate(const SweepSpec& spec, double point, std::string* reason = nullptr);

/// Flatness of P at J = 0 for the given parameters.
double flatness_floor(ModelKind model, const ModelParams& p, int cutoff);

/// Paper working point for a pair: Omega2 = 1, Gamma = 1/3, J = 1/10.
ModelParams working_point();

std::vector<double> linspace(double lo, double hi, int points);

/// Sweep presets.
SweepSpec fig2a_spec();                 // single ion, gamma/Gamma in [1, 9]
SweepSpec fig3d_spec();                 // S against Delta, balanced
SweepSpec fig3e_spec();                 // S and peaks against Omega1/Omega2
SweepSpec fig4_spec(bool balanced, ModelKind model = ModelKind::rwa);

/// Correlator and phase-moment curves against Delta in [0, 3].
SweepResult run_fig4(bool balanced, ModelKind model = ModelKind::rwa, int workers = 0);

/// Relabels the ions: solves (Omega1, Omega2, Delta) and (Omega2, Omega1,
/// -Delta) and compares the second state with the swapped first one.
struct SwapReport {
  double state_defect = 0;  // max |U rho_a U^+ - rho_b|
  double scalar_defect = 0; // max change of swap-invariant scalars
  double c_xy = 0;          // C(s1x, s2y) of the first state
  double c_yx_swapped = 0;  // C(s1y, s2x) of the second state
};

SwapReport swap_test(const ModelParams& p, int cutoff);

}  // namespace ionsync
