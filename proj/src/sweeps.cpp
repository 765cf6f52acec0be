#include "ionsync/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "ionsync/observables.hpp"

namespace ionsync {

namespace {

const std::vector<std::string> kSingleObservables = {"mean_n", "mode_n", "mandel_q", "C_xa", "C_ya",
                                                     "C_za",   "C_xn",   "C_yn",     "C_zn"};
const std::vector<std::string> kPairObservables = {"mean_n", "mean_n2", "mode_n", "mandel_q", "C_zz", "C_xx",
                                                   "C_xy",   "Phi_c",   "Phi_s",  "S",        "peaks", "odd_max"};

double real_correlator(const DensityMatrix& rho, const Operator& x, const Operator& y) {
  return correlator(rho, x, y).real();
}

Operator spin_op(PauliAxis axis, int ion, const BasisSpec& b) { return embed(pauli(axis), ion, FactorKind::spin, b); }

int worker_count(int requested, size_t jobs) {
  int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::min(w, static_cast<int>(jobs)));
}

}  // namespace

const char* to_string(ModelKind m) { return m == ModelKind::rwa ? "rwa" : "validation"; }

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Gamma: return "Gamma";
    case SweepAxis::Delta: return "Delta";
    case SweepAxis::Omega1: return "Omega1";
    case SweepAxis::J: return "J";
    case SweepAxis::gamma_ratio: return "gamma_ratio";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "rwa") return ModelKind::rwa;
  if (s == "validation") return ModelKind::validation;
  throw std::invalid_argument("model must be 'rwa' or 'validation', got '" + s + "'");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  for (SweepAxis a : {SweepAxis::Gamma, SweepAxis::Delta, SweepAxis::Omega1, SweepAxis::J, SweepAxis::gamma_ratio})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("axis must be one of Gamma, Delta, Omega1, J, gamma_ratio; got '" + s + "'");
}

int default_cutoff(ModelKind model, int n_ions) {
  if (n_ions == 1) return kSingleCutoff;
  return model == ModelKind::validation ? kValidationCutoff : kPairCutoff;
}

const std::vector<std::string>& known_observables(int n_ions) {
  return n_ions == 1 ? kSingleObservables : kPairObservables;
}

void SweepSpec::validate() const {
  if (n_ions != 1 && n_ions != 2) throw std::invalid_argument("SweepSpec: n_ions must be 1 or 2");
  if (values.empty()) throw std::invalid_argument("SweepSpec: axis has no values");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("SweepSpec: axis values must be finite");
  if (observables.empty()) throw std::invalid_argument("SweepSpec: no observables requested");
  const auto& known = known_observables(n_ions);
  for (const auto& o : observables)
    if (std::find(known.begin(), known.end(), o) == known.end())
      throw std::invalid_argument("SweepSpec: unknown observable '" + o + "' for " + std::to_string(n_ions) +
                                  " ion(s)");
  if (cutoff < 2) throw std::invalid_argument("SweepSpec: cutoff must be >= 2");
  if (gate && convergence_step < 1) throw std::invalid_argument("SweepSpec: convergence_step must be >= 1");
  if (!(convergence_tol > 0)) throw std::invalid_argument("SweepSpec: convergence_tol must be > 0");
  if (model == ModelKind::validation && n_ions != 2)
    throw std::invalid_argument("SweepSpec: the validation model is set up for ion pairs");
  if (model == ModelKind::validation && !gate)
    throw std::invalid_argument("SweepSpec: the validation model always runs the convergence gate");
  for (double v : values) params_at(base, axis, v).validate();
}

bool SweepResult::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const PointRecord& p) { return p.converged && !p.failed; });
}

std::vector<double> SweepResult::column(const std::string& name) const {
  const auto it = std::find(spec.observables.begin(), spec.observables.end(), name);
  if (it == spec.observables.end()) throw std::invalid_argument("SweepResult: no column '" + name + "'");
  const size_t k = static_cast<size_t>(it - spec.observables.begin());
  std::vector<double> out;
  for (const auto& p : points)
    out.push_back(p.failed ? std::numeric_limits<double>::quiet_NaN() : p.values[k]);
  return out;
}

ModelParams params_at(const ModelParams& base, SweepAxis axis, double value) {
  ModelParams p = base;
  switch (axis) {
    case SweepAxis::Gamma: p.Gamma = value; break;
    case SweepAxis::Delta: p.Delta = value; break;
    case SweepAxis::Omega1: p.Omega1 = value; break;
    case SweepAxis::J: p.J = value; break;
    case SweepAxis::gamma_ratio:
      if (!(value > 0)) throw std::invalid_argument("gamma_ratio axis values must be > 0");
      p.Gamma = p.gamma / value;
      break;
  }
  return p;
}

ModelTerms build_model(ModelKind model, const ModelParams& p, const BasisSpec& basis) {
  return model == ModelKind::rwa ? build_rwa(p, basis) : build_validation(p, basis);
}

SteadyStateOptions solver_options(ModelKind model, const ModelTerms& terms) {
  SteadyStateOptions o;
  o.symmetry = terms.charge;
  if (model == ModelKind::validation) {
    o.method = SteadyStateOptions::Method::krylov;
    o.near_charge = excitation_charge(terms.basis);
  }
  return o;
}

PointEvaluation evaluate_point(ModelKind model, const ModelParams& p, int n_ions, int cutoff,
                               const std::vector<std::string>& observables, double floor,
                               double memory_budget_bytes) {
  const BasisSpec basis(n_ions, cutoff);
  const ModelTerms terms = build_model(model, p, basis);
  SteadyStateOptions opts = solver_options(model, terms);
  opts.memory_budget_bytes = memory_budget_bytes;
  PointEvaluation out{steady_state(terms.liouvillian(), opts), {}, std::nullopt};
  const DensityMatrix& rho = out.solve.rho;

  const std::set<std::string> want(observables.begin(), observables.end());
  auto wanted = [&](const char* name) { return want.count(name) > 0; };

  if (wanted("mean_n") || wanted("mode_n") || wanted("mandel_q")) {
    const NumberStats s = number_stats(phonon_state(rho.op(), 1));
    out.values["mean_n"] = s.mean_n;
    out.values["mode_n"] = s.mode_n;
    out.values["mandel_q"] = s.mandel_q;
  }

  if (n_ions == 1) {
    const Operator a = embed(destroy(cutoff), 1, FactorKind::phonon, basis);
    const Operator n = a.adjoint() * a;
    const char* names[3] = {"x", "y", "z"};
    const PauliAxis axes[3] = {PauliAxis::x, PauliAxis::y, PauliAxis::z};
    for (int k = 0; k < 3; ++k) {
      const Operator s = spin_op(axes[k], 1, basis);
      const std::string ca = std::string("C_") + names[k] + "a", cn = std::string("C_") + names[k] + "n";
      if (want.count(ca)) out.values[ca] = std::abs(correlator(rho, s, a));
      if (want.count(cn)) out.values[cn] = std::abs(correlator(rho, s, n));
    }
  } else {
    if (wanted("mean_n2")) out.values["mean_n2"] = number_stats(phonon_state(rho.op(), 2)).mean_n;
    if (wanted("C_zz"))
      out.values["C_zz"] = real_correlator(rho, spin_op(PauliAxis::z, 1, basis), spin_op(PauliAxis::z, 2, basis));
    if (wanted("C_xx"))
      out.values["C_xx"] = real_correlator(rho, spin_op(PauliAxis::x, 1, basis), spin_op(PauliAxis::x, 2, basis));
    if (wanted("C_xy"))
      out.values["C_xy"] = real_correlator(rho, spin_op(PauliAxis::x, 1, basis), spin_op(PauliAxis::y, 2, basis));

    const PhaseSpectrum spec = phase_spectrum(partial_trace(rho.op(), FactorKind::phonon));
    const PhaseMoments mom = phase_moments(spec);
    out.values["Phi_c"] = mom.phi_c;
    out.values["Phi_s"] = mom.phi_s;
    out.values["S"] = sync_measure(spec);
    out.values["peaks"] = significant_peaks(eval_phase(spec, std::max(kPhaseGrid, 8 * cutoff)), floor);
    double odd = 0;
    for (int k = 1; k <= spec.max_order(); k += 2) odd = std::max(odd, std::abs(spec.p(k)));
    out.values["odd_max"] = odd;
    out.spectrum = spec;
  }
  return out;
}

double flatness_floor(ModelKind model, const ModelParams& p, int cutoff) {
  ModelParams q = p;
  q.J = 0;
  const PointEvaluation e = evaluate_point(model, q, 2, cutoff, {"S"}, 0.0);
  return flatness(*e.spectrum);
}

bool convergence_gate(const SweepSpec& spec, double point, std::string* reason) {
  const ModelParams p = params_at(spec.base, spec.axis, point);
  const double floor = spec.n_ions == 2 ? flatness_floor(spec.model, spec.base, spec.cutoff) : 0.0;
  try {
    const auto lo = evaluate_point(spec.model, p, spec.n_ions, spec.cutoff, spec.observables, floor,
                                   spec.memory_budget_bytes);
    const auto hi = evaluate_point(spec.model, p, spec.n_ions, spec.cutoff + spec.convergence_step,
                                   spec.observables, floor, spec.memory_budget_bytes);
    for (const auto& o : spec.observables) {
      const double d = std::abs(hi.values.at(o) - lo.values.at(o));
      if (!(d < spec.convergence_tol)) {
        if (reason) *reason = o + " moved by " + std::to_string(d);
        return false;
      }
    }
    return true;
  } catch (const SolverError& e) {
    if (reason) *reason = e.what();
    return false;
  }
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  result.points.resize(spec.values.size());

  double floor = 0;
  if (spec.n_ions == 2) {
    floor = flatness_floor(spec.model, spec.base, spec.cutoff);
    result.flatness_floor = floor;
  }

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next++; i < spec.values.size(); i = next++) {
      PointRecord& rec = result.points[i];
      rec.axis_value = spec.values[i];
      rec.cutoff_used = spec.cutoff;
      const ModelParams p = params_at(spec.base, spec.axis, spec.values[i]);
      try {
        PointEvaluation lo =
            evaluate_point(spec.model, p, spec.n_ions, spec.cutoff, spec.observables, floor, spec.memory_budget_bytes);
        for (const auto& o : spec.observables) rec.values.push_back(lo.values.at(o));
        rec.residual = lo.solve.residual;
        rec.residual_bound = lo.solve.residual_bound;
        rec.min_eig = lo.solve.min_eig;
        rec.stats = lo.solve.stats;
        if (spec.keep_spectra) rec.spectrum = lo.spectrum;
        rec.converged = !spec.gate;
        if (!spec.gate) rec.note = "gate disabled";
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.note = e.what();
        rec.values.assign(spec.observables.size(), std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      if (!spec.gate) continue;
      try {
        const PointEvaluation hi = evaluate_point(spec.model, p, spec.n_ions, spec.cutoff + spec.convergence_step,
                                                  spec.observables, floor, spec.memory_budget_bytes);
        rec.converged = true;
        for (size_t k = 0; k < spec.observables.size(); ++k) {
          const double d = std::abs(hi.values.at(spec.observables[k]) - rec.values[k]);
          rec.max_delta = std::max(rec.max_delta, d);
          if (!(d < spec.convergence_tol) && rec.converged) {
            rec.converged = false;
            rec.note = spec.observables[k] + " moved by " + std::to_string(d) + " at cutoff " +
                       std::to_string(spec.cutoff + spec.convergence_step);
          }
        }
      } catch (const std::exception& e) {
        rec.converged = false;
        rec.note = std::string("gate: ") + e.what();
      }
    }
  };

  const int nw = worker_count(spec.workers, spec.values.size());
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return result;
}

ModelParams working_point() {
  ModelParams p;
  p.gamma = 1.0;
  p.Gamma = 1.0 / 3.0;
  p.Omega1 = 1.0;
  p.Omega2 = 1.0;
  p.Delta = 0.0;
  p.J = 0.1;
  return p;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> v(points);
  for (int k = 0; k < points; ++k) v[k] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  return v;
}

SweepSpec fig2a_spec() {
  SweepSpec s;
  s.n_ions = 1;
  s.base = working_point();
  s.base.J = 0;
  s.axis = SweepAxis::gamma_ratio;
  s.values = linspace(1, 9, 17);
  s.observables = {"mean_n", "mode_n", "mandel_q"};
  s.cutoff = kLasingSweepCutoff;
  return s;
}

SweepSpec fig3d_spec() {
  SweepSpec s;
  s.base = working_point();
  s.axis = SweepAxis::Delta;
  s.values = linspace(0, 3, 17);
  s.observables = {"S", "peaks", "odd_max"};
  s.keep_spectra = true;
  return s;
}

SweepSpec fig3e_spec() {
  SweepSpec s;
  s.base = working_point();
  s.axis = SweepAxis::Omega1;
  s.values = linspace(1, 2, 11);
  s.observables = {"S", "peaks", "odd_max"};
  s.keep_spectra = true;
  return s;
}

SweepSpec fig4_spec(bool balanced, ModelKind model) {
  SweepSpec s;
  s.model = model;
  s.base = working_point();
  s.base.Omega1 = balanced ? 1.0 : 1.25;
  if (model == ModelKind::validation) {
    s.base.eta = 1.0 / 30.0;
    s.base.omega_mean = 500.0;
  }
  s.axis = SweepAxis::Delta;
  s.values = linspace(0, 3, 17);
  s.observables = model == ModelKind::rwa ? std::vector<std::string>{"C_zz", "C_xx", "C_xy", "Phi_c", "Phi_s", "S"}
                                          : std::vector<std::string>{"C_zz", "C_xx", "C_xy"};
  s.cutoff = default_cutoff(model, 2);
  return s;
}

SweepResult run_fig4(bool balanced, ModelKind model, int workers) {
  SweepSpec s = fig4_spec(balanced, model);
  s.workers = workers;
  return run_sweep(s);
}

SwapReport swap_test(const ModelParams& p, int cutoff) {
  ModelParams q = p;
  std::swap(q.Omega1, q.Omega2);
  q.Delta = -p.Delta;
  const BasisSpec basis(2, cutoff);
  const std::vector<std::string> obs = {"mean_n", "mean_n2", "C_zz", "C_xx", "C_xy", "Phi_c", "Phi_s", "S"};
  const PointEvaluation a = evaluate_point(ModelKind::rwa, p, 2, cutoff, obs, 0.0);
  const PointEvaluation b = evaluate_point(ModelKind::rwa, q, 2, cutoff, obs, 0.0);

  const Operator u = ion_swap(basis);
  const SpMat moved = u.matrix() * a.solve.rho.matrix() * u.matrix().adjoint();
  SwapReport r;
  const CMat diff = CMat(moved) - CMat(b.solve.rho.matrix());
  r.state_defect = diff.cwiseAbs().maxCoeff();

  auto upd = [&](double x, double y) { r.scalar_defect = std::max(r.scalar_defect, std::abs(x - y)); };
  const auto& va = a.values;
  const auto& vb = b.values;
  upd(va.at("mean_n"), vb.at("mean_n2"));
  upd(va.at("mean_n2"), vb.at("mean_n"));
  upd(va.at("C_zz"), vb.at("C_zz"));
  upd(va.at("C_xx"), vb.at("C_xx"));
  upd(va.at("Phi_c"), vb.at("Phi_c"));
  upd(va.at("Phi_s"), -vb.at("Phi_s"));
  upd(va.at("S"), vb.at("S"));
  r.c_xy = va.at("C_xy");
  r.c_yx_swapped = real_correlator(b.solve.rho, spin_op(PauliAxis::y, 1, basis), spin_op(PauliAxis::x, 2, basis));
  return r;
}

}  // namespace ionsync
