#include "ionsync/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ionsync/emit.hpp"
#include "ionsync/labcalc.hpp"
#include "ionsync/observables.hpp"
#include "ionsync/phase.hpp"
#include "ionsync/sweeps.hpp"

namespace ionsync {

namespace {

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"single", "steady state of one ion: phonon statistics, spin-phonon correlators, Wigner function"},
      {"pair", "steady state of two coupled ions: spin correlators, P(phi), S"},
      {"sweep", "generic parameter sweep over one axis"},
      {"fig2", "single-ion lasing sweep, Wigner function and spin-projected Wigner functions"},
      {"fig3", "P(phi) families and S against detuning and drive ratio"},
      {"fig4", "spin correlators and phase moments against detuning"},
      {"validate", "lab-frame validation model against the rotating-wave model"},
      {"wigner", "Wigner function of one ion's phonon mode"},
      {"lab", "laboratory parameter calculator (rad/s input)"},
  };
  return d;
}

std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

class Outputs {
 public:
  explicit Outputs(const RunConfig& c) : c_(c) {
    ensure_directory(c.output);
    meta_ = base_meta(c);
    meta_["files"] = nlohmann::json::array();
  }

  nlohmann::json& meta() { return meta_; }

  void sweep(const std::string& name, const SweepResult& r) {
    if (c_.wants_csv()) write_sweep_csv(path(name + ".csv"), r);
    if (c_.wants_json()) write_json(path(name + ".json"), sweep_to_json(r));
    meta_["runs"][name] = {{"spec", spec_json(r.spec)},
                           {"all_converged", r.all_converged()},
                           {"flatness_floor", r.flatness_floor ? nlohmann::json(*r.flatness_floor) : nlohmann::json()},
                           {"notes", notes(r)}};
    bool any = false;
    for (const auto& p : r.points) any = any || p.spectrum.has_value();
    if (!any) return;
    if (c_.wants_csv()) {
      const std::string dir = name + "_phase";
      ensure_directory(join_path(c_.output, dir));
      for (size_t k = 0; k < r.points.size(); ++k)
        if (r.points[k].spectrum) phase(join_path(dir, fmt::format("point_{:02d}", k)), *r.points[k].spectrum, false);
    }
    if (c_.wants_json()) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& p : r.points)
        if (p.spectrum) arr.push_back({{"axis_value", p.axis_value}, {"P", eval_phase(*p.spectrum, kPhaseGrid)}});
      write_json(path(name + "_phase.json"), {{"phi", phase_axis(kPhaseGrid)}, {"points", arr}});
    }
  }

  void phase(const std::string& name, const PhaseSpectrum& s, bool json_too = true) {
    if (c_.wants_csv()) write_phase_csv(path(name + ".csv"), s);
    if (json_too && c_.wants_json())
      write_json(path(name + ".json"), {{"phi", phase_axis(kPhaseGrid)}, {"P", eval_phase(s, kPhaseGrid)}});
  }

  void wigner(const std::string& name, const WignerGrid& g) {
    if (c_.wants_csv()) write_wigner_csv(path(name + ".csv"), g);
    if (c_.wants_json()) {
      std::vector<std::vector<double>> rows(g.x_axis.size());
      for (size_t i = 0; i < g.x_axis.size(); ++i)
        for (size_t j = 0; j < g.p_axis.size(); ++j) rows[i].push_back(g.values(i, j));
      write_json(path(name + ".json"), {{"x", g.x_axis}, {"p", g.p_axis}, {"W", rows}});
    }
  }

  void table(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
    if (c_.wants_csv()) {
      CsvWriter w(path(name + ".csv"));
      w.header(header);
      for (const auto& r : rows) w.row(r);
      w.close();
    }
    if (c_.wants_json()) {
      nlohmann::json cols = nlohmann::json::object();
      for (size_t k = 0; k < header.size(); ++k) {
        std::vector<double> col;
        for (const auto& r : rows) col.push_back(r[k]);
        cols[header[k]] = col;
      }
      write_json(path(name + ".json"), cols);
    }
  }

  void json(const std::string& name, const nlohmann::json& j) { write_json(path(name + ".json"), j); }

  void finish(bool timestamps, const std::string& started) {
    if (timestamps) {
      meta_["started"] = started;
      meta_["finished"] = timestamp_now();
    }
    write_json(join_path(c_.output, "meta.json"), meta_);
  }

 private:
  std::string path(const std::string& file) {
    meta_["files"].push_back(file);
    return join_path(c_.output, file);
  }

  static nlohmann::json notes(const SweepResult& r) {
    nlohmann::json n = nlohmann::json::array();
    for (const auto& p : r.points)
      if (p.failed || !p.converged) n.push_back({{"axis_value", p.axis_value}, {"note", p.note}});
    return n;
  }

  const RunConfig& c_;
  nlohmann::json meta_;
};

ModelKind model_of(const RunConfig& c) { return model_kind_from_string(c.text("model", "rwa")); }

void configure(const RunConfig& c, SweepSpec& s) {
  s.cutoff = c.integer("cutoff", s.cutoff);
  s.workers = c.integer("workers", 0);
  s.gate = c.boolean("gate", true);
  s.convergence_step = c.integer("convergence_step", s.convergence_step);
  s.convergence_tol = c.number("convergence_tol", s.convergence_tol);
  if (s.model == ModelKind::validation && !s.gate)
    throw ConfigError("the validation model always runs the convergence gate");
  if (s.workers < 0) throw ConfigError("workers must be >= 0");
  if (s.cutoff < 2) throw ConfigError("cutoff must be >= 2");
}

std::vector<double> axis_values(const RunConfig& c, double lo, double hi, int points) {
  const int n = c.integer("points", points);
  if (n < 1) throw ConfigError("points must be >= 1");
  return linspace(c.number("from", lo), c.number("to", hi), n);
}

std::vector<double> grid_axis(const RunConfig& c) {
  const double e = c.number("extent", kWignerDefaultExtent);
  const int n = c.integer("grid_points", kWignerDefaultPoints);
  if (!(e > 0)) throw ConfigError("extent must be > 0");
  if (n < kWignerMinPoints) throw ConfigError("grid_points must be >= 16");
  return uniform_axis(-e, e, n);
}

int status_of(std::initializer_list<const SweepResult*> runs) {
  for (const auto* r : runs)
    if (!r->all_converged()) return kExitFailure;
  return kExitOk;
}

void print_sweep(std::ostream& out, const std::string& name, const SweepResult& r) {
  out << fmt::format("{}: {} points, axis {}", name, r.points.size(), to_string(r.spec.axis));
  if (r.flatness_floor) out << fmt::format(", flatness floor {:.3e}", *r.flatness_floor);
  out << '\n';
  for (const auto& p : r.points) {
    out << fmt::format("  {:>8.4f}", p.axis_value);
    if (p.failed) {
      out << "  FAILED: " << p.note << '\n';
      continue;
    }
    for (size_t k = 0; k < p.values.size(); ++k)
      out << fmt::format("  {}={:.6g}", r.spec.observables[k], p.values[k]);
    out << (p.converged ? "" : "  [unconverged: " + p.note + "]") << '\n';
  }
}

int run_single(const RunConfig& c, Outputs& o, std::ostream& out) {
  const ModelParams p = resolve_params(c);
  SweepSpec s;
  s.n_ions = 1;
  s.base = p;
  s.axis = SweepAxis::Gamma;
  s.values = {p.Gamma};
  s.observables = known_observables(1);
  s.cutoff = kSingleCutoff;
  configure(c, s);
  const SweepResult r = run_sweep(s);
  o.sweep("single", r);
  print_sweep(out, "single", r);
  if (r.points[0].failed) return kExitFailure;

  const PointEvaluation e = evaluate_point(ModelKind::rwa, p, 1, s.cutoff, {"mean_n"}, 0.0);
  const Operator rp = phonon_state(e.solve.rho.op(), 1);
  const NumberStats ns = number_stats(rp);
  std::vector<std::vector<double>> rows;
  for (size_t n = 0; n < ns.pn.size(); ++n) rows.push_back({static_cast<double>(n), ns.pn[n]});
  o.table("pn", {"n", "p_n"}, rows);
  const auto ax = grid_axis(c);
  const WignerGrid w = wigner(rp, ax, ax);
  o.wigner("wigner", w);
  o.meta()["wigner"] = {{"riemann_sum", w.riemann_sum()}, {"min", w.min()}, {"max", w.max()}};
  o.meta()["params"] = params_json(p);
  return status_of({&r});
}

int run_pair(const RunConfig& c, Outputs& o, std::ostream& out) {
  const ModelKind m = model_of(c);
  const ModelParams p = resolve_params(c);
  SweepSpec s;
  s.model = m;
  s.base = p;
  s.axis = SweepAxis::Delta;
  s.values = {p.Delta};
  s.observables = known_observables(2);
  s.cutoff = default_cutoff(m, 2);
  s.keep_spectra = true;
  configure(c, s);
  const SweepResult r = run_sweep(s);
  o.sweep("pair", r);
  if (r.points[0].spectrum) o.phase("phase", *r.points[0].spectrum);
  o.meta()["params"] = params_json(p);
  o.meta()["flatness_floor"] = r.flatness_floor ? nlohmann::json(*r.flatness_floor) : nlohmann::json();
  print_sweep(out, "pair", r);
  return status_of({&r});
}

int run_generic_sweep(const RunConfig& c, Outputs& o, std::ostream& out) {
  SweepSpec s;
  s.model = model_of(c);
  s.n_ions = c.integer("n_ions", 2);
  if (s.n_ions != 1 && s.n_ions != 2) throw ConfigError("n_ions must be 1 or 2");
  s.base = resolve_params(c);
  s.axis = sweep_axis_from_string(c.text("axis", "Delta"));
  switch (s.axis) {
    case SweepAxis::Delta: s.values = axis_values(c, 0, 3, 17); break;
    case SweepAxis::Omega1: s.values = axis_values(c, 1, 2, 11); break;
    case SweepAxis::gamma_ratio: s.values = axis_values(c, 1, 9, 17); break;
    case SweepAxis::Gamma: s.values = axis_values(c, 1.0 / 9.0, 1, 17); break;
    case SweepAxis::J: s.values = axis_values(c, 0, 0.2, 11); break;
  }
  s.observables = c.names("observables", known_observables(s.n_ions));
  s.cutoff = default_cutoff(s.model, s.n_ions);
  s.keep_spectra = s.n_ions == 2;
  configure(c, s);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const SweepResult r = run_sweep(s);
  o.sweep("sweep", r);
  print_sweep(out, "sweep", r);
  return status_of({&r});
}

int run_fig2(const RunConfig& c, Outputs& o, std::ostream& out) {
  SweepSpec a = fig2a_spec();
  a.base.Omega1 = c.number("Omega1", 1.0);
  a.values = axis_values(c, 1, 9, 17);
  configure(c, a);
  const SweepResult r = run_sweep(a);
  o.sweep("fig2a", r);
  print_sweep(out, "fig2a", r);

  ModelParams p = a.base;
  p.Gamma = c.number("Gamma", 1.0 / 3.0);
  const PointEvaluation e = evaluate_point(ModelKind::rwa, p, 1, a.cutoff, {"mean_n"}, 0.0);
  const auto ax = grid_axis(c);
  const WignerGrid w = wigner(phonon_state(e.solve.rho.op(), 1), ax, ax);
  o.wigner("fig2b_wigner", w);

  const SpinPhononProfile prof = spin_phonon_profile(e.solve.rho, 1, ax, ax);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 3; ++k)
    rows.push_back({static_cast<double>(k), prof.c_a[k].real(), prof.c_a[k].imag(), prof.c_n[k].real(),
                    prof.c_n[k].imag()});
  o.table("fig2c_correlators", {"axis", "C_a_re", "C_a_im", "C_n_re", "C_n_im"}, rows);
  const char* tags[6] = {"xp", "xm", "yp", "ym", "zp", "zm"};
  nlohmann::json minima;
  for (int k = 0; k < 6; ++k) {
    o.wigner(std::string("fig2c_wigner_") + tags[k], prof.projected[k]);
    minima[tags[k]] = prof.projected[k].min();
  }
  o.meta()["fig2c"] = {{"axis_rows", "0 = x, 1 = y, 2 = z"},
                       {"projected_wigner_min", minima},
                       {"solver_residual", e.solve.residual}};
  o.meta()["params"] = params_json(p);
  out << fmt::format("fig2b: mean_n at Gamma={:.4g}: W(0,0) grid min {:.4g}, max {:.4g}\n", p.Gamma, w.min(), w.max());
  return status_of({&r});
}

int run_fig3(const RunConfig& c, Outputs& o, std::ostream& out) {
  SweepSpec d = fig3d_spec();
  d.base = resolve_params(c);
  d.base.Omega1 = d.base.Omega2;
  d.values = linspace(0, c.number("delta_max", 3.0), c.integer("delta_points", 17));
  configure(c, d);
  SweepSpec e = fig3e_spec();
  e.base = d.base;
  e.values = linspace(1, c.number("ratio_max", 2.0), c.integer("ratio_points", 11));
  configure(c, e);
  for (SweepSpec* s : {&d, &e})
    for (double& v : s->values)
      if (s->axis == SweepAxis::Omega1) v *= s->base.Omega2;
  const SweepResult rd = run_sweep(d);
  const SweepResult re = run_sweep(e);
  o.sweep("S_vs_delta", rd);
  o.sweep("S_vs_ratio", re);
  if (!rd.points.empty() && rd.points[0].spectrum) o.phase("fig3a_phase", *rd.points[0].spectrum);
  print_sweep(out, "S_vs_delta", rd);
  print_sweep(out, "S_vs_ratio", re);
  return status_of({&rd, &re});
}

int run_fig4(const RunConfig& c, Outputs& o, std::ostream& out) {
  const std::string which = c.text("balanced", "both");
  const auto deltas = linspace(0, c.number("delta_max", 3.0), c.integer("points", 17));
  std::vector<SweepResult> runs;
  std::vector<std::string> names;
  for (bool balanced : {true, false}) {
    if ((which == "true" && !balanced) || (which == "false" && balanced)) continue;
    SweepSpec s = fig4_spec(balanced);
    s.base.Gamma = resolve_params(c).Gamma;
    s.base.J = c.number("J", s.base.J);
    s.base.Omega2 = c.number("Omega2", 1.0);
    s.base.Omega1 = balanced ? s.base.Omega2 : 1.25 * s.base.Omega2;
    s.values = deltas;
    configure(c, s);
    runs.push_back(run_sweep(s));
    names.push_back(balanced ? "fig4_balanced" : "fig4_unbalanced");
  }
  if (c.boolean("overlay", false)) {
    SweepSpec v = fig4_spec(false, ModelKind::validation);
    v.base.Gamma = resolve_params(c).Gamma;
    v.base.J = c.number("J", v.base.J);
    v.base.Omega2 = c.number("Omega2", 1.0);
    v.base.Omega1 = 1.25 * v.base.Omega2;
    v.base.eta = c.number("eta", 1.0 / 30.0);
    v.base.omega_mean = c.number("omega_mean", 500.0);
    v.values = deltas;
    configure(c, v);
    v.cutoff = c.integer("validation_cutoff", kValidationCutoff);
    runs.push_back(run_sweep(v));
    names.push_back("fig4_validation");
  }
  int status = kExitOk;
  for (size_t k = 0; k < runs.size(); ++k) {
    o.sweep(names[k], runs[k]);
    print_sweep(out, names[k], runs[k]);
    if (!runs[k].all_converged()) status = kExitFailure;
  }
  return status;
}

int run_validate(const RunConfig& c, Outputs& o, std::ostream& out) {
  ModelParams p = resolve_params(c);
  if (!c.has("Omega1")) p.Omega1 = 1.25 * p.Omega2;
  p.eta = c.number("eta", 1.0 / 30.0);
  p.omega_mean = c.number("omega_mean", 500.0);
  SweepSpec v;
  v.model = ModelKind::validation;
  v.base = p;
  v.axis = SweepAxis::Delta;
  v.values = axis_values(c, 0, 3, 17);
  v.observables = {"C_zz", "C_xx", "C_xy"};
  v.cutoff = kValidationCutoff;
  configure(c, v);
  SweepSpec r = v;
  r.model = ModelKind::rwa;
  const SweepResult rv = run_sweep(v);
  const SweepResult rr = run_sweep(r);

  CsvWriter w(join_path(c.output, "validation.csv"));
  nlohmann::json rows = nlohmann::json::array();
  w.header({"Delta", "C_zz", "C_xx", "C_xy", "C_zz_rwa", "C_xx_rwa", "C_xy_rwa", "residual", "min_eig", "converged"});
  bool agree = true;
  double worst = 0;
  for (size_t k = 0; k < v.values.size(); ++k) {
    const auto& a = rv.points[k];
    const auto& b = rr.points[k];
    const bool ok = !a.failed && !b.failed && a.converged && b.converged;
    std::vector<double> row = {v.values[k]};
    row.insert(row.end(), a.values.begin(), a.values.end());
    row.insert(row.end(), b.values.begin(), b.values.end());
    row.push_back(a.residual);
    row.push_back(a.min_eig);
    if (c.wants_csv()) w.row(row, ok);
    if (!ok) continue;
    for (size_t j = 0; j < 3; ++j) {
      const double tol = std::max(0.1 * std::abs(b.values[j]), 2e-4);
      const double dev = std::abs(a.values[j] - b.values[j]);
      worst = std::max(worst, dev / tol);
      agree = agree && dev <= tol;
    }
  }
  if (c.wants_csv()) w.close();
  o.meta()["files"].push_back("validation.csv");
  if (c.wants_json()) o.json("validation", {{"validation", sweep_to_json(rv)}, {"rwa", sweep_to_json(rr)}});
  o.meta()["agreement"] = {{"tolerance", "max(10% relative, 2e-4 absolute)"},
                           {"worst_deviation_over_tolerance", worst},
                           {"all_within", agree}};
  print_sweep(out, "validation", rv);
  print_sweep(out, "rwa", rr);
  out << fmt::format("agreement: worst deviation / tolerance = {:.3f} ({})\n", worst, agree ? "within" : "outside");
  return status_of({&rv, &rr});
}

int run_wigner(const RunConfig& c, Outputs& o, std::ostream& out) {
  const int n_ions = c.integer("n_ions", 1);
  if (n_ions != 1 && n_ions != 2) throw ConfigError("n_ions must be 1 or 2");
  const int ion = c.integer("ion", 1);
  if (ion < 1 || ion > n_ions) throw ConfigError("ion must be 1" + std::string(n_ions == 2 ? " or 2" : ""));
  const int cutoff = c.integer("cutoff", default_cutoff(ModelKind::rwa, n_ions));
  const ModelParams p = resolve_params(c);
  const PointEvaluation e = evaluate_point(ModelKind::rwa, p, n_ions, cutoff, {"mean_n"}, 0.0);
  const std::string proj = c.text("projection", "none");
  Operator state = e.solve.rho.op();
  if (proj != "none") {
    const Axis axis = proj[0] == 'x' ? Axis::x : proj[0] == 'y' ? Axis::y : Axis::z;
    state = spin_project(state, ion, axis, proj[1] == '+' ? 1 : -1);
  } else {
    state = partial_trace(state, FactorKind::phonon);
  }
  const auto ax = grid_axis(c);
  const WignerGrid w = wigner(phonon_state(state, ion), ax, ax);
  o.wigner("wigner", w);
  o.meta()["params"] = params_json(p);
  o.meta()["wigner"] = {{"riemann_sum", w.riemann_sum()}, {"min", w.min()}, {"max", w.max()},
                        {"projection", proj}, {"ion", ion}, {"cutoff", cutoff},
                        {"solver_residual", e.solve.residual}};
  out << fmt::format("wigner: ion {}, projection {}, sum {:.6f}, min {:.4g}, max {:.4g}\n", ion, proj,
                     w.riemann_sum(), w.min(), w.max());
  return kExitOk;
}

int run_lab(const RunConfig& c, Outputs& o, std::ostream& out) {
  LabParams p = LabParams::calcium_defaults();
  const std::pair<const char*, double*> angular[] = {
      {"Omega_D", &p.Omega_D}, {"Delta_D", &p.Delta_D}, {"Gamma_1", &p.Gamma_1}, {"Gamma_2", &p.Gamma_2},
      {"Omega_c", &p.Omega_c}, {"Delta_c", &p.Delta_c}, {"Gamma_c", &p.Gamma_c}, {"omega_trap", &p.omega_trap},
      {"J", &p.J}};
  for (const auto& [key, field] : angular)
    if (c.has(key)) *field = parse_angular(c.text(key, ""));
  if (c.has("wavelength")) p.wavelength = parse_length(c.text("wavelength", ""));
  if (c.has("ion_mass")) p.ion_mass = parse_mass(c.text("ion_mass", ""));
  p.eta = c.number("eta", p.eta);
  const CoolingSource src = cooling_source_from_string(c.text("cooling_source", "direct"));
  const LabSummary s = lab_summary(p, src);
  const double two_pi = 2.0 * M_PI;
  nlohmann::json j = {
      {"inputs_rad_per_s",
       {{"Omega_D", p.Omega_D}, {"Delta_D", p.Delta_D}, {"Gamma_1", p.Gamma_1}, {"Gamma_2", p.Gamma_2},
        {"Omega_c", p.Omega_c}, {"Delta_c", p.Delta_c}, {"Gamma_c", p.Gamma_c}, {"omega_trap", p.omega_trap},
        {"J", p.J}}},
      {"eta", p.eta},
      {"wavelength_m", p.wavelength},
      {"ion_mass_kg", p.ion_mass},
      {"gamma", s.gamma},
      {"gamma_over_2pi_Hz", s.gamma / two_pi},
      {"cooling_rate_direct", s.Gamma_direct},
      {"cooling_rate_direct_over_2pi_Hz", s.Gamma_direct / two_pi},
      {"cooling_rate_quoted", s.Gamma_quoted},
      {"cooling_rate_quoted_over_2pi_Hz", s.Gamma_quoted / two_pi},
      {"cooling_rate_used", s.Gamma_used},
      {"cooling_source", to_string(s.cooling_source)},
      {"cooling_discrepancy_quoted_over_direct", s.cooling_discrepancy},
      {"cooling_discrepancy_flag", std::abs(s.cooling_discrepancy - 1.0) > 0.05},
      {"trap_freq_for_eta", s.omega_for_eta},
      {"trap_freq_for_eta_over_2pi_Hz", s.omega_for_eta / two_pi},
      {"ratios", {{"gamma_over_Gamma", s.gamma_over_Gamma}, {"omega_over_gamma", s.omega_over_gamma},
                  {"J_over_gamma", s.J_over_gamma}}},
      {"Delta_D_interpretation", "angular: the given value is used in rad/s as entered"}};
  o.json("lab", j);
  o.meta()["lab"] = j;
  out << fmt::format("gamma = 2pi x {:.4g} Hz\n", s.gamma / two_pi)
      << fmt::format("cooling rate: direct 2pi x {:.4g} Hz, quoted 2pi x {:.4g} Hz (ratio {:.3f}), using {}\n",
                     s.Gamma_direct / two_pi, s.Gamma_quoted / two_pi, s.cooling_discrepancy,
                     to_string(s.cooling_source))
      << fmt::format("trap frequency for eta = {:.4g}: 2pi x {:.4g} Hz\n", p.eta, s.omega_for_eta / two_pi)
      << fmt::format("gamma/Gamma = {:.4g}, omega/gamma = {:.4g}, J/gamma = {:.4g}\n", s.gamma_over_Gamma,
                     s.omega_over_gamma, s.J_over_gamma);
  return kExitOk;
}

}  // namespace

ModelParams resolve_params(const RunConfig& c) {
  ModelParams p = working_point();
  p.Omega1 = c.number("Omega1", p.Omega1);
  p.Omega2 = c.number("Omega2", p.Omega2);
  p.Delta = c.number("Delta", p.Delta);
  p.J = c.number("J", p.J);
  if (c.has("gamma_ratio")) {
    const double r = c.number("gamma_ratio", 3.0);
    if (!(r > 0)) throw ConfigError("gamma_ratio must be > 0");
    p.Gamma = p.gamma / r;
  } else {
    p.Gamma = c.number("Gamma", p.Gamma);
  }
  if (c.text("model", "rwa") == "validation") {
    p.eta = c.number("eta", 1.0 / 30.0);
    p.omega_mean = c.number("omega_mean", 500.0);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

int run_config(const RunConfig& c, std::ostream& out, bool timestamps) {
  const std::string started = timestamps ? timestamp_now() : "";
  Outputs o(c);
  int status = kExitOk;
  const std::string& sub = c.subcommand;
  if (sub == "single") status = run_single(c, o, out);
  else if (sub == "pair") status = run_pair(c, o, out);
  else if (sub == "sweep") status = run_generic_sweep(c, o, out);
  else if (sub == "fig2") status = run_fig2(c, o, out);
  else if (sub == "fig3") status = run_fig3(c, o, out);
  else if (sub == "fig4") status = run_fig4(c, o, out);
  else if (sub == "validate") status = run_validate(c, o, out);
  else if (sub == "wigner") status = run_wigner(c, o, out);
  else if (sub == "lab") status = run_lab(c, o, out);
  else throw ConfigError("unknown subcommand '" + sub + "'");
  o.meta()["exit_status"] = status;
  o.finish(timestamps, started);
  return status;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady states and synchronization observables of laser-driven trapped-ion phonon lasers.",
               "ionsync"};
  app.require_subcommand(1, 1);
  std::string config_path, output, format;
  bool timestamps = false;
  app.add_option("--config", config_path, "JSON config: flat key map, or a previously written meta.json");
  app.add_option("--output", output, "output directory (default: $IONSYNC_OUTPUT, else ./ionsync-out)");
  app.add_option("--format", format, "csv, json or both (default csv)");
  app.add_flag("--timestamps", timestamps, "record wall-clock start and end in meta.json");

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, descriptions().at(name));
    sub->fallthrough();
    for (const auto& k : accepted_keys(name)) {
      std::string names = k.flag;
      if (k.key == "J") names += ",--J";
      opts[name][k.key] = sub->add_option(names, raw[name][k.key], k.help);
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) err << "accepted keys for " << name << ": " << accepted_key_list(name) << '\n';
    return kExitUsage;
  }

  std::string chosen;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) chosen = name;

  try {
    FileConfig file;
    if (!config_path.empty()) file = load_config_file(config_path);
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : opts[chosen])
      if (opt->count() > 0) flags[key] = raw[chosen][key];
    const RunConfig cfg = make_config(chosen, file, flags,
                                      output.empty() ? std::nullopt : std::optional<std::string>(output),
                                      format.empty() ? std::nullopt : std::optional<std::string>(format));
    return run_config(cfg, out, timestamps);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ionsync
