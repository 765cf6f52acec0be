#include <doctest.h>

#include "ionsync/model.hpp"
#include "ionsync/observables.hpp"
#include "ionsync/sweeps.hpp"
#include "oracles.hpp"

using namespace ionsync;

namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

CMat dense_destroy(int n) {
  CMat a = CMat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

CMat sigma(char which) {
  CMat m = CMat::Zero(2, 2);
  switch (which) {
    case 'z': m(0, 0) = -1; m(1, 1) = 1; break;
    case '+': m(1, 0) = 1; break;
    case '-': m(0, 1) = 1; break;
  }
  return m;
}

// Pair Hamiltonian written out with explicit Kronecker products.
CMat reference_pair_h(const ModelParams& p, int n) {
  const CMat id2 = CMat::Identity(2, 2), idn = CMat::Identity(n, n);
  const CMat a = dense_destroy(n);
  const CMat num = a.adjoint() * a;
  auto local = [&](const CMat& s, const CMat& f) { return oracle::kron(s, f); };
  const CMat idl = CMat::Identity(2 * n, 2 * n);
  auto on1 = [&](const CMat& m) { return oracle::kron(m, idl); };
  auto on2 = [&](const CMat& m) { return oracle::kron(idl, m); };
  const double omega[2] = {p.Omega1, p.Omega2};
  CMat h = CMat::Zero(4 * n * n, 4 * n * n);
  for (int j = 1; j <= 2; ++j) {
    const double sign = j == 1 ? -1 : 1;
    const CMat det = local(id2, 2 * num) - local(sigma('z'), idn);
    const CMat drive = local(sigma('+'), a.adjoint()) + local(sigma('-'), a);
    const CMat term = 0.25 * (sign * p.Delta * det + 2 * omega[j - 1] * drive);
    h += j == 1 ? on1(term) : on2(term);
  }
  const CMat a1 = on1(local(id2, a)), a2 = on2(local(id2, a));
  h += p.J * (a2.adjoint() * a1 + a1.adjoint() * a2);
  return h;
}

}  // namespace

TEST_CASE("rotating-wave Hamiltonian matches the written-out form") {
  ModelParams p;
  p.Omega1 = 1.3;
  p.Omega2 = 0.7;
  p.Delta = 0.4;
  p.J = 0.2;
  const int n = 3;
  const ModelTerms t = build_rwa(p, BasisSpec(2, n));
  CHECK(max_abs(t.hamiltonian.dense() - reference_pair_h(p, n)) < 1e-14);
  CHECK(t.jumps.size() == 4);
  CHECK(t.liouvillian().trace_defect() < 1e-14);
}

TEST_CASE("single-ion model drops detuning and coupling") {
  ModelParams p;
  p.Delta = 2;
  p.J = 0.5;
  const int n = 4;
  const ModelTerms t = build_rwa(p, BasisSpec(1, n));
  const CMat a = dense_destroy(n);
  const CMat drive = oracle::kron(sigma('+'), a.adjoint()) + oracle::kron(sigma('-'), a);
  CHECK(max_abs(t.hamiltonian.dense() - 0.5 * p.Omega1 * drive) < 1e-15);
}

TEST_CASE("balanced resonant pair commutes with the ion swap") {
  const BasisSpec b(2, 3);
  for (double j : {0.0, 0.1}) {
    ModelParams p;
    p.J = j;
    const ModelTerms t = build_rwa(p, b);
    const Operator u = ion_swap(b);
    CHECK(max_abs((u * t.hamiltonian - t.hamiltonian * u).dense()) < 1e-15);
    CHECK(max_abs((u * u).dense() - CMat::Identity(b.dim(), b.dim())) == 0.0);
  }
}

TEST_CASE("undriven pair relaxes to the ground state") {
  ModelParams p;
  p.Omega1 = p.Omega2 = 0;
  p.J = 0;
  const BasisSpec b(2, 3);
  const ModelTerms t = build_rwa(p, b);
  CHECK(max_abs(t.hamiltonian.dense()) == 0.0);
  const auto r = steady_state(t.liouvillian(), solver_options(ModelKind::rwa, t));
  CMat want = CMat::Zero(b.dim(), b.dim());
  want(0, 0) = 1;
  CHECK(max_abs(r.rho.op().dense() - want) < 1e-12);
}

TEST_CASE("emission moments of the dipole kernel") {
  CHECK(emission_moment(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(emission_moment(2) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(emission_moment(1) == 0.0);
  CHECK(emission_moment(3) == 0.0);
  CHECK_THROWS_AS(emission_moment(-1), std::invalid_argument);
}

TEST_CASE("mean-field occupation") {
  ModelParams p;
  CHECK(mean_field_n(p) == doctest::Approx(1.0));
  p.Omega1 = std::sqrt(p.gamma * p.Gamma);
  CHECK(mean_field_n(p) == doctest::Approx(0.0));
  p.Omega1 = 1;
  p.Gamma = 0.1;
  CHECK(mean_field_n(p) == doctest::Approx(4.5));
  p.Gamma = 0;
  CHECK_THROWS_AS(mean_field_n(p), std::invalid_argument);
}

TEST_CASE("lasing threshold") {
  ModelParams p;
  CHECK(lasing_threshold(p));
  p.Gamma = 1;
  CHECK_FALSE(lasing_threshold(p));
  p.Omega1 = 0.5;
  p.Gamma = 0.2;
  CHECK(lasing_threshold(p));
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.J = -0.1;
  CHECK_THROWS_AS(build_rwa(p, BasisSpec(2, 2)), std::invalid_argument);
  ModelParams q;
  CHECK_THROWS_AS(build_validation(q, BasisSpec(2, 2)), std::invalid_argument);
  q.eta = 1.5;
  q.omega_mean = 500;
  CHECK_THROWS_AS(build_validation(q, BasisSpec(2, 2)), std::invalid_argument);
}

TEST_CASE("single ion at the working point") {
  ModelParams p;
  const auto e = evaluate_point(ModelKind::rwa, p, 1, 15, {"mean_n", "mode_n", "mandel_q"}, 0);
  CHECK(e.values.at("mean_n") == doctest::Approx(1.2).epsilon(0.05 / 1.2));
  CHECK(e.values.at("mode_n") == 1.0);
  CHECK(e.values.at("mandel_q") == doctest::Approx(-0.10).epsilon(0.2));
}

TEST_CASE("lab-frame model preserves trace and Hermiticity") {
  ModelParams p = working_point();
  p.Omega1 = 1.25;
  p.Delta = 0.5;
  p.eta = 1.0 / 30.0;
  p.omega_mean = 500;
  const ModelTerms t = build_validation(p, BasisSpec(2, 3));
  CHECK(t.liouvillian().trace_defect() < 1e-12);
  CHECK(hermiticity_defect(t.hamiltonian.matrix()) < 1e-12);
}

TEST_CASE("lab-frame correlators approach the rotating-wave values") {
  const int n = 8;
  ModelParams base = working_point();
  base.Omega1 = 1.25;
  const std::vector<std::string> obs = {"C_zz", "C_xx", "C_xy"};
  const auto rwa = evaluate_point(ModelKind::rwa, base, 2, n, obs, 0).values;
  auto distance = [&](double eta, double omega, const std::string& name) {
    ModelParams p = base;
    p.eta = eta;
    p.omega_mean = omega;
    return std::abs(evaluate_point(ModelKind::validation, p, 2, n, obs, 0).values.at(name) - rwa.at(name));
  };
  // at Delta = 0 the zz and xy gaps are O(eta^2) and the xx gap is O(Omega^2 / omega)
  const double zz = distance(1.0 / 30.0, 500, "C_zz"), xy = distance(1.0 / 30.0, 500, "C_xy");
  const double xx = distance(1.0 / 30.0, 500, "C_xx");
  CHECK(zz / distance(1.0 / 60.0, 500, "C_zz") > 3);
  CHECK(xy / distance(1.0 / 60.0, 500, "C_xy") > 3);
  CHECK(xx / distance(1.0 / 30.0, 2000, "C_xx") > 3);
}
