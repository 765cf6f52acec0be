#include <doctest.h>

#include "ionsync/phase.hpp"
#include "oracles.hpp"

using namespace ionsync;

namespace {

Space two_modes(int n) {
  return Space({Factor{1, FactorKind::phonon, n}, Factor{2, FactorKind::phonon, n}});
}

// (|0,1> + |1,0>)/sqrt2 on two modes of cutoff n
Operator bell(int n) {
  CVec psi = CVec::Zero(n * n);
  psi(0 * n + 1) = psi(1 * n + 0) = 1 / std::sqrt(2.0);
  return oracle::to_operator(two_modes(n), psi * psi.adjoint());
}

Operator fock_product(int n, int a, int b) {
  CMat m = CMat::Zero(n * n, n * n);
  m(a * n + b, a * n + b) = 1;
  return oracle::to_operator(two_modes(n), m);
}

}  // namespace

TEST_CASE("Fock products have a flat phase distribution") {
  const PhaseSpectrum s = phase_spectrum(fock_product(4, 2, 1));
  CHECK(std::abs(s.p(0) - 1 / (2 * M_PI)) < 1e-15);
  for (int k = 1; k <= s.max_order(); ++k) {
    CHECK(std::abs(s.p(k)) == 0.0);
    CHECK(std::abs(s.p(-k)) == 0.0);
  }
  for (double v : eval_phase(s, kPhaseGrid)) CHECK(v == doctest::Approx(1 / (2 * M_PI)).epsilon(1e-14));
  CHECK(sync_measure(s) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  CHECK(flatness(s) < 1e-14);
  const auto m = phase_moments(s);
  CHECK(std::abs(m.phi_c) < 1e-15);
  CHECK(std::abs(m.phi_s) < 1e-15);
}

TEST_CASE("two-term superposition") {
  const PhaseSpectrum s = phase_spectrum(bell(3));
  CHECK(std::abs(s.p(1) - 1 / (4 * M_PI)) < 1e-15);
  CHECK(std::abs(s.p(-1) - 1 / (4 * M_PI)) < 1e-15);
  const auto phi = phase_axis(kPhaseGrid);
  const auto vals = eval_phase(s, kPhaseGrid);
  double worst = 0;
  for (int j = 0; j < kPhaseGrid; ++j)
    worst = std::max(worst, std::abs(vals[j] - (1 + std::cos(phi[j])) / (2 * M_PI)));
  CHECK(worst < 1e-14);
  CHECK(vals[0] == doctest::Approx(1 / M_PI));
  CHECK(std::abs(vals[kPhaseGrid / 2]) < 1e-15);
  CHECK(sync_measure(s) == doctest::Approx(1.0).epsilon(1e-13));
  const auto m = phase_moments(s);
  CHECK(m.phi_c == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(m.phi_s) < 1e-15);
  CHECK(significant_peaks(vals, 0) == 1);
}

TEST_CASE("phase distribution of random states against direct phase-state projection") {
  std::mt19937 rng(31);
  for (int n : {2, 3, 4}) {
    const CMat rho = oracle::random_density(n * n, rng);
    const PhaseSpectrum s = phase_spectrum(oracle::to_operator(two_modes(n), rho));
    const auto phi = phase_axis(64);
    const auto vals = eval_phase(s, 64);
    for (int j = 0; j < 64; j += 7) CHECK(std::abs(vals[j] - oracle::phase_density(rho, n, phi[j])) < 1e-12);
    CHECK(std::abs(s.p(0) - 1 / (2 * M_PI)) < 1e-12);
    double quad = 0;
    for (double v : vals) quad += v * 2 * M_PI / 64;
    CHECK(quad == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sync_measure(s) >= -1e-12);
  }
}

TEST_CASE("pi-periodic spectra have vanishing moments") {
  std::vector<cplx> c(7, 0.0);
  c[3] = 1 / (2 * M_PI);
  c[3 + 2] = c[3 - 2] = 0.05;
  const PhaseSpectrum s(4, c);
  const auto m = phase_moments(s);
  CHECK(std::abs(m.phi_c) < 1e-15);
  CHECK(std::abs(m.phi_s) < 1e-15);
  CHECK(significant_peaks(eval_phase(s, kPhaseGrid), 0) == 2);
}

TEST_CASE("moment sign conventions") {
  std::vector<cplx> c(5, 0.0);
  c[2] = 1 / (2 * M_PI);
  c[3] = cplx(0.02, 0.03);  // p_1
  c[1] = std::conj(c[3]);
  const PhaseSpectrum s(3, c);
  const auto phi = phase_axis(kPhaseGrid);
  const auto vals = eval_phase(s, kPhaseGrid);
  double ic = 0, is = 0;
  for (int j = 0; j < kPhaseGrid; ++j) {
    ic += std::cos(phi[j]) * vals[j] * 2 * M_PI / kPhaseGrid;
    is -= std::sin(phi[j]) * vals[j] * 2 * M_PI / kPhaseGrid;
  }
  const auto m = phase_moments(s);
  CHECK(m.phi_c == doctest::Approx(ic).epsilon(1e-12));
  CHECK(m.phi_s == doctest::Approx(is).epsilon(1e-12));
}

TEST_CASE("evaluation grid and input checks") {
  const PhaseSpectrum s = PhaseSpectrum::flat(5);
  CHECK_THROWS_AS(eval_phase(s, 39), std::invalid_argument);
  CHECK_NOTHROW(eval_phase(s, 40));
  const Space uneven({Factor{1, FactorKind::phonon, 2}, Factor{2, FactorKind::phonon, 3}});
  CHECK_THROWS_AS(phase_spectrum(identity(uneven) * cplx(1.0 / 6)), std::invalid_argument);
  CHECK_THROWS_AS(phase_spectrum(identity(two_modes(2))), std::invalid_argument);
}

TEST_CASE("peak counting ignores rounding ripple") {
  std::vector<double> flat(64, 1 / (2 * M_PI));
  for (size_t j = 0; j < flat.size(); j += 2) flat[j] += 1e-16;
  CHECK(significant_peaks(flat, 0) == 0);
  std::vector<double> two(64);
  for (int j = 0; j < 64; ++j) two[j] = (1 + 0.3 * std::cos(2 * 2 * M_PI * j / 64)) / (2 * M_PI);
  CHECK(significant_peaks(two, 1e-3) == 2);
  CHECK(significant_peaks(two, 1.0) == 0);
}
