#include "ionsync/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ionsync {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PhaseSpectrum::PhaseSpectrum(int cutoff, std::vector<cplx> coeffs) : cutoff_(cutoff), coeffs_(std::move(coeffs)) {
  if (cutoff < 1 || static_cast<int>(coeffs_.size()) != 2 * cutoff - 1)
    throw std::invalid_argument("PhaseSpectrum: need 2N-1 coefficients");
}

cplx PhaseSpectrum::p(int k) const {
  if (k < -max_order() || k > max_order()) return 0.0;
  return coeffs_[k + cutoff_ - 1];
}

PhaseSpectrum PhaseSpectrum::flat(int cutoff) {
  std::vector<cplx> c(2 * cutoff - 1, 0.0);
  c[cutoff - 1] = 1.0 / kTwoPi;
  return {cutoff, std::move(c)};
}

PhaseSpectrum phase_spectrum(const Operator& rho_p) {
  const auto& f = rho_p.space().factors();
  if (f.size() != 2 || f[0].kind != FactorKind::phonon || f[1].kind != FactorKind::phonon)
    throw std::invalid_argument("phase_spectrum: expected two phonon modes, got " + rho_p.space().describe());
  if (f[0].dim != f[1].dim) throw std::invalid_argument("phase_spectrum: modes have different cutoffs");
  const cplx tr = rho_p.trace();
  if (std::abs(tr - 1.0) > 1e-8) throw std::invalid_argument("phase_spectrum: trace differs from one");

  const int n = f[0].dim;
  std::vector<cplx> c(2 * n - 1, 0.0);
  // Entry (row, col) with row = n1*N + n2, col = m1*N + m2 contributes to
  // k = m1 - n1 when the total number is the same on both sides.
  const SpMat& m = rho_p.matrix();
  for (int col = 0; col < m.outerSize(); ++col) {
    const int m1 = col / n, m2 = col % n;
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      const int n1 = static_cast<int>(it.row()) / n, n2 = static_cast<int>(it.row()) % n;
      if (n1 + n2 != m1 + m2) continue;
      c[m1 - n1 + n - 1] += it.value();
    }
  }
  for (auto& v : c) v /= kTwoPi;
  return {n, std::move(c)};
}

std::vector<double> phase_axis(int points) {
  std::vector<double> a(points);
  for (int j = 0; j < points; ++j) a[j] = kTwoPi * j / points;
  return a;
}

std::vector<double> eval_phase(const PhaseSpectrum& spec, int points) {
  if (points < 8 * spec.cutoff())
    throw std::invalid_argument("eval_phase: need at least 8N grid points, got " + std::to_string(points));
  std::vector<double> out(points);
  const double p0 = spec.p(0).real();
  for (int j = 0; j < points; ++j) {
    double v = p0;
    for (int k = 1; k <= spec.max_order(); ++k) {
      // p_{-k} = conj(p_k) makes the sum real
      const long idx = (static_cast<long>(k) * j) % points;
      v += 2.0 * (spec.p(k) * std::polar(1.0, kTwoPi * idx / points)).real();
    }
    out[j] = v;
  }
  return out;
}

double sync_measure(const PhaseSpectrum& spec) {
  const auto v = eval_phase(spec, std::max(kPhaseGrid, 8 * spec.cutoff()));
  return kTwoPi * *std::max_element(v.begin(), v.end()) - 1.0;
}

PhaseMoments phase_moments(const PhaseSpectrum& spec) {
  const cplx p1 = spec.p(1);
  return {kTwoPi * p1.real(), kTwoPi * p1.imag()};
}

double flatness(const PhaseSpectrum& spec) {
  const auto v = eval_phase(spec, std::max(kPhaseGrid, 8 * spec.cutoff()));
  double mx = 0;
  for (double x : v) mx = std::max(mx, std::abs(x - 1.0 / kTwoPi));
  return mx;
}

int significant_peaks(const std::vector<double>& values, double floor) {
  const int m = static_cast<int>(values.size());
  if (m < 3) return 0;
  const double threshold = 10.0 * std::max(floor, 1e-12);
  int count = 0;
  for (int j = 0; j < m; ++j) {
    const double v = values[j];
    if (v > values[(j + m - 1) % m] && v > values[(j + 1) % m] && v - 1.0 / kTwoPi > threshold) ++count;
  }
  return count;
}

}  // namespace ionsync
