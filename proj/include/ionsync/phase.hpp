#pragma once

#include <vector>

#include "ionsync/hilbert.hpp"

namespace ionsync {

constexpr int kPhaseGrid = 1024;

/// Fourier coefficients of the relative-phase distribution
/// P(phi) = sum_k p_k e^{i k phi}, phi = phi_1 - phi_2, k in [-(N-1), N-1].
class PhaseSpectrum {
 public:
  PhaseSpectrum() = default;
  PhaseSpectrum(int cutoff, std::vector<cplx> coeffs);

  int cutoff() const { return cutoff_; }
  int max_order() const { return cutoff_ - 1; }
  cplx p(int k) const;  // zero outside the band
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  /// Flat distribution of the given band limit.
  static PhaseSpectrum flat(int cutoff);

 private:
  int cutoff_ = 0;
  std::vector<cplx> coeffs_;  // index k + cutoff - 1
};

/// p_k = (1/2pi) sum_{n1,n2} <n1, n2| rho |n1 + k, n2 - k> over the
/// truncated two-mode space (phase-state projection of the relative phase).
/// Throws std::invalid_argument unless rho_p is a unit-trace operator on
/// exactly two phonon modes of equal cutoff.
PhaseSpectrum phase_spectrum(const Operator& rho_p);

/// P on phi_j = 2 pi j / M, j = 0..M-1. Requires M >= 8 N.
std::vector<double> eval_phase(const PhaseSpectrum& spec, int points);
std::vector<double> phase_axis(int points);

/// S = 2 pi max P - 1 on the 1024-point grid.
double sync_measure(const PhaseSpectrum& spec);

struct PhaseMoments {
  double phi_c = 0;  // integral of cos(phi) P
  double phi_s = 0;  // -integral of sin(phi) P
};

PhaseMoments phase_moments(const PhaseSpectrum& spec);

/// max |P - 1/2pi| on the 1024-point grid.
double flatness(const PhaseSpectrum& spec);

/// Strict local maxima of a periodic sampled P whose height above 1/2pi
/// exceeds 10 * floor. Floors below 1e-12 are raised to 1e-12 so that
/// rounding ripples on a flat P never count.
int significant_peaks(const std::vector<double>& values, double floor);

}  // namespace ionsync
