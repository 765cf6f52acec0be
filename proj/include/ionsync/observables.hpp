#pragma once

#include <array>
#include <vector>

#include "ionsync/hilbert.hpp"

namespace ionsync {

struct NumberStats {
  double mean_n = 0;
  int mode_n = 0;
  double mandel_q = 0;
  std::vector<double> pn;
};

/// Phonon-number statistics of a single-mode operator, normalized by its
/// trace. Q is reported as 0 when <n> < 1e-12.
NumberStats number_stats(const Operator& rho_phonon);

/// <XY> - <X><Y>.
cplx correlator(const DensityMatrix& rho, const Operator& x, const Operator& y);

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_axis[i], p_axis[j])

  /// Sum of W dx dp / 4, i.e. the integral over d^2 alpha.
  double riemann_sum() const;
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
};

std::vector<double> uniform_axis(double lo, double hi, int points);

constexpr int kWignerMinPoints = 16;
constexpr int kWignerDefaultPoints = 121;
constexpr double kWignerDefaultExtent = 4.5;
constexpr int kWignerPadding = 10;

/// W(alpha) = (2/pi) Tr[D(-alpha) rho D(alpha) Pi] at alpha = (x + i p)/2,
/// so that x lines up with <a + a^dagger>. The displacement is built at
/// cutoff N + 10 + ceil(r^2 + 4r), r the largest |alpha| on the grid.
/// Throws std::invalid_argument for axes with fewer than 16 points or for a
/// multi-mode operator.
WignerGrid wigner(const Operator& rho_phonon, const std::vector<double>& x_axis,
                  const std::vector<double>& p_axis);
WignerGrid wigner(const Operator& rho_phonon);

struct SpinPhononProfile {
  int ion = 1;
  std::array<cplx, 3> c_a;  // C(sigma^alpha, a) for alpha = x, y, z
  std::array<cplx, 3> c_n;  // C(sigma^alpha, n)
  /// Wigner functions of Tr_s[P^{alpha,s} rho] restricted to the ion's
  /// mode, unnormalized, ordered (x,+), (x,-), (y,+), (y,-), (z,+), (z,-).
  std::array<WignerGrid, 6> projected;
};

SpinPhononProfile spin_phonon_profile(const DensityMatrix& rho, int ion,
                                      const std::vector<double>& x_axis,
                                      const std::vector<double>& p_axis);
SpinPhononProfile spin_phonon_profile(const DensityMatrix& rho, int ion);

/// Reduced state of one ion's phonon mode; the spin is traced out.
Operator phonon_state(const Operator& rho, int ion);

}  // namespace ionsync
