#pragma once

#include <optional>
#include <vector>

#include "ionsync/hilbert.hpp"
#include "ionsync/lindblad.hpp"

namespace ionsync {

/// Physical rates in units of the spin decay rate gamma.
struct ModelParams {
  double gamma = 1.0;
  double Gamma = 1.0 / 3.0;
  double Omega1 = 1.0;
  double Omega2 = 1.0;
  double Delta = 0.0;
  double J = 0.1;
  /// Lamb-Dicke parameter and mean trap frequency; validation model only.
  std::optional<double> eta;
  std::optional<double> omega_mean;

  /// Checks the sign constraints; throws std::invalid_argument.
  void validate() const;
};

/// A generator in parts: Hamiltonian, Lindblad jumps and (validation model
/// only) an additional non-Lindblad-form superoperator. `charge` labels a
/// quantity the generator conserves weakly, used to shrink the solve.
struct ModelTerms {
  BasisSpec basis;
  Operator hamiltonian;
  std::vector<Jump> jumps;
  std::optional<Superoperator> extra;
  ConservedCharge charge;

  Superoperator liouvillian() const;
};

/// Rotating-wave, first-order Lamb-Dicke model:
///   H = sum_j 1/4 [(-1)^j Delta (2 n_j - sz_j) + 2 Omega_j (a_j^+ s_j^+ + a_j s_j^-)]
///       + J (a_2^+ a_1 + a_1^+ a_2)
/// with jumps (gamma, s_j^-) and (Gamma, a_j). Detuning and coupling terms
/// are dropped for a single ion.
ModelTerms build_rwa(const ModelParams& p, const BasisSpec& basis);

/// Lab-frame model with sin(eta q) expanded to third order and the angular
/// emission kernel to second order in eta.
ModelTerms build_validation(const ModelParams& p, const BasisSpec& basis);

/// Integral of W(z) z^k over [-1, 1] for the dipole kernel W(z) = 3/4 (1 + z^2).
double emission_moment(int k);

/// Mean-field limit-cycle occupation gamma/(2 Gamma) - gamma^2/(2 Omega^2),
/// clamped at zero. Uses Omega1.
double mean_field_n(const ModelParams& p);

/// Omega1^2 > gamma * Gamma.
bool lasing_threshold(const ModelParams& p);

/// K = sum_j (n_j - s_j), conserved by the rotating-wave model.
ConservedCharge excitation_charge(const BasisSpec& basis);

/// Permutation exchanging the two ions.
Operator ion_swap(const BasisSpec& basis);

}  // namespace ionsync
