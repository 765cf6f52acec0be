#pragma once

#include <string>

namespace ionsync {

/// Laboratory parameters. Frequencies and rates are angular (rad/s),
/// wavelength in metres, mass in kilograms.
struct LabParams {
  double Omega_D = 0;  // dressing laser Rabi frequency
  double Delta_D = 0;  // dressing laser detuning
  double Gamma_1 = 0;  // auxiliary level decay to the ground state
  double Gamma_2 = 0;  // auxiliary level decay to the metastable state
  double Omega_c = 0;  // cooling laser Rabi frequency
  double Delta_c = 0;  // cooling laser detuning
  double Gamma_c = 0;  // cooling transition linewidth
  double eta = 0;
  double omega_trap = 0;
  double wavelength = 0;
  double ion_mass = 0;
  double J = 0;  // phonon-phonon coupling

  /// 40Ca+ numbers: 729 nm sideband drive, 854 nm dressing of D5/2 to
  /// P3/2, cooling on S1/2-P1/2, eta = 1/30 at an 8.4 MHz trap.
  static LabParams calcium_defaults();

  /// Throws std::invalid_argument when a rate, frequency, length or mass is
  /// not positive or eta is outside (0, 1).
  void validate() const;
};

/// Dressed decay rate Omega_D^2 (G1 + G2) / ((G1 + G2)^2 + 4 Delta_D^2).
double dressed_gamma(const LabParams& p);

/// Standing-wave cooling rate eta^2 Gamma_c [P(Delta_c + w) - P(Delta_c - w)]
/// with P(x) = Omega_c^2 / (4 x^2 + 4 Gamma_c^2). Signed; negative means the
/// detuning heats.
double cooling_rate(const LabParams& p);

/// Trap frequency giving the configured eta: hbar k^2 / (2 m eta^2).
double trap_freq_for_eta(const LabParams& p);

/// The cooling rate quoted for the calcium numbers, 2 pi x 5.6 kHz. It is
/// about twice the direct evaluation of the formula above.
double quoted_cooling_rate();

enum class CoolingSource { direct, quoted };

struct LabSummary {
  double gamma = 0;
  double Gamma_direct = 0;
  double Gamma_quoted = 0;
  double Gamma_used = 0;
  CoolingSource cooling_source = CoolingSource::direct;
  double omega_for_eta = 0;
  double gamma_over_Gamma = 0;
  double omega_over_gamma = 0;
  double J_over_gamma = 0;
  /// Gamma_quoted / Gamma_direct; far from 1 flags the inconsistency.
  double cooling_discrepancy = 0;
};

LabSummary lab_summary(const LabParams& p, CoolingSource source);

/// Parses "2pi*<value><unit>", "2π×<value> <unit>" or a plain number in
/// rad/s. Units: Hz, kHz, MHz, GHz. A unit without the 2pi factor is
/// rejected as ambiguous.
double parse_angular(const std::string& text);
/// "<value>" in metres, or with nm / um / mm / m suffix.
double parse_length(const std::string& text);
/// "<value>" in kilograms, or with a u / amu suffix.
double parse_mass(const std::string& text);

const char* to_string(CoolingSource s);
CoolingSource cooling_source_from_string(const std::string& s);

}  // namespace ionsync
