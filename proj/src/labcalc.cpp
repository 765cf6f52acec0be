#include "ionsync/labcalc.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ionsync {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHbar = 1.054571817e-34;
constexpr double kAtomicMass = 1.66053906660e-27;

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

bool consume_prefix(std::string& s, const std::string& prefix) {
  if (s.rfind(prefix, 0) != 0) return false;
  s.erase(0, prefix.size());
  return true;
}

bool consume_suffix(std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size() || s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
  s.erase(s.size() - suffix.size());
  return true;
}

double parse_number(const std::string& s, const std::string& original) {
  size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number in '" + original + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("cannot parse number in '" + original + "'");
  return v;
}

double lorentzian(const LabParams& p, double x) {
  return p.Omega_c * p.Omega_c / (4.0 * x * x + 4.0 * p.Gamma_c * p.Gamma_c);
}

}  // namespace

LabParams LabParams::calcium_defaults() {
  LabParams p;
  p.Omega_D = kTwoPi * 1.8e6;
  // Angular detuning; reading 42 MHz as a plain frequency misses the 16.8 kHz target.
  p.Delta_D = kTwoPi * 42e6;
  p.Gamma_1 = kTwoPi * 135.1e6;
  p.Gamma_2 = kTwoPi * 9.9e6;
  p.Gamma_c = kTwoPi * 129.9e6;
  p.Omega_c = p.Gamma_c;
  p.Delta_c = -kTwoPi * 100e6;
  p.eta = 1.0 / 30.0;
  p.omega_trap = kTwoPi * 8.4e6;
  p.wavelength = 729e-9;
  p.ion_mass = 39.96 * kAtomicMass;
  p.J = kTwoPi * 1.68e3;
  return p;
}

void LabParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string("LabParams: ") + name + " must be > 0");
  };
  positive(Omega_D, "Omega_D");
  positive(Gamma_1, "Gamma_1");
  positive(Gamma_2, "Gamma_2");
  positive(Omega_c, "Omega_c");
  positive(Gamma_c, "Gamma_c");
  positive(omega_trap, "omega_trap");
  positive(wavelength, "wavelength");
  positive(ion_mass, "ion_mass");
  if (!(J >= 0)) throw std::invalid_argument("LabParams: J must be >= 0");
  if (!std::isfinite(Delta_D) || !std::isfinite(Delta_c)) throw std::invalid_argument("LabParams: detunings must be finite");
  if (!(eta > 0 && eta < 1)) throw std::invalid_argument("LabParams: need 0 < eta < 1");
}

double dressed_gamma(const LabParams& p) {
  const double g = p.Gamma_1 + p.Gamma_2;
  if (!(g > 0)) throw std::invalid_argument("dressed_gamma: Gamma_1 + Gamma_2 must be > 0");
  return p.Omega_D * p.Omega_D * g / (g * g + 4.0 * p.Delta_D * p.Delta_D);
}

double cooling_rate(const LabParams& p) {
  if (!(p.Gamma_c > 0)) throw std::invalid_argument("cooling_rate: Gamma_c must be > 0");
  return p.eta * p.eta * p.Gamma_c * (lorentzian(p, p.Delta_c + p.omega_trap) - lorentzian(p, p.Delta_c - p.omega_trap));
}

double trap_freq_for_eta(const LabParams& p) {
  const double k = kTwoPi / p.wavelength;
  return kHbar * k * k / (2.0 * p.ion_mass * p.eta * p.eta);
}

double quoted_cooling_rate() { return kTwoPi * 5.6e3; }

LabSummary lab_summary(const LabParams& p, CoolingSource source) {
  p.validate();
  LabSummary s;
  s.gamma = dressed_gamma(p);
  s.Gamma_direct = cooling_rate(p);
  s.Gamma_quoted = quoted_cooling_rate();
  s.cooling_source = source;
  s.Gamma_used = source == CoolingSource::direct ? s.Gamma_direct : s.Gamma_quoted;
  s.omega_for_eta = trap_freq_for_eta(p);
  s.gamma_over_Gamma = s.gamma / s.Gamma_used;
  s.omega_over_gamma = p.omega_trap / s.gamma;
  s.J_over_gamma = p.J / s.gamma;
  s.cooling_discrepancy = s.Gamma_quoted / s.Gamma_direct;
  return s;
}

double parse_angular(const std::string& text) {
  std::string s = strip(text);
  bool two_pi = false;
  for (const char* prefix : {"2π×", "2π*", "2π", "2pi*", "2pi", "2*pi*", "2*π*"})
    if (consume_prefix(s, prefix)) {
      two_pi = true;
      break;
    }
  double scale = 0;
  for (const auto& [suffix, factor] : {std::pair{"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}})
    if (consume_suffix(s, suffix)) {
      scale = factor;
      break;
    }
  if (scale != 0 && !two_pi)
    throw std::invalid_argument("'" + text + "': give cyclic units as 2pi*<value><unit>, or plain rad/s");
  const double v = parse_number(s, text);
  if (!two_pi) return v;
  return kTwoPi * v * (scale == 0 ? 1.0 : scale);
}

double parse_length(const std::string& text) {
  std::string s = strip(text);
  double scale = 1.0;
  for (const auto& [suffix, factor] : {std::pair{"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"m", 1.0}})
    if (consume_suffix(s, suffix)) {
      scale = factor;
      break;
    }
  return parse_number(s, text) * scale;
}

double parse_mass(const std::string& text) {
  std::string s = strip(text);
  double scale = 1.0;
  for (const auto& [suffix, factor] : {std::pair{"amu", kAtomicMass}, {"u", kAtomicMass}, {"kg", 1.0}})
    if (consume_suffix(s, suffix)) {
      scale = factor;
      break;
    }
  return parse_number(s, text) * scale;
}

const char* to_string(CoolingSource s) { return s == CoolingSource::direct ? "direct" : "quoted"; }

CoolingSource cooling_source_from_string(const std::string& s) {
  if (s == "direct") return CoolingSource::direct;
  if (s == "quoted") return CoolingSource::quoted;
  throw std::invalid_argument("cooling source must be 'direct' or 'quoted', got '" + s + "'");
}

}  // namespace ionsync
