#include "ionsync/observables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ionsync {

namespace {

int single_mode_dim(const Operator& rho, const char* what) {
  const auto& f = rho.space().factors();
  if (f.size() != 1 || f[0].kind != FactorKind::phonon)
    throw std::invalid_argument(std::string(what) + ": expected a single phonon mode, got " +
                                rho.space().describe());
  return f[0].dim;
}

// Columns 0..n-1 of D(beta) at dimension m, via
// D(r e^{i th}) = R(th) exp(r (a^+ - a)) R(th)^+ with R(th) = e^{i th n}.
class Displacer {
 public:
  Displacer(int n, int m) : n_(n), m_(m) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    // a^+ - a is real antisymmetric; -i(a^+ - a) is Hermitian.
    for (int k = 1; k < m; ++k) {
      g(k, k - 1) = std::sqrt(static_cast<double>(k));
      g(k - 1, k) = -std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(cplx(0, -1) * g.cast<cplx>()));
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
    vt_top_ = v_.adjoint().leftCols(n);
  }

  CMat columns(cplx beta) const {
    const double r = std::abs(beta);
    const double th = std::arg(beta);
    // exp(r (a^+ - a)) = exp(i r G), G = -i (a^+ - a) = V diag(lambda) V^+
    CMat right = vt_top_;
    for (int j = 0; j < n_; ++j) right.col(j) *= std::polar(1.0, -th * j);
    for (int k = 0; k < m_; ++k) right.row(k) *= std::polar(1.0, r * lambda_[k]);
    CMat out = v_ * right;
    for (int k = 0; k < m_; ++k) out.row(k) *= std::polar(1.0, th * k);
    return out;
  }

 private:
  int n_, m_;
  Eigen::VectorXd lambda_;
  CMat v_, vt_top_;
};

}  // namespace

NumberStats number_stats(const Operator& rho_phonon) {
  const int n = single_mode_dim(rho_phonon, "number_stats");
  const CMat rho = rho_phonon.dense();
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-300) throw std::invalid_argument("number_stats: zero-trace input");
  NumberStats s;
  s.pn.resize(n);
  double m1 = 0, m2 = 0;
  for (int k = 0; k < n; ++k) {
    s.pn[k] = rho(k, k).real() / tr;
    m1 += k * s.pn[k];
    m2 += static_cast<double>(k) * k * s.pn[k];
    if (s.pn[k] > s.pn[s.mode_n]) s.mode_n = k;
  }
  s.mean_n = m1;
  s.mandel_q = m1 < 1e-12 ? 0.0 : (m2 - m1 * m1) / m1 - 1.0;
  return s;
}

cplx correlator(const DensityMatrix& rho, const Operator& x, const Operator& y) {
  require_same_space(rho.space(), x.space(), "correlator");
  require_same_space(rho.space(), y.space(), "correlator");
  return expectation(rho, x * y) - expectation(rho, x) * expectation(rho, y);
}

double WignerGrid::riemann_sum() const {
  if (x_axis.size() < 2 || p_axis.size() < 2) return 0.0;
  const double dx = (x_axis.back() - x_axis.front()) / static_cast<double>(x_axis.size() - 1);
  const double dp = (p_axis.back() - p_axis.front()) / static_cast<double>(p_axis.size() - 1);
  return values.sum() * dx * dp / 4.0;
}

std::vector<double> uniform_axis(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("uniform_axis: need hi > lo and >= 2 points");
  std::vector<double> a(points);
  for (int k = 0; k < points; ++k) a[k] = lo + (hi - lo) * k / (points - 1);
  return a;
}

WignerGrid wigner(const Operator& rho_phonon, const std::vector<double>& x_axis,
                  const std::vector<double>& p_axis) {
  const int n = single_mode_dim(rho_phonon, "wigner");
  if (static_cast<int>(x_axis.size()) < kWignerMinPoints || static_cast<int>(p_axis.size()) < kWignerMinPoints)
    throw std::invalid_argument("wigner: grid needs at least 16 points per axis");
  // a displaced |n> spreads over roughly r^2 + 4r extra levels, r = max |alpha|
  double r = 0;
  for (double x : x_axis)
    for (double p : p_axis) r = std::max(r, 0.5 * std::hypot(x, p));
  const int m = n + kWignerPadding + static_cast<int>(std::ceil(r * r + 4 * r));
  const Displacer disp(n, m);
  const CMat rho = rho_phonon.dense();

  WignerGrid g{x_axis, p_axis, Eigen::MatrixXd(x_axis.size(), p_axis.size())};
  for (size_t i = 0; i < x_axis.size(); ++i) {
    for (size_t j = 0; j < p_axis.size(); ++j) {
      const cplx alpha(0.5 * x_axis[i], 0.5 * p_axis[j]);
      // D(-alpha) rho D(-alpha)^+ projected on parity
      const CMat b = disp.columns(-alpha);
      const Eigen::VectorXcd diag = (b * rho).cwiseProduct(b.conjugate()).rowwise().sum();
      double w = 0;
      for (int k = 0; k < m; ++k) w += (k % 2 ? -1.0 : 1.0) * diag[k].real();
      g.values(i, j) = 2.0 / std::numbers::pi * w;
    }
  }
  return g;
}

WignerGrid wigner(const Operator& rho_phonon) {
  const auto axis = uniform_axis(-kWignerDefaultExtent, kWignerDefaultExtent, kWignerDefaultPoints);
  return wigner(rho_phonon, axis, axis);
}

Operator phonon_state(const Operator& rho, int ion) {
  const int pos = rho.space().find(ion, FactorKind::phonon);
  if (pos < 0) throw BasisMismatch("phonon_state: no phonon factor for ion " + std::to_string(ion));
  return partial_trace(rho, std::vector<int>{pos});
}

SpinPhononProfile spin_phonon_profile(const DensityMatrix& rho, int ion, const std::vector<double>& x_axis,
                                      const std::vector<double>& p_axis) {
  const Space& sp = rho.space();
  const int n_ions = sp.find(2, FactorKind::spin) >= 0 ? 2 : 1;
  const int pos = sp.find(ion, FactorKind::phonon);
  if (pos < 0) throw BasisMismatch("spin_phonon_profile: no phonon factor for ion " + std::to_string(ion));
  const int cutoff = sp.factors()[pos].dim;
  const BasisSpec basis(n_ions, cutoff);
  if (!(basis.space() == sp)) throw BasisMismatch("spin_phonon_profile: state is not on a BasisSpec space");

  const Operator a = embed(destroy(cutoff), ion, FactorKind::phonon, basis);
  const Operator num = a.adjoint() * a;
  const Axis axes[3] = {Axis::x, Axis::y, Axis::z};
  SpinPhononProfile out;
  out.ion = ion;
  for (int k = 0; k < 3; ++k) {
    const Operator s = embed(pauli(axes[k]), ion, FactorKind::spin, basis);
    out.c_a[k] = correlator(rho, s, a);
    out.c_n[k] = correlator(rho, s, num);
    for (int sign = 0; sign < 2; ++sign) {
      const Operator proj = spin_project(rho.op(), ion, axes[k], sign == 0 ? 1 : -1);
      out.projected[2 * k + sign] = wigner(phonon_state(proj, ion), x_axis, p_axis);
    }
  }
  return out;
}

SpinPhononProfile spin_phonon_profile(const DensityMatrix& rho, int ion) {
  const auto axis = uniform_axis(-kWignerDefaultExtent, kWignerDefaultExtent, kWignerDefaultPoints);
  return spin_phonon_profile(rho, ion, axis, axis);
}

}  // namespace ionsync
