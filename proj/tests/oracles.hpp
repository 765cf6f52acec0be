#pragma once

// Brute-force dense references used as independent checks of the sparse
// library code paths.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ionsync/hilbert.hpp"
#include "ionsync/lindblad.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Column-stacked generator -i[H, .] + sum r (L . L^+ - {L^+ L, .}/2).
inline MatrixXcd liouvillian(const MatrixXcd& h, const std::vector<std::pair<double, MatrixXcd>>& jumps) {
  const int d = static_cast<int>(h.rows());
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  MatrixXcd l = cplx(0, -1) * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& [r, op] : jumps) {
    const MatrixXcd ldl = op.adjoint() * op;
    l += r * (kron(op.conjugate(), op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return l;
}

/// Null vector of the smallest singular value, reshaped and trace-normalized.
inline MatrixXcd null_state(const MatrixXcd& l, double* gap = nullptr) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(l.rows()))));
  Eigen::JacobiSVD<MatrixXcd> svd(l, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (gap) *gap = s(s.size() - 2) / s(0);
  const VectorXcd v = svd.matrixV().col(l.cols() - 1);
  MatrixXcd rho = Eigen::Map<const MatrixXcd>(v.data(), d, d);
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

inline MatrixXcd random_matrix(int d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline MatrixXcd random_hermitian(int d, std::mt19937& rng) {
  const MatrixXcd m = random_matrix(d, rng);
  return 0.5 * (m + m.adjoint());
}

inline MatrixXcd random_density(int d, std::mt19937& rng) {
  const MatrixXcd m = random_matrix(d, rng);
  MatrixXcd rho = m * m.adjoint();
  return rho / rho.trace();
}

inline ionsync::Operator to_operator(const ionsync::Space& s, const MatrixXcd& m) {
  return ionsync::Operator(s, m.sparseView(0.0, 0.0));
}

/// Relative-phase density by direct phase-state projection:
/// P(phi) = integral over phi2 of <phi + phi2, phi2| rho |phi + phi2, phi2>,
/// with the phi2 integral done by a quadrature exact for the band limit.
inline double phase_density(const MatrixXcd& rho, int n, double phi) {
  const int m = 4 * n + 1;
  double total = 0;
  for (int q = 0; q < m; ++q) {
    const double phi2 = 2 * M_PI * q / m;
    const double phi1 = phi + phi2;
    VectorXcd ket(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) ket(a * n + b) = std::polar(1.0, phi1 * a + phi2 * b) / (2 * M_PI);
    total += (ket.adjoint() * rho * ket)(0, 0).real();
  }
  return total * 2 * M_PI / m;
}

/// Coherent-state Wigner function in the alpha = (x + i p)/2 convention.
inline double coherent_wigner(cplx beta, double x, double p) {
  const cplx alpha(x / 2, p / 2);
  return 2 / M_PI * std::exp(-2 * std::norm(alpha - beta));
}

inline VectorXcd coherent_ket(cplx beta, int n) {
  VectorXcd psi(n);
  cplx term = std::exp(-std::norm(beta) / 2);
  for (int k = 0; k < n; ++k) {
    psi(k) = term;
    term *= beta / std::sqrt(static_cast<double>(k + 1));
  }
  return psi;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    ma += a[k] / n;
    mb += b[k] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
