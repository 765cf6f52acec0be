#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ionsync {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Triplet = Eigen::Triplet<cplx>;

/// Raised when operators living on different spaces are combined.
class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FactorKind { spin, phonon };

/// One tensor factor of a composite space. `ion` is 1 or 2 for factors that
/// belong to a BasisSpec, and 0 for free-standing local operators.
struct Factor {
  int ion = 0;
  FactorKind kind = FactorKind::phonon;
  int dim = 0;

  bool operator==(const Factor&) const = default;
};

/// Ordered list of tensor factors; the first factor is the outermost index.
class Space {
 public:
  Space() = default;
  explicit Space(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  int dim() const { return dim_; }
  int find(int ion, FactorKind kind) const;  // -1 if absent

  bool operator==(const Space& o) const { return factors_ == o.factors_; }

  std::string describe() const;

 private:
  std::vector<Factor> factors_;
  int dim_ = 1;
};

/// Composite spin (x) Fock basis for one or two ions.
///
/// Single-ion index i = s*N + n with s = 0 for |down>, s = 1 for |up>.
/// Two-ion index g = i1*(2N) + i2, ion 1 outermost.
struct BasisSpec {
  int n_ions = 1;
  int cutoff = 2;

  BasisSpec(int n_ions, int cutoff);

  int local_dim() const { return 2 * cutoff; }
  int dim() const;
  Space space() const;

  bool operator==(const BasisSpec&) const = default;
};

class Operator {
 public:
  Operator() = default;
  Operator(Space space, SpMat m);

  const Space& space() const { return space_; }
  const SpMat& matrix() const { return m_; }
  int dim() const { return space_.dim(); }

  Operator adjoint() const;
  CMat dense() const { return CMat(m_); }
  cplx trace() const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  Space space_;
  SpMat m_;
};

/// Kronecker product, `a` outermost.
SpMat kron(const SpMat& a, const SpMat& b);

void require_same_space(const Space& a, const Space& b, const char* what);

/// Max-norm of A - A^dagger.
double hermiticity_defect(const SpMat& m);

Operator identity(const Space& space);
Operator zero(const Space& space);

/// Ladder operator on an N-level Fock space, <n-1|a|n> = sqrt(n).
Operator destroy(int cutoff);

enum class PauliAxis { x, y, z, plus, minus };
enum class Axis { x, y, z };

/// Pauli matrices in the (|down>, |up>) ordering; sigma_z = diag(-1, +1).
Operator pauli(PauliAxis axis);
Operator pauli(Axis axis);

/// op (x) identity on every other factor of `basis`.
Operator embed(const Operator& op, int ion, FactorKind factor, const BasisSpec& basis);

/// Kronecker product of operators, `a` outermost.
Operator tensor(const Operator& a, const Operator& b);

class DensityMatrix {
 public:
  static constexpr double kHermTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kMinEigTol = 1e-8;

  DensityMatrix() = default;
  /// Hermitizes `op` then checks unit trace; throws std::invalid_argument.
  explicit DensityMatrix(const Operator& op);

  const Operator& op() const { return op_; }
  const Space& space() const { return op_.space(); }
  const SpMat& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }

  double min_eigenvalue() const;

 private:
  Operator op_;
};

Operator pure_state(const Space& space, const CVec& psi);

/// Reduced operator on the kept factors (listed by factor position).
Operator partial_trace(const Operator& rho, const std::vector<int>& keep);
/// Keep every factor of the given kind, in order.
Operator partial_trace(const Operator& rho, FactorKind keep_kind);

/// Tr_spins[P^{axis,sign} rho] with P = (1 + sign*sigma^axis)/2 on `ion`.
/// Returns an operator on all phonon factors of rho.
Operator spin_project(const Operator& rho, int ion, Axis axis, int sign);

cplx expectation(const Operator& rho, const Operator& x);
cplx expectation(const DensityMatrix& rho, const Operator& x);

}  // namespace ionsync
