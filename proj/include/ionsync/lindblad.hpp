#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionsync/hilbert.hpp"

namespace ionsync {

/// Linear map on column-stacked density matrices: vec(A rho B) = (B^T (x) A) vec(rho).
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(Space space, SpMat m);

  const Space& space() const { return space_; }
  const SpMat& matrix() const { return m_; }
  int hilbert_dim() const { return space_.dim(); }

  Superoperator& operator+=(const Superoperator& o);
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }

  Operator apply(const Operator& rho) const;

  /// max |vec(I)^dagger L| / max |L|; zero for trace-preserving generators.
  double trace_defect() const;
  double frobenius_norm() const { return m_.norm(); }

 private:
  Space space_;
  SpMat m_;
};

CVec vec(const Operator& rho);
Operator unvec(const Space& space, const CVec& v);

struct Jump {
  double rate = 0;
  Operator op;
};

/// -i[H, .] + sum_k r_k D[L_k]. Throws std::invalid_argument for a
/// non-Hermitian H (beyond 1e-10) or a negative rate.
Superoperator liouvillian(const Operator& h, const std::vector<Jump>& jumps);

/// rho -> coeff * A rho B.
Superoperator sandwich_term(cplx coeff, const Operator& a, const Operator& b);

/// Integer label per basis state that the generator conserves in the weak
/// sense: it maps |i><j| only onto |k><l| with charge(k) - charge(l) equal
/// to charge(i) - charge(j) (mod `modulus`; modulus 0 means exact).
/// The steady state then lives in the zero-difference block.
struct ConservedCharge {
  std::vector<int> charge;
  int modulus = 0;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { degenerate, factorization_failed, memory_budget, not_trace_preserving };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SteadyStateOptions {
  /// direct: bordered sparse LU. shift_invert: inverse iteration near zero.
  /// krylov: GMRES on the bordered system, preconditioned by an exact solve
  /// on the block that `near_charge` conserves; needs `near_charge`.
  enum class Method { direct, shift_invert, krylov };
  Method method = Method::direct;
  /// Fall back to shift-invert when the direct factorization fails.
  bool allow_fallback = true;
  std::optional<ConservedCharge> symmetry;
  double memory_budget_bytes = 3.0 * 1024 * 1024 * 1024;
  /// Relative residual below which a trace-free second null vector counts.
  double degeneracy_tol = 1e-6;
  bool check_degeneracy = true;
  /// Solve in real coordinates of Hermitian matrices when L preserves
  /// Hermiticity (it does for every Lindblad generator).
  bool real_parametrization = true;
  /// Charge conserved up to terms that are small against the frequency
  /// offsets they bridge (e.g. counter-rotating terms in a lab frame).
  std::optional<ConservedCharge> near_charge;
  int krylov_restart = 60;
  int krylov_max_iterations = 600;
  double krylov_tol = 1e-12;
};

struct SolverStats {
  std::string backend;
  std::string method;
  long unknowns = 0;
  long nonzeros = 0;
  double second_null_residual = 0;
  int inverse_iterations = 0;
  bool used_fallback = false;
  bool real_parametrization = false;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0;        // ||L vec(rho)||_2 on the full generator
  double residual_bound = 0;  // 1e-9 * ||L||_F / D
  double min_eig = 0;
  SolverStats stats;
};

/// Unique normalized null vector of L. Trace functional replaces one row of
/// the (symmetry-reduced) generator and the bordered system is solved by
/// sparse LU; shift-invert inverse iteration is the fallback.
SteadyStateResult steady_state(const Superoperator& l, const SteadyStateOptions& opts = {});

/// Name of the compiled sparse LU backend.
const char* sparse_lu_backend();

}  // namespace ionsync
