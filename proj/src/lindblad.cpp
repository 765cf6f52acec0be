#include "ionsync/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <type_traits>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#ifdef IONSYNC_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace ionsync {

namespace {

SpMat sparse_identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

double max_abs(const SpMat& m) {
  double mx = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

// Sparse LU with the compiled backend. Owns its matrix (UMFPACK keeps a
// reference to it).
template <typename Scalar>
class SparseLu {
 public:
  using Mat = Eigen::SparseMatrix<Scalar>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SparseLu(Mat a) : a_(std::move(a)) {
    a_.makeCompressed();
#ifdef IONSYNC_HAVE_UMFPACK
    lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
    factor();
    int code = lu_.umfpackFactorizeReturncode();
    if (code < 0 && code != UMFPACK_ERROR_out_of_memory) {
      lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
      factor();
      code = lu_.umfpackFactorizeReturncode();
    }
    if (code == UMFPACK_WARNING_singular_matrix) singular_ = true;
    else if (code < 0 || lu_.info() != Eigen::Success)
      throw SolverError(SolverError::Kind::factorization_failed,
                        "UMFPACK factorization failed with status " + std::to_string(code));
#else
    lu_.analyzePattern(a_);
    lu_.factorize(a_);
    if (lu_.info() != Eigen::Success) {
      if (lu_.info() == Eigen::NumericalIssue) singular_ = true;
      else
        throw SolverError(SolverError::Kind::factorization_failed,
                          "SparseLU factorization failed: " + lu_.lastErrorMessage());
    }
#endif
  }

  bool singular() const { return singular_; }
  const Mat& matrix() const { return a_; }
  Vec solve(const Vec& b) const { return lu_.solve(b); }

 private:
#ifdef IONSYNC_HAVE_UMFPACK
  // METIS keeps its random state in globals, so concurrent orderings would
  // differ run to run. The symbolic step is serialized; the numeric one is not.
  void factor() {
    {
      static std::mutex ordering;
      std::lock_guard<std::mutex> lock(ordering);
      lu_.analyzePattern(a_);
    }
    lu_.factorize(a_);
  }
#endif

  Mat a_;
#ifdef IONSYNC_HAVE_UMFPACK
  Eigen::UmfPackLU<Mat> lu_;
#else
  Eigen::SparseLU<Mat, Eigen::COLAMDOrdering<int>> lu_;
#endif
  bool singular_ = false;
};

// Restriction of L to the vec positions whose charge difference vanishes.
struct Reduction {
  std::vector<int> positions;    // reduced -> full vec index
  std::vector<int> full_to_red;  // full vec index -> reduced, -1 outside
  SpMat block;
};

Reduction reduce(const SpMat& l, int dim, const ConservedCharge* sym) {
  const long n = static_cast<long>(dim) * dim;
  Reduction r;
  if (!sym) {
    r.positions.resize(n);
    r.full_to_red.resize(n);
    for (long v = 0; v < n; ++v) r.positions[v] = r.full_to_red[v] = static_cast<int>(v);
    r.block = l;
    return r;
  }
  if (static_cast<int>(sym->charge.size()) != dim)
    throw std::invalid_argument("steady_state: conserved charge has wrong length");
  auto in_block = [&](int row, int col) {
    int d = sym->charge[row] - sym->charge[col];
    if (sym->modulus > 0) d = ((d % sym->modulus) + sym->modulus) % sym->modulus;
    return d == 0;
  };
  r.full_to_red.assign(n, -1);
  auto& full_to_red = r.full_to_red;
  for (int col = 0; col < dim; ++col)
    for (int row = 0; row < dim; ++row)
      if (in_block(row, col)) {
        full_to_red[static_cast<long>(col) * dim + row] = static_cast<int>(r.positions.size());
        r.positions.push_back(col * dim + row);
      }

  const double scale = max_abs(l);
  std::vector<Triplet> t;
  for (int p = 0; p < static_cast<int>(r.positions.size()); ++p) {
    for (SpMat::InnerIterator it(l, r.positions[p]); it; ++it) {
      const int q = full_to_red[it.row()];
      if (q >= 0)
        t.emplace_back(q, p, it.value());
      else if (std::abs(it.value()) > 1e-13 * scale)
        throw std::invalid_argument("steady_state: generator does not conserve the declared charge");
    }
  }
  r.block.resize(static_cast<long>(r.positions.size()), static_cast<long>(r.positions.size()));
  r.block.setFromTriplets(t.begin(), t.end());
  return r;
}

template <typename Scalar>
using SparseOf = Eigen::SparseMatrix<Scalar>;
template <typename Scalar>
using VecOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row `trace_row` replaced by the trace functional.
template <typename Scalar>
SparseOf<Scalar> border(const SparseOf<Scalar>& m, const std::vector<bool>& trace_cols, int trace_row) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(m.nonZeros() + trace_cols.size());
  for (int c = 0; c < m.outerSize(); ++c) {
    for (typename SparseOf<Scalar>::InnerIterator it(m, c); it; ++it)
      if (it.row() != trace_row) t.emplace_back(it.row(), c, it.value());
    if (trace_cols[c]) t.emplace_back(trace_row, c, Scalar(1));
  }
  SparseOf<Scalar> a(m.rows(), m.cols());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

template <typename Scalar>
double max_column_norm(const SparseOf<Scalar>& a) {
  double mx = 0;
  for (int c = 0; c < a.outerSize(); ++c) {
    double s = 0;
    for (typename SparseOf<Scalar>::InnerIterator it(a, c); it; ++it) s += std::norm(it.value());
    mx = std::max(mx, std::sqrt(s));
  }
  return mx;
}

template <typename Scalar>
VecOf<Scalar> deterministic_start(long n) {
  VecOf<Scalar> z(n);
  for (long k = 0; k < n; ++k) {
    if constexpr (std::is_same_v<Scalar, double>)
      z[k] = std::cos(0.37 * k + 0.1) + 0.5 * std::sin(1.13 * k + 0.7);
    else
      z[k] = Scalar(std::cos(0.37 * k + 0.1), std::sin(1.13 * k + 0.7));
  }
  return z / z.norm();
}

// Inverse iteration on the bordered matrix. A unique steady state makes it
// nonsingular; a second null vector of L shows up as a trace-free vector
// with tiny relative residual.
template <typename Scalar>
double second_null_residual(const SparseLu<Scalar>& lu, int iters, int& used) {
  const double anorm = max_column_norm<Scalar>(lu.matrix());
  VecOf<Scalar> w = deterministic_start<Scalar>(lu.matrix().rows());
  double rel = 1.0;
  for (used = 0; used < iters; ++used) {
    VecOf<Scalar> y = lu.solve(w);
    const double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0) return 0.0;
    w = y / ny;
    rel = (lu.matrix() * w).norm() / anorm;
  }
  return rel;
}

long estimated_factor_bytes(long unknowns, long nnz, bool real) {
  // Separator-front heuristic for the 4-index lattice structure of two-mode
  // Liouvillians; conservative for single-mode problems.
  const double scalar = real ? 8.0 : 16.0;
  return static_cast<long>(scalar * std::pow(static_cast<double>(unknowns), 1.5)) + 32L * nnz;
}

// Exact inverse on the `core` unknowns (those the near-conserved charge
// leaves in the zero block) and 2x2 (Re, Im) block inverses elsewhere.
// Shaped for Eigen's iterative solvers; the setup happens in `assign`.
class CorePreconditioner {
 public:
  CorePreconditioner() = default;

  void assign(const Eigen::SparseMatrix<double>& a, const std::vector<char>& core) {
    const long n = a.rows();
    core_.clear();
    std::vector<int> local(n, -1);
    for (long u = 0; u < n; ++u)
      if (core[u]) {
        local[u] = static_cast<int>(core_.size());
        core_.push_back(static_cast<int>(u));
      }
    std::vector<Eigen::Triplet<double>> t;
    for (int c : core_)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it)
        if (local[it.row()] >= 0) t.emplace_back(local[it.row()], local[c], it.value());
    Eigen::SparseMatrix<double> sub(static_cast<long>(core_.size()), static_cast<long>(core_.size()));
    sub.setFromTriplets(t.begin(), t.end());
    lu_ = std::make_shared<SparseLu<double>>(std::move(sub));
    if (lu_->singular())
      throw SolverError(SolverError::Kind::degenerate, "steady_state: preconditioner block is singular");

    pairs_.clear();
    blocks_.clear();
    for (long u = 0; u < n; ++u) {
      if (core[u]) continue;
      if (u + 1 >= n || core[u + 1])
        throw std::logic_error("CorePreconditioner: unpaired off-core unknown");
      Eigen::Matrix2d b;
      b << a.coeff(u, u), a.coeff(u, u + 1), a.coeff(u + 1, u), a.coeff(u + 1, u + 1);
      pairs_.push_back(static_cast<int>(u));
      blocks_.push_back(b.inverse());
      ++u;
    }
  }

  template <typename M>
  CorePreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  CorePreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  CorePreconditioner& compute(const M&) { return *this; }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    Eigen::VectorXd x(b.size());
    Eigen::VectorXd bc(static_cast<long>(core_.size()));
    for (size_t k = 0; k < core_.size(); ++k) bc[k] = b[core_[k]];
    const Eigen::VectorXd xc = lu_->solve(bc);
    for (size_t k = 0; k < core_.size(); ++k) x[core_[k]] = xc[k];
    for (size_t k = 0; k < pairs_.size(); ++k) {
      const int u = pairs_[k];
      const Eigen::Vector2d y = blocks_[k] * Eigen::Vector2d(b[u], b[u + 1]);
      x[u] = y[0];
      x[u + 1] = y[1];
    }
    return x;
  }

  long core_size() const { return static_cast<long>(core_.size()); }

 private:
  std::vector<int> core_;
  std::shared_ptr<SparseLu<double>> lu_;
  std::vector<int> pairs_;
  std::vector<Eigen::Matrix2d> blocks_;
};

Eigen::VectorXd krylov_null_vector(const Eigen::SparseMatrix<double>& m, const std::vector<bool>& trace_cols,
                                   int trace_row, const std::vector<char>& core,
                                   const SteadyStateOptions& opts, SolverStats& stats) {
  const Eigen::SparseMatrix<double> a = border<double>(m, trace_cols, trace_row);
  Eigen::GMRES<Eigen::SparseMatrix<double>, CorePreconditioner> gmres;
  gmres.preconditioner().assign(a, core);
  gmres.compute(a);
  gmres.set_restart(opts.krylov_restart);
  gmres.setMaxIterations(opts.krylov_max_iterations);
  gmres.setTolerance(opts.krylov_tol);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
  rhs[trace_row] = 1.0;
  Eigen::VectorXd x = gmres.solve(rhs);
  stats.inverse_iterations = static_cast<int>(gmres.iterations());
  stats.method = "gmres-core-preconditioned";
  const double rel = (a * x - rhs).norm();
  if (gmres.info() != Eigen::Success || !x.allFinite() || rel > 1e3 * opts.krylov_tol)
    throw SolverError(SolverError::Kind::factorization_failed,
                      "steady_state: GMRES did not converge (residual " + std::to_string(rel) + ")");
  return x;
}

// Null vector of `m` normalized so that the entries flagged in `trace_cols`
// sum to one.
template <typename Scalar>
VecOf<Scalar> null_vector(const SparseOf<Scalar>& m, const std::vector<bool>& trace_cols,
                          const SteadyStateOptions& opts, SolverStats& stats,
                          const std::vector<char>* core = nullptr) {
  const long n = m.rows();
  int trace_row = -1;
  for (long p = 0; p < n && trace_row < 0; ++p)
    if (trace_cols[p]) trace_row = static_cast<int>(p);
  if (trace_row < 0) throw std::invalid_argument("steady_state: no diagonal positions in block");

  VecOf<Scalar> x;
  bool direct_ok = false;
  if constexpr (std::is_same_v<Scalar, double>) {
    // No fallback: the memory estimate only covered the core block.
    if (opts.method == SteadyStateOptions::Method::krylov) {
      x = krylov_null_vector(m, trace_cols, trace_row, *core, opts, stats);
      direct_ok = true;
    }
  }
  if (opts.method == SteadyStateOptions::Method::direct) {
    try {
      SparseLu<Scalar> lu(border<Scalar>(m, trace_cols, trace_row));
      if (lu.singular())
        throw SolverError(SolverError::Kind::degenerate,
                          "steady_state: bordered generator is singular (steady state not unique)");
      VecOf<Scalar> rhs = VecOf<Scalar>::Zero(n);
      rhs[trace_row] = Scalar(1);
      x = lu.solve(rhs);
      if (!x.allFinite())
        throw SolverError(SolverError::Kind::factorization_failed, "steady_state: non-finite solution");
      if (opts.check_degeneracy) {
        stats.second_null_residual = second_null_residual(lu, 3, stats.inverse_iterations);
        if (stats.second_null_residual < opts.degeneracy_tol)
          throw SolverError(SolverError::Kind::degenerate,
                            "steady_state: second null vector with relative residual " +
                                std::to_string(stats.second_null_residual));
      }
      stats.method = "direct-bordered-lu";
      direct_ok = true;
    } catch (const SolverError& e) {
      if (e.kind() != SolverError::Kind::factorization_failed || !opts.allow_fallback) throw;
      stats.used_fallback = true;
    }
  }

  if (!direct_ok) {
    // Shift-invert inverse iteration towards the eigenvalue closest to zero.
    double scale = 0;
    for (int c = 0; c < m.outerSize(); ++c)
      for (typename SparseOf<Scalar>::InnerIterator it(m, c); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    const double shift = -1e-8 * std::max(scale, 1.0);
    SparseOf<Scalar> id(n, n);
    id.setIdentity();
    SparseLu<Scalar> lu(SparseOf<Scalar>(m - Scalar(shift) * id));
    if (lu.singular())
      throw SolverError(SolverError::Kind::factorization_failed, "steady_state: shift-invert matrix singular");
    x = deterministic_start<Scalar>(n);
    for (int it = 0; it < 30; ++it) {
      VecOf<Scalar> y = lu.solve(x);
      x = y / y.norm();
      stats.inverse_iterations = it + 1;
      if ((m * x).norm() <= 1e-13 * std::max(scale, 1.0)) break;
    }
    stats.method = "shift-invert";
  }

  Scalar tr(0);
  for (long p = 0; p < n; ++p)
    if (trace_cols[p]) tr += x[p];
  if (std::abs(tr) < 1e-300)
    throw SolverError(SolverError::Kind::degenerate, "steady_state: null vector has zero trace");
  return x / tr;
}

// Transpose partner of each reduced position, or -1 if it falls outside.
std::vector<int> transpose_partners(const Reduction& red, int d) {
  std::vector<int> t(red.positions.size());
  for (size_t p = 0; p < red.positions.size(); ++p) {
    const int v = red.positions[p];
    t[p] = red.full_to_red[static_cast<long>(v % d) * d + v / d];
  }
  return t;
}

// L(kl, ij) == conj(L(lk, ji)) on the block.
bool preserves_hermiticity(const Reduction& red, const std::vector<int>& partner, double scale) {
  for (size_t p = 0; p < partner.size(); ++p)
    if (partner[p] < 0) return false;
  const SpMat& b = red.block;
  for (int c = 0; c < b.outerSize(); ++c)
    for (SpMat::InnerIterator it(b, c); it; ++it) {
      const cplx mirror = b.coeff(partner[it.row()], partner[c]);
      if (std::abs(mirror - std::conj(it.value())) > 1e-12 * scale) return false;
    }
  return true;
}

// Real parametrization of Hermitian matrices on the block: one unknown per
// diagonal entry and (Re, Im) per upper-triangle entry.
struct HermitianCoords {
  std::vector<int> first;   // real unknown -> reduced position (i <= j)
  std::vector<char> kind;   // 0 diagonal, 1 real part, 2 imaginary part
  std::vector<int> row_re;  // reduced position -> real row, -1 if dropped
  std::vector<int> row_im;
};

HermitianCoords hermitian_coords(const Reduction& red, int d) {
  HermitianCoords h;
  const long n = static_cast<long>(red.positions.size());
  h.row_re.assign(n, -1);
  h.row_im.assign(n, -1);
  for (long p = 0; p < n; ++p) {
    const int v = red.positions[p];
    const int i = v % d, j = v / d;
    if (i > j) continue;
    h.row_re[p] = static_cast<int>(h.first.size());
    h.first.push_back(static_cast<int>(p));
    h.kind.push_back(i == j ? 0 : 1);
    if (i < j) {
      h.row_im[p] = static_cast<int>(h.first.size());
      h.first.push_back(static_cast<int>(p));
      h.kind.push_back(2);
    }
  }
  return h;
}

Eigen::SparseMatrix<double> realify(const Reduction& red, const std::vector<int>& partner,
                                    const HermitianCoords& h) {
  const cplx i(0, 1);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * red.block.nonZeros());
  auto scatter = [&](int col, int src, cplx factor) {
    for (SpMat::InnerIterator it(red.block, src); it; ++it) {
      const cplx v = factor * it.value();
      if (h.row_re[it.row()] >= 0 && v.real() != 0) t.emplace_back(h.row_re[it.row()], col, v.real());
      if (h.row_im[it.row()] >= 0 && v.imag() != 0) t.emplace_back(h.row_im[it.row()], col, v.imag());
    }
  };
  for (size_t u = 0; u < h.first.size(); ++u) {
    const int p = h.first[u];
    const int col = static_cast<int>(u);
    switch (h.kind[u]) {
      case 0: scatter(col, p, 1.0); break;
      case 1: scatter(col, p, 1.0); scatter(col, partner[p], 1.0); break;
      default: scatter(col, p, i); scatter(col, partner[p], -i); break;
    }
  }
  Eigen::SparseMatrix<double> r(static_cast<long>(h.first.size()), static_cast<long>(h.first.size()));
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

}  // namespace

const char* sparse_lu_backend() {
#ifdef IONSYNC_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

Superoperator::Superoperator(Space space, SpMat m) : space_(std::move(space)), m_(std::move(m)) {
  const long n = static_cast<long>(space_.dim()) * space_.dim();
  if (m_.rows() != n || m_.cols() != n)
    throw std::invalid_argument("Superoperator: matrix shape does not match space " + space_.describe());
  m_.makeCompressed();
}

Superoperator& Superoperator::operator+=(const Superoperator& o) {
  require_same_space(space_, o.space_, "superoperator+");
  m_ += o.m_;
  return *this;
}

Operator Superoperator::apply(const Operator& rho) const {
  require_same_space(space_, rho.space(), "Superoperator::apply");
  return unvec(space_, m_ * vec(rho));
}

double Superoperator::trace_defect() const {
  const int d = space_.dim();
  const double scale = max_abs(m_);
  if (scale == 0) return 0;
  // Row vector vec(I)^dagger picks the rows of diagonal positions.
  std::vector<cplx> acc(m_.cols(), 0.0);
  for (int c = 0; c < m_.outerSize(); ++c)
    for (SpMat::InnerIterator it(m_, c); it; ++it)
      if (it.row() % (d + 1) == 0) acc[c] += it.value();
  double mx = 0;
  for (const auto& v : acc) mx = std::max(mx, std::abs(v));
  return mx / scale;
}

CVec vec(const Operator& rho) {
  const int d = rho.dim();
  CVec v = CVec::Zero(static_cast<long>(d) * d);
  const SpMat& m = rho.matrix();
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) v[static_cast<long>(c) * d + it.row()] = it.value();
  return v;
}

Operator unvec(const Space& space, const CVec& v) {
  const int d = space.dim();
  if (v.size() != static_cast<long>(d) * d) throw std::invalid_argument("unvec: length mismatch");
  std::vector<Triplet> t;
  for (long k = 0; k < v.size(); ++k)
    if (v[k] != cplx(0)) t.emplace_back(static_cast<int>(k % d), static_cast<int>(k / d), v[k]);
  SpMat m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return Operator(space, std::move(m));
}

Superoperator sandwich_term(cplx coeff, const Operator& a, const Operator& b) {
  require_same_space(a.space(), b.space(), "sandwich_term");
  SpMat bt = b.matrix().transpose();
  return Superoperator(a.space(), coeff * kron(bt, a.matrix()));
}

Superoperator liouvillian(const Operator& h, const std::vector<Jump>& jumps) {
  if (hermiticity_defect(h.matrix()) > 1e-10)
    throw std::invalid_argument("liouvillian: Hamiltonian is not Hermitian");
  const int d = h.dim();
  const SpMat id = sparse_identity(d);
  const cplx i(0, 1);
  SpMat ht = h.matrix().transpose();
  SpMat l = -i * (kron(id, h.matrix()) - kron(ht, id));
  for (const auto& j : jumps) {
    if (j.rate < 0) throw std::invalid_argument("liouvillian: negative jump rate");
    require_same_space(h.space(), j.op.space(), "liouvillian jump");
    if (j.rate == 0) continue;
    const SpMat& lk = j.op.matrix();
    SpMat ldl = SpMat(lk.adjoint()) * lk;
    SpMat ldl_t = ldl.transpose();
    SpMat lconj = lk.conjugate();
    l += j.rate * (kron(lconj, lk) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl_t, id));
  }
  l.prune(cplx(0.0));
  return Superoperator(h.space(), std::move(l));
}

SteadyStateResult steady_state(const Superoperator& l, const SteadyStateOptions& opts) {
  const int d = l.hilbert_dim();
  if (l.trace_defect() > 1e-10)
    throw SolverError(SolverError::Kind::not_trace_preserving,
                      "steady_state: generator is not trace preserving");

  Reduction red = reduce(l.matrix(), d, opts.symmetry ? &*opts.symmetry : nullptr);
  const long n = static_cast<long>(red.positions.size());
  const std::vector<int> partner = transpose_partners(red, d);
  const bool real = opts.real_parametrization && preserves_hermiticity(red, partner, max_abs(l.matrix()));
  const bool krylov = opts.method == SteadyStateOptions::Method::krylov;
  if (krylov && (!real || !opts.near_charge || static_cast<int>(opts.near_charge->charge.size()) != d))
    throw std::invalid_argument("steady_state: krylov method needs a Hermiticity-preserving generator and a near charge");
  std::vector<char> core;
  long factored = n;
  if (krylov) {
    core.resize(n);
    factored = 0;
    for (long p = 0; p < n; ++p) {
      const int v = red.positions[p];
      core[p] = opts.near_charge->charge[v % d] == opts.near_charge->charge[v / d];
      factored += core[p];
    }
  }
  const long need = estimated_factor_bytes(factored, red.block.nonZeros(), real);
  if (static_cast<double>(need) > opts.memory_budget_bytes)
    throw SolverError(SolverError::Kind::memory_budget,
                      "steady_state: " + std::to_string(n) + " unknowns exceed the memory budget");

  SolverStats stats;
  stats.backend = sparse_lu_backend();
  stats.unknowns = n;
  stats.nonzeros = red.block.nonZeros();
  stats.real_parametrization = real;

  CVec full = CVec::Zero(static_cast<long>(d) * d);
  if (real) {
    const HermitianCoords h = hermitian_coords(red, d);
    const Eigen::SparseMatrix<double> r = realify(red, partner, h);
    std::vector<bool> trace_cols(h.first.size());
    for (size_t u = 0; u < h.first.size(); ++u) trace_cols[u] = h.kind[u] == 0;
    std::vector<char> real_core;
    if (krylov) {
      real_core.resize(h.first.size());
      for (size_t u = 0; u < h.first.size(); ++u) real_core[u] = core[h.first[u]];
    }
    const Eigen::VectorXd x = null_vector<double>(r, trace_cols, opts, stats, krylov ? &real_core : nullptr);
    for (size_t u = 0; u < h.first.size(); ++u) {
      const int p = h.first[u];
      switch (h.kind[u]) {
        case 0: full[red.positions[p]] = x[u]; break;
        case 1:
          full[red.positions[p]] += x[u];
          full[red.positions[partner[p]]] += x[u];
          break;
        default:
          full[red.positions[p]] += cplx(0, x[u]);
          full[red.positions[partner[p]]] -= cplx(0, x[u]);
          break;
      }
    }
  } else {
    std::vector<bool> trace_cols(n);
    for (long p = 0; p < n; ++p) trace_cols[p] = red.positions[p] % (d + 1) == 0;
    const CVec x = null_vector<cplx>(red.block, trace_cols, opts, stats);
    for (long p = 0; p < n; ++p) full[red.positions[p]] = x[p];
  }

  SteadyStateResult res;
  res.rho = DensityMatrix(unvec(l.space(), full));
  res.residual = (l.matrix() * vec(res.rho.op())).norm();
  res.residual_bound = 1e-9 * l.frobenius_norm() / d;
  res.min_eig = res.rho.min_eigenvalue();
  res.stats = std::move(stats);
  return res;
}

}  // namespace ionsync
