#include "ionsync/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ionsync {

namespace {

SpMat sparse_identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

// Places `local` on factor position `pos` of `space`.
SpMat embed_at(const SpMat& local, const Space& space, int pos) {
  const auto& f = space.factors();
  int outer = 1, inner = 1;
  for (int k = 0; k < pos; ++k) outer *= f[k].dim;
  for (size_t k = pos + 1; k < f.size(); ++k) inner *= f[k].dim;
  return kron(kron(sparse_identity(outer), local), sparse_identity(inner));
}

const char* kind_name(FactorKind k) { return k == FactorKind::spin ? "spin" : "phonon"; }

}  // namespace

SpMat kron(const SpMat& a, const SpMat& b) {
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
  for (int ca = 0; ca < a.outerSize(); ++ca)
    for (SpMat::InnerIterator ia(a, ca); ia; ++ia)
      for (int cb = 0; cb < b.outerSize(); ++cb)
        for (SpMat::InnerIterator ib(b, cb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Space::Space(std::vector<Factor> factors) : factors_(std::move(factors)) {
  dim_ = 1;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw std::invalid_argument("Space: factor dimension must be positive");
    dim_ *= f.dim;
  }
}

int Space::find(int ion, FactorKind kind) const {
  for (size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k].ion == ion && factors_[k].kind == kind) return static_cast<int>(k);
  return -1;
}

std::string Space::describe() const {
  std::ostringstream os;
  os << "[";
  for (size_t k = 0; k < factors_.size(); ++k) {
    if (k) os << " x ";
    os << kind_name(factors_[k].kind) << factors_[k].ion << "(" << factors_[k].dim << ")";
  }
  os << "]";
  return os.str();
}

BasisSpec::BasisSpec(int n_ions_, int cutoff_) : n_ions(n_ions_), cutoff(cutoff_) {
  if (n_ions != 1 && n_ions != 2)
    throw std::invalid_argument("BasisSpec: n_ions must be 1 or 2, got " + std::to_string(n_ions));
  if (cutoff < 2)
    throw std::invalid_argument("BasisSpec: Fock cutoff must be >= 2, got " + std::to_string(cutoff));
}

int BasisSpec::dim() const { return n_ions == 1 ? local_dim() : local_dim() * local_dim(); }

Space BasisSpec::space() const {
  std::vector<Factor> f;
  for (int ion = 1; ion <= n_ions; ++ion) {
    f.push_back({ion, FactorKind::spin, 2});
    f.push_back({ion, FactorKind::phonon, cutoff});
  }
  return Space(std::move(f));
}

Operator::Operator(Space space, SpMat m) : space_(std::move(space)), m_(std::move(m)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
    throw std::invalid_argument("Operator: matrix shape does not match space " + space_.describe());
  m_.makeCompressed();
}

Operator Operator::adjoint() const { return Operator(space_, SpMat(m_.adjoint())); }

cplx Operator::trace() const {
  cplx t = 0;
  for (int k = 0; k < m_.outerSize(); ++k)
    for (SpMat::InnerIterator it(m_, k); it; ++it)
      if (it.row() == it.col()) t += it.value();
  return t;
}

void require_same_space(const Space& a, const Space& b, const char* what) {
  if (!(a == b))
    throw BasisMismatch(std::string(what) + ": space " + a.describe() + " != " + b.describe());
}

Operator& Operator::operator+=(const Operator& o) {
  require_same_space(space_, o.space_, "operator+");
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  require_same_space(space_, o.space_, "operator-");
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator*");
  return Operator(a.space_, SpMat(a.m_ * b.m_));
}

double hermiticity_defect(const SpMat& m) {
  SpMat d = m - SpMat(m.adjoint());
  double mx = 0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

Operator identity(const Space& space) { return Operator(space, sparse_identity(space.dim())); }

Operator zero(const Space& space) { return Operator(space, SpMat(space.dim(), space.dim())); }

Operator destroy(int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("destroy: Fock cutoff must be >= 2");
  std::vector<Triplet> t;
  for (int n = 1; n < cutoff; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  SpMat m(cutoff, cutoff);
  m.setFromTriplets(t.begin(), t.end());
  return Operator(Space({{0, FactorKind::phonon, cutoff}}), std::move(m));
}

Operator pauli(PauliAxis axis) {
  const cplx i(0, 1);
  // rows/cols: 0 = |down>, 1 = |up>
  std::vector<Triplet> t;
  switch (axis) {
    case PauliAxis::x: t = {{0, 1, 1.0}, {1, 0, 1.0}}; break;
    case PauliAxis::y: t = {{0, 1, i}, {1, 0, -i}}; break;
    case PauliAxis::z: t = {{0, 0, -1.0}, {1, 1, 1.0}}; break;
    case PauliAxis::plus: t = {{1, 0, 1.0}}; break;
    case PauliAxis::minus: t = {{0, 1, 1.0}}; break;
  }
  SpMat m(2, 2);
  m.setFromTriplets(t.begin(), t.end());
  return Operator(Space({{0, FactorKind::spin, 2}}), std::move(m));
}

Operator pauli(Axis axis) {
  switch (axis) {
    case Axis::x: return pauli(PauliAxis::x);
    case Axis::y: return pauli(PauliAxis::y);
    case Axis::z: break;
  }
  return pauli(PauliAxis::z);
}

Operator embed(const Operator& op, int ion, FactorKind factor, const BasisSpec& basis) {
  if (ion < 1 || ion > basis.n_ions)
    throw std::invalid_argument("embed: ion " + std::to_string(ion) + " not in basis");
  const int want = factor == FactorKind::spin ? 2 : basis.cutoff;
  if (op.dim() != want)
    throw BasisMismatch("embed: operator of dimension " + std::to_string(op.dim()) + " cannot act on a " +
                        kind_name(factor) + " factor of dimension " + std::to_string(want));
  const Space space = basis.space();
  return Operator(space, embed_at(op.matrix(), space, space.find(ion, factor)));
}

Operator tensor(const Operator& a, const Operator& b) {
  auto f = a.space().factors();
  const auto& fb = b.space().factors();
  f.insert(f.end(), fb.begin(), fb.end());
  return Operator(Space(std::move(f)), kron(a.matrix(), b.matrix()));
}

DensityMatrix::DensityMatrix(const Operator& op) {
  SpMat h = 0.5 * (op.matrix() + SpMat(op.matrix().adjoint()));
  op_ = Operator(op.space(), std::move(h));
  const cplx tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(op_.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Operator pure_state(const Space& space, const CVec& psi) {
  if (psi.size() != space.dim()) throw std::invalid_argument("pure_state: vector size mismatch");
  const CVec v = psi / psi.norm();
  CMat rho = v * v.adjoint();
  return Operator(space, rho.sparseView(0.0, 0.0));
}

Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const auto& f = rho.space().factors();
  const int nf = static_cast<int>(f.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw std::invalid_argument("partial_trace: factor index out of range");
    kept[k] = true;
  }
  std::vector<Factor> out_f;
  for (int k = 0; k < nf; ++k)
    if (kept[k]) out_f.push_back(f[k]);
  Space out_space(out_f);

  // Digit decomposition: index = sum digit_k * stride_k.
  std::vector<int> stride(nf);
  int s = 1;
  for (int k = nf - 1; k >= 0; --k) {
    stride[k] = s;
    s *= f[k].dim;
  }
  auto split = [&](int idx, int& kept_idx, int& traced_idx) {
    kept_idx = 0;
    traced_idx = 0;
    for (int k = 0; k < nf; ++k) {
      const int d = (idx / stride[k]) % f[k].dim;
      if (kept[k])
        kept_idx = kept_idx * f[k].dim + d;
      else
        traced_idx = traced_idx * f[k].dim + d;
    }
  };

  std::vector<Triplet> t;
  const SpMat& m = rho.matrix();
  for (int c = 0; c < m.outerSize(); ++c) {
    int kc, tc;
    split(c, kc, tc);
    for (SpMat::InnerIterator it(m, c); it; ++it) {
      int kr, tr;
      split(static_cast<int>(it.row()), kr, tr);
      if (tr == tc) t.emplace_back(kr, kc, it.value());
    }
  }
  SpMat red(out_space.dim(), out_space.dim());
  red.setFromTriplets(t.begin(), t.end());
  return Operator(out_space, std::move(red));
}

Operator partial_trace(const Operator& rho, FactorKind keep_kind) {
  std::vector<int> keep;
  const auto& f = rho.space().factors();
  for (size_t k = 0; k < f.size(); ++k)
    if (f[k].kind == keep_kind) keep.push_back(static_cast<int>(k));
  return partial_trace(rho, keep);
}

Operator spin_project(const Operator& rho, int ion, Axis axis, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("spin_project: sign must be +1 or -1");
  const int pos = rho.space().find(ion, FactorKind::spin);
  if (pos < 0) throw BasisMismatch("spin_project: no spin factor for ion " + std::to_string(ion));
  const SpMat proj = 0.5 * (sparse_identity(2) + static_cast<double>(sign) * pauli(axis).matrix());
  const SpMat full = embed_at(proj, rho.space(), pos);
  return partial_trace(Operator(rho.space(), SpMat(full * rho.matrix())), FactorKind::phonon);
}

cplx expectation(const Operator& rho, const Operator& x) {
  require_same_space(rho.space(), x.space(), "expectation");
  // Tr[rho X] = sum_ij rho_ij X_ji
  const SpMat xt = x.matrix().transpose();
  return rho.matrix().cwiseProduct(xt).sum();
}

cplx expectation(const DensityMatrix& rho, const Operator& x) { return expectation(rho.op(), x); }

}  // namespace ionsync
