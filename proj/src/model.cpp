#include "ionsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionsync {

namespace {

struct IonOps {
  Operator a, sm, sz, sx;
};

IonOps ion_ops(int ion, const BasisSpec& basis) {
  return {embed(destroy(basis.cutoff), ion, FactorKind::phonon, basis),
          embed(pauli(PauliAxis::minus), ion, FactorKind::spin, basis),
          embed(pauli(PauliAxis::z), ion, FactorKind::spin, basis),
          embed(pauli(PauliAxis::x), ion, FactorKind::spin, basis)};
}

double drive(const ModelParams& p, int ion) { return ion == 1 ? p.Omega1 : p.Omega2; }

}  // namespace

void ModelParams::validate() const {
  if (gamma < 0 || Gamma < 0) throw std::invalid_argument("ModelParams: decay rates must be >= 0");
  if (Omega1 < 0 || Omega2 < 0) throw std::invalid_argument("ModelParams: drive strengths must be >= 0");
  if (J < 0) throw std::invalid_argument("ModelParams: coupling J must be >= 0");
}

Superoperator ModelTerms::liouvillian() const {
  Superoperator l = ionsync::liouvillian(hamiltonian, jumps);
  if (extra) l += *extra;
  return l;
}

ModelTerms build_rwa(const ModelParams& p, const BasisSpec& basis) {
  p.validate();
  const Space space = basis.space();
  Operator h = zero(space);
  std::vector<Jump> jumps;
  std::vector<IonOps> ops;
  for (int j = 1; j <= basis.n_ions; ++j) {
    ops.push_back(ion_ops(j, basis));
    const IonOps& o = ops.back();
    const Operator n = o.a.adjoint() * o.a;
    if (basis.n_ions == 2) {
      const double sign = j == 1 ? -1.0 : 1.0;
      h += (0.25 * sign * p.Delta) * (2.0 * n - o.sz);
    }
    h += (0.5 * drive(p, j)) * (o.a.adjoint() * o.sm.adjoint() + o.a * o.sm);
    jumps.push_back({p.gamma, o.sm});
    jumps.push_back({p.Gamma, o.a});
  }
  if (basis.n_ions == 2) h += cplx(p.J) * (ops[1].a.adjoint() * ops[0].a + ops[0].a.adjoint() * ops[1].a);
  return {basis, std::move(h), std::move(jumps), std::nullopt, excitation_charge(basis)};
}

double emission_moment(int k) {
  if (k < 0) throw std::invalid_argument("emission_moment: negative order");
  if (k % 2 == 1) return 0.0;
  return 0.75 * (2.0 / (k + 1) + 2.0 / (k + 3));
}

ModelTerms build_validation(const ModelParams& p, const BasisSpec& basis) {
  p.validate();
  if (!p.eta || !p.omega_mean)
    throw std::invalid_argument("build_validation: eta and omega_mean must be set");
  const double eta = *p.eta;
  const double wm = *p.omega_mean;
  if (!(eta > 0 && eta < 1)) throw std::invalid_argument("build_validation: need 0 < eta < 1");
  const double slow = std::max({p.gamma, p.Gamma, std::abs(p.Delta), p.Omega1, p.Omega2});
  if (wm < 50.0 * slow)
    throw std::invalid_argument("build_validation: omega_mean must be >= 50x the slow rates");

  const Space space = basis.space();
  Operator h = zero(space);
  std::vector<Jump> jumps;
  std::optional<Superoperator> extra;
  std::vector<Operator> q;
  // Averaging e^{i eta z q} X e^{-i eta z q} over the kernel gives
  // m0/2 X - (eta^2/4) m2 [q,[q,X]] + O(eta^4); odd moments vanish.
  const double corr = 0.5 * p.gamma * 0.5 * eta * eta * emission_moment(2);
  for (int j = 1; j <= basis.n_ions; ++j) {
    const IonOps o = ion_ops(j, basis);
    const Operator n = o.a.adjoint() * o.a;
    const Operator qj = o.a + o.a.adjoint();
    const Operator q3 = qj * qj * qj;
    double wj = wm;
    if (basis.n_ions == 2) wj += (j == 1 ? -0.5 : 0.5) * p.Delta;
    const double rabi = drive(p, j) / eta;

    h += (0.5 * wj) * (2.0 * n - o.sz);
    h += (0.5 * rabi) * (o.sx * (eta * qj - (eta * eta * eta / 6.0) * q3));
    jumps.push_back({p.gamma, o.sm});
    jumps.push_back({p.Gamma, o.a});

    const Operator sp = o.sm.adjoint();
    const Operator q2 = qj * qj;
    Superoperator c = sandwich_term(2.0 * corr, qj * o.sm, sp * qj) +
                      sandwich_term(-corr, q2 * o.sm, sp) + sandwich_term(-corr, o.sm, sp * q2);
    if (extra) *extra += c;
    else extra = std::move(c);
    q.push_back(qj);
  }
  if (basis.n_ions == 2) h += cplx(p.J) * (q[0] * q[1]);

  ConservedCharge parity = excitation_charge(basis);
  parity.modulus = 2;
  return {basis, std::move(h), std::move(jumps), std::move(extra), std::move(parity)};
}

double mean_field_n(const ModelParams& p) {
  if (p.Gamma <= 0 || p.Omega1 <= 0)
    throw std::invalid_argument("mean_field_n: Gamma and Omega must be positive");
  const double n = p.gamma / (2.0 * p.Gamma) - p.gamma * p.gamma / (2.0 * p.Omega1 * p.Omega1);
  return std::max(0.0, n);
}

bool lasing_threshold(const ModelParams& p) { return p.Omega1 * p.Omega1 > p.gamma * p.Gamma; }

ConservedCharge excitation_charge(const BasisSpec& basis) {
  const int local = basis.local_dim();
  std::vector<int> k_local(local);
  for (int i = 0; i < local; ++i) k_local[i] = (i % basis.cutoff) - (i / basis.cutoff);
  ConservedCharge c;
  c.charge.resize(basis.dim());
  if (basis.n_ions == 1) {
    c.charge = k_local;
  } else {
    for (int g = 0; g < basis.dim(); ++g) c.charge[g] = k_local[g / local] + k_local[g % local];
  }
  return c;
}

Operator ion_swap(const BasisSpec& basis) {
  if (basis.n_ions != 2) throw std::invalid_argument("ion_swap: needs two ions");
  const int local = basis.local_dim();
  std::vector<Triplet> t;
  for (int g = 0; g < basis.dim(); ++g) t.emplace_back((g % local) * local + g / local, g, 1.0);
  SpMat m(basis.dim(), basis.dim());
  m.setFromTriplets(t.begin(), t.end());
  return Operator(basis.space(), std::move(m));
}

}  // namespace ionsync
