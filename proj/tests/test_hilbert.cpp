#include <doctest.h>

#include "ionsync/hilbert.hpp"
#include "oracles.hpp"

using namespace ionsync;

namespace {

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Space fock_space(int n) { return Space({Factor{0, FactorKind::phonon, n}}); }

}  // namespace

TEST_CASE("destroy has sqrt(n) on the superdiagonal") {
  const CMat a = destroy(3).dense();
  CMat want = CMat::Zero(3, 3);
  want(0, 1) = 1;
  want(1, 2) = std::sqrt(2.0);
  CHECK(max_abs(a - want) == 0.0);
  CHECK(destroy(3).matrix().nonZeros() == 2);
}

TEST_CASE("destroy(2) squared vanishes") {
  const Operator a = destroy(2);
  CHECK(max_abs((a * a).dense()) == 0.0);
}

TEST_CASE("number operator from ladder operators") {
  const Operator a = destroy(4);
  const CMat n = (a.adjoint() * a).dense();
  CHECK(max_abs(n - Eigen::Vector4cd(0, 1, 2, 3).asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("pauli conventions") {
  CHECK(max_abs(pauli(PauliAxis::z).dense() - Eigen::Vector2cd(-1, 1).asDiagonal().toDenseMatrix()) == 0.0);
  const CMat pm = (pauli(PauliAxis::plus) * pauli(PauliAxis::minus)).dense();
  CHECK(max_abs(pm - Eigen::Vector2cd(0, 1).asDiagonal().toDenseMatrix()) == 0.0);
  const CMat x2 = (pauli(PauliAxis::x) * pauli(PauliAxis::x)).dense();
  CHECK(max_abs(x2 - CMat::Identity(2, 2)) == 0.0);
  // sigma_y = i(sigma_- - sigma_+) in the (down, up) ordering
  const CMat y = pauli(PauliAxis::y).dense();
  CHECK(y(0, 1) == cplx(0, 1));
  CHECK(y(1, 0) == cplx(0, -1));
  CHECK(max_abs((pauli(Axis::x) * pauli(Axis::y) - pauli(Axis::y) * pauli(Axis::x)).dense() -
                2.0 * cplx(0, 1) * pauli(Axis::z).dense()) < 1e-15);
}

TEST_CASE("embedded operators on different factors commute") {
  const BasisSpec b(2, 3);
  const Operator a1 = embed(destroy(3), 1, FactorKind::phonon, b);
  const Operator a2 = embed(destroy(3), 2, FactorKind::phonon, b);
  CHECK(max_abs((a1 * a2 - a2 * a1).dense()) == 0.0);
  CHECK(a1.dim() == 36);
}

TEST_CASE("embedded sigma_z sees spin up of ion 1") {
  const int n = 3;
  const BasisSpec b(2, n);
  const Operator sz = embed(pauli(PauliAxis::z), 1, FactorKind::spin, b);
  // |up>_1 |n1=1> |down>_2 |n2=2>: g = (1*N + 1)*2N + (0*N + 2)
  const int g = (1 * n + 1) * 2 * n + 2;
  CHECK(sz.matrix().coeff(g, g) == cplx(1, 0));
  const int g_down = (0 * n + 1) * 2 * n + 2;
  CHECK(sz.matrix().coeff(g_down, g_down) == cplx(-1, 0));
}

TEST_CASE("trace of an embedded operator") {
  const int n = 4;
  const BasisSpec b(2, n);
  const Operator x = embed(pauli(PauliAxis::plus) * pauli(PauliAxis::minus), 1, FactorKind::spin, b);
  CHECK(std::abs(x.trace() - cplx(1.0 * n * 2 * n)) < 1e-12);
  const Operator nn = embed(destroy(n).adjoint() * destroy(n), 2, FactorKind::phonon, b);
  CHECK(std::abs(nn.trace() - cplx(6.0 * 2 * 2 * n)) < 1e-12);
}

TEST_CASE("embed rejects a wrong factor dimension") {
  CHECK_THROWS_AS(embed(destroy(3), 1, FactorKind::phonon, BasisSpec(1, 4)), BasisMismatch);
  CHECK_THROWS_AS(embed(destroy(3), 2, FactorKind::phonon, BasisSpec(1, 3)), std::invalid_argument);
}

TEST_CASE("partial trace of a product state") {
  std::mt19937 rng(7);
  const Space sa({Factor{1, FactorKind::spin, 2}});
  const Space sb({Factor{1, FactorKind::phonon, 3}});
  const CMat ra = oracle::random_density(2, rng);
  const CMat rb = oracle::random_density(3, rng);
  const Operator prod = tensor(oracle::to_operator(sa, ra), oracle::to_operator(sb, rb));
  CHECK(max_abs(partial_trace(prod, std::vector<int>{0}).dense() - ra) < 1e-14);
  CHECK(max_abs(partial_trace(prod, std::vector<int>{1}).dense() - rb) < 1e-14);
  CHECK(max_abs(partial_trace(prod, FactorKind::phonon).dense() - rb) < 1e-14);
}

TEST_CASE("partial trace keeps unit trace") {
  std::mt19937 rng(11);
  const BasisSpec b(2, 2);
  const Operator rho = oracle::to_operator(b.space(), oracle::random_density(b.dim(), rng));
  for (const auto& keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {3}, {0, 2}, {1, 3}, {0, 1, 2}})
    CHECK(std::abs(partial_trace(rho, keep).trace() - 1.0) < 1e-12);
  CHECK_THROWS_AS(partial_trace(rho, std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(rho, std::vector<int>{4}), std::invalid_argument);
}

TEST_CASE("maximally mixed state reduces to maximally mixed") {
  const int n = 3;
  const BasisSpec b(2, n);
  const double d = b.dim();
  const Operator mixed = identity(b.space()) * cplx(1.0 / d);
  const Operator red = partial_trace(mixed, std::vector<int>{2, 3});
  CHECK(max_abs(red.dense() - CMat::Identity(2 * n, 2 * n) / (2.0 * n)) < 1e-15);
}

TEST_CASE("partial trace against explicit index sums") {
  std::mt19937 rng(3);
  const BasisSpec b(2, 2);
  const CMat rho = oracle::random_density(b.dim(), rng);
  const Operator op = oracle::to_operator(b.space(), rho);
  // keep the phonon of ion 2: factors (s1, n1, s2, n2) with dims (2, 2, 2, 2)
  CMat want = CMat::Zero(2, 2);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int n1 = 0; n1 < 2; ++n1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int a = 0; a < 2; ++a)
          for (int c = 0; c < 2; ++c) {
            const int base = ((s1 * 2 + n1) * 2 + s2) * 2;
            want(a, c) += rho(base + a, base + c);
          }
  CHECK(max_abs(partial_trace(op, std::vector<int>{3}).dense() - want) < 1e-15);
}

TEST_CASE("spin projection") {
  std::mt19937 rng(5);
  const int n = 3;
  const Space spin({Factor{1, FactorKind::spin, 2}});
  const Space fock({Factor{1, FactorKind::phonon, n}});
  const CMat rp = oracle::random_density(n, rng);
  CMat up = CMat::Zero(2, 2);
  up(1, 1) = 1;
  const Operator rho = tensor(oracle::to_operator(spin, up), oracle::to_operator(fock, rp));
  CHECK(max_abs(spin_project(rho, 1, Axis::z, +1).dense() - rp) < 1e-15);
  CHECK(max_abs(spin_project(rho, 1, Axis::z, -1).dense()) < 1e-15);

  const BasisSpec b(1, n);
  const Operator mixed = oracle::to_operator(b.space(), oracle::random_density(b.dim(), rng));
  for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
    const cplx total = spin_project(mixed, 1, ax, +1).trace() + spin_project(mixed, 1, ax, -1).trace();
    CHECK(std::abs(total - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(spin_project(mixed, 1, Axis::x, 0), std::invalid_argument);
  CHECK_THROWS_AS(spin_project(mixed, 2, Axis::x, 1), BasisMismatch);
}

TEST_CASE("expectation values of the number operator") {
  const int n = 2;
  const Space s = fock_space(n);
  const Operator num(s, (destroy(n).adjoint() * destroy(n)).matrix());
  CMat vac = CMat::Zero(n, n);
  vac(0, 0) = 1;
  CMat one = CMat::Zero(n, n);
  one(1, 1) = 1;
  CHECK(std::abs(expectation(oracle::to_operator(s, vac), num)) < 1e-15);
  CHECK(std::abs(expectation(oracle::to_operator(s, one), num) - 1.0) < 1e-15);
  CHECK(std::abs(expectation(oracle::to_operator(s, CMat::Identity(n, n) / 2.0), num) - 0.5) < 1e-15);
}

TEST_CASE("operators on different spaces do not combine") {
  const Operator a = identity(BasisSpec(1, 3).space());
  const Operator b = identity(BasisSpec(1, 4).space());
  CHECK_THROWS_AS(a + b, BasisMismatch);
  CHECK_THROWS_AS(a * b, BasisMismatch);
}

TEST_CASE("density matrix validation") {
  const BasisSpec b(1, 2);
  CHECK_THROWS_AS(DensityMatrix(identity(b.space())), std::invalid_argument);
  std::mt19937 rng(9);
  const DensityMatrix rho(oracle::to_operator(b.space(), oracle::random_density(b.dim(), rng)));
  CHECK(rho.min_eigenvalue() > 0);
  CHECK(hermiticity_defect(rho.matrix()) == 0.0);
}
