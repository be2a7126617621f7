#include <doctest.h>

#include <random>

#include "livsic/examples.hpp"
#include "support/random_systems.hpp"

using namespace livsic;

namespace {
std::mt19937_64 rng(911003);
}

TEST_SUITE_BEGIN("operator_core");

TEST_CASE("mobius evaluations") {
  CHECK(std::abs(mobius_b(kI)) < 1e-15);
  // b(-1/3) = -4/5 + 3i/5 and b(1/3) is its conjugate
  CHECK(std::abs(mobius_b_inv(Complex(-0.8, 0.6)) + Complex(1.0 / 3.0)) < 1e-14);
  CHECK(std::abs(mobius_b_inv(Complex(-0.8, -0.6)) - Complex(1.0 / 3.0)) < 1e-14);
  // b(-1) = i
  CHECK(std::abs(mobius_b(-1.0) - kI) < 1e-15);
  MobiusMap bw{MobiusKind::b_w, Complex(0.3, 1.2)};
  CHECK(std::abs(mobius_eval(bw, bw.w)) < 1e-15);
  CHECK_THROWS_WITH_AS(mobius_b(Complex(0, -1)), doctest::Contains("pole"), Error);
}

TEST_CASE("b_w and its dagger multiply to 1 off the poles") {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  MobiusMap bw{MobiusKind::b_w, Complex(0.4, -1.3)};
  MobiusMap bwd{MobiusKind::b_w_dagger, Complex(0.4, -1.3)};
  for (int k = 0; k < 20; ++k) {
    Complex z(u(rng), u(rng));
    if (std::abs(z - bw.pole()) < 0.1 || std::abs(z - bwd.pole()) < 0.1) continue;
    CHECK(std::abs(mobius_eval(bw, z) * mobius_eval(bwd, z) - 1.0) < 1e-13);
  }
}

TEST_CASE("b and b^-1 compose to the identity on random points") {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    Complex z(u(rng), u(rng));
    if (std::abs(z + kI) < 0.1) continue;
    CHECK(std::abs(mobius_b_inv(mobius_b(z)) - z) < 1e-12 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("deficiency data of the 2x2 example") {
  PartialIsometrySystem sys = deficiency_data(examples::fdeg_v());
  REQUIRE(sys.index() == 1);
  Matrix e1 = Matrix::Zero(2, 1), e2 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  e2(1, 0) = 1.0;
  CHECK(subspace_distance(sys.ker_basis, e2) < 1e-12);
  CHECK(subspace_distance(sys.coker_basis, e1) < 1e-12);
  CHECK(sys.simple);
}

TEST_CASE("unitary input has indices (0,0) and is flagged not simple") {
  PartialIsometrySystem sys = deficiency_data(testing::random_unitary(rng, 3));
  CHECK(sys.index() == 0);
  CHECK(!sys.simple);
}

TEST_CASE("kernel of the second example via brute rank computation") {
  Matrix w = examples::fdeg2_w();
  PartialIsometrySystem sys = deficiency_data(w);
  REQUIRE(sys.index() == 1);
  Matrix expected_ker(3, 1), e3 = Matrix::Zero(3, 1);
  expected_ker << 0.0, 0.8, -0.6;
  e3(2, 0) = 1.0;
  CHECK(subspace_distance(sys.ker_basis, expected_ker) < 1e-12);
  CHECK(subspace_distance(sys.coker_basis, e3) < 1e-12);
  // brute-force oracle: solve V*V x = 0
  Matrix vv = w.adjoint() * w;
  CHECK(subspace_distance(nullspace(vv), sys.ker_basis) < 1e-10);
}

TEST_CASE("non-partial-isometry rejected with the projection residual") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.5;
  CHECK_THROWS_WITH_AS(deficiency_data(m), doctest::Contains("V*V"), Error);
}

TEST_CASE("defect vectors of the 2x2 example span {(z-i, z+i)}") {
  PartialIsometrySystem sys = deficiency_data(examples::fdeg_v());
  for (Complex z : {Complex(0.3, 0.9), Complex(-1.2, 2.0), Complex(0.5, -0.7)}) {
    Matrix expected(2, 1);
    expected << z - kI, z + kI;
    CHECK(subspace_distance(defect_vector(sys, z), expected) < 1e-10);
  }
  CHECK(subspace_distance(defect_vector(sys, kI), sys.ker_basis) < 1e-12);
}

TEST_CASE("defect space is orthogonal to ran(B - conj z)") {
  PartialIsometrySystem sys = deficiency_data(examples::fdeg2_w());
  Complex z(0.0, 2.0);
  Matrix d = defect_vector(sys, z);
  REQUIRE(d.cols() == 1);
  Matrix range = sys.range_basis(std::conj(z));
  CHECK((range.adjoint() * d).norm() < 1e-9);
}

TEST_CASE("domain invariant: <(B - z) f, defect(conj z)> = 0") {
  PartialIsometrySystem sys = testing::random_system(rng, 5, 1);
  for (Complex z : {Complex(0.7, 1.1), Complex(-0.4, -0.8)}) {
    Matrix d = defect_vector(sys, std::conj(z));
    for (Eigen::Index c = 0; c < sys.dom_basis.cols(); ++c) {
      Vector f = sys.dom_basis.col(c);
      Vector bf = sys.apply_b_op(f);
      CHECK((d.adjoint() * Vector(bf - z * f)).norm() < 1e-9);
    }
  }
}

TEST_CASE("verify_extension accepts the worked pair and rejects perturbations") {
  PartialIsometrySystem sys = deficiency_data(examples::fdeg_v());
  CHECK(verify_extension(examples::fdeg_u(), sys));
  Matrix u = examples::fdeg_u();
  u(0, 1) += 1e-3;
  CHECK_THROWS_AS(verify_extension(u, sys), Error);  // no longer unitary
  // unitary but not an extension: swap the extension action
  Matrix w = examples::fdeg_u();
  w.col(0).swap(w.col(1));
  CHECK(!verify_extension(w, sys));
}

TEST_CASE("a unitary is a (trivial) extension of itself as a partial isometry") {
  Matrix q = testing::random_unitary(rng, 3);
  PartialIsometrySystem sys = deficiency_data(q);
  CHECK(verify_extension(q, sys));
}

TEST_CASE("canonical extension structure for the 2x2 example") {
  PartialIsometrySystem sys = deficiency_data(examples::fdeg_v());
  Complex u0 = std::polar(1.0, 0.77);
  // align frames with the standard basis vectors for an exact comparison
  DeficiencyFrame frame;
  frame.j = Matrix::Zero(2, 1);
  frame.j(0, 0) = 1.0;
  frame.ji = Matrix::Zero(2, 1);
  frame.ji(1, 0) = 1.0;
  Matrix param(1, 1);
  param(0, 0) = u0;
  Matrix u = canonical_extension(sys, frame, param);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 1) = u0;
  expected(1, 0) = 1.0;
  CHECK((u - expected).norm() < 1e-14);
}

TEST_CASE("fdeg2: parameter sending ker W to -i e3 reproduces X") {
  Matrix w = examples::fdeg2_w();
  PartialIsometrySystem sys = deficiency_data(w);
  // X - W must be rank one from ker W to ran(W)^perp
  Matrix x = examples::fdeg2_x();
  Matrix diff = x - w;
  CHECK(rank(diff) == 1);
  CHECK((diff * sys.kerperp_basis).norm() < 1e-14);
  // the parameter is fixed by the action on the kernel basis
  Vector k = sys.ker_basis.col(0);
  Vector image = x * k;
  Complex u0 = (sys.coker_basis.col(0).adjoint() * image)(0, 0);
  Matrix param(1, 1);
  param(0, 0) = u0;
  Matrix rebuilt = canonical_extension(
      sys, DeficiencyFrame{sys.coker_basis, sys.ker_basis}, param);
  CHECK((rebuilt - x).norm() < 1e-13);
}

TEST_CASE("canonical extensions are unitary and verified for random parameters") {
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Index idx = 1 + (trial % 2);
    PartialIsometrySystem sys = testing::random_system(rng, 4 + (trial % 3), idx);
    Matrix u = canonical_extension(sys, testing::random_unitary(rng, idx));
    CHECK((u.adjoint() * u - identity(sys.dim())).norm() <= 1e-10);
    CHECK(verify_extension(u, sys));
  }
}

TEST_CASE("canonical extension with parameter 1 restricts to V on ker(V)^perp") {
  PartialIsometrySystem sys = testing::random_system(rng, 5, 2);
  Matrix u = canonical_extension(sys, identity(2));
  CHECK((u * sys.kerperp_basis - sys.v * sys.kerperp_basis).norm() < 1e-13);
}

TEST_SUITE_END();
