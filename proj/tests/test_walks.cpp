#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qdent/errors.hpp"
#include "qdent/walks.hpp"

using namespace qdent;
using doctest::Approx;

namespace {

StateVector ket(std::size_t coin, long long v, std::size_t n) {
  StateVector e = StateVector::Zero(static_cast<Eigen::Index>(2 * n));
  e[static_cast<Eigen::Index>(basis_index(coin, wrap_vertex(v, n), n))] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("hadamard coin") {
  const Operator h = hadamard_coin();
  CHECK((h * h).isApprox(Operator::Identity(2, 2), 1e-15));
  CHECK(unitarity_residual(h) < 1e-15);
  StateVector f(2);
  f << 1.0 + std::sqrt(2.0), 1.0;
  CHECK((h * f - f).norm() < 1e-14);
}

TEST_CASE("integer_shift") {
  const ShiftPermutation s3 = integer_shift(3);
  CHECK(s3(basis_index(kCoinR, 2, 3)) == basis_index(kCoinR, 0, 3));
  const ShiftPermutation s5 = integer_shift(5);
  CHECK(s5(basis_index(kCoinL, 0, 5)) == basis_index(kCoinL, 4, 5));
  CHECK(s5.coin_preserving());
  CHECK_THROWS_AS(integer_shift(1), ValidationError);
  CHECK_THROWS_AS(ShiftPermutation({0, 0, 1, 2}, 2, 2), ValidationError);
  CHECK_THROWS_AS(ShiftPermutation({0, 1, 2}, 2, 2), ValidationError);
}

TEST_CASE("coined_walk") {
  const Operator id2 = Operator::Identity(2, 2);
  const CoinedWalk perm = coined_walk(integer_shift(4), std::vector<Operator>(4, id2));
  CHECK(perm.unitary().isApprox(integer_shift(4).matrix()));
  CHECK(perm.space_homogeneous());

  const CoinedWalk had = coined_walk(integer_shift(5), std::vector<Operator>(5, hadamard_coin()));
  CHECK(had.unitary().isApprox(hadamard_walk(5).unitary(), 1e-15));

  std::vector<Operator> mixed(5, hadamard_coin());
  mixed[2] = id2;
  CHECK_FALSE(coined_walk(integer_shift(5), mixed).space_homogeneous());

  std::vector<Operator> nonunitary(5, id2);
  nonunitary[1] = 2.0 * id2;
  CHECK_THROWS_AS(coined_walk(integer_shift(5), nonunitary), ValidationError);
  CHECK_THROWS_AS(coined_walk(integer_shift(5), std::vector<Operator>(4, id2)), ValidationError);
  CHECK_THROWS_AS(coined_walk(integer_shift(5), std::vector<Operator>(5, Operator::Identity(3, 3))),
                  ValidationError);
}

TEST_CASE("hadamard walk action on every basis vector") {
  for (int n : {3, 5, 8}) {
    const auto nn = static_cast<std::size_t>(n);
    const Operator u = hadamard_walk(n).unitary();
    const double s = 1.0 / std::sqrt(2.0);
    for (long long v = 0; v < n; ++v) {
      const StateVector ur = u * ket(kCoinR, v, nn);
      const StateVector ul = u * ket(kCoinL, v, nn);
      CHECK((ur - s * (ket(kCoinR, v + 1, nn) + ket(kCoinL, v - 1, nn))).norm() < 1e-15);
      CHECK((ul - s * (ket(kCoinR, v + 1, nn) - ket(kCoinL, v - 1, nn))).norm() < 1e-15);
    }
  }
  CHECK_THROWS_AS(hadamard_walk(1), ValidationError);
}

TEST_CASE("one- and two-step transition probabilities") {
  const std::size_t n = 5;
  const Operator u = hadamard_walk(5).unitary();
  const Operator u2 = unitary_power(hadamard_walk(5), 2);
  for (std::size_t c : {kCoinR, kCoinL}) {
    for (long long v = 0; v < 5; ++v) {
      const auto col = static_cast<Eigen::Index>(basis_index(c, static_cast<std::size_t>(v), n));
      const auto at = [&](std::size_t c2, long long v2) {
        return static_cast<Eigen::Index>(basis_index(c2, wrap_vertex(v2, n), n));
      };
      CHECK(std::norm(u(at(kCoinR, v + 1), col)) == Approx(0.5));
      CHECK(std::norm(u(at(kCoinL, v - 1), col)) == Approx(0.5));

      const Eigen::VectorXd p2 = u2.col(col).cwiseAbs2();
      CHECK(p2[at(kCoinR, v)] == Approx(0.25));
      CHECK(p2[at(kCoinL, v)] == Approx(0.25));
      CHECK(p2[at(kCoinR, v + 2)] == Approx(0.25));
      CHECK(p2[at(kCoinL, v - 2)] == Approx(0.25));
      CHECK(p2.sum() == Approx(1.0));
      CHECK((p2.array() > 1e-15).count() == 4);
    }
  }
}

TEST_CASE("two-step coin identities") {
  const std::size_t n = 5;
  const Operator u2 = unitary_power(hadamard_walk(5), 2);
  for (long long v = 0; v < 5; ++v) {
    const StateVector sum = ket(kCoinR, v, n) + ket(kCoinL, v, n);
    const StateVector diff = ket(kCoinL, v, n) - ket(kCoinR, v, n);
    CHECK((u2 * sum - (ket(kCoinL, v, n) + ket(kCoinR, v + 2, n))).norm() < 1e-14);
    CHECK((u2 * diff - (ket(kCoinL, v - 2, n) - ket(kCoinR, v, n))).norm() < 1e-14);
  }
}

TEST_CASE("unitary_power") {
  const CoinedWalk w = hadamard_walk(5);
  CHECK(unitary_power(w, 1).isApprox(w.unitary()));

  // sigma = (0 1 2 3) on one coin and two vertices: period 4.
  const ShiftPermutation cyc({1, 2, 3, 0}, 1, 4);
  const CoinedWalk pw = coined_walk(cyc, std::vector<Operator>(4, Operator::Identity(1, 1)));
  CHECK(unitary_power(pw, 4).isApprox(Operator::Identity(4, 4)));
  CHECK_FALSE(unitary_power(pw, 2).isApprox(Operator::Identity(4, 4)));
  CHECK_THROWS_AS(unitary_power(w, 0), ValidationError);

  for (int m = 1; m <= 6; ++m) {
    const Eigen::MatrixXd a = unitary_power(w, m).cwiseAbs2();
    CHECK(a.colwise().sum().isOnes(1e-12));
  }
}

TEST_CASE("eigencheck") {
  for (int n : {3, 5, 7}) {
    const Complex lambda = eigencheck(hadamard_walk(n).unitary(), hadamard_eigenvector(n));
    CHECK(std::abs(lambda - 1.0) < 1e-12);
  }
  StateVector v(3);
  v << 1.0, Complex(0.0, 2.0), -1.0;
  CHECK(std::abs(eigencheck(Operator::Identity(3, 3), v) - 1.0) < 1e-15);

  StateVector e0 = StateVector::Zero(10);
  e0[0] = 1.0;
  CHECK_THROWS_AS(eigencheck(hadamard_walk(5).unitary(), e0), MismatchError);
  CHECK_THROWS_AS(eigencheck(Operator::Identity(3, 3), StateVector::Zero(3)), ValidationError);
}

TEST_CASE("constructed walks are unitary") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<Operator> coins;
    for (int v = 0; v < n; ++v) {
      const double t = ang(rng), a = ang(rng), b = ang(rng), g = ang(rng);
      Operator c(2, 2);
      c << std::polar(std::cos(t), a), std::polar(std::sin(t), b),
          -std::polar(std::sin(t), g - b), std::polar(std::cos(t), g - a);
      coins.push_back(c);
    }
    std::vector<std::size_t> sigma(static_cast<std::size_t>(2 * n));
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = i;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const CoinedWalk w = coined_walk(ShiftPermutation(sigma, 2, static_cast<std::size_t>(n)), coins);
    const Operator u = w.unitary();
    CHECK((u.adjoint() * u - Operator::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("coin-preserving shifts keep coin labels") {
  const ShiftPermutation s = integer_shift(6);
  for (std::size_t i = 0; i < s.dim(); ++i) CHECK(s(i) / 6 == i / 6);
  const ShiftPermutation swap({6, 7, 8, 9, 10, 11, 0, 1, 2, 3, 4, 5}, 2, 6);
  CHECK_FALSE(swap.coin_preserving());
}
