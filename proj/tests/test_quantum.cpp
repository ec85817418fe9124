#include <doctest.h>

#include <cmath>
#include <random>

#include "qdent/errors.hpp"
#include "qdent/quantum.hpp"
#include "qdent/walks.hpp"

#include "fixtures.hpp"

using namespace qdent;
using doctest::Approx;
using namespace qdent::testing;

TEST_CASE("make_density") {
  CHECK_NOTHROW(make_density(Operator::Identity(3, 3) / 3.0));
  Operator nonherm = Operator::Zero(2, 2);
  nonherm(0, 0) = 1.0;
  nonherm(0, 1) = 0.3;
  CHECK_THROWS_AS(make_density(nonherm), ValidationError);
  CHECK_THROWS_AS(make_density(Operator::Identity(2, 2)), ValidationError);
  Operator neg = Operator::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(make_density(neg), ValidationError);
}

TEST_CASE("maximally_mixed") {
  const DensityState r2 = maximally_mixed(2);
  CHECK(r2.op()(0, 0).real() == 0.5);
  CHECK(r2.op()(0, 1) == Complex(0.0));
  CHECK(maximally_mixed(1).op()(0, 0) == Complex(1.0));
  CHECK(maximally_mixed(10).op().isApprox(Operator::Identity(10, 10) / 10.0));
  CHECK_THROWS_AS(maximally_mixed(0), ValidationError);
}

TEST_CASE("pure_state") {
  const DensityState e0 = pure_state(unit(3, 0));
  CHECK(e0.op()(0, 0) == Complex(1.0));
  CHECK(std::abs(e0.op()(1, 1)) == 0.0);

  StateVector v(2);
  v << Complex(1.0, 1.0), Complex(0.5, 0.0);
  CHECK(pure_state(2.0 * v).op().isApprox(pure_state(v).op(), 1e-14));
  CHECK_THROWS_AS(pure_state(StateVector::Zero(3)), ValidationError);

  SUBCASE("walk eigenvector diagonal") {
    const int n = 5;
    const DensityState rho = pure_state(hadamard_eigenvector(n));
    const double denom = n * (4.0 + 2.0 * std::sqrt(2.0));
    for (std::size_t vtx = 0; vtx < 5; ++vtx) {
      const auto r = static_cast<Eigen::Index>(basis_index(kCoinR, vtx, 5));
      const auto l = static_cast<Eigen::Index>(basis_index(kCoinL, vtx, 5));
      CHECK(rho.op()(r, r).real() == Approx((3.0 + 2.0 * std::sqrt(2.0)) / denom).epsilon(1e-14));
      CHECK(rho.op()(l, l).real() == Approx(1.0 / denom).epsilon(1e-14));
    }
  }
}

TEST_CASE("lvn_instrument") {
  const Operator p0 = pure_state(unit(2, 0)).op();
  const Operator p1 = pure_state(unit(2, 1)).op();
  CHECK(lvn_instrument({p0, p1}).kind() == InstrumentKind::coherent_states);

  const Instrument v = rank2_position(5);
  CHECK(v.kind() == InstrumentKind::luders_von_neumann);
  CHECK(v.outcome_count() == 5);

  StateVector plus(2);
  plus << 1.0, 1.0;
  CHECK_THROWS_AS(lvn_instrument({p0, pure_state(plus).op()}), ValidationError);
  CHECK_THROWS_AS(lvn_instrument({p0}), ValidationError);
  CHECK_THROWS_AS(lvn_instrument({0.5 * Operator::Identity(2, 2), 0.5 * Operator::Identity(2, 2)}),
                  ValidationError);
}

TEST_CASE("coherent_instrument") {
  const auto basis = computational_basis(10);
  const Instrument t = coherent_instrument(basis);
  CHECK(t.kind() == InstrumentKind::coherent_states);
  CHECK(t.outcome_count() == 10);

  StateVector a(2), b(2);
  a << 1.0, 1.0;
  b << 1.0, -1.0;
  a /= std::sqrt(2.0);
  b /= std::sqrt(2.0);
  const std::vector<StateVector> hb{a, b};
  CHECK_NOTHROW(coherent_instrument(hb));
  const std::vector<StateVector> repeated{a, a};
  CHECK_THROWS_AS(coherent_instrument(repeated), ValidationError);
}

TEST_CASE("general instrument validation") {
  CHECK_THROWS_AS(Instrument({Operator::Identity(2, 2), Operator::Identity(2, 2)}, {}), ValidationError);
  CHECK_THROWS_AS(Instrument({Operator::Identity(2, 2)}, {"a", "b"}), ValidationError);
  CHECK_THROWS_AS(Instrument({}, {}), ValidationError);
}

TEST_CASE("apply_instrument") {
  const Instrument t = coherent_instrument(computational_basis(10));
  const DensityState rho = maximally_mixed(10);
  const std::size_t e[] = {3};
  const Operator img = apply_instrument(t, e, rho.op());
  CHECK(trace(img) == Approx(0.1));
  CHECK(img(3, 3).real() == Approx(0.1));
  CHECK(apply_instrument(t, std::span<const std::size_t>{}, rho.op()).isZero());

  CHECK(trace(apply_instrument(rank2_position(5), std::vector<std::size_t>{0, 1, 2, 3, 4}, rho.op())) ==
        Approx(1.0));
  const std::size_t bad[] = {10};
  CHECK_THROWS_AS(apply_instrument(t, bad, rho.op()), ValidationError);
}

TEST_CASE("outcome_pmf") {
  const auto basis = computational_basis(10);
  const ProbVector u = outcome_pmf(coherent_instrument(basis), maximally_mixed(10));
  for (double x : u.entries()) CHECK(x == Approx(0.1));

  const ProbVector pv = outcome_pmf(rank2_position(5), maximally_mixed(10));
  for (double x : pv.entries()) CHECK(x == Approx(0.2).epsilon(1e-15));

  const ProbVector pe = outcome_pmf(coherent_instrument(basis), pure_state(hadamard_eigenvector(5)));
  const double denom = 5 * (4.0 + 2.0 * std::sqrt(2.0));
  CHECK(pe[basis_index(kCoinR, 2, 5)] == Approx((3.0 + 2.0 * std::sqrt(2.0)) / denom).epsilon(1e-14));
  CHECK(pe[basis_index(kCoinL, 2, 5)] == Approx(1.0 / denom).epsilon(1e-14));

  CHECK_THROWS_AS(outcome_pmf(coherent_instrument(basis), maximally_mixed(4)), ValidationError);
}

TEST_CASE("instrument properties on random instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const Instrument t = random_instrument(rng, d, trial % 3);
    const DensityState rho = random_density(rng, d);

    std::vector<std::size_t> all(t.outcome_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CHECK(std::abs(trace(apply_instrument(t, all, rho.op())) - 1.0) < 1e-10);

    const ProbVector pmf = outcome_pmf(t, rho);
    double pmf_sum = 0.0;
    for (double x : pmf.entries()) pmf_sum += x;
    CHECK(std::abs(pmf_sum - 1.0) < 1e-10);

    for (std::size_t i = 0; i < t.outcome_count(); ++i) {
      const std::size_t one[] = {i};
      const Operator img = apply_instrument(t, one, rho.op());
      CHECK(min_eigenvalue(img) >= -1e-9);
      CHECK(t.outcome_weight(i, rho.op()) == Approx(trace(img)).epsilon(1e-12));
      if (t.kind() != InstrumentKind::general) {
        const Operator twice = apply_instrument(t, one, img);
        CHECK((twice - img).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}
