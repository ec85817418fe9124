#pragma once

// Shared builders for the Hadamard-walk scenarios used across tests.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "qdent/entropy.hpp"
#include "qdent/quantum.hpp"
#include "qdent/walks.hpp"

namespace qdent::testing {

inline StateVector unit(Eigen::Index dim, Eigen::Index i) {
  StateVector e = StateVector::Zero(dim);
  e[i] = 1.0;
  return e;
}

inline std::vector<StateVector> computational_basis(Eigen::Index dim) {
  std::vector<StateVector> b;
  for (Eigen::Index i = 0; i < dim; ++i) b.push_back(unit(dim, i));
  return b;
}

inline Instrument coherent_computational(std::size_t n) {
  return coherent_instrument(computational_basis(static_cast<Eigen::Index>(2 * n)));
}

inline Instrument rank2_position(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(2 * n);
  std::vector<Operator> proj;
  for (std::size_t v = 0; v < n; ++v) {
    Operator p = Operator::Zero(d, d);
    for (std::size_t c : {kCoinR, kCoinL}) {
      const auto i = static_cast<Eigen::Index>(basis_index(c, v, n));
      p(i, i) = 1.0;
    }
    proj.push_back(p);
  }
  return lvn_instrument(proj);
}

// C_v = {(R,v), (L,v)} over the 2N coherent outcomes.
inline Partition vertex_partition(std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t v = 0; v < n; ++v)
    blocks[v] = {basis_index(kCoinR, v, n), basis_index(kCoinL, v, n)};
  return Partition(2 * n, blocks);
}

inline Operator random_unitary(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g;
  Operator m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<Operator>(m).householderQ();
}

inline DensityState random_density(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g;
  Operator a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  Operator rho = a * a.adjoint();
  rho /= rho.trace();
  return make_density(rho);
}

// A rotated two-outcome LvN instrument, a coherent instrument in a random
// basis, or a non-projective pair Q sqrt(A), V sqrt(I - A) with 0 < A < I.
inline Instrument random_instrument(std::mt19937_64& rng, Eigen::Index d, int kind) {
  const Operator q = random_unitary(rng, d);
  if (kind == 0) {
    Operator p0 = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d / 2; ++i) p0 += q.col(i) * q.col(i).adjoint();
    return lvn_instrument({p0, Operator::Identity(d, d) - p0});
  }
  if (kind == 1) {
    std::vector<StateVector> basis;
    for (Eigen::Index i = 0; i < d; ++i) basis.push_back(q.col(i));
    return coherent_instrument(basis);
  }
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const Operator w = random_unitary(rng, d);
  Eigen::VectorXd lam(d);
  for (Eigen::Index i = 0; i < d; ++i) lam[i] = u(rng);
  const Operator sqrt_a = w * lam.cwiseSqrt().cast<Complex>().asDiagonal() * w.adjoint();
  const Operator sqrt_b =
      w * (Eigen::VectorXd::Ones(d) - lam).cwiseSqrt().cast<Complex>().asDiagonal() * w.adjoint();
  return Instrument({q * sqrt_a, random_unitary(rng, d) * sqrt_b}, {});
}

// Atomic for two outcomes, otherwise a random split into two non-empty blocks.
inline Partition random_partition(std::mt19937_64& rng, std::size_t outcomes) {
  if (outcomes <= 2) return Partition::atomic(outcomes);
  std::vector<std::vector<std::size_t>> blocks(2);
  blocks[0].push_back(0);
  blocks[1].push_back(1);
  for (std::size_t i = 2; i < outcomes; ++i) blocks[rng() % 2].push_back(i);
  return Partition(outcomes, blocks);
}

}  // namespace qdent::testing
