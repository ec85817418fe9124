#pragma once

// Coined unitary quantum random walks U = S (sum_v U_v (x) |v><v|).
//
// Basis ordering is coin-major: |c, v> has index c * N + v, with R = 0 and
// L = 1 for two-state coins. Every module uses this layout.

#include <cstddef>
#include <vector>

#include "qdent/quantum.hpp"

namespace qdent {

inline constexpr std::size_t kCoinR = 0;
inline constexpr std::size_t kCoinL = 1;

/// Index of |c, v> in a space with `vertex_count` vertices.
inline std::size_t basis_index(std::size_t coin, std::size_t vertex, std::size_t vertex_count) {
  return coin * vertex_count + vertex;
}

/// Nonnegative remainder of v mod n.
inline std::size_t wrap_vertex(long long v, std::size_t n) {
  const auto m = static_cast<long long>(n);
  return static_cast<std::size_t>(((v % m) + m) % m);
}

/// Permutation sigma of the coin-position basis; S|i> = |sigma(i)>.
class ShiftPermutation {
 public:
  ShiftPermutation(std::vector<std::size_t> sigma, std::size_t coin_count, std::size_t vertex_count);

  std::size_t coin_count() const { return coin_count_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t dim() const { return sigma_.size(); }
  const std::vector<std::size_t>& sigma() const { return sigma_; }
  std::size_t operator()(std::size_t i) const { return sigma_[i]; }

  /// True iff sigma never changes the coin component.
  bool coin_preserving() const;
  Operator matrix() const;

 private:
  std::vector<std::size_t> sigma_;
  std::size_t coin_count_;
  std::size_t vertex_count_;
};

class CoinedWalk {
 public:
  CoinedWalk(ShiftPermutation shift, std::vector<Operator> coins);

  const Operator& unitary() const { return unitary_; }
  const ShiftPermutation& shift() const { return shift_; }
  const std::vector<Operator>& coins() const { return coins_; }
  std::size_t dim() const { return shift_.dim(); }
  std::size_t vertex_count() const { return shift_.vertex_count(); }
  bool coin_preserving() const { return coin_preserving_; }
  bool space_homogeneous() const { return space_homogeneous_; }

 private:
  ShiftPermutation shift_;
  std::vector<Operator> coins_;
  Operator unitary_;
  bool coin_preserving_ = false;
  bool space_homogeneous_ = false;
};

/// max |U^dagger U - 1| entrywise.
double unitarity_residual(const Operator& u);

/// (1/sqrt 2) [[1, 1], [1, -1]].
Operator hadamard_coin();

/// (R, n) -> (R, n+1), (L, n) -> (L, n-1), mod N.
ShiftPermutation integer_shift(int n);

CoinedWalk coined_walk(ShiftPermutation shift, std::vector<Operator> coins);

/// Hadamard coin at every vertex of the N-cycle with the integer shift.
CoinedWalk hadamard_walk(int n);

/// U^m by repeated multiplication. NumericError if unitarity drifts past 1e-8.
Operator unitary_power(const CoinedWalk& w, int m);
Operator unitary_power(const Operator& u, int m);

/// Eigenvalue of `u` for eigenvector `v`; MismatchError if u v != lambda v.
Complex eigencheck(const Operator& u, const StateVector& v);

/// ((1+sqrt 2)|R> + |L>) (x) sum_v |v>, normalized. Fixed by the Hadamard walk.
StateVector hadamard_eigenvector(int n);

}  // namespace qdent
