#include "qdent/walks.hpp"

#include <cmath>
#include <sstream>

#include "qdent/errors.hpp"

namespace qdent {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kPowerTol = 1e-8;
constexpr double kEigenTol = 1e-8;
constexpr double kCoinEqualTol = 1e-12;

}  // namespace

double unitarity_residual(const Operator& u) {
  const auto d = u.rows();
  return (u.adjoint() * u - Operator::Identity(d, d)).cwiseAbs().maxCoeff();
}

ShiftPermutation::ShiftPermutation(std::vector<std::size_t> sigma, std::size_t coin_count,
                                   std::size_t vertex_count)
    : sigma_(std::move(sigma)), coin_count_(coin_count), vertex_count_(vertex_count) {
  if (coin_count == 0 || vertex_count == 0)
    throw ValidationError("ShiftPermutation: coin and vertex counts must be positive");
  if (sigma_.size() != coin_count * vertex_count) {
    std::ostringstream msg;
    msg << "ShiftPermutation: " << sigma_.size() << " images for " << coin_count * vertex_count
        << " basis states";
    throw ValidationError(msg.str());
  }
  std::vector<bool> hit(sigma_.size(), false);
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (sigma_[i] >= sigma_.size() || hit[sigma_[i]]) {
      std::ostringstream msg;
      msg << "ShiftPermutation: not a bijection (image of " << i << " is " << sigma_[i] << ")";
      throw ValidationError(msg.str());
    }
    hit[sigma_[i]] = true;
  }
}

bool ShiftPermutation::coin_preserving() const {
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (i / vertex_count_ != sigma_[i] / vertex_count_) return false;
  }
  return true;
}

Operator ShiftPermutation::matrix() const {
  const auto d = static_cast<Eigen::Index>(dim());
  Operator s = Operator::Zero(d, d);
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    s(static_cast<Eigen::Index>(sigma_[i]), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return s;
}

CoinedWalk::CoinedWalk(ShiftPermutation shift, std::vector<Operator> coins)
    : shift_(std::move(shift)), coins_(std::move(coins)) {
  const std::size_t nc = shift_.coin_count();
  const std::size_t nv = shift_.vertex_count();
  if (coins_.size() != nv) {
    std::ostringstream msg;
    msg << "coined_walk: " << coins_.size() << " coins for " << nv << " vertices";
    throw ValidationError(msg.str());
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const Operator& c = coins_[v];
    if (static_cast<std::size_t>(c.rows()) != nc || static_cast<std::size_t>(c.cols()) != nc) {
      std::ostringstream msg;
      msg << "coined_walk: coin at vertex " << v << " is " << c.rows() << "x" << c.cols()
          << ", expected " << nc << "x" << nc;
      throw ValidationError(msg.str());
    }
    if (const double r = unitarity_residual(c); r > kUnitaryTol) {
      std::ostringstream msg;
      msg << "coined_walk: coin at vertex " << v << " is not unitary (residual " << r << ")";
      throw ValidationError(msg.str());
    }
  }

  // Block-diagonal coin operator sum_v U_v (x) |v><v| in coin-major order.
  const auto d = static_cast<Eigen::Index>(shift_.dim());
  Operator coin_op = Operator::Zero(d, d);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t a = 0; a < nc; ++a) {
      for (std::size_t b = 0; b < nc; ++b) {
        coin_op(static_cast<Eigen::Index>(basis_index(a, v, nv)),
                static_cast<Eigen::Index>(basis_index(b, v, nv))) =
            coins_[v](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  unitary_ = shift_.matrix() * coin_op;
  if (const double r = unitarity_residual(unitary_); r > kUnitaryTol) {
    std::ostringstream msg;
    msg << "coined_walk: assembled operator is not unitary (residual " << r << ")";
    throw ValidationError(msg.str());
  }

  coin_preserving_ = shift_.coin_preserving();
  space_homogeneous_ = true;
  for (std::size_t v = 1; v < nv; ++v) {
    if ((coins_[v] - coins_[0]).cwiseAbs().maxCoeff() > kCoinEqualTol) {
      space_homogeneous_ = false;
      break;
    }
  }
}

Operator hadamard_coin() {
  const double s = 1.0 / std::sqrt(2.0);
  Operator h(2, 2);
  h << s, s, s, -s;
  return h;
}

ShiftPermutation integer_shift(int n) {
  if (n < 2) throw ValidationError("integer_shift: N must be at least 2");
  const auto nv = static_cast<std::size_t>(n);
  std::vector<std::size_t> sigma(2 * nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto iv = static_cast<long long>(v);
    sigma[basis_index(kCoinR, v, nv)] = basis_index(kCoinR, wrap_vertex(iv + 1, nv), nv);
    sigma[basis_index(kCoinL, v, nv)] = basis_index(kCoinL, wrap_vertex(iv - 1, nv), nv);
  }
  return ShiftPermutation(std::move(sigma), 2, nv);
}

CoinedWalk coined_walk(ShiftPermutation shift, std::vector<Operator> coins) {
  return CoinedWalk(std::move(shift), std::move(coins));
}

CoinedWalk hadamard_walk(int n) {
  ShiftPermutation s = integer_shift(n);
  return coined_walk(std::move(s), std::vector<Operator>(static_cast<std::size_t>(n), hadamard_coin()));
}

Operator unitary_power(const Operator& u, int m) {
  if (m < 1) throw ValidationError("unitary_power: exponent must be at least 1");
  Operator out = u;
  for (int k = 1; k < m; ++k) out = u * out;
  if (const double r = unitarity_residual(out); r > kPowerTol) {
    std::ostringstream msg;
    msg << "unitary_power: U^" << m << " unitarity residual " << r;
    throw NumericError(msg.str());
  }
  return out;
}

Operator unitary_power(const CoinedWalk& w, int m) { return unitary_power(w.unitary(), m); }

Complex eigencheck(const Operator& u, const StateVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw ValidationError("eigencheck: zero vector");
  if (u.cols() != v.size()) throw ValidationError("eigencheck: dimension mismatch");
  const StateVector uv = u * v;
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const Complex lambda = uv[k] / v[k];
  const double r = (uv - lambda * v).norm() / norm;
  if (r > kEigenTol) {
    std::ostringstream msg;
    msg << "eigencheck: not an eigenvector (relative residual " << r << ")";
    throw MismatchError(msg.str());
  }
  return lambda;
}

StateVector hadamard_eigenvector(int n) {
  if (n < 2) throw ValidationError("hadamard_eigenvector: N must be at least 2");
  const auto nv = static_cast<std::size_t>(n);
  const double scale = 1.0 / std::sqrt(n * (4.0 + 2.0 * std::sqrt(2.0)));
  StateVector x(static_cast<Eigen::Index>(2 * nv));
  for (std::size_t v = 0; v < nv; ++v) {
    x[static_cast<Eigen::Index>(basis_index(kCoinR, v, nv))] = (1.0 + std::sqrt(2.0)) * scale;
    x[static_cast<Eigen::Index>(basis_index(kCoinL, v, nv))] = scale;
  }
  return x;
}

}  // namespace qdent
