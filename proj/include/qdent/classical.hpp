#pragma once

// Classical baselines: Markov chains on finite state sets and deterministic
// finite maps.
//
// Transition matrices are COLUMN-stochastic: entry (x, y) is the probability
// of moving from source state y to target state x, so a distribution evolves
// as mu' = P mu. Most libraries use the row convention; this one does not.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qdent/entropy.hpp"

namespace qdent {

class TransitionMatrix {
 public:
  explicit TransitionMatrix(Eigen::MatrixXd entries);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// p_{x,y}: probability of target x given source y.
  double operator()(std::size_t x, std::size_t y) const {
    return entries_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& mu) const { return entries_ * mu; }

 private:
  Eigen::MatrixXd entries_;
};

/// f on {0, ..., size-1}; image[i] = f(i).
class FiniteMap {
 public:
  explicit FiniteMap(std::vector<std::size_t> image);

  std::size_t size() const { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_[i]; }
  const std::vector<std::size_t>& image() const { return image_; }

 private:
  std::vector<std::size_t> image_;
};

/// Unbiased random walk on the N-cycle: p_{v+1,v} = p_{v-1,v} = 1/2.
TransitionMatrix cycle_walk(int n);

TransitionMatrix matrix_power(const TransitionMatrix& p, int m);

struct StationaryOptions {
  int max_iterations = 100000;
  double residual_tol = 1e-12;
};

/// P-invariant distribution. Power iteration from the uniform vector; periodic
/// chains are handled by averaging consecutive iterates, and an eigen-solve is
/// the last resort.
ProbVector stationary_distribution(const TransitionMatrix& p, const StationaryOptions& opts = {});

/// H(P) relative to mu: sum_y mu_y sum_x eta(p_{x,y}).
double markov_entropy(const TransitionMatrix& p, const ProbVector& mu);

/// direct_sequence[n] = H(X_{n+1} | X_n) for the chain started at mu0, i.e.
/// markov_entropy(P, P^n mu0). Stops early once converged.
ConvergenceReport entropy_rate(const TransitionMatrix& p, const ProbVector& mu0, int n_max,
                               double tol, int window = 3);

/// (1/n) H_mu(C v f^{-1}C v ... v f^{-(n-1)}C), with exact pullbacks.
double ks_estimate(const FiniteMap& f, const ProbVector& mu, const Partition& c, int n);

inline constexpr std::size_t kDefaultPathBudget = 10'000'000;

/// H(X_0, ..., X_n) by enumerating every path with nonzero probability.
/// Throws ResourceError once more than `path_budget` paths would be visited.
double process_joint_entropy(const TransitionMatrix& p, const ProbVector& mu0, int n,
                             std::size_t path_budget = kDefaultPathBudget);

}  // namespace qdent
