#include "qdent/classical.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qdent/errors.hpp"

namespace qdent {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw ValidationError("TransitionMatrix: must be square and non-empty");
  for (Eigen::Index y = 0; y < entries_.cols(); ++y) {
    double sum = 0.0;
    for (Eigen::Index x = 0; x < entries_.rows(); ++x) {
      const double p = entries_(x, y);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "TransitionMatrix: entry (" << x << "," << y << ") = " << p << " outside [0,1]";
        throw ValidationError(msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kFreshSumTol) {
      std::ostringstream msg;
      msg << "TransitionMatrix: column " << y << " sums to " << sum;
      throw ValidationError(msg.str());
    }
  }
}

FiniteMap::FiniteMap(std::vector<std::size_t> image) : image_(std::move(image)) {
  if (image_.empty()) throw ValidationError("FiniteMap: empty state set");
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (image_[i] >= image_.size()) {
      std::ostringstream msg;
      msg << "FiniteMap: image of " << i << " is " << image_[i] << ", not a state";
      throw ValidationError(msg.str());
    }
  }
}

TransitionMatrix cycle_walk(int n) {
  if (n < 3) throw ValidationError("cycle_walk: N must be at least 3");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    p((v + 1) % n, v) = 0.5;
    p((v + n - 1) % n, v) = 0.5;
  }
  return TransitionMatrix(std::move(p));
}

TransitionMatrix matrix_power(const TransitionMatrix& p, int m) {
  if (m < 1) throw ValidationError("matrix_power: exponent must be at least 1");
  Eigen::MatrixXd out = p.entries();
  for (int k = 1; k < m; ++k) out = p.entries() * out;
  // Clamp rounding so the result re-validates.
  out = out.cwiseMax(0.0).cwiseMin(1.0);
  return TransitionMatrix(std::move(out));
}

namespace {

double residual(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu) {
  return (p * mu - mu).lpNorm<Eigen::Infinity>();
}

ProbVector to_prob(Eigen::VectorXd mu) {
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();
  return ProbVector(std::vector<double>(mu.data(), mu.data() + mu.size()), kDerivedSumTol);
}

}  // namespace

ProbVector stationary_distribution(const TransitionMatrix& p, const StationaryOptions& opts) {
  const Eigen::MatrixXd& m = p.entries();
  const auto n = m.rows();
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (residual(m, mu) < opts.residual_tol) return to_prob(mu);
    Eigen::VectorXd next = m * mu;
    // A periodic chain oscillates between iterates; their mean is invariant
    // in the limit.
    Eigen::VectorXd avg = 0.5 * (mu + next);
    if (residual(m, avg) < opts.residual_tol) return to_prob(avg);
    mu = std::move(next);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() == Eigen::Success) {
    Eigen::Index best = 0;
    double gap = std::abs(es.eigenvalues()[0] - 1.0);
    for (Eigen::Index i = 1; i < n; ++i) {
      const double g = std::abs(es.eigenvalues()[i] - 1.0);
      if (g < gap) {
        gap = g;
        best = i;
      }
    }
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    if (v.sum() > 0 && v.minCoeff() > -1e-12) {
      v = v.cwiseMax(0.0) / v.cwiseMax(0.0).sum();
      if (residual(m, v) < 1e-10) return to_prob(v);
    }
  }
  std::ostringstream msg;
  msg << "stationary_distribution: no convergence after " << opts.max_iterations
      << " iterations, residual " << residual(m, mu);
  throw NumericError(msg.str());
}

double markov_entropy(const TransitionMatrix& p, const ProbVector& mu) {
  if (mu.size() != p.size()) throw ValidationError("markov_entropy: dimension mismatch");
  double h = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (mu[y] == 0.0) continue;
    double col = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) col += eta(p(x, y));
    h += mu[y] * col;
  }
  return h;
}

ConvergenceReport entropy_rate(const TransitionMatrix& p, const ProbVector& mu0, int n_max,
                               double tol, int window) {
  if (mu0.size() != p.size()) throw ValidationError("entropy_rate: dimension mismatch");
  if (n_max < 0) throw ValidationError("entropy_rate: n_max must be nonnegative");

  // Column entropies are fixed; only the source distribution moves.
  Eigen::VectorXd col_entropy(static_cast<Eigen::Index>(p.size()));
  for (std::size_t y = 0; y < p.size(); ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) col += eta(p(x, y));
    col_entropy[static_cast<Eigen::Index>(y)] = col;
  }

  Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mu0.entries().data(),
                                                         static_cast<Eigen::Index>(mu0.size()));
  std::vector<double> seq;
  ConvergenceReport report;
  for (int n = 0; n <= n_max; ++n) {
    seq.push_back(col_entropy.dot(mu));
    report = limit_estimate(seq, tol, window);
    if (report.converged) break;
    mu = p.apply(mu);
  }
  return report;
}

double ks_estimate(const FiniteMap& f, const ProbVector& mu, const Partition& c, int n) {
  if (n < 1) throw ValidationError("ks_estimate: n must be at least 1");
  if (mu.size() != f.size() || c.outcome_count() != f.size())
    throw ValidationError("ks_estimate: map, measure and partition disagree on the state count");

  // f^{-k}(C) assigns state i to the block of f^k(i).
  std::vector<Partition> pullbacks;
  pullbacks.reserve(static_cast<std::size_t>(n));
  std::vector<std::size_t> iterate(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) iterate[i] = i;
  for (int k = 0; k < n; ++k) {
    std::vector<std::vector<std::size_t>> blocks(c.block_count());
    for (std::size_t i = 0; i < f.size(); ++i) blocks[c.block_of(iterate[i])].push_back(i);
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    pullbacks.emplace_back(f.size(), std::move(blocks));
    for (auto& s : iterate) s = f(s);
  }
  return entropy(join(pullbacks), mu) / static_cast<double>(n);
}

double process_joint_entropy(const TransitionMatrix& p, const ProbVector& mu0, int n,
                             std::size_t path_budget) {
  if (mu0.size() != p.size()) throw ValidationError("process_joint_entropy: dimension mismatch");
  if (n < 0) throw ValidationError("process_joint_entropy: n must be nonnegative");

  // Sparse successor lists; zero transitions are never expanded.
  std::vector<std::vector<std::pair<std::size_t, double>>> next(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) {
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (p(x, y) > 0.0) next[y].emplace_back(x, p(x, y));
    }
  }

  std::size_t visited = 0;
  double h = 0.0;
  auto over_budget = [&] {
    std::ostringstream msg;
    msg << "process_joint_entropy: more than " << path_budget << " weighted paths at n = " << n;
    return ResourceError(msg.str());
  };
  // Depth-first with an explicit stack; the reduction order is fixed by the
  // state order, so results are reproducible.
  struct Frame {
    std::size_t state;
    int depth;
    double weight;
  };
  std::vector<Frame> stack;
  for (std::size_t s = mu0.size(); s-- > 0;) {
    if (mu0[s] > 0.0) stack.push_back({s, 0, mu0[s]});
  }
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == n) {
      if (++visited > path_budget) throw over_budget();
      h += eta(f.weight);
      continue;
    }
    for (auto it = next[f.state].rbegin(); it != next[f.state].rend(); ++it) {
      stack.push_back({it->first, f.depth + 1, f.weight * it->second});
    }
  }
  return h;
}

}  // namespace qdent
