#pragma once

// Shannon entropy of finite distributions and partitions, in nats.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qdent {

inline constexpr double kFreshSumTol = 1e-12;
inline constexpr double kDerivedSumTol = 1e-10;

/// eta(x) = -x ln x with eta(0) = 0. Throws ValidationError for x < 0.
double eta(double x);

/// A finite probability vector. Entries lie in [0,1] and sum to one.
class ProbVector {
 public:
  /// `sum_tol` defaults to the fresh-construction tolerance; distributions
  /// produced by long accumulations should pass kDerivedSumTol.
  explicit ProbVector(std::vector<double> entries, double sum_tol = kFreshSumTol);

  static ProbVector uniform(std::size_t n);
  static ProbVector point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::vector<double> entries_;
};

double entropy(const ProbVector& p);

/// Disjoint cover of {0, ..., outcome_count-1} by labelled blocks.
///
/// Blocks are stored canonically: members ascending, blocks ordered by their
/// smallest member. Labels follow their blocks through the reordering.
class Partition {
 public:
  Partition(std::size_t outcome_count, std::vector<std::vector<std::size_t>> blocks,
            std::vector<std::string> labels = {});

  static Partition atomic(std::size_t outcome_count);
  static Partition trivial(std::size_t outcome_count);

  std::size_t outcome_count() const { return outcome_count_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Index of the block containing `outcome`.
  std::size_t block_of(std::size_t outcome) const { return owner_[outcome]; }

  bool operator==(const Partition& other) const { return blocks_ == other.blocks_; }

 private:
  std::size_t outcome_count_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> owner_;
};

/// Coarsest common refinement. Labels of the constituents are joined with '&'.
Partition join(std::span<const Partition> parts);
Partition join(const Partition& a, const Partition& b);

/// True iff every block of `d` is a union of blocks of `c`.
bool is_coarser(const Partition& d, const Partition& c);

/// mu(block) for every block of `c`.
std::vector<double> block_masses(const Partition& c, const ProbVector& mu);

/// H_mu(C).
double entropy(const Partition& c, const ProbVector& mu);

/// Joint pmf of a fixed-length tuple of discrete variables, sparse.
class JointDistribution {
 public:
  using Key = std::vector<std::size_t>;

  explicit JointDistribution(std::map<Key, double> support, double sum_tol = kDerivedSumTol);

  std::size_t length() const { return length_; }
  const std::map<Key, double>& support() const { return support_; }

  /// Marginal over the listed coordinates, in the listed order.
  JointDistribution marginal(std::span<const std::size_t> coords) const;

 private:
  std::map<Key, double> support_;
  std::size_t length_ = 0;
};

double entropy(const JointDistribution& joint);

/// H(C | D) for a joint over (C-index, D-index). Conditionals with mu(D) = 0
/// contribute nothing.
double conditional_entropy(const JointDistribution& joint);

struct ConvergenceReport {
  std::vector<double> direct_sequence;
  std::vector<double> cesaro_sequence;
  std::optional<double> converged_value;
  bool converged = false;
  int steps_used = 0;
};

/// Running arithmetic means of `seq`.
std::vector<double> cesaro_means(std::span<const double> seq);

/// Converged iff the last `window` successive differences are all below `tol`.
ConvergenceReport limit_estimate(std::span<const double> seq, double tol, int window);

}  // namespace qdent
