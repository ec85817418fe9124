#include "qdent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdent/errors.hpp"

namespace qdent {

double eta(double x) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << "eta: argument must be nonnegative, got " << x;
    throw ValidationError(msg.str());
  }
  if (x == 0.0) return 0.0;
  return -x * std::log(x);
}

ProbVector::ProbVector(std::vector<double> entries, double sum_tol) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("ProbVector: empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double p = entries_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      std::ostringstream msg;
      msg << "ProbVector: entry " << i << " = " << p << " outside [0,1]";
      throw ValidationError(msg.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > sum_tol) {
    std::ostringstream msg;
    msg << "ProbVector: entries sum to " << sum << " (residual " << std::abs(sum - 1.0) << ")";
    throw ValidationError(msg.str());
  }
}

ProbVector ProbVector::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("ProbVector::uniform: n must be positive");
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)), kDerivedSumTol);
}

ProbVector ProbVector::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw ValidationError("ProbVector::point_mass: index out of range");
  std::vector<double> e(n, 0.0);
  e[at] = 1.0;
  return ProbVector(std::move(e));
}

double entropy(const ProbVector& p) {
  double h = 0.0;
  for (double x : p.entries()) h += eta(x);
  return h;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::size_t outcome_count, std::vector<std::vector<std::size_t>> blocks,
                     std::vector<std::string> labels)
    : outcome_count_(outcome_count) {
  if (outcome_count == 0) throw ValidationError("Partition: empty outcome range");
  if (!labels.empty() && labels.size() != blocks.size())
    throw ValidationError("Partition: label count does not match block count");
  if (labels.empty()) {
    labels.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) labels.push_back(std::to_string(b));
  }

  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  for (auto& blk : blocks) {
    if (blk.empty()) throw ValidationError("Partition: empty block");
    std::sort(blk.begin(), blk.end());
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return blocks[a].front() < blocks[b].front(); });

  constexpr auto kUnowned = static_cast<std::size_t>(-1);
  owner_.assign(outcome_count, kUnowned);
  blocks_.reserve(blocks.size());
  labels_.reserve(blocks.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    auto& blk = blocks[order[pos]];
    for (std::size_t x : blk) {
      if (x >= outcome_count) {
        std::ostringstream msg;
        msg << "Partition: outcome " << x << " outside range [0," << outcome_count << ")";
        throw ValidationError(msg.str());
      }
      if (owner_[x] != kUnowned) {
        std::ostringstream msg;
        msg << "Partition: outcome " << x << " appears in more than one block";
        throw ValidationError(msg.str());
      }
      owner_[x] = pos;
    }
    blocks_.push_back(std::move(blk));
    labels_.push_back(std::move(labels[order[pos]]));
  }
  for (std::size_t x = 0; x < outcome_count; ++x) {
    if (owner_[x] == kUnowned) {
      std::ostringstream msg;
      msg << "Partition: outcome " << x << " not covered";
      throw ValidationError(msg.str());
    }
  }
}

Partition Partition::atomic(std::size_t outcome_count) {
  std::vector<std::vector<std::size_t>> blocks(outcome_count);
  for (std::size_t i = 0; i < outcome_count; ++i) blocks[i] = {i};
  return Partition(outcome_count, std::move(blocks));
}

Partition Partition::trivial(std::size_t outcome_count) {
  std::vector<std::size_t> all(outcome_count);
  std::iota(all.begin(), all.end(), 0);
  return Partition(outcome_count, {std::move(all)}, {"all"});
}

Partition join(std::span<const Partition> parts) {
  if (parts.empty()) throw ValidationError("join: no partitions given");
  const std::size_t n = parts.front().outcome_count();
  for (const auto& p : parts) {
    if (p.outcome_count() != n) throw ValidationError("join: partitions over different outcome ranges");
  }
  // Intersections keyed by the tuple of constituent block indices.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> cells;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<std::size_t> key;
    key.reserve(parts.size());
    for (const auto& p : parts) key.push_back(p.block_of(x));
    cells[key].push_back(x);
  }
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::string> labels;
  for (auto& [key, members] : cells) {
    std::string label;
    for (std::size_t k = 0; k < key.size(); ++k) {
      if (k) label += '&';
      label += parts[k].labels()[key[k]];
    }
    blocks.push_back(std::move(members));
    labels.push_back(std::move(label));
  }
  return Partition(n, std::move(blocks), std::move(labels));
}

Partition join(const Partition& a, const Partition& b) {
  const Partition both[] = {a, b};
  return join(std::span<const Partition>(both));
}

bool is_coarser(const Partition& d, const Partition& c) {
  if (d.outcome_count() != c.outcome_count())
    throw ValidationError("is_coarser: partitions over different outcome ranges");
  // d is coarser iff each block of c lies inside a single block of d.
  for (const auto& blk : c.blocks()) {
    const std::size_t owner = d.block_of(blk.front());
    for (std::size_t x : blk) {
      if (d.block_of(x) != owner) return false;
    }
  }
  return true;
}

std::vector<double> block_masses(const Partition& c, const ProbVector& mu) {
  if (mu.size() != c.outcome_count())
    throw ValidationError("block_masses: distribution size does not match partition range");
  std::vector<double> m(c.block_count(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) m[c.block_of(x)] += mu[x];
  return m;
}

double entropy(const Partition& c, const ProbVector& mu) {
  double h = 0.0;
  for (double m : block_masses(c, mu)) h += eta(std::min(m, 1.0));
  return h;
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::map<Key, double> support, double sum_tol)
    : support_(std::move(support)) {
  if (support_.empty()) throw ValidationError("JointDistribution: empty support");
  length_ = support_.begin()->first.size();
  double sum = 0.0;
  for (const auto& [key, w] : support_) {
    if (key.size() != length_) throw ValidationError("JointDistribution: keys of differing length");
    if (!(w >= 0.0)) throw ValidationError("JointDistribution: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > sum_tol) {
    std::ostringstream msg;
    msg << "JointDistribution: weights sum to " << sum;
    throw ValidationError(msg.str());
  }
}

JointDistribution JointDistribution::marginal(std::span<const std::size_t> coords) const {
  std::map<Key, double> out;
  for (const auto& [key, w] : support_) {
    Key k;
    k.reserve(coords.size());
    for (std::size_t c : coords) {
      if (c >= length_) throw ValidationError("JointDistribution::marginal: coordinate out of range");
      k.push_back(key[c]);
    }
    out[k] += w;
  }
  return JointDistribution(std::move(out));
}

double entropy(const JointDistribution& joint) {
  double h = 0.0;
  for (const auto& [key, w] : joint.support()) h += eta(std::min(w, 1.0));
  return h;
}

double conditional_entropy(const JointDistribution& joint) {
  if (joint.length() != 2)
    throw ValidationError("conditional_entropy: joint must be over (C-index, D-index) pairs");
  std::map<std::size_t, double> mass_d;
  for (const auto& [key, w] : joint.support()) mass_d[key[1]] += w;
  double h = 0.0;
  for (const auto& [key, w] : joint.support()) {
    const double md = mass_d[key[1]];
    if (md <= 0.0) continue;
    h += md * eta(std::min(w / md, 1.0));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Convergence

std::vector<double> cesaro_means(std::span<const double> seq) {
  std::vector<double> out;
  out.reserve(seq.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    sum += seq[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

ConvergenceReport limit_estimate(std::span<const double> seq, double tol, int window) {
  if (seq.empty()) throw ValidationError("limit_estimate: empty sequence");
  if (!(tol > 0.0)) throw ValidationError("limit_estimate: tol must be positive");
  if (window < 1) throw ValidationError("limit_estimate: window must be at least 1");

  ConvergenceReport r;
  r.direct_sequence.assign(seq.begin(), seq.end());
  r.cesaro_sequence = cesaro_means(seq);
  r.steps_used = static_cast<int>(seq.size());

  const auto w = static_cast<std::size_t>(window);
  if (seq.size() > w) {
    bool ok = true;
    for (std::size_t i = seq.size() - w; i < seq.size(); ++i) {
      if (!(std::abs(seq[i] - seq[i - 1]) < tol)) {
        ok = false;
        break;
      }
    }
    r.converged = ok;
  }
  if (r.converged) r.converged_value = seq.back();
  return r;
}

}  // namespace qdent
