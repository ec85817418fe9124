#include "qdent/sz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "qdent/errors.hpp"

namespace qdent {

namespace {

constexpr double kIdentityTol = 1e-15;

struct MergeKey {
  std::size_t block = 0;
  std::uint8_t run_bits = 0;
  std::vector<std::int64_t> grid;

  bool operator==(const MergeKey&) const = default;
};

struct MergeKeyHash {
  std::size_t operator()(const MergeKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t x) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(k.block);
    mix(k.run_bits);
    for (std::int64_t g : k.grid) mix(static_cast<std::uint64_t>(g));
    return static_cast<std::size_t>(h);
  }
};

// Normalized operator entries snapped to the merge_tol grid. Equal keys imply
// entrywise agreement within merge_tol; near-equal operators straddling a
// grid line are simply not merged.
std::vector<std::int64_t> fingerprint(const Operator& op, double weight, double grid) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(2 * op.size()));
  const double scale = 1.0 / (weight * grid);
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    out.push_back(std::llround(op.data()[i].real() * scale));
    out.push_back(std::llround(op.data()[i].imag() * scale));
  }
  return out;
}

ClassMasses class_masses(const std::vector<TrajectoryBranch>& branches) {
  ClassMasses m;
  for (const auto& b : branches) {
    if (b.run.constant)
      m.constant += b.weight;
    else if (b.run.odd_repeats)
      m.odd += b.weight;
    else
      m.even += b.weight;
  }
  return m;
}

RunClass class_of_sequence(const std::vector<std::size_t>& seq) {
  RunClass rc;
  std::size_t repeats = 0;
  for (std::size_t k = seq.size() - 1; k > 0 && seq[k - 1] == seq.back(); --k) ++repeats;
  rc.constant = (repeats + 1 == seq.size());
  rc.odd_repeats = (repeats % 2) == 1;
  return rc;
}

void check_inputs(const Operator& u, const Instrument& t, const DensityState& rho,
                  const Partition& partition) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  if (u.rows() != d || u.cols() != d) {
    std::ostringstream msg;
    msg << "step unitary is " << u.rows() << "x" << u.cols() << ", instrument acts on dim " << d;
    throw ValidationError(msg.str());
  }
  if (rho.dim() != t.dim()) throw ValidationError("state dimension does not match instrument");
  if (partition.outcome_count() != t.outcome_count()) {
    std::ostringstream msg;
    msg << "partition covers " << partition.outcome_count() << " outcomes, instrument has "
        << t.outcome_count();
    throw ValidationError(msg.str());
  }
}

void check_options(const RunOptions& o) {
  if (o.n_max < 0) throw ValidationError("n_max must be nonnegative");
  if (!(o.tol > 0.0)) throw ValidationError("tol must be positive");
  if (o.window < 1) throw ValidationError("window must be at least 1");
  if (!(o.prune_eps >= 0.0)) throw ValidationError("prune_eps must be nonnegative");
  if (!(o.merge_tol >= 1e-15)) throw ValidationError("merge_tol must be at least 1e-15");
  if (o.branch_budget == 0) throw ValidationError("branch_budget must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// TrajectoryEngine

TrajectoryEngine::TrajectoryEngine(Operator step_unitary, Instrument instrument, DensityState rho,
                                   Partition partition, RunOptions opts)
    : unitary_(std::move(step_unitary)),
      instrument_(std::move(instrument)),
      rho_(std::move(rho)),
      partition_(std::move(partition)),
      opts_(opts) {
  check_inputs(unitary_, instrument_, rho_, partition_);
  check_options(opts_);
  const auto d = unitary_.rows();
  identity_dynamics_ = (unitary_ - Operator::Identity(d, d)).cwiseAbs().maxCoeff() < kIdentityTol;
  run_.has_histories = !opts_.merge;
  run_.tracks_runs = !opts_.merge || opts_.classify;
}

Operator TrajectoryEngine::evolve(const Operator& op) const {
  if (identity_dynamics_) return op;
  return unitary_ * op * unitary_.adjoint();
}

Operator TrajectoryEngine::measure(std::size_t block, const Operator& op) const {
  return apply_instrument(instrument_, partition_.block(block), op);
}

std::vector<double> TrajectoryEngine::child_weights(const TrajectoryBranch& branch) const {
  const Operator evolved = evolve(branch.conditional_op);
  std::vector<double> w(partition_.block_count(), 0.0);
  for (std::size_t b = 0; b < w.size(); ++b) {
    for (std::size_t i : partition_.block(b)) w[b] += instrument_.outcome_weight(i, evolved);
  }
  return w;
}

double TrajectoryEngine::advance() {
  const bool root = run_.depth < 0;
  const std::size_t nblocks = partition_.block_count();

  // The root is rho itself, measured without a preceding dynamical step.
  std::vector<TrajectoryBranch> parents;
  if (root) {
    TrajectoryBranch r;
    r.weight = 1.0;
    r.conditional_op = rho_.op();
    parents.push_back(std::move(r));
  } else {
    parents = std::move(run_.branches);
  }

  std::vector<TrajectoryBranch> children;
  std::unordered_map<MergeKey, std::size_t, MergeKeyHash> index;
  std::size_t merged_here = 0;
  double a_n = 0.0;

  for (auto& parent : parents) {
    const Operator evolved = root ? parent.conditional_op : evolve(parent.conditional_op);
    std::vector<Operator> ops;
    std::vector<double> weights;
    ops.reserve(nblocks);
    weights.reserve(nblocks);
    double total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
      ops.push_back(measure(b, evolved));
      weights.push_back(std::max(trace(ops.back()), 0.0));
      total += weights.back();
    }
    if (total > 0.0) {
      double h = 0.0;
      for (double w : weights) h += eta(std::min(w / total, 1.0));
      a_n += total * h;
    }

    for (std::size_t b = 0; b < nblocks; ++b) {
      const double w = weights[b];
      if (w < opts_.prune_eps || w <= 0.0) {
        run_.pruned_mass += w;
        continue;
      }
      TrajectoryBranch child;
      child.weight = w;
      child.conditional_op = std::move(ops[b]);
      child.last_block = b;
      if (root) {
        child.run = RunClass{};
      } else if (b == parent.last_block) {
        child.run = RunClass{parent.run.constant, !parent.run.odd_repeats};
      } else {
        child.run = RunClass{false, false};
      }
      if (run_.has_histories) {
        child.block_sequence = parent.block_sequence;
        child.block_sequence.push_back(b);
      }

      if (opts_.merge) {
        MergeKey key;
        key.block = b;
        if (opts_.classify) {
          key.run_bits = static_cast<std::uint8_t>((child.run.constant ? 1 : 0) |
                                                   (child.run.odd_repeats ? 2 : 0));
        }
        key.grid = fingerprint(child.conditional_op, w, opts_.merge_tol);
        auto [it, inserted] = index.try_emplace(std::move(key), children.size());
        if (!inserted) {
          TrajectoryBranch& into = children[it->second];
          into.weight += child.weight;
          into.conditional_op += child.conditional_op;
          ++merged_here;
          continue;
        }
      }
      children.push_back(std::move(child));
      if (children.size() > opts_.branch_budget) {
        std::ostringstream msg;
        msg << "trajectory tree exceeds the branch budget of " << opts_.branch_budget
            << " live branches at depth " << run_.depth + 1;
        throw ResourceError(msg.str());
      }
    }
  }

  run_.branches = std::move(children);
  ++run_.depth;
  run_.merged_count += merged_here;
  run_.conditional_entropies.push_back(a_n);
  run_.report = limit_estimate(run_.conditional_entropies, opts_.tol, opts_.window);

  DepthRecord rec;
  rec.depth = run_.depth;
  rec.a_n = a_n;
  rec.cesaro = run_.report.cesaro_sequence.back();
  rec.branch_count = run_.branches.size();
  rec.merged_count = merged_here;
  rec.pruned_mass = run_.pruned_mass;
  if (opts_.classify) rec.classes = class_masses(run_.branches);
  run_.records.push_back(rec);
  return a_n;
}

// ---------------------------------------------------------------------------

double cylinder_probability(const Operator& walk_unitary, const Instrument& t,
                            const DensityState& rho,
                            std::span<const std::vector<std::size_t>> blocks) {
  if (blocks.empty()) throw ValidationError("cylinder_probability: empty block sequence");
  const auto d = static_cast<Eigen::Index>(t.dim());
  if (walk_unitary.rows() != d || walk_unitary.cols() != d || rho.dim() != t.dim())
    throw ValidationError("cylinder_probability: dimension mismatch");
  Operator sigma = apply_instrument(t, blocks.front(), rho.op());
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    sigma = apply_instrument(t, blocks[k], walk_unitary * sigma * walk_unitary.adjoint());
  }
  return trace(sigma);
}

TransitionMatrix cs_transition_matrix(const Operator& u, std::span<const StateVector> basis) {
  // Validates orthonormality.
  const Instrument check = coherent_instrument(basis);
  if (static_cast<std::size_t>(u.rows()) != check.dim() || u.rows() != u.cols())
    throw ValidationError("cs_transition_matrix: unitary dimension does not match basis");
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const StateVector uj = u * basis[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i, j) = std::clamp(std::norm(basis[static_cast<std::size_t>(i)].dot(uj)), 0.0, 1.0);
    }
  }
  return TransitionMatrix(std::move(p));
}

SZRun sz_entropy_run(const Operator& walk_unitary, const Instrument& t, const DensityState& rho,
                     const Partition& partition, const RunOptions& opts) {
  TrajectoryEngine engine(walk_unitary, t, rho, partition, opts);
  while (engine.run().depth < opts.n_max) {
    engine.advance();
    const SZRun& r = engine.run();
    if (r.depth >= opts.min_depth && r.report.converged) break;
  }
  SZRun run = engine.release();
  if (run.pruned_mass > kStrictPrunedMass) {
    std::ostringstream msg;
    msg << "pruned probability mass " << run.pruned_mass << " exceeds " << kStrictPrunedMass;
    if (opts.strict) throw AccuracyError(msg.str());
    run.warnings.push_back(msg.str());
  }
  return run;
}

ConvergenceReport measurement_entropy(const Instrument& t, const DensityState& rho,
                                      const Partition& partition, const RunOptions& opts) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  return sz_entropy_run(Operator::Identity(d, d), t, rho, partition, opts).report;
}

EntropyReport dynamical_entropy(const Operator& walk_unitary, const Instrument& t,
                                const DensityState& rho, const Partition& partition,
                                const RunOptions& opts) {
  EntropyReport out;
  out.settings = opts;
  SZRun full = sz_entropy_run(walk_unitary, t, rho, partition, opts);
  out.sz_entropy = full.report;
  out.sz_records = std::move(full.records);
  out.warnings = std::move(full.warnings);

  const auto d = static_cast<Eigen::Index>(t.dim());
  SZRun meas = sz_entropy_run(Operator::Identity(d, d), t, rho, partition, opts);
  out.measurement_entropy = meas.report;
  for (auto& w : meas.warnings) out.warnings.push_back("measurement run: " + w);

  if (out.sz_entropy.converged && out.measurement_entropy.converged) {
    out.dynamical_entropy = *out.sz_entropy.converged_value - *out.measurement_entropy.converged_value;
  }
  return out;
}

PartitionMaximum sz_entropy_max(const Operator& walk_unitary, const Instrument& t,
                                const DensityState& rho, std::span<const Partition> partitions,
                                const RunOptions& opts) {
  if (partitions.empty()) throw ValidationError("sz_entropy_max: no partitions given");
  PartitionMaximum out;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    out.reports.push_back(sz_entropy_run(walk_unitary, t, rho, partitions[i], opts).report);
    const auto& r = out.reports.back();
    if (r.converged && (!out.value || *r.converged_value > *out.value)) {
      out.value = r.converged_value;
      out.best_index = i;
    }
  }
  return out;
}

ClassMasses classify_constant_runs(const SZRun& run) {
  if (run.depth < 0) throw ValidationError("classify_constant_runs: run has not been expanded");
  if (run.tracks_runs && !run.has_histories) return class_masses(run.branches);
  if (!run.has_histories) {
    throw UnsupportedError(
        "classify_constant_runs: branches were merged without run-class keys; rerun with "
        "classify enabled or merging disabled");
  }
  ClassMasses m;
  for (const auto& b : run.branches) {
    const RunClass rc = class_of_sequence(b.block_sequence);
    if (rc.constant)
      m.constant += b.weight;
    else if (rc.odd_repeats)
      m.odd += b.weight;
    else
      m.even += b.weight;
  }
  return m;
}

MarkovReduction markov_reduction(const Operator& walk_unitary, const Instrument& t,
                                 const DensityState& rho) {
  if (t.kind() != InstrumentKind::coherent_states) {
    std::ostringstream msg;
    msg << "markov_reduction: requires a coherent-states instrument, got " << to_string(t.kind());
    throw UnsupportedError(msg.str());
  }
  return MarkovReduction{cs_transition_matrix(walk_unitary, t.basis()), outcome_pmf(t, rho)};
}

}  // namespace qdent
