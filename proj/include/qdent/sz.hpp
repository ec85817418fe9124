#pragma once

// Entropy of the measurement process generated by alternating a unitary step
// Theta(rho) = U rho U^dagger with an instrument T.
//
// The outcome process X_0, X_1, ... (outcomes grouped by a partition) has
// cylinder probabilities tr(T(A_n) Theta ... Theta T(A_0) rho). Its entropy
// rate is estimated through the conditional entropies
//   a_n = H(X_n | X_0, ..., X_{n-1}),   a_0 = H(X_0),
// whose running means are H(X_0..X_n)/(n+1). Both sequences are reported.
//
// The trajectory tree is expanded one time step at a time. Each branch holds
// the unnormalized conditional operator of its observed block sequence; its
// trace is the cylinder probability. Two children are merged when they sit in
// the same block and their trace-normalized operators agree to within
// merge_tol, since the normalized operator fixes every future conditional
// distribution. Children lighter than prune_eps are dropped and counted in
// pruned_mass.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdent/classical.hpp"
#include "qdent/entropy.hpp"
#include "qdent/quantum.hpp"

namespace qdent {

struct RunOptions {
  int n_max = 25;
  /// Do not stop on convergence before this depth.
  int min_depth = 0;
  double tol = 1e-7;
  int window = 3;
  double prune_eps = 1e-14;
  double merge_tol = 1e-10;
  bool merge = true;
  bool strict = false;
  /// Track terminal-run classes (constant / even / odd) per branch.
  bool classify = false;
  std::size_t branch_budget = 1'000'000;
};

inline constexpr double kStrictPrunedMass = 1e-6;

/// Terminal constant run of a block sequence: whether the whole sequence is
/// one block, and the parity of the number of repeats ending the sequence.
struct RunClass {
  bool constant = true;
  bool odd_repeats = false;
};

struct TrajectoryBranch {
  /// Observed blocks A_0..A_n. Empty when merging has discarded histories.
  std::vector<std::size_t> block_sequence;
  std::size_t last_block = 0;
  RunClass run;
  double weight = 0.0;
  /// T(A_n) Theta ... Theta T(A_0) rho, unnormalized.
  Operator conditional_op;
};

struct ClassMasses {
  double constant = 0.0;
  double even = 0.0;
  double odd = 0.0;
};

struct DepthRecord {
  int depth = 0;
  double a_n = 0.0;
  double cesaro = 0.0;
  std::size_t branch_count = 0;
  std::size_t merged_count = 0;
  double pruned_mass = 0.0;
  std::optional<ClassMasses> classes;
};

struct SZRun {
  std::vector<TrajectoryBranch> branches;
  int depth = -1;
  std::vector<double> conditional_entropies;
  std::size_t merged_count = 0;
  double pruned_mass = 0.0;
  /// Whether branches carry complete block sequences.
  bool has_histories = true;
  /// Whether every branch's RunClass is exact.
  bool tracks_runs = true;
  std::vector<DepthRecord> records;
  ConvergenceReport report;
  std::vector<std::string> warnings;
};

/// Step-by-step expansion of the trajectory tree.
class TrajectoryEngine {
 public:
  TrajectoryEngine(Operator step_unitary, Instrument instrument, DensityState rho,
                   Partition partition, RunOptions opts);

  /// Expands one time step and returns the new a_n.
  double advance();

  const SZRun& run() const { return run_; }
  SZRun release() { return std::move(run_); }
  const Partition& partition() const { return partition_; }

  /// Unnormalized probabilities of each partition block at the next step,
  /// given the branch.
  std::vector<double> child_weights(const TrajectoryBranch& branch) const;

 private:
  Operator evolve(const Operator& op) const;
  Operator measure(std::size_t block, const Operator& op) const;

  Operator unitary_;
  bool identity_dynamics_ = false;
  Instrument instrument_;
  DensityState rho_;
  Partition partition_;
  RunOptions opts_;
  SZRun run_;
};

/// tr(T(A_n) Theta ... Theta T(A_0) rho).
double cylinder_probability(const Operator& walk_unitary, const Instrument& t,
                            const DensityState& rho,
                            std::span<const std::vector<std::size_t>> blocks);

/// Entry (i, j) = |<a_i|U|a_j>|^2.
TransitionMatrix cs_transition_matrix(const Operator& u, std::span<const StateVector> basis);

/// Expands until a_n converges (after min_depth) or depth n_max is reached.
/// Throws AccuracyError in strict mode when pruned_mass exceeds 1e-6.
SZRun sz_entropy_run(const Operator& walk_unitary, const Instrument& t, const DensityState& rho,
                     const Partition& partition, const RunOptions& opts = {});

/// SZ entropy with identity dynamics.
ConvergenceReport measurement_entropy(const Instrument& t, const DensityState& rho,
                                      const Partition& partition, const RunOptions& opts = {});

struct EntropyReport {
  ConvergenceReport sz_entropy;
  ConvergenceReport measurement_entropy;
  /// sz - measurement, present only when both converged.
  std::optional<double> dynamical_entropy;
  RunOptions settings;
  std::vector<DepthRecord> sz_records;
  std::vector<std::string> warnings;
};

EntropyReport dynamical_entropy(const Operator& walk_unitary, const Instrument& t,
                                const DensityState& rho, const Partition& partition,
                                const RunOptions& opts = {});

/// Largest converged SZ entropy over the given partitions. This is a maximum
/// over the list only; the supremum over all partitions is not computed.
struct PartitionMaximum {
  std::optional<double> value;
  std::optional<std::size_t> best_index;
  std::vector<ConvergenceReport> reports;
};

PartitionMaximum sz_entropy_max(const Operator& walk_unitary, const Instrument& t,
                                const DensityState& rho, std::span<const Partition> partitions,
                                const RunOptions& opts = {});

/// Masses of the constant / even / odd terminal-run classes at the run's depth.
ClassMasses classify_constant_runs(const SZRun& run);

struct MarkovReduction {
  TransitionMatrix transition;
  ProbVector initial;
};

/// Classical chain equivalent to a coherent-states instrument with the atomic
/// partition. UnsupportedError for other instrument kinds.
MarkovReduction markov_reduction(const Operator& walk_unitary, const Instrument& t,
                                 const DensityState& rho);

}  // namespace qdent
