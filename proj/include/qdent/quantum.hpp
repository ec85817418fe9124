#pragma once

// Finite-dimensional states and measurement instruments.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdent/entropy.hpp"

namespace qdent {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

/// Smallest eigenvalue of the Hermitian part of `a`.
double min_eigenvalue(const Operator& a);

/// Max entrywise |a - a^dagger|.
double hermitian_residual(const Operator& a);

/// Positive semidefinite, unit-trace operator.
class DensityState {
 public:
  /// Validates and wraps; throws ValidationError naming the failed check.
  explicit DensityState(Operator op);

  std::size_t dim() const { return static_cast<std::size_t>(op_.rows()); }
  const Operator& op() const { return op_; }

 private:
  Operator op_;
};

DensityState make_density(const Operator& m);
DensityState maximally_mixed(std::size_t dim);
/// |v><v| / <v|v>.
DensityState pure_state(const StateVector& v);

enum class InstrumentKind { general, luders_von_neumann, coherent_states };

const char* to_string(InstrumentKind kind);

/// Kraus family {B_i} with sum_i B_i^dagger B_i = 1, one operator per outcome.
///
/// The kind only selects fast paths and stronger validation; every kind keeps
/// its Kraus operators explicitly.
class Instrument {
 public:
  Instrument(std::vector<Operator> kraus, std::vector<std::string> labels,
             InstrumentKind kind = InstrumentKind::general);

  std::size_t dim() const { return dim_; }
  std::size_t outcome_count() const { return kraus_.size(); }
  const std::vector<Operator>& kraus() const { return kraus_; }
  const std::vector<std::string>& labels() const { return labels_; }
  InstrumentKind kind() const { return kind_; }
  /// For coherent_states only: the unit vectors a_i with B_i = |a_i><a_i|.
  const std::vector<StateVector>& basis() const { return basis_; }

  /// B_i rho B_i^dagger.
  Operator apply_one(std::size_t outcome, const Operator& rho) const;
  /// tr(B_i rho B_i^dagger).
  double outcome_weight(std::size_t outcome, const Operator& rho) const;

 private:
  std::vector<Operator> kraus_;
  std::vector<std::string> labels_;
  InstrumentKind kind_;
  std::size_t dim_ = 0;
  std::vector<StateVector> basis_;
};

/// Luders-von Neumann instrument from orthogonal projections summing to one.
/// The kind is coherent_states when every projection has rank one.
Instrument lvn_instrument(std::vector<Operator> projections, std::vector<std::string> labels = {});

/// Coherent-states instrument of an orthonormal basis.
Instrument coherent_instrument(std::span<const StateVector> basis,
                               std::vector<std::string> labels = {});

/// T(E) rho = sum_{i in E} B_i rho B_i^dagger, unnormalized.
Operator apply_instrument(const Instrument& t, std::span<const std::size_t> outcomes,
                          const Operator& rho);

/// Entry i is tr(B_i rho B_i^dagger).
ProbVector outcome_pmf(const Instrument& t, const DensityState& rho);

/// Real part of the trace.
inline double trace(const Operator& a) { return a.trace().real(); }

}  // namespace qdent
