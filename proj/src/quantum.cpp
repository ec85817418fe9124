#include "qdent/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qdent/errors.hpp"

namespace qdent {

namespace {

constexpr double kInstrumentTol = 1e-10;

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

bool all_finite(const Operator& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag())) return false;
  }
  return true;
}

double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

double hermitian_residual(const Operator& a) { return max_abs(a - a.adjoint()); }

double min_eigenvalue(const Operator& a) {
  const Operator h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityState::DensityState(Operator op) : op_(std::move(op)) {
  std::ostringstream msg;
  if (op_.rows() < 1 || op_.rows() != op_.cols()) {
    throw ValidationError("DensityState: operator must be square with dim >= 1");
  }
  if (!all_finite(op_)) throw ValidationError("DensityState: non-finite entries");
  if (const double r = hermitian_residual(op_); r > kHermitianTol) {
    msg << "DensityState: not Hermitian (residual " << r << ")";
    throw ValidationError(msg.str());
  }
  if (const double r = std::abs(op_.trace() - Complex(1.0)); r > kTraceTol) {
    msg << "DensityState: trace is " << op_.trace().real() << " (residual " << r << ")";
    throw ValidationError(msg.str());
  }
  if (const double lo = min_eigenvalue(op_); lo < -kPsdTol) {
    msg << "DensityState: not positive semidefinite (smallest eigenvalue " << lo << ")";
    throw ValidationError(msg.str());
  }
}

DensityState make_density(const Operator& m) { return DensityState(m); }

DensityState maximally_mixed(std::size_t dim) {
  if (dim < 1) throw ValidationError("maximally_mixed: dim must be at least 1");
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityState(Operator::Identity(d, d) / static_cast<double>(dim));
}

DensityState pure_state(const StateVector& v) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw ValidationError("pure_state: zero vector");
  return DensityState(v * v.adjoint() / n2);
}

const char* to_string(InstrumentKind kind) {
  switch (kind) {
    case InstrumentKind::general: return "general";
    case InstrumentKind::luders_von_neumann: return "luders_von_neumann";
    case InstrumentKind::coherent_states: return "coherent_states";
  }
  return "unknown";
}

Instrument::Instrument(std::vector<Operator> kraus, std::vector<std::string> labels,
                       InstrumentKind kind)
    : kraus_(std::move(kraus)), labels_(std::move(labels)), kind_(kind) {
  if (kraus_.empty()) throw ValidationError("Instrument: no Kraus operators");
  if (labels_.empty()) labels_ = default_labels(kraus_.size());
  if (labels_.size() != kraus_.size())
    throw ValidationError("Instrument: label count does not match outcome count");

  const Eigen::Index d = kraus_.front().rows();
  if (d < 1) throw ValidationError("Instrument: operators must have dim >= 1");
  dim_ = static_cast<std::size_t>(d);
  Operator completeness = Operator::Zero(d, d);
  for (std::size_t i = 0; i < kraus_.size(); ++i) {
    const Operator& b = kraus_[i];
    if (b.rows() != d || b.cols() != d) {
      std::ostringstream msg;
      msg << "Instrument: Kraus operator " << i << " has shape " << b.rows() << "x" << b.cols()
          << ", expected " << d << "x" << d;
      throw ValidationError(msg.str());
    }
    if (!all_finite(b)) throw ValidationError("Instrument: non-finite Kraus entries");
    completeness += b.adjoint() * b;
  }
  if (const double r = max_abs(completeness - Operator::Identity(d, d)); r > kInstrumentTol) {
    std::ostringstream msg;
    msg << "Instrument: sum of B^dagger B differs from identity (residual " << r << ")";
    throw ValidationError(msg.str());
  }

  if (kind_ == InstrumentKind::general) return;

  for (std::size_t i = 0; i < kraus_.size(); ++i) {
    const Operator& b = kraus_[i];
    const double r = std::max(max_abs(b * b - b), max_abs(b - b.adjoint()));
    if (r > kInstrumentTol) {
      std::ostringstream msg;
      msg << "Instrument: Kraus operator " << i << " is not an orthogonal projection (residual " << r
          << ")";
      throw ValidationError(msg.str());
    }
    for (std::size_t j = i + 1; j < kraus_.size(); ++j) {
      if (const double o = max_abs(b * kraus_[j]); o > kInstrumentTol) {
        std::ostringstream msg;
        msg << "Instrument: projections " << i << " and " << j << " are not orthogonal (residual "
            << o << ")";
        throw ValidationError(msg.str());
      }
    }
  }

  if (kind_ == InstrumentKind::coherent_states) {
    basis_.reserve(kraus_.size());
    for (std::size_t i = 0; i < kraus_.size(); ++i) {
      const Operator& b = kraus_[i];
      const double rank = trace(b);
      if (std::abs(rank - 1.0) > kInstrumentTol) {
        std::ostringstream msg;
        msg << "Instrument: coherent-state projection " << i << " has rank " << rank;
        throw ValidationError(msg.str());
      }
      // The column with the largest diagonal entry spans the range.
      Eigen::Index k = 0;
      b.diagonal().real().maxCoeff(&k);
      StateVector a = b.col(k);
      a /= a.norm();
      basis_.push_back(std::move(a));
    }
  }
}

Operator Instrument::apply_one(std::size_t outcome, const Operator& rho) const {
  if (kind_ == InstrumentKind::coherent_states) {
    const StateVector& a = basis_[outcome];
    const Complex w = a.dot(rho * a);  // <a|rho|a>
    return w * (a * a.adjoint());
  }
  const Operator& b = kraus_[outcome];
  return b * rho * b.adjoint();
}

double Instrument::outcome_weight(std::size_t outcome, const Operator& rho) const {
  if (kind_ == InstrumentKind::coherent_states) {
    const StateVector& a = basis_[outcome];
    return a.dot(rho * a).real();
  }
  if (kind_ == InstrumentKind::luders_von_neumann) {
    // tr(P rho P) = tr(P rho) for a projection.
    return (kraus_[outcome].cwiseProduct(rho.transpose())).sum().real();
  }
  const Operator& b = kraus_[outcome];
  return trace(b * rho * b.adjoint());
}

Instrument lvn_instrument(std::vector<Operator> projections, std::vector<std::string> labels) {
  if (projections.empty()) throw ValidationError("lvn_instrument: no projections");
  bool rank_one = true;
  for (const auto& p : projections) {
    if (std::abs(trace(p) - 1.0) > kInstrumentTol) rank_one = false;
  }
  return Instrument(std::move(projections), std::move(labels),
                    rank_one ? InstrumentKind::coherent_states : InstrumentKind::luders_von_neumann);
}

Instrument coherent_instrument(std::span<const StateVector> basis, std::vector<std::string> labels) {
  if (basis.empty()) throw ValidationError("coherent_instrument: empty basis");
  const Eigen::Index d = basis.front().size();
  if (static_cast<std::size_t>(d) != basis.size())
    throw ValidationError("coherent_instrument: basis size does not match dimension");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != d) throw ValidationError("coherent_instrument: vectors of differing dimension");
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Complex g = basis[i].dot(basis[j]);
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > kInstrumentTol) {
        std::ostringstream msg;
        msg << "coherent_instrument: basis not orthonormal at (" << i << "," << j << "), <a_i|a_j> = "
            << g;
        throw ValidationError(msg.str());
      }
    }
  }
  std::vector<Operator> kraus;
  kraus.reserve(basis.size());
  for (const auto& a : basis) kraus.push_back(a * a.adjoint());
  return Instrument(std::move(kraus), std::move(labels), InstrumentKind::coherent_states);
}

Operator apply_instrument(const Instrument& t, std::span<const std::size_t> outcomes,
                          const Operator& rho) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  if (rho.rows() != d || rho.cols() != d)
    throw ValidationError("apply_instrument: operator dimension does not match instrument");
  Operator out = Operator::Zero(d, d);
  for (std::size_t i : outcomes) {
    if (i >= t.outcome_count()) {
      std::ostringstream msg;
      msg << "apply_instrument: outcome " << i << " out of range (" << t.outcome_count()
          << " outcomes)";
      throw ValidationError(msg.str());
    }
    out += t.apply_one(i, rho);
  }
  return out;
}

ProbVector outcome_pmf(const Instrument& t, const DensityState& rho) {
  if (rho.dim() != t.dim()) throw ValidationError("outcome_pmf: dimension mismatch");
  std::vector<double> p(t.outcome_count());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::clamp(t.outcome_weight(i, rho.op()), 0.0, 1.0);
  }
  return ProbVector(std::move(p), kDerivedSumTol);
}

}  // namespace qdent
