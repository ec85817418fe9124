#include "qdent/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "qdent/walks.hpp"

namespace qdent {

using nlohmann::ordered_json;

namespace {

const double kLn2 = std::numbers::ln2;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

const ordered_json& require(const ordered_json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

int get_int(const ordered_json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) fail(join_path(path, key), "expected an integer");
  return v.get<int>();
}

std::string get_string(const ordered_json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) fail(join_path(path, key), "expected a string");
  return v.get<std::string>();
}

template <typename T>
T get_or(const ordered_json& obj, const std::string& key, T fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(join_path(path, key), "has the wrong type");
  }
}

Complex parse_complex(const ordered_json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(path, "expected a number or a [re, im] pair");
}

Operator parse_matrix(const ordered_json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Operator m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      fail(path, "matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = parse_complex(row[static_cast<std::size_t>(j)],
                              path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

StateVector parse_vector(const ordered_json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array");
  StateVector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = parse_complex(v[i], path + "[" + std::to_string(i) + "]");
  return x;
}

struct WalkSpec {
  CoinedWalk walk;
  bool hadamard = false;
};

WalkSpec build_walk(const ordered_json& w) {
  const std::string kind = get_string(w, "kind", "walk");
  if (kind == "hadamard") {
    const int n = get_int(w, "N", "walk");
    if (n < 3) fail("walk.N", "must be at least 3");
    return {hadamard_walk(n), true};
  }
  if (kind == "explicit") {
    const int nc = get_int(w, "coin_count", "walk");
    const int nv = get_int(w, "vertex_count", "walk");
    if (nc < 1 || nv < 1) fail("walk", "coin_count and vertex_count must be positive");
    const auto& shift = require(w, "shift", "walk");
    std::vector<std::size_t> sigma;
    try {
      sigma = shift.get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception&) {
      fail("walk.shift", "expected an array of basis indices");
    }
    std::vector<Operator> coins;
    if (auto it = w.find("coins"); it != w.end()) {
      if (!it->is_array()) fail("walk.coins", "expected an array of matrices");
      for (std::size_t v = 0; v < it->size(); ++v)
        coins.push_back(parse_matrix((*it)[v], "walk.coins[" + std::to_string(v) + "]"));
    } else {
      const Operator c = parse_matrix(require(w, "coin", "walk"), "walk.coin");
      coins.assign(static_cast<std::size_t>(nv), c);
    }
    return {coined_walk(ShiftPermutation(std::move(sigma), static_cast<std::size_t>(nc),
                                         static_cast<std::size_t>(nv)),
                        std::move(coins)),
            false};
  }
  fail("walk.kind", "unknown kind '" + kind + "' (expected hadamard or explicit)");
}

Instrument build_instrument(const ordered_json& t, const CoinedWalk& walk) {
  const std::string kind = get_string(t, "kind", "instrument");
  const std::size_t nc = walk.shift().coin_count();
  const std::size_t nv = walk.vertex_count();
  const auto d = static_cast<Eigen::Index>(walk.dim());
  if (kind == "coherent") {
    std::vector<StateVector> basis;
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t v = 0; v < nv; ++v) {
        StateVector e = StateVector::Zero(d);
        e[static_cast<Eigen::Index>(basis_index(c, v, nv))] = 1.0;
        basis.push_back(std::move(e));
        const std::string coin = nc == 2 ? (c == kCoinR ? "R" : "L") : std::to_string(c);
        labels.push_back(coin + "," + std::to_string(v));
      }
    }
    return coherent_instrument(basis, std::move(labels));
  }
  if (kind == "rank2_position") {
    std::vector<Operator> proj;
    std::vector<std::string> labels;
    for (std::size_t v = 0; v < nv; ++v) {
      Operator p = Operator::Zero(d, d);
      for (std::size_t c = 0; c < nc; ++c) {
        const auto i = static_cast<Eigen::Index>(basis_index(c, v, nv));
        p(i, i) = 1.0;
      }
      proj.push_back(std::move(p));
      labels.push_back(std::to_string(v));
    }
    return lvn_instrument(std::move(proj), std::move(labels));
  }
  if (kind == "explicit_kraus") {
    const auto& ks = require(t, "kraus", "instrument");
    if (!ks.is_array() || ks.empty()) fail("instrument.kraus", "expected a non-empty array");
    std::vector<Operator> kraus;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      kraus.push_back(parse_matrix(ks[i], "instrument.kraus[" + std::to_string(i) + "]"));
      if (kraus.back().rows() != d)
        fail("instrument.kraus[" + std::to_string(i) + "]", "dimension does not match the walk");
    }
    auto labels = get_or<std::vector<std::string>>(t, "labels", {}, "instrument");
    if (get_or<bool>(t, "projective", false, "instrument"))
      return lvn_instrument(std::move(kraus), std::move(labels));
    return Instrument(std::move(kraus), std::move(labels));
  }
  fail("instrument.kind",
       "unknown kind '" + kind + "' (expected coherent, rank2_position or explicit_kraus)");
}

DensityState build_state(const ordered_json& s, const WalkSpec& w) {
  const std::string kind = get_string(s, "kind", "state");
  const auto d = static_cast<Eigen::Index>(w.walk.dim());
  if (kind == "maximally_mixed") return maximally_mixed(w.walk.dim());
  if (kind == "eigenstate") {
    if (!w.hadamard) fail("state.kind", "eigenstate is defined only for the hadamard walk");
    return pure_state(hadamard_eigenvector(static_cast<int>(w.walk.vertex_count())));
  }
  if (kind == "pure") {
    const StateVector v = parse_vector(require(s, "vector", "state"), "state.vector");
    if (v.size() != d) fail("state.vector", "dimension does not match the walk");
    return pure_state(v);
  }
  if (kind == "explicit") {
    const Operator m = parse_matrix(require(s, "matrix", "state"), "state.matrix");
    if (m.rows() != d) fail("state.matrix", "dimension does not match the walk");
    return make_density(m);
  }
  fail("state.kind", "unknown kind '" + kind + "' (expected maximally_mixed, eigenstate, pure or explicit)");
}

Partition build_partition(const ordered_json& p, const Instrument& t, const CoinedWalk& walk) {
  const std::string kind = get_string(p, "kind", "partition");
  const std::size_t outcomes = t.outcome_count();
  if (kind == "atomic") {
    std::vector<std::vector<std::size_t>> blocks(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) blocks[i] = {i};
    return Partition(outcomes, std::move(blocks), t.labels());
  }
  if (kind == "vertex_blocks") {
    const std::size_t nv = walk.vertex_count();
    const std::size_t nc = walk.shift().coin_count();
    if (outcomes == nv) return Partition(outcomes, [&] {
        std::vector<std::vector<std::size_t>> b(nv);
        for (std::size_t v = 0; v < nv; ++v) b[v] = {v};
        return b;
      }(), t.labels());
    if (outcomes != nc * nv)
      fail("partition.kind", "vertex_blocks needs an instrument indexed by vertices or by (coin, vertex)");
    std::vector<std::vector<std::size_t>> blocks(nv);
    std::vector<std::string> labels(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t c = 0; c < nc; ++c) blocks[v].push_back(basis_index(c, v, nv));
      labels[v] = "C_" + std::to_string(v);
    }
    return Partition(outcomes, std::move(blocks), std::move(labels));
  }
  if (kind == "explicit") {
    std::vector<std::vector<std::size_t>> blocks;
    try {
      blocks = require(p, "blocks", "partition").get<std::vector<std::vector<std::size_t>>>();
    } catch (const nlohmann::json::exception&) {
      fail("partition.blocks", "expected an array of index arrays");
    }
    auto labels = get_or<std::vector<std::string>>(p, "labels", {}, "partition");
    try {
      return Partition(outcomes, std::move(blocks), std::move(labels));
    } catch (const ValidationError& e) {
      fail("partition.blocks", e.what());
    }
  }
  fail("partition.kind", "unknown kind '" + kind + "' (expected atomic, vertex_blocks or explicit)");
}

RunOptions build_options(const ordered_json& cfg) {
  RunOptions o;
  auto it = cfg.find("options");
  if (it == cfg.end()) return o;
  const ordered_json& j = *it;
  if (!j.is_object()) fail("options", "expected an object");
  o.n_max = get_or<int>(j, "n_max", o.n_max, "options");
  o.min_depth = get_or<int>(j, "min_depth", o.min_depth, "options");
  o.tol = get_or<double>(j, "tol", o.tol, "options");
  o.window = get_or<int>(j, "window", o.window, "options");
  o.prune_eps = get_or<double>(j, "prune_eps", o.prune_eps, "options");
  o.merge_tol = get_or<double>(j, "merge_tol", o.merge_tol, "options");
  o.merge = get_or<bool>(j, "merge", o.merge, "options");
  o.strict = get_or<bool>(j, "strict", o.strict, "options");
  o.classify = get_or<bool>(j, "classify", o.classify, "options");
  o.branch_budget = get_or<std::size_t>(j, "branch_budget", o.branch_budget, "options");
  if (o.n_max < 0) fail("options.n_max", "must be nonnegative");
  if (!(o.tol > 0.0)) fail("options.tol", "must be positive");
  if (o.window < 1) fail("options.window", "must be at least 1");
  if (!(o.prune_eps >= 0.0)) fail("options.prune_eps", "must be nonnegative");
  if (!(o.merge_tol >= 1e-15)) fail("options.merge_tol", "must be at least 1e-15");
  return o;
}

double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

ordered_json number_or_null(const std::optional<double>& x) {
  return x ? ordered_json(round15(*x)) : ordered_json(nullptr);
}

ordered_json report_json(const ConvergenceReport& r) {
  ordered_json j;
  j["converged"] = r.converged;
  j["value"] = number_or_null(r.converged_value);
  j["steps_used"] = r.steps_used;
  ordered_json direct = ordered_json::array();
  for (double x : r.direct_sequence) direct.push_back(round15(x));
  ordered_json ces = ordered_json::array();
  for (double x : r.cesaro_sequence) ces.push_back(round15(x));
  j["direct_sequence"] = std::move(direct);
  j["cesaro_sequence"] = std::move(ces);
  return j;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const AccuracyError*>(&e)) return kExitTolerance;
  if (dynamic_cast<const NumericError*>(&e)) return kExitTolerance;
  if (dynamic_cast<const MismatchError*>(&e)) return kExitTolerance;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitUsage;
  if (dynamic_cast<const UnsupportedError*>(&e)) return kExitUsage;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kExitUsage;
  return kExitTolerance;
}

Experiment build_experiment(const ordered_json& config) {
  if (!config.is_object()) throw ConfigError("config: top level must be a JSON object");
  const WalkSpec w = build_walk(require(config, "walk", ""));

  int power = 1;
  if (auto it = config.find("power"); it != config.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1) fail("power", "must be an integer >= 1");
    power = it->get<int>();
  }

  Instrument t = build_instrument(require(config, "instrument", ""), w.walk);
  DensityState rho = build_state(require(config, "state", ""), w);
  Partition c = build_partition(require(config, "partition", ""), t, w.walk);
  RunOptions opts = build_options(config);

  if (t.dim() != w.walk.dim()) fail("instrument", "dimension does not match the walk");
  if (rho.dim() != w.walk.dim()) fail("state", "dimension does not match the walk");

  return Experiment{config, unitary_power(w.walk, power), std::move(t), std::move(rho), std::move(c),
                    opts};
}

Experiment load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return build_experiment(j);
}

RunRecord run_experiment(const Experiment& e) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  r.config = e.config;
  r.report = dynamical_entropy(e.step_unitary, e.instrument, e.state, e.partition, e.options);
  r.rows = r.report.sz_records;
  r.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_csv(const RunRecord& r) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& row : r.rows) {
    os << row.depth << ',' << format_number(row.a_n) << ',' << format_number(row.cesaro) << ','
       << row.branch_count << ',' << row.merged_count << ',' << format_number(row.pruned_mass) << ',';
    if (row.classes) {
      os << format_number(row.classes->constant) << ',' << format_number(row.classes->even) << ','
         << format_number(row.classes->odd);
    } else {
      os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

ordered_json summary_json(const RunRecord& r, bool include_duration) {
  ordered_json j;
  j["format_version"] = kSummaryFormatVersion;
  j["units"] = "nats";
  j["config"] = r.config;
  j["sz_entropy"] = report_json(r.report.sz_entropy);
  j["measurement_entropy"] = report_json(r.report.measurement_entropy);
  j["dynamical_entropy"] = number_or_null(r.report.dynamical_entropy);
  j["warnings"] = r.report.warnings;
  if (include_duration) j["duration_seconds"] = r.duration_seconds;
  return j;
}

RunOutputs run_config(const std::filesystem::path& config_path,
                      const std::optional<std::filesystem::path>& out_dir, bool strict) {
  Experiment e = load_experiment(config_path);
  if (strict) {
    e.options.strict = true;
    e.config["options"]["strict"] = true;
  }
  RunOutputs out;
  out.record = run_experiment(e);

  std::filesystem::path dir = out_dir ? *out_dir : config_path.parent_path();
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  const std::string stem = config_path.stem().string();
  out.csv_path = dir / (stem + ".csv");
  out.summary_path = dir / (stem + ".summary.json");
  {
    std::ofstream csv(out.csv_path);
    csv << format_csv(out.record);
  }
  {
    std::ofstream js(out.summary_path);
    js << summary_json(out.record).dump(2) << '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckRow> paper_check() {
  static constexpr int kN = 5;
  std::vector<CheckRow> rows;
  auto add = [&rows](std::string name, double expected, double computed, double tol) {
    const double err = std::abs(computed - expected);
    rows.push_back({std::move(name), expected, computed, err, tol, err < tol});
  };
  auto dyn_or_nan = [](const EntropyReport& r) {
    return r.dynamical_entropy.value_or(std::numeric_limits<double>::quiet_NaN());
  };

  const TransitionMatrix q = cycle_walk(kN);
  const ProbVector uniform_v = ProbVector::uniform(kN);
  add("H(P) cycle", kLn2, markov_entropy(q, uniform_v), 1e-12);
  add("H(P^2) cycle", 1.5 * kLn2, markov_entropy(matrix_power(q, 2), uniform_v), 1e-12);

  const CoinedWalk walk = hadamard_walk(kN);
  const Operator u1 = walk.unitary();
  const Operator u2 = unitary_power(walk, 2);
  const auto cfg = [](const std::string& inst) {
    return ordered_json{{"walk", {{"kind", "hadamard"}, {"N", kN}}},
                        {"instrument", {{"kind", inst}}},
                        {"state", {{"kind", "maximally_mixed"}}},
                        {"partition", {{"kind", "vertex_blocks"}}}};
  };
  const Experiment coherent = build_experiment(cfg("coherent"));
  const Experiment rank2 = build_experiment(cfg("rank2_position"));
  const DensityState eig = pure_state(hadamard_eigenvector(kN));
  const Partition atomic = Partition::atomic(coherent.instrument.outcome_count());

  RunOptions opts;
  add("SZ Theta eigenstate", kLn2,
      dyn_or_nan(dynamical_entropy(u1, coherent.instrument, eig, atomic, opts)), 1e-9);
  add("SZ Theta C_V", kLn2,
      dyn_or_nan(dynamical_entropy(u1, coherent.instrument, coherent.state, coherent.partition, opts)),
      1e-9);
  add("SZ Theta^2 C_V", 1.5 * kLn2,
      dyn_or_nan(dynamical_entropy(u2, coherent.instrument, coherent.state, coherent.partition, opts)),
      1e-9);
  add("SZ Theta rank-2", kLn2,
      dyn_or_nan(dynamical_entropy(u1, rank2.instrument, rank2.state, rank2.partition, opts)), 1e-9);
  add("SZ Theta^2 rank-2", 4.0 / 3.0 * kLn2,
      dyn_or_nan(dynamical_entropy(u2, rank2.instrument, rank2.state, rank2.partition, opts)), 1e-5);
  return rows;
}

void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows, bool bits) {
  const double unit = bits ? 1.0 / kLn2 : 1.0;
  os << std::left << std::setw(22) << "row" << std::setw(20) << "expected" << std::setw(20)
     << "computed" << std::setw(12) << "|error|" << std::setw(10) << "tol"
     << "status\n";
  for (const auto& r : rows) {
    std::ostringstream err, tol;
    err << std::setprecision(3) << std::scientific << r.error * unit;
    tol << std::setprecision(0) << std::scientific << r.tolerance * unit;
    os << std::left << std::setw(22) << r.name << std::setw(20) << format_number(r.expected * unit)
       << std::setw(20) << format_number(r.computed * unit) << std::setw(12) << err.str()
       << std::setw(10) << tol.str() << (r.pass ? "ok" : "FAIL") << '\n';
  }
  os << "units: " << (bits ? "bits" : "nats") << '\n';
}

MarkovSummary markov_cmd(int n, int power, const std::string& start, int n_max, double tol) {
  if (n < 3) throw ValidationError("markov: N must be at least 3");
  if (power < 1) throw ValidationError("markov: power must be at least 1");
  const TransitionMatrix p = matrix_power(cycle_walk(n), power);
  const auto nv = static_cast<std::size_t>(n);

  std::optional<ProbVector> mu0;
  if (start == "uniform") {
    mu0 = ProbVector::uniform(nv);
  } else if (start.rfind("point:", 0) == 0) {
    std::size_t k = 0;
    try {
      k = std::stoul(start.substr(6));
    } catch (const std::exception&) {
      throw ValidationError("markov: cannot parse start '" + start + "'");
    }
    mu0 = ProbVector::point_mass(nv, k);
  } else {
    throw ValidationError("markov: start must be 'uniform' or 'point:K', got '" + start + "'");
  }

  ProbVector stationary = stationary_distribution(p);
  const double h = markov_entropy(p, stationary);
  return MarkovSummary{n, power, h, std::move(stationary), entropy_rate(p, *mu0, n_max, tol)};
}

void print_markov(std::ostream& os, const MarkovSummary& s, bool bits) {
  const double unit = bits ? 1.0 / kLn2 : 1.0;
  const char* units = bits ? "bits" : "nats";
  os << "cycle walk N=" << s.n << ", power " << s.power << '\n';
  os << "H(P^" << s.power << ") = " << format_number(s.entropy * unit) << ' ' << units << '\n';
  os << "stationary:";
  for (double x : s.stationary.entries()) os << ' ' << format_number(x);
  os << '\n';
  os << "n,rate,cesaro\n";
  for (std::size_t i = 0; i < s.rate.direct_sequence.size(); ++i) {
    os << i << ',' << format_number(s.rate.direct_sequence[i] * unit) << ','
       << format_number(s.rate.cesaro_sequence[i] * unit) << '\n';
  }
  if (s.rate.converged) {
    os << "entropy rate converged to " << format_number(*s.rate.converged_value * unit) << ' '
       << units << " after " << s.rate.steps_used << " steps\n";
  } else {
    os << "entropy rate did not converge in " << s.rate.steps_used << " steps\n";
  }
}

}  // namespace qdent
