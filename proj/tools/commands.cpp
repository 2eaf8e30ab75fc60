#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "qtomo/ensemble_io.hpp"
#include "qtomo/errors.hpp"
#include "qtomo/injectivity.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/recovery.hpp"
#include "qtomo/reports.hpp"
#include "qtomo/varieties.hpp"

namespace qtomo::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::uint64_t seed_of(const ExperimentConfig& c) { return c.get_u64("seed", kDefaultSeed); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Execution execution_of(const ExperimentConfig& c) {
  const std::string mode = c.get_string("execution", "parallel");
  if (mode == "parallel") return Execution::parallel;
  if (mode == "serial") return Execution::serial;
  throw PreconditionError("execution must be 'parallel' or 'serial'");
}

// An ensemble from "ensemble=<path>", or generated from n, m, kind, seed.
UnitaryEnsemble ensemble_of(const ExperimentConfig& c) {
  if (c.has("ensemble")) return load_ensemble(c.get_string("ensemble", ""));
  const int n = c.get_int("n", 4);
  const int m = c.get_int("m", 4);
  const std::string kind = c.get_string("kind", "haar");
  SeededRng rng(seed_of(c), 0);
  if (kind == "haar") return UnitaryEnsemble::haar(n, m, rng);
  return structured_ensemble(structured_kind_from_string(kind), n, rng, m);
}

CommandOutput cmd_gen(const ExperimentConfig& c) {
  std::ostringstream os;
  write_ensemble(os, ensemble_of(c));
  return {os.str(), kExitOk};
}

CommandOutput cmd_measure(const ExperimentConfig& c) {
  const UnitaryEnsemble e = ensemble_of(c);
  const std::string state = c.get_string("state", "random");
  CVector x;
  if (state == "random") {
    SeededRng rng(seed_of(c), 1);
    x = random_unit_vector(e.n(), rng);
  } else if (state.rfind("basis:", 0) == 0) {
    const int k = std::stoi(state.substr(6));
    if (k < 0 || k >= e.n()) throw PreconditionError("measure: basis index out of range");
    x = CVector::Unit(e.n(), k);
  } else {
    throw PreconditionError("measure: state must be 'random' or 'basis:<k>'");
  }
  Json j = to_json(measure_state(e, x));
  j["state"] = complex_vector_json(x);
  return {dump(j), kExitOk};
}

CertifyConfig certify_config_of(const ExperimentConfig& c) {
  CertifyConfig cfg;
  cfg.rank_tol = c.get_double("rank_tol", cfg.rank_tol);
  cfg.rank2.starts = c.get_int("multistarts", cfg.rank2.starts);
  cfg.direct.starts = c.get_int("direct_multistarts", cfg.rank2.starts);
  cfg.rank2.max_iterations = c.get_int("max_iterations", cfg.rank2.max_iterations);
  cfg.direct.max_iterations = c.get_int("direct_max_iterations", cfg.direct.max_iterations);
  cfg.direct.barrier = c.get_double("barrier", cfg.direct.barrier);
  cfg.rank2.execution = cfg.direct.execution = execution_of(c);
  cfg.skip_search_when_nullspace_empty = c.get_bool("skip_when_injective", true);
  return cfg;
}

CommandOutput cmd_certify(const ExperimentConfig& c) {
  const UnitaryEnsemble e = ensemble_of(c);
  const CertificationReport r = certify(e, certify_config_of(c), SeededRng(seed_of(c), 2));
  return {dump(to_json(r, c.get_bool("timing", true))),
          r.verdict == Verdict::collision_found ? kExitCollision : kExitOk};
}

CommandOutput cmd_variety_check(const ExperimentConfig& c) {
  const VarietyKind kind = variety_kind_from_string(c.get_string("kind", "X"));
  const int n = c.get_int("n", 4);
  const int points = c.get_int("points", 100);
  const auto reports = variety_batch(kind, n, points, SeededRng(seed_of(c), 3), execution_of(c));
  std::string out;
  for (const auto& r : reports) out += to_json(r).dump() + "\n";
  return {out, kExitOk};
}

CommandOutput cmd_ledger(const ExperimentConfig& c) {
  const int lo = c.get_int("n_min", c.get_int("n", 2));
  const int hi = c.get_int("n_max", c.get_int("n", lo));
  if (hi < lo) throw PreconditionError("ledger: n_max < n_min");
  Json rows = Json::array();
  for (int n = lo; n <= hi; ++n) rows.push_back(to_json(dimension_ledger(n)));
  return {dump(Json{{"rows", std::move(rows)}}), kExitOk};
}

CommandOutput cmd_recover(const ExperimentConfig& c) {
  const UnitaryEnsemble e = ensemble_of(c);
  if (!c.has("measurements")) throw PreconditionError("recover: measurements=<file> is required");
  std::ifstream in(c.get_string("measurements", ""));
  if (!in) throw PreconditionError("recover: cannot open measurement file");
  const Json mj = Json::parse(in);
  const MeasurementVector b = measurement_vector_from_json(mj);
  if (b.n != e.n() || b.m != e.m()) throw DimensionMismatch("recover: measurements do not match the ensemble");
  std::optional<CVector> truth;
  if (mj.contains("state")) truth = complex_vector_from_json(mj.at("state"));

  RecoveryConfig cfg;
  cfg.max_iterations = c.get_int("max_iterations", cfg.max_iterations);
  cfg.refinement_iterations = c.get_int("refinement_iterations", cfg.refinement_iterations);
  cfg.convergence_tol = c.get_double("convergence_tol", cfg.convergence_tol);
  cfg.refinement = c.get_bool("refine", cfg.refinement);
  return {dump(to_json(recover(e, b, cfg, truth))), kExitOk};
}

CommandOutput cmd_embed_check(const ExperimentConfig& c) {
  const UnitaryEnsemble e = ensemble_of(c);
  if (e.n() < 2) throw PreconditionError("embed-check: n must be >= 2");
  const int pairs = c.get_int("pairs", 10000);
  const int points = c.get_int("points", 100);
  const SeededRng root(seed_of(c), 4);

  std::vector<double> scaled(std::max(pairs, 0));
  for_each_index(pairs, execution_of(c), [&](std::ptrdiff_t k) {
    SeededRng rng = root.split(static_cast<std::uint64_t>(k));
    const CVector x = random_unit_vector(e.n(), rng);
    const CVector y = random_unit_vector(e.n(), rng);
    const double lift = (HermitianMatrix::outer(x) - HermitianMatrix::outer(y)).frobenius_norm();
    scaled[k] = (embedding_map(e, x) - embedding_map(e, y)).norm() / lift;
  });
  std::vector<int> ranks(std::max(points, 0));
  for_each_index(points, execution_of(c), [&](std::ptrdiff_t k) {
    SeededRng rng = root.split(static_cast<std::uint64_t>(pairs + k));
    ranks[k] = embedding_differential_rank(e, random_unit_vector(e.n(), rng)).rank;
  });
  const double min_scaled = scaled.empty() ? kInfinity : *std::min_element(scaled.begin(), scaled.end());
  const int expected = 2 * (e.n() - 1);
  const bool ranks_ok = std::all_of(ranks.begin(), ranks.end(), [&](int r) { return r == expected; });
  Json j{{"n", e.n()},
         {"m", e.m()},
         {"pairs", pairs},
         {"min_scaled_distance", number_json(min_scaled)},
         {"injectivity_probe_passed", min_scaled > 1e-9},
         {"points", points},
         {"expected_differential_rank", expected},
         {"min_differential_rank", ranks.empty() ? 0 : *std::min_element(ranks.begin(), ranks.end())},
         {"max_differential_rank", ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end())},
         {"rank_probe_passed", ranks_ok},
         {"seed", seed_of(c)}};
  return {dump(j), kExitOk};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen", "measure", "certify", "variety-check",
                                              "ledger", "recover", "embed-check"};
  return names;
}

CommandOutput run_command(const std::string& command, const ExperimentConfig& config) {
  if (command == "gen") return cmd_gen(config);
  if (command == "measure") return cmd_measure(config);
  if (command == "certify") return cmd_certify(config);
  if (command == "variety-check") return cmd_variety_check(config);
  if (command == "ledger") return cmd_ledger(config);
  if (command == "recover") return cmd_recover(config);
  if (command == "embed-check") return cmd_embed_check(config);
  throw PreconditionError("unknown command '" + command + "'");
}

int run_and_write(const std::string& command, const ExperimentConfig& config, std::ostream& out,
                  std::ostream& err) {
  try {
    const CommandOutput result = run_command(command, config);
    if (config.has("out")) {
      write_file_atomically(config.get_string("out", ""), result.text);
    } else {
      out << result.text;
    }
    return result.exit_code;
  } catch (const std::exception& ex) {
    err << "qtomo " << command << ": " << ex.what() << "\n";
    return kExitError;
  }
}

}  // namespace qtomo::cli
