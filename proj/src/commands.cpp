// Copyright 2026 The nnwfn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nnwfn/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "nnwfn/error.hpp"
#include "nnwfn/oracle.hpp"
#include "nnwfn/parallel.hpp"
#include "nnwfn/snapshot.hpp"

namespace nnwfn {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

json plan_json(const ReductionPlan& plan) {
  return {{"alpha1", plan.alpha1}, {"alpha2", plan.alpha2}, {"gamma", plan.gamma},
          {"k1", plan.k1},         {"k2", plan.k2},         {"L", plan.L},
          {"w", plan.w},           {"f_n", plan.f_n},       {"mu", plan.mu},
          {"D1", plan.D1},         {"D2", plan.D2},         {"overridden", plan.overridden}};
}

json config_json(const ProblemConfig& config) {
  return {{"n", config.n}, {"d", config.d}, {"c", config.c}, {"R", config.R}};
}

json result_json(std::size_t query, const QueryResult<double>& r) {
  return {{"query", query}, {"ids", r.ids}, {"distances", r.distances}};
}

/// Bound on Pr[||A x|| <= alpha] for ||x|| >= c and block dimension k.
double single_mapping_bound(std::size_t k, double c, double alpha) {
  const double r = (c - alpha) / (2.0 * c);
  return std::exp(-static_cast<double>(k) * r * r);
}

}  // namespace

int cmd_build(const BuildCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto start = Clock::now();
    const Dataset dataset = load_dataset(cmd.dataset_path, cmd.format);
    ProblemConfig config{dataset.size(), dataset.dim, cmd.c, cmd.radius};
    const double f_n = cmd.f_n.value_or(default_f_n(dataset.size()));
    const ReductionPlan plan = plan_parameters(config, f_n, cmd.overrides);
    const BuildOptions options{cmd.combo_limit, cmd.budget};
    const auto index = build_index<double>(dataset.points, config, plan, cmd.seed, options);

    IndexSnapshot snapshot;
    snapshot.seed = cmd.seed;
    snapshot.config = config;
    snapshot.plan = plan;
    snapshot.options = options;
    snapshot.dataset_fingerprint = fingerprint(dataset);
    snapshot.dataset_path = std::filesystem::absolute(cmd.dataset_path).string();
    snapshot.dataset_format = cmd.format;
    save_snapshot(cmd.snapshot_path, snapshot);

    const std::uint64_t expansion = expansion_size(plan.w * plan.L, cmd.budget);
    json report = {
        {"status", "ok"},
        {"snapshot", cmd.snapshot_path},
        {"seed", cmd.seed},
        {"config", config_json(config)},
        {"plan", plan_json(plan)},
        {"blocks_per_family", index.blocks_per_family()},
        {"combinations", index.combo_count()},
        {"expansion_per_point", expansion},
        {"expansion_budget", cmd.budget},
        {"budget_usage", static_cast<double>(expansion) / static_cast<double>(cmd.budget)},
        {"total_bucket_entries", index.total_bucket_entries()},
        {"dataset_fingerprint", hex64(snapshot.dataset_fingerprint)},
        {"build_seconds", seconds_since(start)},
    };
    out << report.dump(2) << '\n';
    return kExitOk;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << '\n'
        << "minimal c: " << e.minimal_c() << '\n';
    return kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_query(const QueryCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.query_path.has_value() == cmd.inline_vector.has_value())
      throw Error("give exactly one of a query file or an inline vector");
    const auto snapshot = load_snapshot(cmd.snapshot_path);
    const auto index = load_index(snapshot);

    PointSet<double> queries;
    if (cmd.inline_vector)
      queries.push_back(parse_inline_vector(*cmd.inline_vector));
    else
      queries = load_dataset(*cmd.query_path, cmd.format).points;

    std::vector<QueryResult<double>> results(queries.size());
    parallel_for(queries.size(), [&](std::size_t i) { results[i] = index.query(queries[i]); });

    json records = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) records.push_back(result_json(i, results[i]));
    out << json{{"results", records}}.dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto snapshot = load_snapshot(cmd.snapshot_path);
    auto index = load_index(snapshot);
    if (cmd.fault_drop_id) index.drop_for_fault_injection(*cmd.fault_drop_id);

    const auto& points = index.points();
    const double R = index.config().R;
    const double c = index.config().c;
    if (cmd.trials == 0) err << "warning: trials = 0, verification is vacuous\n";
    if (points.empty() && cmd.trials > 0)
      err << "warning: empty dataset, no planted queries possible\n";

    Rng rng = derive_stream(cmd.seed, StreamDomain::kWorkload, 0);
    std::uniform_real_distribution<double> radius_dist(0.1 * R, R);
    std::size_t false_negatives = 0;
    std::size_t soundness_violations = 0;
    json offenders = json::array();
    const std::size_t trials = points.empty() ? 0 : cmd.trials;
    for (std::size_t t = 0; t < trials; ++t) {
      std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
      const std::size_t planted = pick(rng);
      const VectorXd q = points[planted] +
                         radius_dist(rng) * sample_unit_vector<double>(index.config().d, rng);
      const auto result = index.query(q);
      const auto oracle = exact_sandwich(points, q, R, c);
      const auto report = sandwich_check(result, oracle.within_R, oracle.within_cR);
      false_negatives += report.false_negatives.size();
      soundness_violations += report.soundness_violations.size();
      for (const auto& o : report.false_negatives)
        offenders.push_back({{"trial", t}, {"kind", "false_negative"}, {"id", o.id}, {"distance", o.distance}});
      for (const auto& o : report.soundness_violations)
        offenders.push_back({{"trial", t}, {"kind", "soundness"}, {"id", o.id}, {"distance", o.distance}});
    }
    const bool pass = false_negatives == 0 && soundness_violations == 0;
    json report = {
        {"status", pass ? "pass" : "fail"},
        {"trials", trials},
        {"seed", cmd.seed},
        {"false_negatives", false_negatives},
        {"soundness_violations", soundness_violations},
        {"offenders", offenders},
        {"vacuous", trials == 0},
    };
    out << report.dump(2) << '\n';
    return pass ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto snapshot = load_snapshot(cmd.snapshot_path);
    const auto index = load_index(snapshot);
    const auto queries = load_dataset(cmd.workload_path, cmd.format).points;
    const auto& points = index.points();
    const auto& config = index.config();
    const auto& plan = index.plan();

    struct Record {
      QueryStats stats;
      double seconds = 0;
      std::size_t false_negatives = 0;
      std::size_t far_points = 0;
      std::size_t far_leaf_hits = 0;
    };
    std::vector<Record> records(queries.size());
    parallel_for(queries.size(), [&](std::size_t i) {
      Record& rec = records[i];
      const auto start = Clock::now();
      const auto result = index.query(queries[i], &rec.stats);
      rec.seconds = seconds_since(start);

      const auto oracle = exact_sandwich(points, queries[i], config.R, config.c);
      rec.false_negatives = sandwich_check(result, oracle.within_R, oracle.within_cR)
                                .false_negatives.size();
      rec.far_points = points.size() - oracle.within_cR.size();
      for (const auto& ids : index.leaf_candidates(queries[i]))
        for (auto id : ids)
          if (!oracle.within_cR.count(id)) ++rec.far_leaf_hits;
    });

    json per_query = json::array();
    std::size_t total_fn = 0, total_far = 0, total_far_hits = 0;
    std::size_t total_bucket_hits = 0, total_results = 0;
    double total_seconds = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      const double pairs = static_cast<double>(r.far_points) * static_cast<double>(index.combo_count());
      per_query.push_back({
          {"query", i},
          {"bucket_hits", r.stats.bucket_hits},
          {"leaf_hits", r.stats.leaf_hits},
          {"unique_candidates", r.stats.unique_candidates},
          {"result_size", r.stats.result_size},
          {"false_negatives", r.false_negatives},
          {"far_points", r.far_points},
          {"far_leaf_hits", r.far_leaf_hits},
          {"empirical_fp_rate", pairs > 0 ? static_cast<double>(r.far_leaf_hits) / pairs : 0.0},
          {"seconds", r.seconds},
      });
      total_fn += r.false_negatives;
      total_far += r.far_points;
      total_far_hits += r.far_leaf_hits;
      total_bucket_hits += r.stats.bucket_hits;
      total_results += r.stats.result_size;
      total_seconds += r.seconds;
    }
    const double pairs = static_cast<double>(total_far) * static_cast<double>(index.combo_count());
    const double single = single_mapping_bound(plan.k2, config.c, plan.alpha2);
    json aggregate = {
        {"queries", records.size()},
        {"false_negatives", total_fn},
        {"total_bucket_hits", total_bucket_hits},
        {"total_results", total_results},
        {"empirical_fp_rate", pairs > 0 ? static_cast<double>(total_far_hits) / pairs : 0.0},
        {"analytic_fp_bound_single_mapping", single},
        {"analytic_fp_bound_combination", std::pow(single, static_cast<double>(plan.L))},
        {"total_bucket_entries", index.total_bucket_entries()},
        {"combinations", index.combo_count()},
        {"mean_query_seconds", records.empty() ? 0.0 : total_seconds / static_cast<double>(records.size())},
    };
    json report = {
        {"config", config_json(config)},
        {"plan", plan_json(plan)},
        {"seed", snapshot.seed},
        {"per_query", per_query},
        {"aggregate", aggregate},
    };
    std::ofstream file(cmd.output_path);
    if (!file) throw Error("cannot write report '" + cmd.output_path + "'");
    file << report.dump(2) << '\n';
    out << aggregate.dump(2) << '\n';
    return total_fn == 0 ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace nnwfn
