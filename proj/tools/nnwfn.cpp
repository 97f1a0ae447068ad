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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nnwfn/commands.hpp"
#include "nnwfn/error.hpp"

namespace {

template <typename T>
void copy_if_set(const CLI::Option* opt, const T& value, std::optional<T>& target) {
  if (opt->count() > 0) target = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nnwfn: approximate nearest neighbors without false negatives"};
  app.require_subcommand(1);

  std::string format = "csv";

  nnwfn::BuildCommand build;
  std::size_t k1 = 0, k2 = 0, L = 0, w = 0;
  double alpha2 = 0, f_n = 0;
  auto* build_cmd = app.add_subcommand("build", "build an index and write a snapshot");
  build_cmd->add_option("--dataset", build.dataset_path, "dataset file")->required();
  build_cmd->add_option("--format", format, "csv | bin");
  build_cmd->add_option("--c", build.c, "approximation factor c > 1")->required();
  build_cmd->add_option("--radius", build.radius, "radius R in input units");
  build_cmd->add_option("--seed", build.seed, "master seed");
  auto* f_n_opt = build_cmd->add_option("--f-n", f_n, "planner growth f(n) > 1 (default sqrt(ln n))");
  auto* k1_opt = build_cmd->add_option("--k1", k1, "override first-stage dimension");
  auto* k2_opt = build_cmd->add_option("--k2", k2, "override leaf dimension");
  auto* L_opt = build_cmd->add_option("--L", L, "override family count");
  auto* w_opt = build_cmd->add_option("--w", w, "override LSH repetitions");
  auto* alpha2_opt = build_cmd->add_option("--alpha2", alpha2, "override leaf approximation factor");
  build_cmd->add_option("--budget", build.budget, "cap on 3^(wL)");
  build_cmd->add_option("--combo-limit", build.combo_limit, "cap on block combinations");
  build_cmd->add_option("--out", build.snapshot_path, "snapshot path")->required();

  nnwfn::QueryCommand query;
  std::string query_file, inline_vector;
  auto* query_cmd = app.add_subcommand("query", "query a snapshot");
  query_cmd->add_option("--snapshot", query.snapshot_path)->required();
  auto* file_opt = query_cmd->add_option("--queries", query_file, "batch query file");
  auto* vec_opt = query_cmd->add_option("--vector", inline_vector, "inline query, comma separated");
  query_cmd->add_option("--format", format, "csv | bin");

  nnwfn::VerifyCommand verify;
  std::size_t fault_id = 0;
  auto* verify_cmd = app.add_subcommand("verify", "oracle sandwich check on planted queries");
  verify_cmd->add_option("--snapshot", verify.snapshot_path)->required();
  verify_cmd->add_option("--trials", verify.trials);
  verify_cmd->add_option("--seed", verify.seed);
  auto* fault_opt = verify_cmd->add_option("--fault-drop-id", fault_id)->group("");

  nnwfn::BenchCommand bench;
  auto* bench_cmd = app.add_subcommand("bench", "measure candidates, timings and FP rates");
  bench_cmd->add_option("--snapshot", bench.snapshot_path)->required();
  bench_cmd->add_option("--workload", bench.workload_path)->required();
  bench_cmd->add_option("--format", format, "csv | bin");
  bench_cmd->add_option("--output", bench.output_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto fmt = nnwfn::parse_format(format);
    if (build_cmd->parsed()) {
      build.format = fmt;
      copy_if_set(f_n_opt, f_n, build.f_n);
      copy_if_set(k1_opt, k1, build.overrides.k1);
      copy_if_set(k2_opt, k2, build.overrides.k2);
      copy_if_set(L_opt, L, build.overrides.L);
      copy_if_set(w_opt, w, build.overrides.w);
      copy_if_set(alpha2_opt, alpha2, build.overrides.alpha2);
      return nnwfn::cmd_build(build, std::cout, std::cerr);
    }
    if (query_cmd->parsed()) {
      query.format = fmt;
      if (file_opt->count()) query.query_path = query_file;
      if (vec_opt->count()) query.inline_vector = inline_vector;
      return nnwfn::cmd_query(query, std::cout, std::cerr);
    }
    if (verify_cmd->parsed()) {
      if (fault_opt->count()) verify.fault_drop_id = static_cast<nnwfn::PointId>(fault_id);
      return nnwfn::cmd_verify(verify, std::cout, std::cerr);
    }
    bench.format = fmt;
    return nnwfn::cmd_bench(bench, std::cout, std::cerr);
  } catch (const nnwfn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nnwfn::kExitError;
  }
}
