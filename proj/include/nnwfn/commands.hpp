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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nnwfn/dataset.hpp"
#include "nnwfn/lsh.hpp"
#include "nnwfn/reduction.hpp"

namespace nnwfn {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct BuildCommand {
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::kCsv;
  double c = 0;
  double radius = 1;
  std::uint64_t seed = 0;
  std::optional<double> f_n;
  PlanOverrides overrides;
  std::uint64_t budget = kDefaultExpansionBudget;
  std::uint64_t combo_limit = BuildOptions{}.combo_limit;
  std::string snapshot_path;
};

struct QueryCommand {
  std::string snapshot_path;
  std::optional<std::string> query_path;
  DatasetFormat format = DatasetFormat::kCsv;
  std::optional<std::string> inline_vector;
};

struct VerifyCommand {
  std::string snapshot_path;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<PointId> fault_drop_id;  // test hook
};

struct BenchCommand {
  std::string snapshot_path;
  std::string workload_path;
  DatasetFormat format = DatasetFormat::kCsv;
  std::string output_path;
};

/// Builds, writes the snapshot and prints a JSON build report to `out`.
int cmd_build(const BuildCommand& cmd, std::ostream& out, std::ostream& err);

/// Prints {"results": [{"query", "ids", "distances"}...]} in query order.
int cmd_query(const QueryCommand& cmd, std::ostream& out, std::ostream& err);

/// Planted-query sandwich loop against the exact oracle. Exit 0 iff no false
/// negatives and no soundness violations.
int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

/// Per-query candidate/result counts, timings and empirical false-positive
/// rates written as JSON to cmd.output_path.
int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace nnwfn
