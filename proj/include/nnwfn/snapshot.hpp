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

#include <cstdint>
#include <iosfwd>
#include <string>

#include "nnwfn/dataset.hpp"
#include "nnwfn/reduction.hpp"

namespace nnwfn {

inline constexpr char kSnapshotMagic[6] = {'N', 'N', 'W', 'F', 'N', '1'};
inline constexpr std::uint8_t kSnapshotVersion = 1;

/// Everything needed to rebuild an index deterministically. Buckets are not
/// stored; loading replays the build from (seed, plan, dataset).
struct IndexSnapshot {
  std::uint8_t format_version = kSnapshotVersion;
  std::uint64_t seed = 0;
  ProblemConfig config;
  ReductionPlan plan;
  BuildOptions options;
  std::uint64_t dataset_fingerprint = 0;
  std::string dataset_path;
  DatasetFormat dataset_format = DatasetFormat::kCsv;
};

void write_snapshot(std::ostream& out, const IndexSnapshot& snapshot);
IndexSnapshot read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const IndexSnapshot& snapshot);
IndexSnapshot load_snapshot(const std::string& path);

/// Rebuilds the index over `dataset`; throws StaleSnapshot when the dataset
/// fingerprint differs from the recorded one.
NnwfnIndex<double> load_index(const IndexSnapshot& snapshot, const Dataset& dataset);

/// Reads the dataset the snapshot points at, then rebuilds.
NnwfnIndex<double> load_index(const IndexSnapshot& snapshot);

}  // namespace nnwfn
