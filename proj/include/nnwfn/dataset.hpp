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
#include <string>

#include "nnwfn/types.hpp"

namespace nnwfn {

/// Row i of the file is point id i.
struct Dataset {
  std::size_t dim = 0;
  PointSet<double> points;

  std::size_t size() const { return points.size(); }
};

enum class DatasetFormat : std::uint8_t { kCsv = 0, kPackedBinary = 1 };

/// "csv" or "bin"/"packed-binary"; throws ParseError otherwise.
DatasetFormat parse_format(const std::string& name);
std::string format_name(DatasetFormat format);

Dataset read_csv(std::istream& in);
void write_csv(std::ostream& out, const Dataset& dataset);

/// Records of (int32 dim, dim float32), all little-endian.
Dataset read_packed(std::istream& in);
void write_packed(std::ostream& out, const Dataset& dataset);

Dataset load_dataset(const std::string& path, DatasetFormat format);
void save_dataset(const std::string& path, const Dataset& dataset,
                  DatasetFormat format);

/// FNV-1a 64 over dim, n and the IEEE-754 bits of every coordinate.
std::uint64_t fingerprint(const Dataset& dataset);

/// Parses "1.5,2,-3" into a vector.
VectorXd parse_inline_vector(const std::string& text);

}  // namespace nnwfn
