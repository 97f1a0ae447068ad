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

#include "nnwfn/dataset.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string_view>
#include <vector>

#include "nnwfn/error.hpp"

namespace nnwfn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    const auto field = trim(line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start));
    double value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end)
      throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                       std::string(field) + "' as a number");
    if (!std::isfinite(value))
      throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
    row.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int b = 0; b < 4; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFFu);
  out.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
  if (name == "csv") return DatasetFormat::kCsv;
  if (name == "bin" || name == "packed-binary") return DatasetFormat::kPackedBinary;
  throw ParseError("unknown dataset format '" + name + "'");
}

std::string format_name(DatasetFormat format) {
  return format == DatasetFormat::kCsv ? "csv" : "packed-binary";
}

Dataset read_csv(std::istream& in) {
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = parse_row(line, line_no);
    if (dataset.points.empty()) {
      dataset.dim = row.size();
    } else if (row.size() != dataset.dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dataset.dim) + " columns, got " +
                       std::to_string(row.size()));
    }
    dataset.points.push_back(Eigen::Map<VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  return dataset;
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : dataset.points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) out << ',';
      out << p[i];
    }
    out << '\n';
  }
}

Dataset read_packed(std::istream& in) {
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  Dataset dataset;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    if (bytes.size() - offset < 4)
      throw ParseError("offset " + std::to_string(offset) + ": truncated dimension header");
    const auto dim = static_cast<std::int32_t>(get_u32(&bytes[offset]));
    if (dim <= 0)
      throw ParseError("offset " + std::to_string(offset) + ": invalid dimension " +
                       std::to_string(dim));
    if (!dataset.points.empty() && static_cast<std::size_t>(dim) != dataset.dim)
      throw ParseError("offset " + std::to_string(offset) + ": record dimension " +
                       std::to_string(dim) + " differs from " + std::to_string(dataset.dim));
    offset += 4;
    const std::size_t need = static_cast<std::size_t>(dim) * 4;
    if (bytes.size() - offset < need)
      throw ParseError("offset " + std::to_string(offset) + ": truncated record");
    VectorXd p(dim);
    for (std::int32_t i = 0; i < dim; ++i) {
      const float f = std::bit_cast<float>(get_u32(&bytes[offset + 4 * static_cast<std::size_t>(i)]));
      if (!std::isfinite(f))
        throw ParseError("offset " + std::to_string(offset + 4 * static_cast<std::size_t>(i)) +
                         ": non-finite value");
      p[i] = f;
    }
    offset += need;
    dataset.dim = static_cast<std::size_t>(dim);
    dataset.points.push_back(std::move(p));
  }
  return dataset;
}

void write_packed(std::ostream& out, const Dataset& dataset) {
  for (const auto& p : dataset.points) {
    put_u32(out, static_cast<std::uint32_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p[i])));
  }
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");
  return format == DatasetFormat::kCsv ? read_csv(in) : read_packed(in);
}

void save_dataset(const std::string& path, const Dataset& dataset,
                  DatasetFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  if (format == DatasetFormat::kCsv)
    write_csv(out, dataset);
  else
    write_packed(out, dataset);
}

std::uint64_t fingerprint(const Dataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 0x100000001b3ull;
    }
  };
  mix(dataset.dim);
  mix(dataset.points.size());
  for (const auto& p : dataset.points)
    for (Eigen::Index i = 0; i < p.size(); ++i) mix(std::bit_cast<std::uint64_t>(p[i]));
  return h;
}

VectorXd parse_inline_vector(const std::string& text) {
  auto row = parse_row(text, 1);
  return Eigen::Map<VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
}

}  // namespace nnwfn
