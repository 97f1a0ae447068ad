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

#include "nnwfn/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "nnwfn/error.hpp"

namespace nnwfn {
namespace {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

 private:
  void le(std::uint64_t v, int n) {
    for (int b = 0; b < n; ++b) out_.put(static_cast<char>((v >> (8 * b)) & 0xFFu));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) truncated();
    return s;
  }

 private:
  std::uint64_t le(int n) {
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) {
      const int ch = in_.get();
      if (ch == std::char_traits<char>::eof()) truncated();
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(ch)) << (8 * b);
    }
    return v;
  }
  [[noreturn]] void truncated() { throw ParseError("snapshot truncated"); }
  std::istream& in_;
};

}  // namespace

void write_snapshot(std::ostream& out, const IndexSnapshot& s) {
  Writer w(out);
  w.bytes(kSnapshotMagic, sizeof(kSnapshotMagic));
  w.u8(s.format_version);
  w.u64(s.seed);
  w.u64(s.config.n);
  w.u64(s.config.d);
  w.f64(s.config.c);
  w.f64(s.config.R);
  w.f64(s.plan.alpha1);
  w.f64(s.plan.alpha2);
  w.f64(s.plan.gamma);
  w.u64(s.plan.k1);
  w.u64(s.plan.k2);
  w.u64(s.plan.L);
  w.u64(s.plan.w);
  w.f64(s.plan.f_n);
  w.f64(s.plan.mu);
  w.f64(s.plan.D1);
  w.f64(s.plan.D2);
  w.u8(s.plan.overridden ? 1 : 0);
  w.u64(s.options.combo_limit);
  w.u64(s.options.expansion_budget);
  w.u64(s.dataset_fingerprint);
  w.u8(static_cast<std::uint8_t>(s.dataset_format));
  w.u32(static_cast<std::uint32_t>(s.dataset_path.size()));
  w.bytes(s.dataset_path.data(), s.dataset_path.size());
}

IndexSnapshot read_snapshot(std::istream& in) {
  Reader r(in);
  if (r.bytes(sizeof(kSnapshotMagic)) != std::string(kSnapshotMagic, sizeof(kSnapshotMagic)))
    throw ParseError("not a snapshot file (bad magic)");
  IndexSnapshot s;
  s.format_version = r.u8();
  if (s.format_version != kSnapshotVersion)
    throw VersionMismatch("unsupported snapshot version " +
                          std::to_string(s.format_version) + " (expected " +
                          std::to_string(kSnapshotVersion) + ")");
  s.seed = r.u64();
  s.config.n = r.u64();
  s.config.d = r.u64();
  s.config.c = r.f64();
  s.config.R = r.f64();
  s.plan.alpha1 = r.f64();
  s.plan.alpha2 = r.f64();
  s.plan.gamma = r.f64();
  s.plan.k1 = r.u64();
  s.plan.k2 = r.u64();
  s.plan.L = r.u64();
  s.plan.w = r.u64();
  s.plan.f_n = r.f64();
  s.plan.mu = r.f64();
  s.plan.D1 = r.f64();
  s.plan.D2 = r.f64();
  s.plan.overridden = r.u8() != 0;
  s.options.combo_limit = r.u64();
  s.options.expansion_budget = r.u64();
  s.dataset_fingerprint = r.u64();
  const auto format = r.u8();
  if (format > 1) throw ParseError("snapshot: unknown dataset format byte");
  s.dataset_format = static_cast<DatasetFormat>(format);
  s.dataset_path = r.bytes(r.u32());
  return s;
}

void save_snapshot(const std::string& path, const IndexSnapshot& snapshot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot '" + path + "'");
  write_snapshot(out, snapshot);
}

IndexSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

NnwfnIndex<double> load_index(const IndexSnapshot& snapshot, const Dataset& dataset) {
  if (fingerprint(dataset) != snapshot.dataset_fingerprint)
    throw StaleSnapshot("dataset fingerprint does not match snapshot; rebuild the index");
  ProblemConfig config = snapshot.config;
  config.n = dataset.size();
  return build_index<double>(dataset.points, config, snapshot.plan, snapshot.seed,
                             snapshot.options);
}

NnwfnIndex<double> load_index(const IndexSnapshot& snapshot) {
  return load_index(snapshot, load_dataset(snapshot.dataset_path, snapshot.dataset_format));
}

}  // namespace nnwfn
