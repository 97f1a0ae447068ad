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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nnwfn/error.hpp"
#include "nnwfn/random.hpp"
#include "nnwfn/types.hpp"

namespace nnwfn {

/// Default cap on 3^{wL}, the number of buckets each point is written to.
inline constexpr std::uint64_t kDefaultExpansionBudget = 100'000'000;

/// Uniform sample from the unit sphere S^{k-1} (normalized Gaussian).
template <typename Scalar = double>
Vector<Scalar> sample_unit_vector(std::size_t k, Rng& rng) {
  if (k == 0) throw InvalidDimension("unit vector needs k >= 1");
  std::normal_distribution<double> normal;
  Vector<Scalar> w(static_cast<Eigen::Index>(k));
  for (;;) {
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w[i] = static_cast<Scalar>(normal(rng));
    const Scalar norm = w.norm();
    if (norm > Scalar(0) && std::isfinite(norm)) return w / norm;
  }
}

/// floor(<w, x>).
template <typename DerivedW, typename DerivedX>
std::int64_t hash_scalar(const Eigen::MatrixBase<DerivedW>& w,
                         const Eigen::MatrixBase<DerivedX>& x) {
  if (w.size() != x.size())
    throw DimensionMismatch("hash vector has dimension " +
                            std::to_string(w.size()) + ", point has " +
                            std::to_string(x.size()));
  const double v = std::floor(static_cast<double>(w.dot(x)));
  if (!std::isfinite(v) ||
      std::fabs(v) > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2))
    throw ConstraintViolated("hash value out of range");
  return static_cast<std::int64_t>(v);
}

/// A point in the product space (R^k)^L; column i is part i.
template <typename Scalar>
struct ProductPoint {
  Matrix<Scalar> parts;
  PointId id = 0;
};

/// max_i ||a_i - b_i||_2 over the L parts.
template <typename DerivedA, typename DerivedB>
auto max_l2_distance(const Eigen::MatrixBase<DerivedA>& a,
                     const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).colwise().norm().maxCoeff();
}

struct HashKey {
  std::vector<std::int32_t> digits;

  friend bool operator==(const HashKey&, const HashKey&) = default;
  friend auto operator<=>(const HashKey&, const HashKey&) = default;
};

/// Canonical byte string: fixed-width little-endian signed 32-bit digits.
inline std::string encode_key(const HashKey& key) {
  std::string bytes(key.digits.size() * 4, '\0');
  for (std::size_t i = 0; i < key.digits.size(); ++i) {
    const auto u = static_cast<std::uint32_t>(key.digits[i]);
    for (int b = 0; b < 4; ++b)
      bytes[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xFFu);
  }
  return bytes;
}

inline HashKey decode_key(const std::string& bytes) {
  if (bytes.size() % 4 != 0) throw Error("hash key byte length not a multiple of 4");
  HashKey key;
  key.digits.resize(bytes.size() / 4);
  for (std::size_t i = 0; i < key.digits.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
      u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b]))
           << (8 * b);
    key.digits[i] = static_cast<std::int32_t>(u);
  }
  return key;
}

/// 3^{digits}, or 0 when it exceeds `limit`.
inline std::uint64_t expansion_size(std::size_t digits, std::uint64_t limit) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < digits; ++i) {
    if (total > limit / 3) return 0;
    total *= 3;
  }
  return total <= limit ? total : 0;
}

/// Calls visit(encoded_key) for every key within l_inf distance 1 of `key`,
/// the key itself included. Digits are walked as a base-3 odometer over
/// offsets {-1, 0, +1}.
template <typename Visit>
void for_each_neighbor_key(const HashKey& key, Visit&& visit) {
  for (auto d : key.digits)
    if (d == std::numeric_limits<std::int32_t>::min() ||
        d == std::numeric_limits<std::int32_t>::max())
      throw ConstraintViolated("hash digit at 32-bit limit cannot be expanded");

  HashKey current = key;
  for (auto& d : current.digits) --d;
  std::vector<int> offset(key.digits.size(), 0);  // 0,1,2 ~ -1,0,+1
  for (;;) {
    visit(encode_key(current));
    std::size_t pos = 0;
    while (pos < offset.size() && offset[pos] == 2) {
      offset[pos] = 0;
      current.digits[pos] -= 2;
      ++pos;
    }
    if (pos == offset.size()) return;
    ++offset[pos];
    ++current.digits[pos];
  }
}

/// All 3^{|key|} keys whose digits differ from `key` by at most 1.
inline std::vector<HashKey> expand_neighbors(
    const HashKey& key, std::uint64_t budget = kDefaultExpansionBudget) {
  const auto count = expansion_size(key.digits.size(), budget);
  if (count == 0) throw BudgetExceeded("3^wL exceeds expansion budget");
  std::vector<HashKey> keys;
  keys.reserve(count);
  for_each_neighbor_key(key, [&](const std::string& k) { keys.push_back(decode_key(k)); });
  return keys;
}

struct LshParams {
  std::size_t k = 0;
  std::size_t L = 0;
  std::size_t w = 0;
  double c = 0;
  double tau = 0;   // 2 sqrt(k)
  double p_fp = 0;  // tau / c
  double a = 0;     // -ln p_fp
  double b = 0;     // ln 3
};

inline LshParams make_lsh_params(std::size_t k, std::size_t L, std::size_t w,
                                 double c) {
  if (k == 0 || L == 0) throw InvalidDimension("LSH needs k >= 1 and L >= 1");
  if (w == 0) throw ConstraintViolated("LSH needs w >= 1");
  LshParams p;
  p.k = k;
  p.L = L;
  p.w = w;
  p.c = c;
  p.tau = 2.0 * std::sqrt(static_cast<double>(k));
  if (!(c > p.tau))
    throw ConstraintViolated("approximation factor " + std::to_string(c) +
                             " must exceed 2*sqrt(k) = " + std::to_string(p.tau));
  p.p_fp = p.tau / c;
  p.a = -std::log(p.p_fp);
  p.b = std::log(3.0);
  return p;
}

/// w = ceil(ln(n a / k) / (a L)) with a = -ln(2 sqrt(k) / c), clamped to 1.
inline std::size_t optimal_w(std::size_t n, std::size_t k, double c,
                             std::size_t L) {
  if (k == 0 || L == 0) throw InvalidDimension("optimal_w needs k >= 1 and L >= 1");
  const double tau = 2.0 * std::sqrt(static_cast<double>(k));
  if (!(c > tau))
    throw ConstraintViolated("approximation factor " + std::to_string(c) +
                             " must exceed 2*sqrt(k) = " + std::to_string(tau));
  if (n == 0) return 1;
  const double a = -std::log(tau / c);
  const double value = std::ceil(
      std::log(static_cast<double>(n) * a / static_cast<double>(k)) /
      (a * static_cast<double>(L)));
  if (!(value >= 1.0)) return 1;
  return static_cast<std::size_t>(value);
}

/// Rounding-based LSH index for max-l2 near neighbors. Each stored point is
/// written to every bucket whose key is within l_inf distance 1 of its hash,
/// so a query reads exactly one bucket.
template <typename Scalar = double>
class MaxL2Index {
 public:
  using Buckets = std::unordered_map<std::string, std::vector<std::uint32_t>>;

  MaxL2Index() = default;

  MaxL2Index(const LshParams& params, Rng& rng) : params_(params) {
    const auto wl = static_cast<Eigen::Index>(params.w * params.L);
    hash_vectors_.resize(static_cast<Eigen::Index>(params.k), wl);
    for (Eigen::Index j = 0; j < wl; ++j)
      hash_vectors_.col(j) = sample_unit_vector<Scalar>(params.k, rng);
  }

  const LshParams& params() const { return params_; }
  /// k x wL; column i*w + t is the t-th hash vector of part i.
  const Matrix<Scalar>& hash_vectors() const { return hash_vectors_; }
  const Buckets& buckets() const { return buckets_; }
  std::size_t size() const { return points_.size(); }
  const ProductPoint<Scalar>& point(std::size_t slot) const { return points_[slot]; }

  std::size_t total_bucket_entries() const {
    std::size_t total = 0;
    for (const auto& [key, slots] : buckets_) total += slots.size();
    return total;
  }

  template <typename Derived>
  HashKey hash(const Eigen::MatrixBase<Derived>& parts) const {
    check_shape(parts.rows(), parts.cols());
    const std::size_t w = params_.w;
    HashKey key;
    key.digits.resize(w * params_.L);
    for (std::size_t i = 0; i < params_.L; ++i) {
      for (std::size_t t = 0; t < w; ++t) {
        const auto col = static_cast<Eigen::Index>(i * w + t);
        const std::int64_t h = hash_scalar(hash_vectors_.col(col),
                                           parts.col(static_cast<Eigen::Index>(i)));
        if (h < std::numeric_limits<std::int32_t>::min() ||
            h > std::numeric_limits<std::int32_t>::max())
          throw ConstraintViolated("hash digit overflows 32 bits");
        key.digits[i * w + t] = static_cast<std::int32_t>(h);
      }
    }
    return key;
  }

  void insert(ProductPoint<Scalar> point) {
    const HashKey key = hash(point.parts);
    const auto slot = static_cast<std::uint32_t>(points_.size());
    for_each_neighbor_key(key, [&](std::string&& k) { buckets_[std::move(k)].push_back(slot); });
    points_.push_back(std::move(point));
  }

  /// Slots stored under the bucket for `key` (empty when absent).
  const std::vector<std::uint32_t>& bucket(const HashKey& key) const {
    static const std::vector<std::uint32_t> kEmpty;
    auto it = buckets_.find(encode_key(key));
    return it == buckets_.end() ? kEmpty : it->second;
  }

  /// Ids in q's bucket whose max-l2 distance to q is at most `cap`, ascending.
  /// `candidates`, when given, receives the raw bucket size.
  template <typename Derived>
  std::vector<PointId> query(const Eigen::MatrixBase<Derived>& q, Scalar cap,
                             std::size_t* candidates = nullptr) const {
    const auto& slots = bucket(hash(q));
    if (candidates) *candidates = slots.size();
    std::vector<PointId> ids;
    for (auto slot : slots) {
      const auto& p = points_[slot];
      if (max_l2_distance(p.parts, q) <= cap) ids.push_back(p.id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  /// Test hook: removes every bucket reference to `id`.
  void drop_for_fault_injection(PointId id) {
    for (auto& [key, slots] : buckets_)
      std::erase_if(slots, [&](std::uint32_t s) { return points_[s].id == id; });
  }

 private:
  void check_shape(Eigen::Index rows, Eigen::Index cols) const {
    if (static_cast<std::size_t>(rows) != params_.k ||
        static_cast<std::size_t>(cols) != params_.L)
      throw DimensionMismatch("product point must be " + std::to_string(params_.k) +
                              " x " + std::to_string(params_.L) + ", got " +
                              std::to_string(rows) + " x " + std::to_string(cols));
  }

  LshParams params_;
  Matrix<Scalar> hash_vectors_;
  Buckets buckets_;
  std::vector<ProductPoint<Scalar>> points_;
};

template <typename Scalar>
HashKey hash_g(const MaxL2Index<Scalar>& index, const ProductPoint<Scalar>& p) {
  return index.hash(p.parts);
}

/// Rounding LSH build: hash every point and store it under all
/// 3^{wL} neighboring keys.
template <typename Scalar = double>
MaxL2Index<Scalar> build_maxl2(std::vector<ProductPoint<Scalar>> points,
                               const LshParams& params, Rng& rng,
                               std::uint64_t budget = kDefaultExpansionBudget) {
  // Re-validates c > 2 sqrt(k) and w >= 1 for hand-assembled params.
  make_lsh_params(params.k, params.L, params.w, params.c);
  if (expansion_size(params.w * params.L, budget) == 0)
    throw BudgetExceeded("3^wL with w=" + std::to_string(params.w) + ", L=" +
                         std::to_string(params.L) + " exceeds budget " +
                         std::to_string(budget));
  MaxL2Index<Scalar> index(params, rng);
  for (auto& p : points) index.insert(std::move(p));
  return index;
}

/// Rounding LSH query: read the bucket of g(q) and keep points within `cap` in every
/// part. Every stored point within `radius` (<= cap) of q is returned.
template <typename Scalar>
std::vector<PointId> query_maxl2(const MaxL2Index<Scalar>& index,
                                 const ProductPoint<Scalar>& q, Scalar radius,
                                 Scalar cap) {
  if (!(radius <= cap))
    throw ConstraintViolated("query radius must not exceed cap");
  return index.query(q.parts, cap);
}

}  // namespace nnwfn
