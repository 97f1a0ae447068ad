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
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nnwfn/error.hpp"
#include "nnwfn/linalg.hpp"
#include "nnwfn/lsh.hpp"
#include "nnwfn/parallel.hpp"
#include "nnwfn/random.hpp"
#include "nnwfn/types.hpp"

namespace nnwfn {

struct ProblemConfig {
  std::size_t n = 0;
  std::size_t d = 0;
  double c = 0;
  double R = 1;
};

inline void validate(const ProblemConfig& config) {
  if (!(config.c > 1.0)) throw ConstraintViolated("c must exceed 1");
  if (!(config.R > 0.0) || !std::isfinite(config.R))
    throw ConstraintViolated("radius R must be positive and finite");
  if (config.n > 0 && config.d == 0) throw InvalidDimension("d must be >= 1");
}

/// Planner constants: gamma = (2c / (c - alpha))^2 evaluated at alpha = c/2.
inline constexpr double kPlannerD1 = 16.0;
inline constexpr double kPlannerD2 = 16.0;

struct ReductionPlan {
  double alpha1 = 0;  // first-stage approximation, c/2
  double alpha2 = 0;  // leaf approximation, c/4 unless overridden
  double gamma = 0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t L = 0;
  std::size_t w = 0;
  double f_n = 0;
  double mu = 0;  // feasibility threshold 8 sqrt(f(n) ln ln n)
  double D1 = kPlannerD1;
  double D2 = kPlannerD2;
  bool overridden = false;
};

/// Explicit desk-scale choices that replace the asymptotic plan entries.
struct PlanOverrides {
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;
  std::optional<std::size_t> L;
  std::optional<std::size_t> w;
  std::optional<double> alpha2;

  bool any() const { return k1 || k2 || L || w || alpha2; }
};

/// gamma = (2c / (c - alpha))^2.
inline double reduction_gamma(double c, double alpha) {
  const double r = 2.0 * c / (c - alpha);
  return r * r;
}

/// Default growth function f(n) = sqrt(ln n); 2 when ln n <= 1.
inline double default_f_n(std::size_t n) {
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  return ln_n > 1.0 ? std::sqrt(ln_n) : 2.0;
}

/// Parameter plan: alpha1 = c/2, k1 = ceil(D1 ln n), alpha2 = c/4,
/// L = ceil(ln n / (f(n) ln ln n)), k2 = ceil(D2 ln n / L), w from optimal_w.
/// Logs are natural. k1 and k2 are clamped to [1, d].
inline ReductionPlan plan_parameters(const ProblemConfig& config, double f_n,
                                     const PlanOverrides& overrides = {}) {
  validate(config);
  if (!(f_n > 1.0)) throw ConstraintViolated("f(n) must exceed 1");
  const double c = config.c;
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(config.n, 1)));
  const double ln_ln_n = ln_n > 0.0 ? std::log(ln_n) : 0.0;
  const std::size_t dim_cap = std::max<std::size_t>(config.d, 1);
  auto clamp_dim = [&](double v) {
    const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
    return std::min(k, dim_cap);
  };

  ReductionPlan plan;
  plan.f_n = f_n;
  plan.alpha1 = c / 2.0;
  plan.alpha2 = c / 4.0;
  plan.gamma = reduction_gamma(c, plan.alpha1);
  plan.k1 = clamp_dim(plan.D1 * ln_n);
  plan.L = ln_ln_n > 0.0
               ? static_cast<std::size_t>(
                     std::max(1.0, std::ceil(ln_n / (f_n * ln_ln_n))))
               : 1;
  if (overrides.L) plan.L = *overrides.L;
  if (plan.L == 0) throw ConstraintViolated("L must be >= 1");
  plan.k2 = clamp_dim(plan.D2 * ln_n / static_cast<double>(plan.L));
  plan.mu = ln_ln_n > 0.0 ? 2.0 * std::sqrt(plan.D2) * std::sqrt(f_n * ln_ln_n) : 0.0;

  if (overrides.k1) plan.k1 = *overrides.k1;
  if (overrides.k2) plan.k2 = *overrides.k2;
  if (overrides.alpha2) plan.alpha2 = *overrides.alpha2;
  plan.overridden = overrides.any();

  if (plan.k1 == 0 || plan.k2 == 0) throw InvalidBlockSize("k1 and k2 must be >= 1");
  if (config.d > 0 && (plan.k1 > config.d || plan.k2 > config.d))
    throw InvalidBlockSize("k1 and k2 must not exceed d = " + std::to_string(config.d));
  if (overrides.alpha2 && !(plan.alpha2 >= 1.0 && plan.alpha2 < c))
    throw ConstraintViolated("alpha2 must lie in [1, c)");

  const double tau = 2.0 * std::sqrt(static_cast<double>(plan.k2));
  if (!(plan.alpha2 > tau)) {
    const double minimal_c = 4.0 * tau;
    std::ostringstream msg;
    msg << "infeasible plan: leaf approximation alpha2 = " << plan.alpha2
        << " must exceed 2*sqrt(k2) = " << tau << " (k2 = " << plan.k2
        << "); c must exceed " << minimal_c
        << " or pass explicit overrides";
    throw Infeasible(msg.str(), minimal_c);
  }

  plan.w = overrides.w ? *overrides.w : optimal_w(config.n, plan.k2, plan.alpha2, plan.L);
  if (plan.w == 0) throw ConstraintViolated("w must be >= 1");
  return plan;
}

template <typename Scalar, typename Derived>
Vector<Scalar> rescale(const Eigen::MatrixBase<Derived>& x, Scalar R) {
  if (!(R > Scalar(0))) throw ConstraintViolated("rescale radius must be positive");
  return x / R;
}

template <typename Scalar>
PointSet<Scalar> rescale(const PointSet<Scalar>& points, Scalar R) {
  PointSet<Scalar> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(rescale<Scalar>(p, R));
  return out;
}

template <typename Scalar>
struct QueryResult {
  std::vector<PointId> ids;
  std::vector<Scalar> distances;  // input units, parallel to ids
};

struct QueryStats {
  std::size_t bucket_hits = 0;        // raw bucket entries read, all combos
  std::size_t leaf_hits = 0;          // entries passing the max-l2 filter
  std::size_t unique_candidates = 0;  // distinct ids passing some leaf
  std::size_t result_size = 0;
};

struct BuildOptions {
  std::uint64_t combo_limit = 1'000'000;
  std::uint64_t expansion_budget = kDefaultExpansionBudget;
};

template <typename Scalar>
class NnwfnIndex;

template <typename Scalar = double>
NnwfnIndex<Scalar> build_index(const PointSet<Scalar>& points,
                               const ProblemConfig& config,
                               const ReductionPlan& plan, std::uint64_t seed,
                               const BuildOptions& options = {});

/// Fused reduction: L independent mapping families in R^d with block size k2,
/// one max-l2 index per block combination (i_1, ..., i_L).
template <typename Scalar>
class NnwfnIndex {
 public:
  NnwfnIndex() = default;

  const ProblemConfig& config() const { return config_; }
  const ReductionPlan& plan() const { return plan_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<MappingFamily<Scalar>>& families() const { return families_; }
  const PointSet<Scalar>& points() const { return originals_; }
  std::size_t blocks_per_family() const { return blocks_; }
  std::size_t combo_count() const { return leaves_.size(); }
  const MaxL2Index<Scalar>& leaf(std::size_t combo) const { return leaves_.at(combo); }

  /// Block index per family for a combination (mixed radix, family 0 lowest).
  std::vector<std::size_t> combo_indices(std::size_t combo) const {
    std::vector<std::size_t> idx(plan_.L);
    for (auto& i : idx) {
      i = combo % blocks_;
      combo /= blocks_;
    }
    return idx;
  }

  std::size_t total_bucket_entries() const {
    std::size_t total = 0;
    for (const auto& leaf : leaves_) total += leaf.total_bucket_entries();
    return total;
  }

  /// Product point of an (unnormalized) input vector under one combination.
  template <typename Derived>
  Matrix<Scalar> product_point(const Eigen::MatrixBase<Derived>& x,
                               std::size_t combo) const {
    return assemble(project(x), combo);
  }

  /// Ids surfaced by each combination's leaf (after its max-l2 filter).
  template <typename Derived>
  std::vector<std::vector<PointId>> leaf_candidates(
      const Eigen::MatrixBase<Derived>& q) const {
    std::vector<std::vector<PointId>> out(leaves_.size());
    if (originals_.empty()) return out;
    const auto images = project(q);
    for (std::size_t combo = 0; combo < leaves_.size(); ++combo)
      out[combo] = leaves_[combo].query(assemble(images, combo),
                                        static_cast<Scalar>(plan_.alpha2));
    return out;
  }

  template <typename Derived>
  QueryResult<Scalar> query(const Eigen::MatrixBase<Derived>& q,
                            QueryStats* stats = nullptr) const {
    QueryResult<Scalar> result;
    QueryStats local;
    if (originals_.empty()) {
      if (config_.d > 0) check_dim(q.size());
      if (stats) *stats = local;
      return result;
    }
    const auto images = project(q);
    std::vector<char> seen(originals_.size(), 0);
    std::vector<PointId> unique;
    for (std::size_t combo = 0; combo < leaves_.size(); ++combo) {
      std::size_t raw = 0;
      const auto ids = leaves_[combo].query(assemble(images, combo),
                                            static_cast<Scalar>(plan_.alpha2), &raw);
      local.bucket_hits += raw;
      local.leaf_hits += ids.size();
      for (auto id : ids)
        if (!seen[id]) {
          seen[id] = 1;
          unique.push_back(id);
        }
    }
    local.unique_candidates = unique.size();

    const Scalar cap = static_cast<Scalar>(config_.c * config_.R);
    std::vector<std::pair<Scalar, PointId>> kept;
    for (auto id : unique) {
      const Scalar dist = (originals_[id] - q).norm();
      if (dist <= cap) kept.emplace_back(dist, id);
    }
    std::sort(kept.begin(), kept.end());
    result.ids.reserve(kept.size());
    result.distances.reserve(kept.size());
    for (const auto& [dist, id] : kept) {
      result.ids.push_back(id);
      result.distances.push_back(dist);
    }
    local.result_size = kept.size();
    if (stats) *stats = local;
    return result;
  }

  /// Test hook: removes `id` from every bucket of every leaf.
  void drop_for_fault_injection(PointId id) {
    for (auto& leaf : leaves_) leaf.drop_for_fault_injection(id);
  }

 private:
  template <typename S>
  friend NnwfnIndex<S> build_index(const PointSet<S>&, const ProblemConfig&,
                                   const ReductionPlan&, std::uint64_t,
                                   const BuildOptions&);

  void check_dim(Eigen::Index n) const {
    if (static_cast<std::size_t>(n) != config_.d)
      throw DimensionMismatch("query has dimension " + std::to_string(n) +
                              ", index expects " + std::to_string(config_.d));
  }

  /// Every block image of x / R, one column per family.
  template <typename Derived>
  Matrix<Scalar> project(const Eigen::MatrixBase<Derived>& x) const {
    check_dim(x.size());
    const Vector<Scalar> normalized = rescale<Scalar>(x, static_cast<Scalar>(config_.R));
    Matrix<Scalar> images(static_cast<Eigen::Index>(blocks_ * plan_.k2),
                          static_cast<Eigen::Index>(plan_.L));
    for (std::size_t j = 0; j < plan_.L; ++j)
      images.col(static_cast<Eigen::Index>(j)) = apply_family(families_[j], normalized);
    return images;
  }

  Matrix<Scalar> assemble(const Matrix<Scalar>& images, std::size_t combo) const {
    const auto k = static_cast<Eigen::Index>(plan_.k2);
    Matrix<Scalar> parts(k, static_cast<Eigen::Index>(plan_.L));
    for (std::size_t j = 0; j < plan_.L; ++j) {
      const auto block = static_cast<Eigen::Index>(combo % blocks_);
      combo /= blocks_;
      parts.col(static_cast<Eigen::Index>(j)) =
          images.col(static_cast<Eigen::Index>(j)).segment(block * k, k);
    }
    return parts;
  }

  ProblemConfig config_;
  ReductionPlan plan_;
  std::uint64_t seed_ = 0;
  std::size_t blocks_ = 0;
  std::vector<MappingFamily<Scalar>> families_;
  std::vector<MaxL2Index<Scalar>> leaves_;
  PointSet<Scalar> originals_;
};

/// blocks^L, or 0 when it exceeds `limit`.
inline std::uint64_t combination_count(std::size_t blocks, std::size_t L,
                                       std::uint64_t limit) {
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < L; ++j) {
    if (blocks != 0 && total > limit / blocks) return 0;
    total *= blocks;
  }
  return total <= limit ? total : 0;
}

template <typename Scalar>
NnwfnIndex<Scalar> build_index(const PointSet<Scalar>& points,
                               const ProblemConfig& config,
                               const ReductionPlan& plan, std::uint64_t seed,
                               const BuildOptions& options) {
  validate(config);
  if (plan.L == 0 || plan.k2 == 0 || plan.w == 0)
    throw ConstraintViolated("plan needs L, k2, w >= 1");

  NnwfnIndex<Scalar> index;
  index.config_ = config;
  index.config_.n = points.size();
  index.plan_ = plan;
  index.seed_ = seed;
  index.originals_ = points;
  if (points.empty()) return index;

  const std::size_t d = config.d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<std::size_t>(points[i].size()) != d)
      throw DimensionMismatch("point " + std::to_string(i) + " has dimension " +
                              std::to_string(points[i].size()) + ", expected " +
                              std::to_string(d));
    if (!points[i].allFinite())
      throw ConstraintViolated("point " + std::to_string(i) + " is not finite");
  }
  if (plan.k2 > d) throw InvalidBlockSize("k2 exceeds d");

  const LshParams lsh = make_lsh_params(plan.k2, plan.L, plan.w, plan.alpha2);
  if (expansion_size(plan.w * plan.L, options.expansion_budget) == 0)
    throw BudgetExceeded("3^wL with w=" + std::to_string(plan.w) + ", L=" +
                         std::to_string(plan.L) + " exceeds budget " +
                         std::to_string(options.expansion_budget));
  index.blocks_ = padded_dimension(d, plan.k2) / plan.k2;
  const std::uint64_t combos =
      combination_count(index.blocks_, plan.L, options.combo_limit);
  if (combos == 0)
    throw BudgetExceeded(std::to_string(index.blocks_) + "^" +
                         std::to_string(plan.L) +
                         " block combinations exceed limit " +
                         std::to_string(options.combo_limit));

  index.families_.reserve(plan.L);
  for (std::size_t j = 0; j < plan.L; ++j) {
    Rng stream = derive_stream(seed, StreamDomain::kFamily, j);
    index.families_.push_back(make_padded_family<Scalar>(d, plan.k2, stream(), j));
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix<Scalar> normalized(static_cast<Eigen::Index>(d), n);
  for (Eigen::Index i = 0; i < n; ++i)
    normalized.col(i) = points[static_cast<std::size_t>(i)] / static_cast<Scalar>(config.R);
  std::vector<Matrix<Scalar>> images;
  images.reserve(plan.L);
  for (const auto& family : index.families_) images.push_back(family.stacked * normalized);

  index.leaves_.resize(combos);
  const auto k = static_cast<Eigen::Index>(plan.k2);
  parallel_for(combos, [&](std::size_t combo) {
    std::vector<ProductPoint<Scalar>> product(points.size());
    std::vector<Eigen::Index> offset(plan.L);
    std::size_t rest = combo;
    for (auto& o : offset) {
      o = static_cast<Eigen::Index>(rest % index.blocks_) * k;
      rest /= index.blocks_;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& p = product[static_cast<std::size_t>(i)];
      p.id = static_cast<PointId>(i);
      p.parts.resize(k, static_cast<Eigen::Index>(plan.L));
      for (std::size_t j = 0; j < plan.L; ++j)
        p.parts.col(static_cast<Eigen::Index>(j)) = images[j].col(i).segment(offset[j], k);
    }
    Rng stream = derive_stream(seed, StreamDomain::kLeafHash, combo);
    index.leaves_[combo] =
        build_maxl2<Scalar>(std::move(product), lsh, stream, options.expansion_budget);
  });
  return index;
}

/// Single-family reduction: one basis, every block indexed by an L = 1 leaf
/// with approximation `alpha`. Equivalent to build_index with L = 1.
template <typename Scalar = double>
NnwfnIndex<Scalar> build_single_stage(const PointSet<Scalar>& points,
                                      const ProblemConfig& config, double alpha,
                                      std::size_t k, std::uint64_t seed,
                                      const BuildOptions& options = {}) {
  validate(config);
  if (!(alpha > 1.0 && alpha < config.c))
    throw ConstraintViolated("single-stage alpha must lie in (1, c)");
  if (k == 0 || (config.d > 0 && k > config.d))
    throw InvalidBlockSize("single-stage block size must lie in [1, d]");
  ReductionPlan plan;
  plan.alpha1 = alpha;
  plan.alpha2 = alpha;
  plan.gamma = reduction_gamma(config.c, alpha);
  plan.k1 = k;
  plan.k2 = k;
  plan.L = 1;
  plan.w = optimal_w(points.size(), k, alpha, 1);
  plan.f_n = 0;
  plan.overridden = true;
  return build_index<Scalar>(points, config, plan, seed, options);
}

}  // namespace nnwfn
