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

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nnwfn/error.hpp"
#include "nnwfn/reduction.hpp"
#include "nnwfn/types.hpp"

namespace nnwfn {

/// Exact ids (with distances) inside a closed ball.
using RadiusHits = std::map<PointId, double>;

/// sqrt(sum (x_i - q_i)^2), plain loop.
template <typename Scalar>
double exact_distance(const Vector<Scalar>& x, const Vector<Scalar>& q) {
  if (x.size() != q.size())
    throw DimensionMismatch("oracle: point has dimension " +
                            std::to_string(x.size()) + ", query has " +
                            std::to_string(q.size()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double diff = static_cast<double>(x[i]) - static_cast<double>(q[i]);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

/// Linear scan: every i with ||x_i - q|| <= radius.
template <typename Scalar>
RadiusHits exact_radius_search(const PointSet<Scalar>& points,
                               const Vector<Scalar>& q, double radius) {
  if (radius < 0.0) throw ConstraintViolated("oracle radius must be >= 0");
  RadiusHits hits;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dist = exact_distance(points[i], q);
    if (dist <= radius) hits.emplace(static_cast<PointId>(i), dist);
  }
  return hits;
}

struct OracleResult {
  RadiusHits within_R;
  RadiusHits within_cR;
};

template <typename Scalar>
OracleResult exact_sandwich(const PointSet<Scalar>& points,
                            const Vector<Scalar>& q, double R, double c) {
  OracleResult out;
  out.within_cR = exact_radius_search(points, q, c * R);
  for (const auto& [id, dist] : out.within_cR)
    if (dist <= R) out.within_R.emplace(id, dist);
  return out;
}

struct Offender {
  PointId id = 0;
  double distance = 0;
};

struct SandwichReport {
  bool pass = true;
  std::vector<Offender> false_negatives;       // in oracle(R), missing
  std::vector<Offender> soundness_violations;  // returned, outside oracle(cR)
};

/// Passes iff oracle(R) is a subset of result.ids, which is a subset of
/// oracle(cR). A soundness offender's distance comes from the result.
template <typename Scalar>
SandwichReport sandwich_check(const QueryResult<Scalar>& result,
                              const RadiusHits& oracle_R,
                              const RadiusHits& oracle_cR) {
  SandwichReport report;
  std::map<PointId, double> returned;
  for (std::size_t i = 0; i < result.ids.size(); ++i)
    returned.emplace(result.ids[i], i < result.distances.size()
                                        ? static_cast<double>(result.distances[i])
                                        : std::nan(""));
  for (const auto& [id, dist] : oracle_R)
    if (!returned.count(id)) report.false_negatives.push_back({id, dist});
  for (const auto& [id, dist] : returned)
    if (!oracle_cR.count(id)) report.soundness_violations.push_back({id, dist});
  report.pass = report.false_negatives.empty() && report.soundness_violations.empty();
  return report;
}

}  // namespace nnwfn
