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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "nnwfn/lsh.hpp"
#include "test_support.hpp"

namespace nnwfn {
namespace {

using testing::gaussian_vector;

ProductPoint<double> product(const MatrixXd& parts, PointId id) { return {parts, id}; }

TEST(SampleUnitVector, OneDimensionalSphere) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(std::fabs(sample_unit_vector<double>(1, rng)[0]), 1.0);
}

TEST(SampleUnitVector, UnitNorm) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t)
    EXPECT_LE(std::fabs(sample_unit_vector<double>(5, rng).norm() - 1.0), 1e-12);
}

TEST(SampleUnitVector, MeanNearZero) {
  Rng rng(3);
  const int samples = 100000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (int t = 0; t < samples; ++t) sum += sample_unit_vector<double>(2, rng);
  const double tol = 3 * (1 / std::sqrt(2.0)) / std::sqrt(static_cast<double>(samples));
  EXPECT_LE(std::fabs(sum[0] / samples), tol);
  EXPECT_LE(std::fabs(sum[1] / samples), tol);
}

TEST(SampleUnitVector, ZeroDimensionRejected) {
  Rng rng(4);
  EXPECT_THROW(sample_unit_vector<double>(0, rng), InvalidDimension);
}

TEST(HashScalar, Examples) {
  const Eigen::Vector2d w(1, 0);
  EXPECT_EQ(hash_scalar(w, Eigen::Vector2d(2.5, 9)), 2);
  EXPECT_EQ(hash_scalar(w, Eigen::Vector2d(0, 0)), 0);
  EXPECT_EQ(hash_scalar(w, Eigen::Vector2d(-0.5, 0)), -1);
  const auto hx = hash_scalar(w, Eigen::Vector2d(0.9, 0));
  const auto hy = hash_scalar(w, Eigen::Vector2d(0, 0));
  EXPECT_EQ(hx - hy, 0);
}

TEST(HashScalar, DimensionMismatch) {
  EXPECT_THROW(hash_scalar(VectorXd(Eigen::Vector2d(1, 0)), VectorXd(Eigen::Vector3d(1, 0, 0))), DimensionMismatch);
}

TEST(HashKey, LittleEndianEncoding) {
  const HashKey key{{1, -1, 256}};
  const std::string bytes = encode_key(key);
  const std::string expected("\x01\x00\x00\x00\xff\xff\xff\xff\x00\x01\x00\x00", 12);
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(decode_key(bytes), key);
}

TEST(HashG, SingleDigit) {
  Rng rng(5);
  const auto index = build_maxl2<double>({}, make_lsh_params(3, 1, 1, 4.0), rng);
  const MatrixXd parts = MatrixXd::Constant(3, 1, 0.7);
  const auto key = hash_g(index, product(parts, 0));
  ASSERT_EQ(key.digits.size(), 1u);
  EXPECT_EQ(key.digits[0], hash_scalar(index.hash_vectors().col(0), parts.col(0)));
}

TEST(HashG, ZeroPartsGiveZeroKey) {
  Rng rng(6);
  const auto index = build_maxl2<double>({}, make_lsh_params(4, 3, 2, 5.0), rng);
  const auto key = hash_g(index, product(MatrixXd::Zero(4, 3), 0));
  EXPECT_EQ(key.digits, std::vector<std::int32_t>(6, 0));
}

TEST(HashG, DigitLayoutMatchesIndependentRecomputation) {
  Rng rng(7);
  const auto index = build_maxl2<double>({}, make_lsh_params(3, 2, 2, 4.0), rng);
  MatrixXd parts(3, 2);
  parts << 1.3, -4.2, 0.25, 2.0, -3.7, 0.9;
  const auto key = hash_g(index, product(parts, 0));
  ASSERT_EQ(key.digits.size(), 4u);
  const MatrixXd& h = index.hash_vectors();
  for (int part = 0; part < 2; ++part)
    for (int t = 0; t < 2; ++t) {
      double dot = 0;
      for (int r = 0; r < 3; ++r) dot += h(r, part * 2 + t) * parts(r, part);
      EXPECT_EQ(key.digits[static_cast<std::size_t>(part * 2 + t)],
                static_cast<std::int32_t>(std::floor(dot)));
    }
}

TEST(HashG, ShapeMismatch) {
  Rng rng(8);
  const auto index = build_maxl2<double>({}, make_lsh_params(3, 2, 1, 4.0), rng);
  EXPECT_THROW(hash_g(index, product(MatrixXd::Zero(3, 3), 0)), DimensionMismatch);
  EXPECT_THROW(hash_g(index, product(MatrixXd::Zero(2, 2), 0)), DimensionMismatch);
}

TEST(ExpandNeighbors, SingleDigit) {
  const auto keys = expand_neighbors(HashKey{{0}});
  const std::set<HashKey> got(keys.begin(), keys.end());
  const std::set<HashKey> expected{HashKey{{-1}}, HashKey{{0}}, HashKey{{1}}};
  EXPECT_EQ(got, expected);
}

TEST(ExpandNeighbors, TwoDigitGrid) {
  const auto keys = expand_neighbors(HashKey{{0, 0}});
  EXPECT_EQ(std::set<HashKey>(keys.begin(), keys.end()).size(), 9u);
}

TEST(ExpandNeighbors, ThreeDigitsIncludeOriginal) {
  const HashKey key{{5, -2, 17}};
  const auto keys = expand_neighbors(key);
  const std::set<HashKey> unique(keys.begin(), keys.end());
  EXPECT_EQ(unique.size(), 27u);
  EXPECT_TRUE(unique.count(key));
  for (const auto& k : unique)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(k.digits[i] - key.digits[i]), 1);
}

TEST(ExpandNeighbors, BudgetAndLimits) {
  EXPECT_THROW(expand_neighbors(HashKey{std::vector<std::int32_t>(5, 0)}, 100), BudgetExceeded);
  EXPECT_THROW(expand_neighbors(HashKey{{std::numeric_limits<std::int32_t>::max()}}),
               ConstraintViolated);
}

TEST(OptimalW, WorkedSubstitutions) {
  const double c = 4 * std::exp(1.0);  // a = -ln(4 / 4e) = 1
  EXPECT_EQ(optimal_w(1000, 4, c, 1), 6u);  // ceil(ln 250)
  EXPECT_EQ(optimal_w(1000, 4, c, 2), 3u);  // ceil(ln 250 / 2)
}

TEST(OptimalW, ClampedToOne) {
  EXPECT_EQ(optimal_w(1, 4, 4 * std::exp(1.0), 1), 1u);
  EXPECT_EQ(optimal_w(0, 4, 10.0, 3), 1u);
}

TEST(OptimalW, RequiresCAboveTau) {
  EXPECT_THROW(optimal_w(1000, 4, 4.0, 1), ConstraintViolated);
}

TEST(LshParams, DerivedFields) {
  const auto p = make_lsh_params(4, 2, 3, 8.0);
  EXPECT_DOUBLE_EQ(p.tau, 4.0);
  EXPECT_DOUBLE_EQ(p.p_fp, 0.5);
  EXPECT_DOUBLE_EQ(p.a, std::log(2.0));
  EXPECT_DOUBLE_EQ(p.b, std::log(3.0));
  EXPECT_THROW(make_lsh_params(4, 2, 0, 8.0), ConstraintViolated);
  EXPECT_THROW(make_lsh_params(16, 1, 1, 8.0), ConstraintViolated);
}

TEST(BuildMaxL2, EmptyInput) {
  Rng rng(9);
  const auto index = build_maxl2<double>({}, make_lsh_params(2, 2, 1, 3.0), rng);
  EXPECT_TRUE(index.buckets().empty());
  EXPECT_EQ(index.total_bucket_entries(), 0u);
}

TEST(BuildMaxL2, SinglePointNineEntries) {
  Rng rng(10);
  const auto index = build_maxl2<double>({product(MatrixXd::Constant(2, 2, 0.3), 7)},
                                         make_lsh_params(2, 2, 1, 3.0), rng);
  EXPECT_EQ(index.total_bucket_entries(), 9u);
  EXPECT_EQ(index.buckets().size(), 9u);
}

TEST(BuildMaxL2, EntriesAreThreeToTheWL) {
  Rng rng(11);
  std::vector<ProductPoint<double>> pts;
  for (PointId i = 0; i < 100; ++i) {
    MatrixXd parts(4, 3);
    for (Eigen::Index c = 0; c < 3; ++c) parts.col(c) = gaussian_vector(4, rng, 5.0);
    pts.push_back(product(parts, i));
  }
  const auto index = build_maxl2<double>(pts, make_lsh_params(4, 3, 1, 5.0), rng);
  EXPECT_EQ(index.total_bucket_entries(), 100u * 27u);
  // Each point id appears in exactly 27 buckets.
  std::vector<int> per_point(100, 0);
  for (const auto& [key, slots] : index.buckets())
    for (auto s : slots) ++per_point[index.point(s).id];
  for (int count : per_point) EXPECT_EQ(count, 27);
}

TEST(BuildMaxL2, Errors) {
  Rng rng(12);
  LshParams bad = make_lsh_params(4, 1, 1, 5.0);
  bad.c = 3.0;  // below 2 sqrt(4)
  EXPECT_THROW(build_maxl2<double>({}, bad, rng), ConstraintViolated);
  EXPECT_THROW(build_maxl2<double>({product(MatrixXd::Zero(3, 1), 0)},
                                   make_lsh_params(4, 1, 1, 5.0), rng),
               DimensionMismatch);
  EXPECT_THROW(build_maxl2<double>({}, make_lsh_params(1, 4, 4, 3.0), rng, 1000), BudgetExceeded);
}

TEST(QueryMaxL2, StoredPointIsReturned) {
  Rng rng(13);
  const MatrixXd parts = MatrixXd::Random(3, 2) * 10;
  const auto index =
      build_maxl2<double>({product(parts, 42)}, make_lsh_params(3, 2, 2, 4.0), rng);
  EXPECT_EQ(query_maxl2(index, product(parts, 0), 1.0, 4.0), std::vector<PointId>{42});
}

TEST(QueryMaxL2, EmptyIndex) {
  Rng rng(14);
  const auto index = build_maxl2<double>({}, make_lsh_params(3, 2, 2, 4.0), rng);
  EXPECT_TRUE(query_maxl2(index, product(MatrixXd::Zero(3, 2), 0), 1.0, 4.0).empty());
}

TEST(QueryMaxL2, PlantedInstanceMatchesBruteForce) {
  const double cap = 3.0;
  const MatrixXd q = MatrixXd::Zero(2, 2);
  MatrixXd near(2, 2), edge(2, 2), far(2, 2);
  near << 0.5, 0.0, 0.0, 0.3;
  edge << 3.5, 0.0, 0.0, 0.1;
  far << 10, -10, 10, 10;
  const std::vector<ProductPoint<double>> pts{product(near, 0), product(edge, 1), product(far, 2)};

  // Brute-force max-l2 scan.
  std::vector<PointId> expected;
  for (const auto& p : pts) {
    double worst = 0;
    for (Eigen::Index i = 0; i < 2; ++i) {
      double s = 0;
      for (Eigen::Index r = 0; r < 2; ++r) s += (p.parts(r, i) - q(r, i)) * (p.parts(r, i) - q(r, i));
      worst = std::max(worst, std::sqrt(s));
    }
    if (worst <= cap) expected.push_back(p.id);
  }
  ASSERT_EQ(expected, std::vector<PointId>{0});

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto index = build_maxl2<double>(pts, make_lsh_params(2, 2, 2, cap), rng);
    EXPECT_EQ(query_maxl2(index, product(q, 99), 1.0, cap), expected);
  }
}

TEST(QueryMaxL2, RadiusAboveCapRejected) {
  Rng rng(15);
  const auto index = build_maxl2<double>({}, make_lsh_params(3, 1, 1, 4.0), rng);
  EXPECT_THROW(query_maxl2(index, product(MatrixXd::Zero(3, 1), 0), 5.0, 4.0), ConstraintViolated);
}

TEST(LshProperties, HashLipschitz) {
  Rng rng(16);
  std::uniform_real_distribution<double> len(0.0, 1.0);
  for (int t = 0; t < 20000; ++t) {
    const VectorXd w = sample_unit_vector<double>(6, rng);
    const VectorXd x = gaussian_vector(6, rng, 20.0);
    const VectorXd y = x + testing::vector_of_length(6, len(rng), rng);
    ASSERT_LE(std::llabs(hash_scalar(w, x) - hash_scalar(w, y)), 1);
  }
}

TEST(LshProperties, NoFalseNegativesAndSoundness) {
  Rng rng(17);
  const std::size_t k = 3, L = 2;
  const double cap = 4.0;
  std::uniform_real_distribution<double> len(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const MatrixXd q = MatrixXd::Random(3, 2) * 5;
    std::vector<ProductPoint<double>> pts;
    for (PointId i = 0; i < 60; ++i) {
      MatrixXd parts(k, L);
      for (Eigen::Index c = 0; c < 2; ++c)
        parts.col(c) = i < 20 ? VectorXd(q.col(c) + testing::vector_of_length(k, len(rng), rng))
                              : VectorXd(q.col(c) + gaussian_vector(k, rng, 3.0));
      pts.push_back(product(parts, i));
    }
    const auto index = build_maxl2<double>(pts, make_lsh_params(k, L, 2, cap), rng);
    const auto ids = index.query(q, cap);
    const std::set<PointId> got(ids.begin(), ids.end());
    for (const auto& p : pts) {
      const double dist = max_l2_distance(p.parts, q);
      if (dist <= 1.0) {
        ASSERT_TRUE(got.count(p.id)) << "missed id " << p.id;
      }
      if (got.count(p.id)) {
        ASSERT_LE(dist, cap);
      }
    }
  }
}

TEST(LshProperties, CollisionRateBelowTauOverDistance) {
  const std::size_t k = 9;
  const double dist = 12.0;  // > 2 sqrt(9) = 6
  const int trials = 20000;
  Rng rng(18);
  int close = 0;
  for (int t = 0; t < trials; ++t) {
    const VectorXd w = sample_unit_vector<double>(k, rng);
    const VectorXd x = gaussian_vector(k, rng, 10.0);
    const VectorXd y = x + testing::vector_of_length(k, dist, rng);
    if (std::llabs(hash_scalar(w, x) - hash_scalar(w, y)) <= 1) ++close;
  }
  const double p = static_cast<double>(close) / trials;
  EXPECT_LE(p, 6.0 / dist + 3 * std::sqrt(p * (1 - p) / trials));
}

TEST(MaxL2Index, HashVectorsAreUnit) {
  Rng rng(19);
  const auto index = build_maxl2<double>({}, make_lsh_params(5, 3, 2, 6.0), rng);
  ASSERT_EQ(index.hash_vectors().cols(), 6);
  for (Eigen::Index j = 0; j < 6; ++j)
    EXPECT_NEAR(index.hash_vectors().col(j).norm(), 1.0, 1e-9);
}

}  // namespace
}  // namespace nnwfn
