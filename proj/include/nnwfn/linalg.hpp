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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnwfn/error.hpp"
#include "nnwfn/random.hpp"
#include "nnwfn/types.hpp"

namespace nnwfn {

/// Smallest multiple of k that is >= dim.
inline std::size_t padded_dimension(std::size_t dim, std::size_t k) {
  return k * ((dim + k - 1) / k);
}

/// Rows are the basis vectors a_1..a_d.
template <typename Scalar>
struct OrthonormalBasis {
  std::size_t dim = 0;
  Matrix<Scalar> rows;
  std::uint64_t seed = 0;
};

/// Haar-distributed orthonormal basis of R^dim. A square matrix of
/// independent standard normals is orthonormalized by Householder QR and the
/// columns of Q are sign-corrected so that diag(R) > 0, which makes the
/// factorization unique and the result Haar.
template <typename Scalar = double>
OrthonormalBasis<Scalar> random_orthonormal_basis(std::size_t dim,
                                                  std::uint64_t seed) {
  if (dim == 0) throw InvalidDimension("orthonormal basis needs dim >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  Rng rng(seq);
  std::normal_distribution<double> normal;

  const auto n = static_cast<Eigen::Index>(dim);
  Matrix<Scalar> gauss(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      gauss(i, j) = static_cast<Scalar>(normal(rng));

  Eigen::HouseholderQR<Matrix<Scalar>> qr(gauss);
  Matrix<Scalar> q = qr.householderQ();
  const Matrix<Scalar>& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);

  return {dim, q.transpose(), seed};
}

/// A^{(i,j)}: k consecutive basis vectors scaled by sqrt(d'/k), where d' is
/// the padded dimension. Inputs of dimension in_dim are implicitly
/// zero-padded to d'.
template <typename Scalar>
struct BlockMapping {
  std::size_t in_dim = 0;
  std::size_t padded_dim = 0;
  std::size_t out_dim = 0;
  Matrix<Scalar> rows;  // out_dim x padded_dim
  std::size_t family_index = 0;
  std::size_t block_index = 0;
};

template <typename Scalar>
struct MappingFamily {
  std::size_t in_dim = 0;
  std::size_t padded_dim = 0;
  std::size_t k = 0;
  std::size_t family_index = 0;
  std::vector<BlockMapping<Scalar>> blocks;
  /// All block rows stacked (padded_dim x in_dim): one product gives every
  /// block image at once, block i occupying rows [i*k, (i+1)*k).
  Matrix<Scalar> stacked;

  std::size_t block_count() const { return blocks.size(); }
};

namespace detail {

template <typename Scalar>
MappingFamily<Scalar> carve_family(const Matrix<Scalar>& basis_rows,
                                   std::size_t in_dim, std::size_t k,
                                   std::size_t family_index) {
  const std::size_t padded = static_cast<std::size_t>(basis_rows.rows());
  const Scalar scale =
      std::sqrt(static_cast<Scalar>(padded) / static_cast<Scalar>(k));

  MappingFamily<Scalar> family;
  family.in_dim = in_dim;
  family.padded_dim = padded;
  family.k = k;
  family.family_index = family_index;
  family.stacked = scale * basis_rows.leftCols(static_cast<Eigen::Index>(in_dim));

  const std::size_t blocks = padded / k;
  family.blocks.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    BlockMapping<Scalar> m;
    m.in_dim = in_dim;
    m.padded_dim = padded;
    m.out_dim = k;
    m.rows = scale * basis_rows.middleRows(static_cast<Eigen::Index>(i * k),
                                           static_cast<Eigen::Index>(k));
    m.family_index = family_index;
    m.block_index = i;
    family.blocks.push_back(std::move(m));
  }
  return family;
}

}  // namespace detail

/// Splits a basis into ceil(d/k) block mappings. When k does not divide d the
/// basis is logically padded: extended by unit vectors on the extra zero
/// coordinates, so it stays orthonormal in R^{d'}.
template <typename Scalar>
MappingFamily<Scalar> make_family(const OrthonormalBasis<Scalar>& basis,
                                  std::size_t k, std::size_t family_index = 0) {
  if (k == 0 || k > basis.dim)
    throw InvalidBlockSize("block size " + std::to_string(k) +
                           " outside [1, " + std::to_string(basis.dim) + "]");
  const std::size_t d = basis.dim;
  const std::size_t padded = padded_dimension(d, k);
  if (padded == d) return detail::carve_family(basis.rows, d, k, family_index);

  const auto n = static_cast<Eigen::Index>(d);
  const auto np = static_cast<Eigen::Index>(padded);
  Matrix<Scalar> extended = Matrix<Scalar>::Zero(np, np);
  extended.topLeftCorner(n, n) = basis.rows;
  extended.bottomRightCorner(np - n, np - n).setIdentity();
  // Only the first d columns are ever multiplied against data.
  return detail::carve_family(extended, d, k, family_index);
}

/// Family for inputs of dimension in_dim drawn from a Haar basis of the padded
/// space R^{d'} directly.
template <typename Scalar = double>
MappingFamily<Scalar> make_padded_family(std::size_t in_dim, std::size_t k,
                                         std::uint64_t seed,
                                         std::size_t family_index = 0) {
  if (in_dim == 0) throw InvalidDimension("family needs in_dim >= 1");
  if (k == 0 || k > in_dim)
    throw InvalidBlockSize("block size " + std::to_string(k) +
                           " outside [1, " + std::to_string(in_dim) + "]");
  const auto basis =
      random_orthonormal_basis<Scalar>(padded_dimension(in_dim, k), seed);
  return detail::carve_family(basis.rows, in_dim, k, family_index);
}

template <typename Scalar, typename Derived>
Vector<Scalar> apply_mapping(const BlockMapping<Scalar>& m,
                             const Eigen::MatrixBase<Derived>& x) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == m.in_dim)
    return m.rows.leftCols(static_cast<Eigen::Index>(m.in_dim)) * x;
  if (n == m.padded_dim) return m.rows * x;
  throw DimensionMismatch("mapping expects dimension " +
                          std::to_string(m.in_dim) + ", got " +
                          std::to_string(n));
}

/// Every block image of x, concatenated (block i in rows [i*k, (i+1)*k)).
template <typename Scalar, typename Derived>
Vector<Scalar> apply_family(const MappingFamily<Scalar>& family,
                            const Eigen::MatrixBase<Derived>& x) {
  if (static_cast<std::size_t>(x.size()) != family.in_dim)
    throw DimensionMismatch("family expects dimension " +
                            std::to_string(family.in_dim) + ", got " +
                            std::to_string(x.size()));
  return family.stacked * x;
}

/// max |B B^T - I| over all entries.
template <typename Scalar>
Scalar orthonormality_error(const OrthonormalBasis<Scalar>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim);
  return (basis.rows * basis.rows.transpose() - Matrix<Scalar>::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace nnwfn
