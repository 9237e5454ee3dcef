// Copyright 2026 The qproc developers
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
#include <random>

#include "qproc/tensor.hpp"

namespace qproc {

using Rng = std::mt19937_64;

// Samplers are built directly on the raw 64-bit stream instead of
// <random> distributions, whose algorithms are implementation-defined;
// identical seeds must reproduce identical matrices on any platform.

inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double normal_double(Rng& rng) {
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Standard complex normal: E|z|^2 = 1.
inline Complex complex_normal(Rng& rng) {
  const double re = normal_double(rng);
  const double im = normal_double(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline ComplexMatrix ginibre(Index rows, Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) g(r, c) = complex_normal(rng);
  return g;
}

// Column-isometry (rows >= cols, V†V = I) distributed with the Haar
// measure: QR of a Ginibre matrix with the R-diagonal phases absorbed.
inline ComplexMatrix haar_isometry(Index rows, Index cols, Rng& rng) {
  if (rows < cols) throw ShapeError("haar_isometry: rows < cols");
  const ComplexMatrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r =
      qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index c = 0; c < cols; ++c) {
    const Complex diag = r(c, c);
    const double mag = std::abs(diag);
    q.col(c) *= (mag > 0.0) ? diag / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline ComplexMatrix haar_unitary(Index d, Rng& rng) {
  return haar_isometry(d, d, rng);
}

// Full-rank random density matrix: GG† / tr(GG†).
inline ComplexMatrix random_density(Index d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// Haar-random pure state as a rank-1 density matrix.
inline ComplexMatrix random_pure_density(Index d, Rng& rng) {
  Eigen::VectorXcd psi(d);
  for (Index i = 0; i < d; ++i) psi(i) = complex_normal(rng);
  psi /= psi.norm();
  return psi * psi.adjoint();
}

// Random orthonormal Hermitian basis: a Haar-ish orthogonal recombination
// of the Gell-Mann basis. Real orthogonal mixing preserves Hermiticity and
// trace orthonormality.
inline HermBasis random_hs_basis(Index d, Rng& rng) {
  const HermBasis gm = hs_basis(d);
  const Index n = d * d;
  Eigen::MatrixXd g(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) g(r, c) = normal_double(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < n; ++c)
    if (r(c, c) < 0.0) q.col(c) *= -1.0;

  HermBasis basis;
  basis.dim = d;
  basis.elements.reserve(static_cast<std::size_t>(n));
  for (Index mu = 0; mu < n; ++mu) {
    ComplexMatrix tau = ComplexMatrix::Zero(d, d);
    for (Index nu = 0; nu < n; ++nu)
      tau += q(nu, mu) * gm.elements[static_cast<std::size_t>(nu)];
    basis.elements.push_back(std::move(tau));
  }
  return basis;
}

}  // namespace qproc
