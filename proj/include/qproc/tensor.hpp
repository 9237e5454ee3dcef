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

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qproc/errors.hpp"

namespace qproc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-10;

// Dense storage only: Kronecker products whose result dimension exceeds
// this limit are refused instead of exhausting memory.
inline constexpr Index kMaxKronDim = 16384;

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

inline void require_finite(const ComplexMatrix& m, const std::string& what) {
  if (!all_finite(m)) throw ValidityError(what + ": non-finite entries");
}

inline void require_square(const ComplexMatrix& m, const std::string& what) {
  if (m.rows() != m.cols())
    throw ShapeError(what + ": matrix must be square, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

// Kronecker product with the left factor as the slow (outer) index:
// (a ⊗ b)[(i,k),(j,l)] = a(i,j) b(k,l).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() * b.rows() > kMaxKronDim || a.cols() * b.cols() > kMaxKronDim)
    throw ShapeError("kron: result dimension " +
                     std::to_string(a.rows() * b.rows()) + "x" +
                     std::to_string(a.cols() * b.cols()) + " exceeds limit " +
                     std::to_string(kMaxKronDim));
  return Eigen::kroneckerProduct(a, b);
}

inline ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

namespace detail {

// Decomposes a composite index into per-subsystem digits, slowest first.
inline void to_digits(Index composite, const std::vector<Index>& dims,
                      std::vector<Index>& digits) {
  digits.resize(dims.size());
  for (std::size_t s = dims.size(); s-- > 0;) {
    digits[s] = composite % dims[s];
    composite /= dims[s];
  }
}

}  // namespace detail

// Partial trace over the subsystems NOT listed in `keep`. `dims` are the
// subsystem dimensions, slowest (leftmost tensor factor) first; kept
// subsystems retain their relative order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const std::vector<Index>& dims,
                                   std::vector<std::size_t> keep) {
  require_square(m, "partial_trace");
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw ShapeError("partial_trace: subsystem dimension < 1");
    total *= d;
  }
  if (total != m.rows())
    throw ShapeError("partial_trace: product of dims " + std::to_string(total) +
                     " does not match matrix dimension " +
                     std::to_string(m.rows()));
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (std::size_t s : keep)
    if (s >= dims.size())
      throw ShapeError("partial_trace: kept subsystem index out of range");

  std::vector<std::size_t> traced;
  for (std::size_t s = 0; s < dims.size(); ++s)
    if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

  // Strides of each subsystem in the composite index.
  std::vector<Index> stride(dims.size(), 1);
  for (std::size_t s = dims.size() - 1; s-- > 0;)
    stride[s] = stride[s + 1] * dims[s + 1];

  Index dim_keep = 1;
  for (std::size_t s : keep) dim_keep *= dims[s];
  Index dim_traced = 1;
  for (std::size_t s : traced) dim_traced *= dims[s];

  std::vector<Index> keep_dims, traced_dims;
  for (std::size_t s : keep) keep_dims.push_back(dims[s]);
  for (std::size_t s : traced) traced_dims.push_back(dims[s]);

  // Offset of a kept (resp. traced) multi-index within the composite index.
  auto offset = [&](Index packed, const std::vector<std::size_t>& subs,
                    const std::vector<Index>& sub_dims,
                    std::vector<Index>& scratch) {
    detail::to_digits(packed, sub_dims, scratch);
    Index off = 0;
    for (std::size_t i = 0; i < subs.size(); ++i)
      off += scratch[i] * stride[subs[i]];
    return off;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dim_keep, dim_keep);
  std::vector<Index> scratch;
  std::vector<Index> trace_offsets(static_cast<std::size_t>(dim_traced));
  for (Index t = 0; t < dim_traced; ++t)
    trace_offsets[static_cast<std::size_t>(t)] =
        offset(t, traced, traced_dims, scratch);

  for (Index r = 0; r < dim_keep; ++r) {
    const Index row_base = offset(r, keep, keep_dims, scratch);
    for (Index c = 0; c < dim_keep; ++c) {
      const Index col_base = offset(c, keep, keep_dims, scratch);
      Complex sum = 0.0;
      for (Index toff : trace_offsets) sum += m(row_base + toff, col_base + toff);
      out(r, c) = sum;
    }
  }
  return out;
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  require_square(m, "hermiticity_defect");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol) {
  return hermiticity_defect(m) <= tol;
}

// Smallest eigenvalue of the Hermitian part (m + m†)/2.
inline double min_eigenvalue(const ComplexMatrix& m) {
  require_square(m, "min_eigenvalue");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest eigenvalue of the Hermitian part (m + m†)/2.
inline double max_eigenvalue(const ComplexMatrix& m) {
  require_square(m, "max_eigenvalue");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// True iff m is Hermitian within tol and its smallest eigenvalue is >= -tol.
inline bool is_psd(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_square(m, "is_psd");
  if (!is_hermitian(m, tol)) return false;
  return min_eigenvalue(m) >= -tol;
}

// Spectral norm of a (nearly) Hermitian matrix.
inline double herm_spectral_norm(const ComplexMatrix& m) {
  require_square(m, "herm_spectral_norm");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// An orthonormal Hermitian operator basis under the trace inner product:
// tr(τ_μ τ_ν) = δ_{μν}, τ_μ = τ_μ†.
struct HermBasis {
  Index dim = 0;
  std::vector<ComplexMatrix> elements;

  std::size_t size() const { return elements.size(); }
  const ComplexMatrix& operator[](std::size_t mu) const { return elements[mu]; }
};

// Normalized identity followed by the generalized Gell-Mann matrices, in a
// fixed order (symmetric pairs, antisymmetric pairs, diagonal) so that test
// vectors are reproducible.
inline HermBasis hs_basis(Index d) {
  if (d < 1) throw ShapeError("hs_basis: dimension must be >= 1");
  HermBasis basis;
  basis.dim = d;
  basis.elements.reserve(static_cast<std::size_t>(d * d));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  basis.elements.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(double(d)));
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.elements.push_back(sym);
    }
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      ComplexMatrix asym = ComplexMatrix::Zero(d, d);
      asym(j, k) = Complex(0.0, -inv_sqrt2);
      asym(k, j) = Complex(0.0, inv_sqrt2);
      basis.elements.push_back(asym);
    }
  for (Index l = 1; l < d; ++l) {
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const double coeff = 1.0 / std::sqrt(double(l) * double(l + 1));
    for (Index j = 0; j < l; ++j) diag(j, j) = coeff;
    diag(l, l) = -coeff * double(l);
    basis.elements.push_back(diag);
  }
  return basis;
}

// Max deviations of a candidate basis from the HermBasis invariants.
struct BasisDefects {
  double hermiticity = 0.0;
  double orthonormality = 0.0;
};

inline BasisDefects basis_defects(const HermBasis& basis) {
  BasisDefects defects;
  const std::size_t n = basis.size();
  for (std::size_t mu = 0; mu < n; ++mu) {
    defects.hermiticity =
        std::max(defects.hermiticity, hermiticity_defect(basis[mu]));
    for (std::size_t nu = 0; nu < n; ++nu) {
      const Complex gram = (basis[mu] * basis[nu]).trace();
      const double target = (mu == nu) ? 1.0 : 0.0;
      defects.orthonormality =
          std::max(defects.orthonormality, std::abs(gram - target));
    }
  }
  return defects;
}

// The exchange operator on H ⊗ H: S(|ψ⟩ ⊗ |φ⟩) = |φ⟩ ⊗ |ψ⟩.
inline ComplexMatrix swap_operator(Index d) {
  if (d < 1) throw ShapeError("swap_operator: dimension must be >= 1");
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (Index k = 0; k < d; ++k)
    for (Index m = 0; m < d; ++m) s(k * d + m, m * d + k) = 1.0;
  return s;
}

// Σ_μ τ_μ ⊗ τ_μ; agrees with swap_operator for any valid HermBasis.
inline ComplexMatrix swap_from_basis(const HermBasis& basis) {
  const Index d = basis.dim;
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const ComplexMatrix& tau : basis.elements) s += kron(tau, tau);
  return s;
}

}  // namespace qproc
