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

#include "qproc/channels.hpp"

namespace qproc {

// Superoperator inner product: Σ_μ tr[M(τ_μ)† N(τ_μ)] over a
// Hilbert-Schmidt basis of the input space. Basis-independent, and equal
// to the Choi-matrix inner product cj_inner.
inline Complex super_inner(const QuantumMap& m, const QuantumMap& n,
                           const HermBasis& basis) {
  if (!(m.region() == n.region()))
    throw ShapeError("super_inner: maps live on different regions ('" +
                     m.region().label + "' vs '" + n.region().label + "')");
  if (basis.dim != m.region().d_in)
    throw ShapeError("super_inner: basis dimension " + std::to_string(basis.dim) +
                     " does not match input dimension " +
                     std::to_string(m.region().d_in));
  Complex sum = 0.0;
  for (const ComplexMatrix& tau : basis.elements)
    sum += (m.apply(tau).adjoint() * n.apply(tau)).trace();
  return sum;
}

// tr(M†N) on the Choi representations.
inline Complex cj_inner(const QuantumMap& m, const QuantumMap& n) {
  if (!(m.region() == n.region()))
    throw ShapeError("cj_inner: maps live on different regions ('" +
                     m.region().label + "' vs '" + n.region().label + "')");
  return (m.choi().adjoint() * n.choi()).trace();
}

struct MethodsLemmaReport {
  Index dim = 0;
  int trials = 0;
  double swap_defect = 0.0;          // ‖Σ_μ τ_μ ⊗ τ_μ − S‖_max over tested bases
  double completeness_defect = 0.0;  // over all index tuples (m, k, n, r)
  double inner_defect = 0.0;         // |super_inner − cj_inner| over map pairs
  double tol = 1e-9;
  bool passed = false;
};

// Cross-checks three independently computable identities at dimension d:
// the swap decomposition S = Σ_μ τ_μ ⊗ τ_μ, the completeness relation
// Σ_μ ⟨m|τ_μ|k⟩* ⟨n|τ_μ|r⟩ = δ_{mn} δ_{kr}, and the equality of the
// superoperator and Choi inner products on random CP map pairs.
inline MethodsLemmaReport verify_methods_lemmas(Index d, int trials,
                                                std::uint64_t seed,
                                                double tol = 1e-9) {
  if (d < 1) throw ShapeError("verify_methods_lemmas: dimension must be >= 1");
  MethodsLemmaReport report;
  report.dim = d;
  report.trials = trials;
  report.tol = tol;
  Rng rng(seed);

  const ComplexMatrix s = swap_operator(d);
  std::vector<HermBasis> bases;
  bases.push_back(hs_basis(d));
  bases.push_back(random_hs_basis(d, rng));
  bases.push_back(random_hs_basis(d, rng));
  for (const HermBasis& basis : bases) {
    report.swap_defect = std::max(
        report.swap_defect, (swap_from_basis(basis) - s).cwiseAbs().maxCoeff());

    for (Index m = 0; m < d; ++m)
      for (Index k = 0; k < d; ++k)
        for (Index n = 0; n < d; ++n)
          for (Index r = 0; r < d; ++r) {
            Complex sum = 0.0;
            for (const ComplexMatrix& tau : basis.elements)
              sum += std::conj(tau(m, k)) * tau(n, r);
            const double target = (m == n && k == r) ? 1.0 : 0.0;
            report.completeness_defect =
                std::max(report.completeness_defect, std::abs(sum - target));
          }
  }

  // Random CP trace-non-increasing pairs, alternating between square
  // regions and measure-and-discard regions.
  for (int t = 0; t < trials; ++t) {
    const Region region{"A", d, (t % 2 == 0) ? d : Index{1}};
    QuantumMap m = random_cptp(region, rng);
    QuantumMap n = random_cptp(region, rng);
    const double scale = 0.25 + 0.75 * uniform_double(rng);
    n = QuantumMap(region, ComplexMatrix(scale * n.choi()));
    const HermBasis& basis = bases[static_cast<std::size_t>(t) % bases.size()];
    const Complex via_super = super_inner(m, n, basis);
    const Complex via_cj = cj_inner(m, n);
    report.inner_defect =
        std::max(report.inner_defect, std::abs(via_super - via_cj));
  }

  report.passed = report.swap_defect <= tol &&
                  report.completeness_defect <= tol &&
                  report.inner_defect <= tol;
  return report;
}

}  // namespace qproc
