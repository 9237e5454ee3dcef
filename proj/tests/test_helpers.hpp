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

#include "qproc/channels.hpp"
#include "qproc/tensor.hpp"

// Shared fixtures. The Born-rule helpers here are deliberately primitive —
// explicit matrix arithmetic, no library channel machinery — so they can
// serve as independent oracles for the higher-level modules.

inline double max_abs_diff(const qproc::ComplexMatrix& a,
                           const qproc::ComplexMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

inline qproc::ComplexMatrix pauli_x() {
  qproc::ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline qproc::ComplexMatrix pauli_y() {
  qproc::ComplexMatrix y(2, 2);
  y << qproc::Complex(0, 0), qproc::Complex(0, -1), qproc::Complex(0, 1),
      qproc::Complex(0, 0);
  return y;
}

inline qproc::ComplexMatrix pauli_z() {
  qproc::ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

inline qproc::ComplexMatrix ket_density(const Eigen::VectorXcd& psi) {
  return psi * psi.adjoint();
}

inline qproc::ComplexMatrix basis_projector(qproc::Index d, qproc::Index k) {
  qproc::ComplexMatrix p = qproc::ComplexMatrix::Zero(d, d);
  p(k, k) = 1.0;
  return p;
}

inline qproc::ComplexMatrix plus_projector() {
  qproc::ComplexMatrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  return p;
}

inline qproc::ComplexMatrix minus_projector() {
  qproc::ComplexMatrix p(2, 2);
  p << 0.5, -0.5, -0.5, 0.5;
  return p;
}

// Projective qubit Z instrument on a (2, 2) region: ρ ↦ P_k ρ P_k.
inline qproc::Instrument z_instrument(const std::string& label = "A") {
  using namespace qproc;
  const Region region{label, 2, 2};
  std::vector<QuantumMap> maps;
  maps.emplace_back(region,
                    std::vector<ComplexMatrix>{basis_projector(2, 0)});
  maps.emplace_back(region,
                    std::vector<ComplexMatrix>{basis_projector(2, 1)});
  return Instrument(std::move(maps), {"0", "1"});
}

// X-basis POVM instrument on a (2, 1) region.
inline qproc::Instrument x_povm_instrument(const std::string& label = "B") {
  return qproc::povm_to_instrument(
      qproc::Povm{{plus_projector(), minus_projector()}, {"+", "-"}}, label);
}

// Z-basis POVM instrument on a (2, 1) region.
inline qproc::Instrument z_povm_instrument(const std::string& label = "A") {
  return qproc::povm_to_instrument(
      qproc::Povm{{basis_projector(2, 0), basis_projector(2, 1)}, {"0", "1"}},
      label);
}

// Independent Born-rule value: tr(Eρ).
inline double born_value(const qproc::ComplexMatrix& effect,
                         const qproc::ComplexMatrix& rho) {
  return (effect * rho).trace().real();
}

// Independent state-update step: ρ ↦ Σ K ρ K† (unnormalized).
inline qproc::ComplexMatrix kraus_step(
    const std::vector<qproc::ComplexMatrix>& kraus,
    const qproc::ComplexMatrix& rho) {
  qproc::ComplexMatrix out =
      qproc::ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}
