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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qproc/random.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

// Eigenvalues below this cutoff are dropped when extracting Kraus
// operators from a Choi matrix.
inline constexpr double kKrausRankCutoff = 1e-12;

// A local laboratory: input and output Hilbert-space dimensions.
// Degenerate wires are first-class: d_in = 1 is a preparation, d_out = 1 a
// measure-and-discard.
struct Region {
  std::string label;
  Index d_in = 1;
  Index d_out = 1;

  Index choi_dim() const { return d_in * d_out; }
  friend bool operator==(const Region&, const Region&) = default;
};

// Choi matrix of a map given by Kraus operators K_j (each d_out x d_in):
//
//   M = Σ_{jl} |l⟩⟨j| ⊗ [M(|j⟩⟨l|)]^T
//
// i.e. the full transpose of the column-vectorization Choi matrix. The
// input wire is the slow tensor factor, matching the global wire order
// (X_I before X_O). Positivity is preserved by the transpose, and joint
// probabilities contract against process matrices without correction
// factors under this convention.
inline ComplexMatrix choi_from_kraus(const Region& region,
                                     const std::vector<ComplexMatrix>& kraus) {
  const Index din = region.d_in, dout = region.d_out;
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  Eigen::VectorXcd v(din * dout);
  for (const ComplexMatrix& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw ShapeError("choi_from_kraus: Kraus operator is " +
                       std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                       ", region '" + region.label + "' needs " +
                       std::to_string(dout) + "x" + std::to_string(din));
    require_finite(k, "choi_from_kraus");
    // M = Σ_k |v_k⟩⟨v_k| with v_k[(l,a)] = conj(K_k(a,l)).
    for (Index l = 0; l < din; ++l)
      for (Index a = 0; a < dout; ++a) v(l * dout + a) = std::conj(k(a, l));
    choi.noalias() += v * v.adjoint();
  }
  return choi;
}

// Inverse of choi_from_kraus via eigendecomposition; eigenvalues below
// rank_cutoff are dropped. The Choi matrix must be PSD within tol.
inline std::vector<ComplexMatrix> kraus_from_choi(
    const Region& region, const ComplexMatrix& choi,
    double rank_cutoff = kKrausRankCutoff, double tol = kDefaultTol) {
  const Index din = region.d_in, dout = region.d_out;
  if (choi.rows() != din * dout || choi.cols() != din * dout)
    throw ShapeError("kraus_from_choi: Choi matrix dimension mismatch");
  if (hermiticity_defect(choi) > tol)
    throw ValidityError("kraus_from_choi: Choi matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (choi + choi.adjoint()));
  if (es.eigenvalues().minCoeff() < -tol)
    throw ValidityError("kraus_from_choi: Choi matrix is not PSD (min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
  std::vector<ComplexMatrix> kraus;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= rank_cutoff) continue;
    const double scale = std::sqrt(lambda);
    const auto& v = es.eigenvectors().col(i);
    ComplexMatrix k(dout, din);
    for (Index l = 0; l < din; ++l)
      for (Index a = 0; a < dout; ++a)
        k(a, l) = std::conj(scale * v(l * dout + a));
    kraus.push_back(std::move(k));
  }
  return kraus;
}

// One event: a completely positive trace-non-increasing map between the
// wires of a region, held in Kraus and/or Choi form. Immutable after
// construction; the Choi form is always materialized.
class QuantumMap {
 public:
  QuantumMap(Region region, std::vector<ComplexMatrix> kraus)
      : region_(std::move(region)),
        kraus_(std::move(kraus)),
        choi_(choi_from_kraus(region_, *kraus_)) {}

  QuantumMap(Region region, ComplexMatrix choi) : region_(std::move(region)) {
    if (choi.rows() != region_.choi_dim() || choi.cols() != region_.choi_dim())
      throw ShapeError("QuantumMap: Choi matrix is " + std::to_string(choi.rows()) +
                       "x" + std::to_string(choi.cols()) + ", region '" +
                       region_.label + "' needs " +
                       std::to_string(region_.choi_dim()) + "x" +
                       std::to_string(region_.choi_dim()));
    require_finite(choi, "QuantumMap");
    choi_ = std::move(choi);
  }

  const Region& region() const { return region_; }
  const ComplexMatrix& choi() const { return choi_; }

  bool has_kraus() const { return kraus_.has_value(); }
  const std::vector<ComplexMatrix>& kraus() const {
    if (!kraus_)
      throw ValidityError("QuantumMap: no Kraus form present; use with_kraus()");
    return *kraus_;
  }

  // Copy with the Kraus form materialized from the Choi matrix.
  QuantumMap with_kraus(double rank_cutoff = kKrausRankCutoff,
                        double tol = kDefaultTol) const {
    if (kraus_) return *this;
    QuantumMap out = *this;
    out.kraus_ = kraus_from_choi(region_, choi_, rank_cutoff, tol);
    return out;
  }

  // M(ρ): through the Kraus operators when present, otherwise through the
  // Choi matrix as [tr_in((ρ ⊗ 1_out) · M)]^T.
  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != region_.d_in || rho.cols() != region_.d_in)
      throw ShapeError("QuantumMap::apply: state is " + std::to_string(rho.rows()) +
                       "x" + std::to_string(rho.cols()) + ", region '" +
                       region_.label + "' needs " + std::to_string(region_.d_in) +
                       "x" + std::to_string(region_.d_in));
    if (kraus_) {
      ComplexMatrix out = ComplexMatrix::Zero(region_.d_out, region_.d_out);
      for (const ComplexMatrix& k : *kraus_) out.noalias() += k * rho * k.adjoint();
      return out;
    }
    const ComplexMatrix lifted =
        kron(rho, ComplexMatrix::Identity(region_.d_out, region_.d_out)) * choi_;
    return partial_trace(lifted, {region_.d_in, region_.d_out}, {1})
        .transpose();
  }

  // tr_out of the Choi matrix: equals Σ_j K_j†K_j. Trace-non-increasing
  // means this operator is bounded by the identity.
  ComplexMatrix kraus_sum() const {
    return partial_trace(choi_, {region_.d_in, region_.d_out}, {0});
  }

  double cp_margin() const { return min_eigenvalue(choi_); }
  bool is_cp(double tol = kDefaultTol) const {
    return hermiticity_defect(choi_) <= tol && cp_margin() >= -tol;
  }
  bool is_trace_non_increasing(double tol = kDefaultTol) const {
    return max_eigenvalue(kraus_sum()) <= 1.0 + tol;
  }
  // Spectral norm of tr_out(M) − 1.
  double trace_preservation_defect() const {
    return herm_spectral_norm(kraus_sum() -
                              ComplexMatrix::Identity(region_.d_in, region_.d_in));
  }
  bool is_trace_preserving(double tol = kDefaultTol) const {
    return trace_preservation_defect() <= tol;
  }

 private:
  Region region_;
  std::optional<std::vector<ComplexMatrix>> kraus_;
  ComplexMatrix choi_;
};

inline ComplexMatrix choi_from_kraus(const QuantumMap& m) {
  return choi_from_kraus(m.region(), m.kraus());
}

inline std::vector<ComplexMatrix> kraus_from_choi(
    const QuantumMap& m, double rank_cutoff = kKrausRankCutoff,
    double tol = kDefaultTol) {
  return kraus_from_choi(m.region(), m.choi(), rank_cutoff, tol);
}

inline std::vector<std::string> default_outcome_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

// One context: a nonempty set of maps on the same region whose sum is
// trace-preserving.
class Instrument {
 public:
  explicit Instrument(std::vector<QuantumMap> elements,
                      std::vector<std::string> outcomes = {})
      : elements_(std::move(elements)), outcomes_(std::move(outcomes)) {
    if (elements_.empty())
      throw CompositionError("Instrument: needs at least one element");
    for (const QuantumMap& m : elements_)
      if (!(m.region() == elements_.front().region()))
        throw CompositionError("Instrument: elements mix regions '" +
                               elements_.front().region().label + "' and '" +
                               m.region().label + "'");
    if (outcomes_.empty()) outcomes_ = default_outcome_labels(elements_.size());
    if (outcomes_.size() != elements_.size())
      throw CompositionError("Instrument: " + std::to_string(outcomes_.size()) +
                             " outcome labels for " +
                             std::to_string(elements_.size()) + " elements");
  }

  const Region& region() const { return elements_.front().region(); }
  const std::vector<QuantumMap>& elements() const { return elements_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  std::size_t size() const { return elements_.size(); }

  ComplexMatrix sum_choi() const {
    ComplexMatrix sum =
        ComplexMatrix::Zero(region().choi_dim(), region().choi_dim());
    for (const QuantumMap& m : elements_) sum += m.choi();
    return sum;
  }

 private:
  std::vector<QuantumMap> elements_;
  std::vector<std::string> outcomes_;
};

struct InstrumentReport {
  struct Element {
    std::string outcome;
    double cp_margin = 0.0;  // min eigenvalue of the element's Choi matrix
    bool cp_ok = false;
  };
  std::vector<Element> elements;
  double trace_defect = 0.0;  // spectral norm of tr_out(Σ M) − 1
  double tol = kDefaultTol;
  bool passed = false;
};

inline InstrumentReport validate_instrument(const Instrument& instrument,
                                            double tol = kDefaultTol) {
  InstrumentReport report;
  report.tol = tol;
  bool all_cp = true;
  for (std::size_t i = 0; i < instrument.size(); ++i) {
    const QuantumMap& m = instrument.elements()[i];
    InstrumentReport::Element e;
    e.outcome = instrument.outcomes()[i];
    e.cp_margin = m.cp_margin();
    e.cp_ok = m.is_cp(tol);
    all_cp = all_cp && e.cp_ok;
    report.elements.push_back(std::move(e));
  }
  const Region& r = instrument.region();
  const ComplexMatrix summed_kraus =
      partial_trace(instrument.sum_choi(), {r.d_in, r.d_out}, {0});
  report.trace_defect = herm_spectral_norm(
      summed_kraus - ComplexMatrix::Identity(r.d_in, r.d_in));
  report.passed = all_cp && report.trace_defect <= tol;
  return report;
}

// --------------------------------------------------------------------------
// Effects and POVMs (the d_out = 1 special case).

struct Povm {
  std::vector<ComplexMatrix> effects;
  std::vector<std::string> outcomes;
};

// Largest violation of 0 <= E <= 1 (including non-Hermiticity).
inline double effect_defect(const ComplexMatrix& e) {
  require_square(e, "effect_defect");
  double defect = hermiticity_defect(e);
  defect = std::max(defect, -min_eigenvalue(e));
  defect = std::max(defect, max_eigenvalue(e) - 1.0);
  return std::max(defect, 0.0);
}

inline bool is_effect(const ComplexMatrix& e, double tol = kDefaultTol) {
  return effect_defect(e) <= tol;
}

inline double povm_defect(const Povm& povm) {
  if (povm.effects.empty()) return 1.0;
  double defect = 0.0;
  ComplexMatrix sum = ComplexMatrix::Zero(povm.effects.front().rows(),
                                          povm.effects.front().cols());
  for (const ComplexMatrix& e : povm.effects) {
    defect = std::max(defect, effect_defect(e));
    if (e.rows() != sum.rows() || e.cols() != sum.cols())
      throw ShapeError("povm_defect: effects have mixed dimensions");
    sum += e;
  }
  const ComplexMatrix id = ComplexMatrix::Identity(sum.rows(), sum.cols());
  return std::max(defect, herm_spectral_norm(sum - id));
}

// The measure-and-discard map ρ ↦ tr(Eρ): its Choi matrix is the effect
// itself on a region with trivial output.
inline QuantumMap effect_map(const ComplexMatrix& effect,
                             std::string region_label = "A") {
  require_square(effect, "effect_map");
  Region region{std::move(region_label), effect.rows(), 1};
  return QuantumMap(std::move(region), effect);
}

inline Instrument povm_to_instrument(const Povm& povm,
                                     std::string region_label = "A",
                                     double tol = kDefaultTol) {
  const double defect = povm_defect(povm);
  if (defect > tol)
    throw ValidityError("povm_to_instrument: POVM invalid, defect " +
                        std::to_string(defect));
  std::vector<QuantumMap> maps;
  maps.reserve(povm.effects.size());
  for (const ComplexMatrix& e : povm.effects)
    maps.push_back(effect_map(e, region_label));
  return Instrument(std::move(maps), povm.outcomes);
}

// --------------------------------------------------------------------------
// Seeded random generators. Valid by construction: a channel is the
// reduction of a Haar-random Stinespring isometry, and an instrument is a
// random partition of the dilation's environment measurement.

inline QuantumMap random_cptp(const Region& region, Rng& rng) {
  const Index d_env = region.d_in * region.d_out;  // generic full Kraus rank
  const ComplexMatrix v =
      haar_isometry(region.d_out * d_env, region.d_in, rng);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(d_env));
  for (Index e = 0; e < d_env; ++e) {
    ComplexMatrix k(region.d_out, region.d_in);
    for (Index a = 0; a < region.d_out; ++a)
      for (Index i = 0; i < region.d_in; ++i) k(a, i) = v(a * d_env + e, i);
    kraus.push_back(std::move(k));
  }
  return QuantumMap(region, std::move(kraus));
}

inline QuantumMap random_cptp(const Region& region, std::uint64_t seed) {
  Rng rng(seed);
  return random_cptp(region, rng);
}

inline Instrument random_instrument(const Region& region,
                                    std::size_t k_outcomes, Rng& rng) {
  if (k_outcomes < 1)
    throw CompositionError("random_instrument: k_outcomes must be >= 1");
  const Index d_env =
      std::max<Index>(static_cast<Index>(k_outcomes),
                      region.d_in * region.d_out);
  const ComplexMatrix v =
      haar_isometry(region.d_out * d_env, region.d_in, rng);

  // Shuffle environment indices, seed each outcome group with one, then
  // scatter the rest uniformly.
  std::vector<Index> env(static_cast<std::size_t>(d_env));
  for (Index e = 0; e < d_env; ++e) env[static_cast<std::size_t>(e)] = e;
  for (std::size_t i = env.size(); i > 1; --i)
    std::swap(env[i - 1], env[uniform_index(rng, i)]);
  std::vector<std::vector<Index>> groups(k_outcomes);
  for (std::size_t i = 0; i < env.size(); ++i) {
    const std::size_t g =
        (i < k_outcomes) ? i : static_cast<std::size_t>(
                                   uniform_index(rng, k_outcomes));
    groups[g].push_back(env[i]);
  }

  std::vector<QuantumMap> elements;
  elements.reserve(k_outcomes);
  for (const std::vector<Index>& group : groups) {
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(group.size());
    for (Index e : group) {
      ComplexMatrix k(region.d_out, region.d_in);
      for (Index a = 0; a < region.d_out; ++a)
        for (Index i = 0; i < region.d_in; ++i) k(a, i) = v(a * d_env + e, i);
      kraus.push_back(std::move(k));
    }
    elements.emplace_back(region, std::move(kraus));
  }
  return Instrument(std::move(elements));
}

inline Instrument random_instrument(const Region& region,
                                    std::size_t k_outcomes,
                                    std::uint64_t seed) {
  Rng rng(seed);
  return random_instrument(region, k_outcomes, rng);
}

}  // namespace qproc
