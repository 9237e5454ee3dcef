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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qproc/channels.hpp"

namespace qproc {

// Raw probabilities within this band of [0, 1] are clamped; larger
// violations are validity errors, never silent clamps.
inline constexpr double kProbClampTol = 1e-9;

// Conditioning events with probability at or below this threshold are
// treated as probability zero.
inline constexpr double kZeroProbabilityTol = 1e-12;

// tr(AB) without materializing the product.
inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw ShapeError("trace_product: incompatible shapes");
  return a.transpose().cwiseProduct(b).sum();
}

// A positive operator over the tensor product of all region wires, in the
// global wire order A_I, A_O, B_I, B_O, ... (region-major, input before
// output). Contracting it against one event per region yields the joint
// probability of those events.
class ProcessMatrix {
 public:
  ProcessMatrix(std::vector<Region> regions, ComplexMatrix matrix)
      : regions_(std::move(regions)), matrix_(std::move(matrix)) {
    if (regions_.empty())
      throw CompositionError("ProcessMatrix: needs at least one region");
    Index dim = 1;
    for (const Region& r : regions_) {
      if (r.d_in < 1 || r.d_out < 1)
        throw ShapeError("ProcessMatrix: region '" + r.label +
                         "' has non-positive wire dimension");
      dim *= r.choi_dim();
    }
    for (std::size_t i = 0; i < regions_.size(); ++i)
      for (std::size_t j = i + 1; j < regions_.size(); ++j)
        if (regions_[i].label == regions_[j].label)
          throw CompositionError("ProcessMatrix: duplicate region label '" +
                                 regions_[i].label + "'");
    if (matrix_.rows() != dim || matrix_.cols() != dim)
      throw ShapeError("ProcessMatrix: matrix is " + std::to_string(matrix_.rows()) +
                       "x" + std::to_string(matrix_.cols()) +
                       ", wires require " + std::to_string(dim) + "x" +
                       std::to_string(dim));
    require_finite(matrix_, "ProcessMatrix");
  }

  const std::vector<Region>& regions() const { return regions_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  // Subsystem dimensions in the global wire order.
  std::vector<Index> wire_dims() const {
    std::vector<Index> dims;
    dims.reserve(2 * regions_.size());
    for (const Region& r : regions_) {
      dims.push_back(r.d_in);
      dims.push_back(r.d_out);
    }
    return dims;
  }

  Index output_dim_product() const {
    Index p = 1;
    for (const Region& r : regions_) p *= r.d_out;
    return p;
  }

  std::size_t region_index(const std::string& label) const {
    for (std::size_t i = 0; i < regions_.size(); ++i)
      if (regions_[i].label == label) return i;
    throw CompositionError("ProcessMatrix: no region labelled '" + label + "'");
  }

 private:
  std::vector<Region> regions_;
  ComplexMatrix matrix_;
};

// tr[(⊗_X M^X) · W] with no physicality checks on the factors.
inline Complex contract(const ProcessMatrix& w,
                        const std::vector<ComplexMatrix>& chois) {
  if (chois.size() != w.regions().size())
    throw CompositionError("contract: " + std::to_string(chois.size()) +
                           " factors for " + std::to_string(w.regions().size()) +
                           " regions");
  return trace_product(kron_all(chois), w.matrix());
}

// Choi matrix of the maximally depolarizing channel ρ ↦ tr(ρ) 1/d_out;
// the canonical trace-preserving completion.
inline ComplexMatrix depolarizing_choi(const Region& region) {
  return ComplexMatrix::Identity(region.choi_dim(), region.choi_dim()) /
         static_cast<double>(region.d_out);
}

struct ProbDiagnostics {
  double raw = 0.0;   // real part of the trace, before clamping
  double imag = 0.0;  // imaginary part of the trace (should vanish)
};

// Joint probability of one event per region: tr[(M^A ⊗ M^B ⊗ ...) · W].
// Maps must be CP and trace-non-increasing on matching regions. Values
// inside [-tol, 1 + tol] are clamped into [0, 1].
inline double joint_prob(const ProcessMatrix& w,
                         const std::vector<QuantumMap>& maps,
                         ProbDiagnostics* diagnostics = nullptr,
                         double tol = kProbClampTol) {
  if (maps.size() != w.regions().size())
    throw CompositionError("joint_prob: " + std::to_string(maps.size()) +
                           " maps for " + std::to_string(w.regions().size()) +
                           " regions");
  std::vector<ComplexMatrix> chois;
  chois.reserve(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!(maps[i].region() == w.regions()[i]))
      throw CompositionError("joint_prob: map region '" + maps[i].region().label +
                             "' does not match process region '" +
                             w.regions()[i].label + "'");
    if (!maps[i].is_cp(tol))
      throw ValidityError("joint_prob: map at region '" +
                          maps[i].region().label + "' is not CP");
    if (!maps[i].is_trace_non_increasing(tol))
      throw ValidityError("joint_prob: map at region '" +
                          maps[i].region().label + "' increases trace");
    chois.push_back(maps[i].choi());
  }
  const Complex value = contract(w, chois);
  if (diagnostics) {
    diagnostics->raw = value.real();
    diagnostics->imag = value.imag();
  }
  if (std::abs(value.imag()) > tol)
    throw ValidityError("joint_prob: probability has imaginary part " +
                        std::to_string(value.imag()));
  const double raw = value.real();
  if (raw < -tol || raw > 1.0 + tol)
    throw ValidityError("joint_prob: value " + std::to_string(raw) +
                        " outside [0, 1] beyond tolerance");
  return std::min(1.0, std::max(0.0, raw));
}

// One experiment: one instrument per region plus (optionally) the process
// connecting them. Region order follows the process.
struct Scenario {
  std::vector<Instrument> instruments;
  std::optional<ProcessMatrix> process;

  Scenario(std::vector<Instrument> instruments_,
           std::optional<ProcessMatrix> process_ = std::nullopt)
      : instruments(std::move(instruments_)), process(std::move(process_)) {
    if (instruments.empty())
      throw CompositionError("Scenario: needs at least one instrument");
    for (std::size_t i = 0; i < instruments.size(); ++i)
      for (std::size_t j = i + 1; j < instruments.size(); ++j)
        if (instruments[i].region().label == instruments[j].region().label)
          throw CompositionError("Scenario: duplicate region label '" +
                                 instruments[i].region().label + "'");
    if (process) {
      if (process->regions().size() != instruments.size())
        throw CompositionError("Scenario: " +
                               std::to_string(instruments.size()) +
                               " instruments for " +
                               std::to_string(process->regions().size()) +
                               " process regions");
      for (std::size_t i = 0; i < instruments.size(); ++i)
        if (!(instruments[i].region() == process->regions()[i]))
          throw CompositionError(
              "Scenario: instrument region '" + instruments[i].region().label +
              "' does not match process region '" +
              process->regions()[i].label + "'");
    }
  }

  std::vector<Region> regions() const {
    std::vector<Region> rs;
    rs.reserve(instruments.size());
    for (const Instrument& ins : instruments) rs.push_back(ins.region());
    return rs;
  }
};

// Probability for each tuple of outcome labels, one per region.
struct OutcomeDistribution {
  std::map<std::vector<std::string>, double> probs;

  double total() const {
    double sum = 0.0;
    for (const auto& [outcome, p] : probs) sum += p;
    return sum;
  }
  double at(const std::vector<std::string>& outcome) const {
    const auto it = probs.find(outcome);
    if (it == probs.end())
      throw CompositionError("OutcomeDistribution: unknown outcome tuple");
    return it->second;
  }
};

inline OutcomeDistribution prob_table(const Scenario& scenario,
                                      double tol = kProbClampTol) {
  if (!scenario.process)
    throw PreconditionError("prob_table: scenario has no process");
  OutcomeDistribution dist;
  std::vector<std::size_t> idx(scenario.instruments.size(), 0);
  while (true) {
    std::vector<QuantumMap> maps;
    std::vector<std::string> outcome;
    maps.reserve(idx.size());
    outcome.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      maps.push_back(scenario.instruments[r].elements()[idx[r]]);
      outcome.push_back(scenario.instruments[r].outcomes()[idx[r]]);
    }
    dist.probs[outcome] = joint_prob(*scenario.process, maps, nullptr, tol);

    std::size_t r = idx.size();
    while (r-- > 0) {
      if (++idx[r] < scenario.instruments[r].size()) break;
      idx[r] = 0;
      if (r == 0) return dist;
    }
  }
}

// --------------------------------------------------------------------------
// Process validation. Positivity is spectral; normalization is checked
// operationally: every tuple of trace-preserving maps must have unit
// probability, and tr W must equal the product of output dimensions
// (the depolarizing-tuple special case of that normalization).

struct ProcessTolerances {
  double psd = 1e-10;
  double normalization = 1e-8;
  double trace = 1e-9;
};

struct ProcessReport {
  double hermiticity_defect = 0.0;
  double psd_margin = 0.0;  // min eigenvalue of the Hermitian part
  double max_normalization_defect = 0.0;
  double trace_defect = 0.0;
  bool psd_ok = false;
  bool normalization_ok = false;
  bool trace_ok = false;
  bool passed = false;
  int trials = 0;
  std::uint64_t seed = 0;
  ProcessTolerances tol;
};

inline ProcessReport validate_process(const ProcessMatrix& w, int trials = 200,
                                      std::uint64_t seed = 0x9b97,
                                      ProcessTolerances tol = {}) {
  ProcessReport report;
  report.trials = trials;
  report.seed = seed;
  report.tol = tol;

  report.hermiticity_defect = hermiticity_defect(w.matrix());
  report.psd_margin = min_eigenvalue(w.matrix());
  report.psd_ok =
      report.hermiticity_defect <= tol.psd && report.psd_margin >= -tol.psd;

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<ComplexMatrix> chois;
    chois.reserve(w.regions().size());
    for (const Region& r : w.regions())
      chois.push_back(random_cptp(r, rng).choi());
    const Complex value = contract(w, chois);
    report.max_normalization_defect =
        std::max(report.max_normalization_defect, std::abs(value - 1.0));
  }
  report.normalization_ok = report.max_normalization_defect <= tol.normalization;

  report.trace_defect = std::abs(
      w.matrix().trace() - Complex(static_cast<double>(w.output_dim_product())));
  report.trace_ok = report.trace_defect <= tol.trace;

  report.passed = report.psd_ok && report.normalization_ok && report.trace_ok;
  return report;
}

// --------------------------------------------------------------------------
// Conditioning: removing an observed region.

// Process on the remaining regions after observing `event` at the labelled
// region:
//
//   W̃ = tr_{X_I X_O}[(M^X ⊗ 1^rest) · W] / P(event)
//
// The normalizing P(event) is computed with a trace-preserving completion
// at the remaining regions; for a valid W it does not depend on that
// choice, which is cross-checked against a second random completion.
inline ProcessMatrix update_process(const ProcessMatrix& w,
                                    const std::string& region_label,
                                    const QuantumMap& event,
                                    double tol = kProbClampTol,
                                    double completion_check_tol = 1e-8) {
  const std::size_t xi = w.region_index(region_label);
  if (w.regions().size() < 2)
    throw CompositionError(
        "update_process: needs at least two regions (conditioning would "
        "leave none)");
  if (!(event.region() == w.regions()[xi]))
    throw CompositionError("update_process: event region '" +
                           event.region().label +
                           "' does not match process region '" +
                           w.regions()[xi].label + "'");
  if (!event.is_cp(tol) || !event.is_trace_non_increasing(tol))
    throw ValidityError("update_process: event is not a CP "
                        "trace-non-increasing map");

  std::vector<ComplexMatrix> factors;
  factors.reserve(w.regions().size());
  for (std::size_t i = 0; i < w.regions().size(); ++i)
    factors.push_back(i == xi ? event.choi()
                              : ComplexMatrix(ComplexMatrix::Identity(
                                    w.regions()[i].choi_dim(),
                                    w.regions()[i].choi_dim())));
  const ComplexMatrix lifted = kron_all(factors) * w.matrix();

  std::vector<std::size_t> keep_wires;
  for (std::size_t i = 0; i < w.regions().size(); ++i) {
    if (i == xi) continue;
    keep_wires.push_back(2 * i);
    keep_wires.push_back(2 * i + 1);
  }
  const ComplexMatrix numerator =
      partial_trace(lifted, w.wire_dims(), keep_wires);

  auto event_probability = [&](Rng* rng) {
    std::vector<ComplexMatrix> chois;
    chois.reserve(w.regions().size());
    for (std::size_t i = 0; i < w.regions().size(); ++i) {
      if (i == xi)
        chois.push_back(event.choi());
      else
        chois.push_back(rng ? random_cptp(w.regions()[i], *rng).choi()
                            : depolarizing_choi(w.regions()[i]));
    }
    return contract(w, chois).real();
  };
  const double denominator = event_probability(nullptr);
  Rng rng(derive_seed(0x9b97, 17));
  const double denominator_check = event_probability(&rng);
  if (std::abs(denominator - denominator_check) > completion_check_tol)
    throw ValidityError(
        "update_process: event probability depends on the completion at the "
        "remaining regions (" + std::to_string(denominator) + " vs " +
        std::to_string(denominator_check) + "); the process is not valid");
  if (denominator <= kZeroProbabilityTol)
    throw UndefinedConditionalError(
        "update_process: conditioning on an event of probability " +
        std::to_string(denominator));

  std::vector<Region> remaining;
  for (std::size_t i = 0; i < w.regions().size(); ++i)
    if (i != xi) remaining.push_back(w.regions()[i]);
  return ProcessMatrix(std::move(remaining),
                       ComplexMatrix(numerator / denominator));
}

// P(query | event) for a two-region process, as a ratio of joint
// probabilities. Also evaluated as tr[M_query · W̃] against the updated
// process; the two routes must agree.
inline double conditional_prob(const ProcessMatrix& w,
                               const std::string& cond_region_label,
                               const QuantumMap& cond_event,
                               const Instrument& cond_instrument,
                               const QuantumMap& query_map,
                               double tol = kProbClampTol) {
  if (w.regions().size() != 2)
    throw CompositionError(
        "conditional_prob: defined for two-region processes; use "
        "update_process iteratively for longer chains");
  const std::size_t ci = w.region_index(cond_region_label);
  const std::size_t qi = 1 - ci;
  if (!(cond_instrument.region() == w.regions()[ci]))
    throw CompositionError(
        "conditional_prob: instrument region does not match the "
        "conditioning region");
  if (!(cond_event.region() == w.regions()[ci]) ||
      !(query_map.region() == w.regions()[qi]))
    throw CompositionError("conditional_prob: map regions do not match");

  // The event must belong to its context: events outside the instrument
  // have probability zero given that instrument.
  bool member = false;
  for (const QuantumMap& m : cond_instrument.elements())
    if ((m.choi() - cond_event.choi()).cwiseAbs().maxCoeff() <= tol)
      member = true;
  if (!member)
    throw UndefinedConditionalError(
        "conditional_prob: the conditioning event is not an element of its "
        "instrument, so it has probability zero in this context");

  std::vector<QuantumMap> joint_maps;
  joint_maps.reserve(2);
  if (ci == 0) {
    joint_maps = {cond_event, query_map};
  } else {
    joint_maps = {query_map, cond_event};
  }
  const double joint = joint_prob(w, joint_maps, nullptr, tol);

  std::vector<ComplexMatrix> marginal_chois(2);
  marginal_chois[ci] = cond_event.choi();
  marginal_chois[qi] = depolarizing_choi(w.regions()[qi]);
  const double marginal = contract(w, marginal_chois).real();
  if (marginal <= kZeroProbabilityTol)
    throw UndefinedConditionalError(
        "conditional_prob: conditioning on an event of probability " +
        std::to_string(marginal));
  const double via_ratio = joint / marginal;

  const ProcessMatrix updated =
      update_process(w, cond_region_label, cond_event, tol);
  const double via_update =
      trace_product(query_map.choi(), updated.matrix()).real();
  if (std::abs(via_ratio - via_update) > 1e-10)
    throw ValidityError(
        "conditional_prob: ratio and updated-process routes disagree (" +
        std::to_string(via_ratio) + " vs " + std::to_string(via_update) + ")");

  return std::min(1.0, std::max(0.0, via_ratio));
}

// --------------------------------------------------------------------------
// Constructors for the standard scenarios.

inline void require_density(const ComplexMatrix& rho, const std::string& what,
                            double tol = kProbClampTol) {
  require_square(rho, what);
  require_finite(rho, what);
  if (!is_psd(rho, tol))
    throw ValidityError(what + ": state is not positive semidefinite");
  if (std::abs(rho.trace() - Complex(1.0)) > tol)
    throw ValidityError(what + ": state trace is " +
                        std::to_string(rho.trace().real()) + ", expected 1");
}

// |φ⟩⟨φ| with φ = Σ_j |jj⟩: the unnormalized maximally entangled operator
// linking an output wire to the next input wire of the same dimension.
inline ComplexMatrix identity_link(Index d) {
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d * d);
  for (Index j = 0; j < d; ++j) phi(j * d + j) = 1.0;
  return phi * phi.adjoint();
}

// Process for a chain of regions connected by identity channels:
//
//   W = ρ^{A_I} ⊗ |φ⟩⟨φ|^{A_O B_I} ⊗ |φ⟩⟨φ|^{B_O C_I} ⊗ ... ⊗ 1^{(last)_O}
//
// The single-region case is W = ρ ⊗ 1^{A_O}.
inline ProcessMatrix sequential_identity_process(const ComplexMatrix& rho,
                                                 std::vector<Region> regions) {
  if (regions.empty())
    throw CompositionError("sequential_identity_process: no regions");
  require_density(rho, "sequential_identity_process");
  if (rho.rows() != regions.front().d_in)
    throw CompositionError(
        "sequential_identity_process: state dimension " +
        std::to_string(rho.rows()) + " does not match first input wire " +
        std::to_string(regions.front().d_in));
  for (std::size_t i = 0; i + 1 < regions.size(); ++i)
    if (regions[i].d_out != regions[i + 1].d_in)
      throw CompositionError("sequential_identity_process: output of '" +
                             regions[i].label + "' (" +
                             std::to_string(regions[i].d_out) +
                             ") does not chain into input of '" +
                             regions[i + 1].label + "' (" +
                             std::to_string(regions[i + 1].d_in) + ")");

  ComplexMatrix w = rho;
  for (std::size_t i = 0; i + 1 < regions.size(); ++i)
    w = kron(w, identity_link(regions[i].d_out));
  const Index last_out = regions.back().d_out;
  w = kron(w, ComplexMatrix::Identity(last_out, last_out));
  return ProcessMatrix(std::move(regions), std::move(w));
}

// Single measured region: the process matrix is the density matrix.
inline ProcessMatrix state_process(const ComplexMatrix& rho,
                                   std::string label = "A") {
  require_density(rho, "state_process");
  return sequential_identity_process(
      rho, {Region{std::move(label), rho.rows(), 1}});
}

// Two regions in sequence with trivial evolution between them.
inline ProcessMatrix identity_channel_process(const ComplexMatrix& rho,
                                              Index b_out = 1,
                                              std::string label_a = "A",
                                              std::string label_b = "B") {
  require_density(rho, "identity_channel_process");
  const Index d = rho.rows();
  return sequential_identity_process(
      rho, {Region{std::move(label_a), d, d},
            Region{std::move(label_b), d, b_out}});
}

// Two non-signalling measure-and-discard regions sharing the joint state.
inline ProcessMatrix spacelike_process(const ComplexMatrix& rho_joint,
                                       Index d_a, Index d_b,
                                       std::string label_a = "A",
                                       std::string label_b = "B") {
  require_density(rho_joint, "spacelike_process");
  if (rho_joint.rows() != d_a * d_b)
    throw ShapeError("spacelike_process: joint state dimension " +
                     std::to_string(rho_joint.rows()) + " != " +
                     std::to_string(d_a) + "*" + std::to_string(d_b));
  return ProcessMatrix({Region{std::move(label_a), d_a, 1},
                        Region{std::move(label_b), d_b, 1}},
                       rho_joint);
}

}  // namespace qproc
