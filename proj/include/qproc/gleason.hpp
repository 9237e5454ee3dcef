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
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "qproc/process.hpp"

namespace qproc {

// A black-box probability assignment: one CP map per region in, a number
// in [0, 1] out. No structure is imposed at construction; the checks below
// probe whether the assignment behaves like a frame function, and the
// reconstruction recovers the process matrix behind it when it does.
// Evaluators must be pure: same maps, same value.
struct FrameOracle {
  std::vector<Region> regions;
  std::function<double(const std::vector<QuantumMap>&)> evaluate;
};

inline FrameOracle wrap_process(const ProcessMatrix& w) {
  return FrameOracle{
      w.regions(),
      [w](const std::vector<QuantumMap>& maps) { return joint_prob(w, maps); }};
}

namespace detail {

inline std::uint64_t hash_maps(const std::vector<QuantumMap>& maps) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the Choi entries
  auto mix = [&h](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    h = (h ^ bits) * 0x100000001b3ULL;
  };
  for (const QuantumMap& m : maps)
    for (Index c = 0; c < m.choi().cols(); ++c)
      for (Index r = 0; r < m.choi().rows(); ++r) {
        mix(m.choi()(r, c).real());
        mix(m.choi()(r, c).imag());
      }
  return h;
}

}  // namespace detail

// Finite-statistics version of a process-backed oracle: each query returns
// the relative frequency of the event in `samples` Bernoulli draws. The
// draw is keyed on the query itself, so the oracle stays pure.
inline FrameOracle sampled_oracle(const ProcessMatrix& w, long samples,
                                  std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("sampled_oracle: samples must be >= 1");
  return FrameOracle{
      w.regions(), [w, samples, seed](const std::vector<QuantumMap>& maps) {
        const double p = joint_prob(w, maps);
        Rng rng(derive_seed(seed, detail::hash_maps(maps)));
        long hits = 0;
        for (long i = 0; i < samples; ++i)
          if (uniform_double(rng) < p) ++hits;
        return static_cast<double>(hits) / static_cast<double>(samples);
      }};
}

struct AxiomReport {
  double max_normalization_defect = 0.0;  // |Σ_outcomes f − 1| over contexts
  double max_range_violation = 0.0;       // distance of values from [0, 1]
  int trials = 0;
  double tol = 1e-8;
  bool passed = false;
};

// Probes the defining conditions: values in [0, 1], and unit total over
// every tuple of instruments.
inline AxiomReport axiom_check(const FrameOracle& oracle, int trials,
                               std::uint64_t seed, double tol = 1e-8) {
  AxiomReport report;
  report.trials = trials;
  report.tol = tol;
  Rng rng(seed);
  const std::size_t n_regions = oracle.regions.size();

  for (int t = 0; t < trials; ++t) {
    std::vector<Instrument> instruments;
    instruments.reserve(n_regions);
    for (const Region& r : oracle.regions)
      instruments.push_back(
          random_instrument(r, 1 + uniform_index(rng, 3), rng));

    double total = 0.0;
    std::vector<std::size_t> idx(n_regions, 0);
    bool done = false;
    while (!done) {
      std::vector<QuantumMap> maps;
      maps.reserve(n_regions);
      for (std::size_t r = 0; r < n_regions; ++r)
        maps.push_back(instruments[r].elements()[idx[r]]);
      const double value = oracle.evaluate(maps);
      report.max_range_violation =
          std::max({report.max_range_violation, -value, value - 1.0});
      total += value;

      std::size_t r = n_regions;
      done = true;
      while (r-- > 0) {
        if (++idx[r] < instruments[r].size()) {
          done = false;
          break;
        }
        idx[r] = 0;
      }
    }
    report.max_normalization_defect =
        std::max(report.max_normalization_defect, std::abs(total - 1.0));
  }
  report.max_range_violation = std::max(report.max_range_violation, 0.0);
  report.passed = report.max_normalization_defect <= tol &&
                  report.max_range_violation <= tol;
  return report;
}

struct LinearityReport {
  double max_additivity_defect = 0.0;   // |f(M₁+M₂) − f(M₁) − f(M₂)|
  double max_homogeneity_defect = 0.0;  // |f(cM) − c f(M)|, c ∈ (0, 1]
  int trials = 0;
  double tol = 1e-8;
  bool passed = false;
};

// Probes the linearity that normalization forces on a frame function, with
// single-map trace-preserving contexts fixed at the other regions.
inline LinearityReport linearity_check(const FrameOracle& oracle, int trials,
                                       std::uint64_t seed, double tol = 1e-8) {
  LinearityReport report;
  report.trials = trials;
  report.tol = tol;
  Rng rng(seed);
  const std::size_t n_regions = oracle.regions.size();

  for (int t = 0; t < trials; ++t) {
    const std::size_t focus = static_cast<std::size_t>(t) % n_regions;
    const Region& region = oracle.regions[focus];

    std::vector<QuantumMap> completions;
    completions.reserve(n_regions);
    for (const Region& r : oracle.regions)
      completions.push_back(random_cptp(r, rng));
    auto evaluate_at_focus = [&](const QuantumMap& m) {
      std::vector<QuantumMap> maps = completions;
      maps[focus] = m;
      return oracle.evaluate(maps);
    };

    const Instrument splitting =
        random_instrument(region, 2 + uniform_index(rng, 2), rng);
    const QuantumMap& m1 = splitting.elements()[0];
    const QuantumMap& m2 = splitting.elements()[1];
    const QuantumMap merged(region, ComplexMatrix(m1.choi() + m2.choi()));
    report.max_additivity_defect = std::max(
        report.max_additivity_defect,
        std::abs(evaluate_at_focus(merged) - evaluate_at_focus(m1) -
                 evaluate_at_focus(m2)));

    const double c = 1.0 - uniform_double(rng);  // (0, 1]
    const QuantumMap whole = random_cptp(region, rng);
    const QuantumMap scaled(region, ComplexMatrix(c * whole.choi()));
    report.max_homogeneity_defect = std::max(
        report.max_homogeneity_defect,
        std::abs(evaluate_at_focus(scaled) - c * evaluate_at_focus(whole)));
  }
  report.passed = report.max_additivity_defect <= tol &&
                  report.max_homogeneity_defect <= tol;
  return report;
}

struct ReconstructOptions {
  int axiom_trials = 20;
  int linearity_trials = 20;
  double precondition_tol = 1e-8;
  int holdout_trials = 50;
  double holdout_tol = 1e-8;
  std::uint64_t seed = 0x51ea;
  // Optional spanning set per region: d_I²d_O² Hermitian matrices spanning
  // the region's Choi space. Defaults to hs_basis of each region.
  std::vector<std::vector<ComplexMatrix>> spanning_sets;
};

struct ReconstructionResult {
  ProcessMatrix process;
  double holdout_defect = 0.0;
  AxiomReport axioms;
  LinearityReport linearity;
};

// Recovers the process matrix that generates an oracle's probabilities.
//
// The oracle can only be queried on physical maps, so each spanning
// element σ is shifted and scaled into a valid CP trace-non-increasing
// query Q = (σ + λ1)/s; linearity licenses undoing the correction, with
// σ = s·Q − (λ d_O)·Dep written against the depolarizing channel. The
// process matrix is then assembled from the dual (Gram-inverse) basis.
inline ReconstructionResult reconstruct_process_full(
    const FrameOracle& oracle, const ReconstructOptions& options = {}) {
  const std::size_t n_regions = oracle.regions.size();
  if (n_regions == 0)
    throw PreconditionError("reconstruct_process: oracle has no regions");

  AxiomReport axioms =
      axiom_check(oracle, options.axiom_trials, derive_seed(options.seed, 1),
                  options.precondition_tol);
  if (!axioms.passed)
    throw PreconditionError(
        "reconstruct_process: oracle fails the frame-function axioms "
        "(normalization defect " +
        std::to_string(axioms.max_normalization_defect) + ", range violation " +
        std::to_string(axioms.max_range_violation) + ")");
  LinearityReport linearity =
      linearity_check(oracle, options.linearity_trials,
                      derive_seed(options.seed, 2), options.precondition_tol);
  if (!linearity.passed)
    throw PreconditionError(
        "reconstruct_process: oracle is not convex-multilinear (additivity "
        "defect " +
        std::to_string(linearity.max_additivity_defect) +
        ", homogeneity defect " +
        std::to_string(linearity.max_homogeneity_defect) + ")");

  if (!options.spanning_sets.empty() &&
      options.spanning_sets.size() != n_regions)
    throw ReconstructionError(
        "reconstruct_process: spanning sets provided for " +
        std::to_string(options.spanning_sets.size()) + " of " +
        std::to_string(n_regions) + " regions");

  struct RegionBasis {
    std::vector<ComplexMatrix> span;     // σ_a
    std::vector<ComplexMatrix> dual;     // tr(σ_a dual_b) = δ_{ab}
    std::vector<ComplexMatrix> queries;  // Q_a, plus Dep at the back
    std::vector<double> shift;           // λ_a
    std::vector<double> scale;           // s_a
  };
  std::vector<RegionBasis> bases(n_regions);

  for (std::size_t x = 0; x < n_regions; ++x) {
    const Region& region = oracle.regions[x];
    const Index dim = region.choi_dim();
    const std::size_t n_span = static_cast<std::size_t>(dim * dim);
    RegionBasis& rb = bases[x];
    rb.span = options.spanning_sets.empty() ? hs_basis(dim).elements
                                            : options.spanning_sets[x];
    if (rb.span.size() != n_span)
      throw ReconstructionError("reconstruct_process: region '" + region.label +
                                "' needs " + std::to_string(n_span) +
                                " spanning elements, got " +
                                std::to_string(rb.span.size()));
    for (const ComplexMatrix& sigma : rb.span) {
      if (sigma.rows() != dim || sigma.cols() != dim)
        throw ReconstructionError(
            "reconstruct_process: spanning element has wrong dimension");
      if (hermiticity_defect(sigma) > options.precondition_tol)
        throw ReconstructionError(
            "reconstruct_process: spanning elements must be Hermitian");
    }

    Eigen::MatrixXd gram(n_span, n_span);
    for (std::size_t a = 0; a < n_span; ++a)
      for (std::size_t b = 0; b < n_span; ++b)
        gram(static_cast<Index>(a), static_cast<Index>(b)) =
            trace_product(rb.span[a], rb.span[b]).real();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (lu.rank() < static_cast<Index>(n_span))
      throw ReconstructionError("reconstruct_process: spanning set for region '" +
                                region.label + "' is deficient (rank " +
                                std::to_string(lu.rank()) + " of " +
                                std::to_string(n_span) + ")");
    const Eigen::MatrixXd gram_inv = lu.inverse();
    rb.dual.reserve(n_span);
    for (std::size_t a = 0; a < n_span; ++a) {
      ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
      for (std::size_t b = 0; b < n_span; ++b)
        d += gram_inv(static_cast<Index>(a), static_cast<Index>(b)) * rb.span[b];
      rb.dual.push_back(std::move(d));
    }

    rb.queries.reserve(n_span + 1);
    for (const ComplexMatrix& sigma : rb.span) {
      const double lambda = std::max(0.0, -min_eigenvalue(sigma));
      ComplexMatrix shifted =
          sigma + lambda * ComplexMatrix::Identity(dim, dim);
      const ComplexMatrix kraus_sum =
          partial_trace(shifted, {region.d_in, region.d_out}, {0});
      const double s = std::max(1.0, max_eigenvalue(kraus_sum));
      rb.shift.push_back(lambda);
      rb.scale.push_back(s);
      rb.queries.push_back(ComplexMatrix(shifted / s));
    }
    rb.queries.push_back(depolarizing_choi(region));
  }

  // Evaluate the oracle on the full grid of query tuples (each slot one of
  // the Q_a or the depolarizing completion).
  std::vector<std::size_t> grid_sizes(n_regions), grid_strides(n_regions);
  std::size_t grid_total = 1;
  for (std::size_t x = n_regions; x-- > 0;) {
    grid_sizes[x] = bases[x].queries.size();
    grid_strides[x] = grid_total;
    grid_total *= grid_sizes[x];
  }
  std::vector<double> grid(grid_total);
  {
    std::vector<std::size_t> idx(n_regions, 0);
    for (std::size_t flat = 0; flat < grid_total; ++flat) {
      std::vector<QuantumMap> maps;
      maps.reserve(n_regions);
      for (std::size_t x = 0; x < n_regions; ++x)
        maps.emplace_back(oracle.regions[x], bases[x].queries[idx[x]]);
      grid[flat] = oracle.evaluate(maps);
      for (std::size_t x = n_regions; x-- > 0;) {
        if (++idx[x] < grid_sizes[x]) break;
        idx[x] = 0;
      }
    }
  }

  // f(σ_{a_1} ⊗ σ_{a_2} ⊗ ...) by expanding each slot over its affine
  // correction: σ = s·Q − (λ d_O)·Dep.
  auto frame_on_span = [&](const std::vector<std::size_t>& tuple) {
    double total = 0.0;
    const std::size_t n_terms = std::size_t{1} << n_regions;
    for (std::size_t bits = 0; bits < n_terms; ++bits) {
      double coeff = 1.0;
      std::size_t flat = 0;
      for (std::size_t x = 0; x < n_regions; ++x) {
        const bool use_dep = (bits >> x) & 1u;
        const std::size_t a = tuple[x];
        if (use_dep) {
          coeff *= -bases[x].shift[a] *
                   static_cast<double>(oracle.regions[x].d_out);
          flat += (grid_sizes[x] - 1) * grid_strides[x];
        } else {
          coeff *= bases[x].scale[a];
          flat += a * grid_strides[x];
        }
      }
      if (coeff != 0.0) total += coeff * grid[flat];
    }
    return total;
  };

  Index w_dim = 1;
  for (const Region& r : oracle.regions) w_dim *= r.choi_dim();
  ComplexMatrix w = ComplexMatrix::Zero(w_dim, w_dim);
  {
    std::vector<std::size_t> tuple(n_regions, 0);
    while (true) {
      std::vector<ComplexMatrix> duals;
      duals.reserve(n_regions);
      for (std::size_t x = 0; x < n_regions; ++x)
        duals.push_back(bases[x].dual[tuple[x]]);
      w += frame_on_span(tuple) * kron_all(duals);

      std::size_t x = n_regions;
      bool done = true;
      while (x-- > 0) {
        if (++tuple[x] < bases[x].span.size()) {
          done = false;
          break;
        }
        tuple[x] = 0;
      }
      if (done) break;
    }
  }

  ReconstructionResult result{ProcessMatrix(oracle.regions, std::move(w)), 0.0,
                              std::move(axioms), std::move(linearity)};

  // Held-out validation on random physical tuples the fit never saw.
  Rng rng(derive_seed(options.seed, 3));
  for (int t = 0; t < options.holdout_trials; ++t) {
    std::vector<QuantumMap> maps;
    maps.reserve(n_regions);
    for (const Region& r : oracle.regions) {
      const Instrument instrument =
          random_instrument(r, 1 + uniform_index(rng, 3), rng);
      maps.push_back(
          instrument.elements()[uniform_index(rng, instrument.size())]);
    }
    const double via_oracle = oracle.evaluate(maps);
    const double via_process = joint_prob(result.process, maps);
    result.holdout_defect =
        std::max(result.holdout_defect, std::abs(via_oracle - via_process));
  }
  if (result.holdout_defect > options.holdout_tol)
    throw ReconstructionError(
        "reconstruct_process: held-out validation failed (defect " +
        std::to_string(result.holdout_defect) + " > " +
        std::to_string(options.holdout_tol) + ")");
  return result;
}

inline ProcessMatrix reconstruct_process(const FrameOracle& oracle,
                                         const ReconstructOptions& options = {}) {
  return reconstruct_process_full(oracle, options).process;
}

}  // namespace qproc
