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
#include <limits>
#include <string>
#include <vector>

#include "qproc/process.hpp"

namespace qproc {

// Monte Carlo harness for sequential measurements: sample each step with
// the Born rule, renormalize the post-measurement state, repeat. Entirely
// independent of the process-matrix machinery, so the two routes check
// each other.

struct SampleReport {
  struct Row {
    std::vector<std::string> outcome;
    std::int64_t count = 0;
    double frequency = 0.0;
    double predicted = 0.0;
    double std_error = 0.0;  // sqrt(p̂(1−p̂)/n)
    double z = 0.0;

    friend bool operator==(const Row&, const Row&) = default;
  };
  std::vector<Row> rows;  // lexicographic in outcome indices
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double max_abs_z = 0.0;
  bool any_flagged = false;          // any |z| > 4
  double max_analytic_gap = 0.0;     // compare_with_process only
  double flag_threshold = 4.0;

  friend bool operator==(const SampleReport&, const SampleReport&) = default;
};

namespace detail {

inline void validate_chain(const ComplexMatrix& rho,
                           const std::vector<Instrument>& chain,
                           double tol = kProbClampTol) {
  if (chain.empty())
    throw CompositionError("sampler: instrument chain is empty");
  require_density(rho, "sampler", tol);
  if (rho.rows() != chain.front().region().d_in)
    throw CompositionError("sampler: state dimension " +
                           std::to_string(rho.rows()) +
                           " does not match first instrument input " +
                           std::to_string(chain.front().region().d_in));
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (chain[i].region().d_out != chain[i + 1].region().d_in)
      throw CompositionError(
          "sampler: output of instrument " + std::to_string(i) + " (" +
          std::to_string(chain[i].region().d_out) +
          ") does not chain into input of instrument " + std::to_string(i + 1) +
          " (" + std::to_string(chain[i + 1].region().d_in) + ")");
  for (const Instrument& instrument : chain) {
    const InstrumentReport report = validate_instrument(instrument, tol);
    if (!report.passed)
      throw ValidityError("sampler: instrument at region '" +
                          instrument.region().label +
                          "' is invalid (trace defect " +
                          std::to_string(report.trace_defect) + ")");
  }
}

// Joint outcome probabilities by chaining unnormalized maps: the
// normalizations telescope, so tr of the composite is the joint
// probability.
inline void chain_probabilities(const ComplexMatrix& rho,
                                const std::vector<Instrument>& chain,
                                std::size_t step,
                                std::vector<std::string>& outcome,
                                std::vector<std::vector<std::string>>& outcomes,
                                std::vector<double>& probs) {
  if (step == chain.size()) {
    outcomes.push_back(outcome);
    probs.push_back(rho.trace().real());
    return;
  }
  for (std::size_t k = 0; k < chain[step].size(); ++k) {
    outcome.push_back(chain[step].outcomes()[k]);
    chain_probabilities(chain[step].elements()[k].apply(rho), chain, step + 1,
                        outcome, outcomes, probs);
    outcome.pop_back();
  }
}

}  // namespace detail

// Per-tuple probabilities of the sequential Born-plus-update prediction.
inline OutcomeDistribution sequential_prediction(
    const ComplexMatrix& rho, const std::vector<Instrument>& chain) {
  detail::validate_chain(rho, chain);
  std::vector<std::vector<std::string>> outcomes;
  std::vector<double> probs;
  std::vector<std::string> scratch;
  detail::chain_probabilities(rho, chain, 0, scratch, outcomes, probs);
  OutcomeDistribution dist;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    dist.probs[outcomes[i]] = probs[i];
  return dist;
}

namespace detail {

inline SampleReport run_sampling(const ComplexMatrix& rho,
                                 const std::vector<Instrument>& chain,
                                 std::int64_t n, std::uint64_t seed,
                                 const std::vector<std::vector<std::string>>& outcomes,
                                 const std::vector<double>& predicted) {
  if (n < 1) throw CompositionError("sampler: need at least one sample");

  std::map<std::vector<std::string>, std::size_t> row_of;
  for (std::size_t i = 0; i < outcomes.size(); ++i) row_of[outcomes[i]] = i;
  std::vector<std::int64_t> counts(outcomes.size(), 0);

  // Per-trial derived seeds keep trials independent, so results do not
  // depend on execution order.
  for (std::int64_t trial = 0; trial < n; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    ComplexMatrix state = rho;
    std::vector<std::string> outcome;
    outcome.reserve(chain.size());
    for (const Instrument& instrument : chain) {
      std::vector<double> probs(instrument.size());
      double total = 0.0;
      std::vector<ComplexMatrix> posts(instrument.size());
      for (std::size_t k = 0; k < instrument.size(); ++k) {
        posts[k] = instrument.elements()[k].apply(state);
        probs[k] = std::max(0.0, posts[k].trace().real());
        total += probs[k];
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw ValidityError("sampler: step probabilities sum to " +
                            std::to_string(total));
      const double u = uniform_double(rng) * total;
      double cumulative = 0.0;
      std::size_t picked = instrument.size() - 1;
      for (std::size_t k = 0; k < instrument.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) {
          picked = k;
          break;
        }
      }
      outcome.push_back(instrument.outcomes()[picked]);
      state = posts[picked] / probs[picked];
    }
    ++counts[row_of.at(outcome)];
  }

  SampleReport report;
  report.n = n;
  report.seed = seed;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    SampleReport::Row row;
    row.outcome = outcomes[i];
    row.count = counts[i];
    row.frequency = static_cast<double>(counts[i]) / static_cast<double>(n);
    row.predicted = predicted[i];
    row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) /
                              static_cast<double>(n));
    const double gap = row.frequency - row.predicted;
    if (row.std_error > 0.0) {
      row.z = gap / row.std_error;
    } else {
      row.z = (std::abs(gap) <= 1e-12)
                  ? 0.0
                  : std::numeric_limits<double>::infinity() * (gap < 0 ? -1 : 1);
    }
    report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z));
    report.rows.push_back(std::move(row));
  }
  report.any_flagged = report.max_abs_z > report.flag_threshold;
  return report;
}

}  // namespace detail

// Samples n runs of the chain; the predicted column is the sequential
// Born-plus-update probability.
inline SampleReport simulate_sequence(const ComplexMatrix& rho,
                                      const std::vector<Instrument>& chain,
                                      std::int64_t n, std::uint64_t seed) {
  detail::validate_chain(rho, chain);
  std::vector<std::vector<std::string>> outcomes;
  std::vector<double> predicted;
  std::vector<std::string> scratch;
  detail::chain_probabilities(rho, chain, 0, scratch, outcomes, predicted);
  return detail::run_sampling(rho, chain, n, seed, outcomes, predicted);
}

// Builds the identity-linked process for the chain, predicts with the
// trace rule, cross-checks against the sequential prediction, then
// samples. The report's predicted column comes from the process route.
inline SampleReport compare_with_process(const ComplexMatrix& rho,
                                         const std::vector<Instrument>& chain,
                                         std::int64_t n, std::uint64_t seed) {
  detail::validate_chain(rho, chain);
  std::vector<Region> regions;
  regions.reserve(chain.size());
  for (const Instrument& instrument : chain)
    regions.push_back(instrument.region());
  const ProcessMatrix w = sequential_identity_process(rho, regions);
  const OutcomeDistribution table = prob_table(Scenario(chain, w));

  std::vector<std::vector<std::string>> outcomes;
  std::vector<double> sequential;
  std::vector<std::string> scratch;
  detail::chain_probabilities(rho, chain, 0, scratch, outcomes, sequential);

  std::vector<double> predicted(outcomes.size());
  double max_gap = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    predicted[i] = table.at(outcomes[i]);
    max_gap = std::max(max_gap, std::abs(predicted[i] - sequential[i]));
  }

  SampleReport report =
      detail::run_sampling(rho, chain, n, seed, outcomes, predicted);
  report.max_analytic_gap = max_gap;
  return report;
}

}  // namespace qproc
