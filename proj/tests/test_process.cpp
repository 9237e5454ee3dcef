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

#include <catch2/catch_amalgamated.hpp>

#include "qproc/process.hpp"

#include "test_helpers.hpp"

using namespace qproc;

namespace {

QuantumMap projector_event(Index k, const std::string& label = "A") {
  return QuantumMap(Region{label, 2, 2},
                    std::vector<ComplexMatrix>{basis_projector(2, k)});
}

}  // namespace

TEST_CASE("state_process reproduces the Born rule on one effect", "[process]") {
  const ProcessMatrix w = state_process(basis_projector(2, 0));
  const double p = joint_prob(w, {effect_map(basis_projector(2, 0))});
  CHECK(std::abs(p - 1.0) < 1e-14);
}

TEST_CASE("joint_prob: effect |+><+| on |0><0| gives 1/2", "[process]") {
  const ProcessMatrix w = state_process(basis_projector(2, 0));
  const double p = joint_prob(w, {effect_map(plus_projector())});
  CHECK(std::abs(p - 0.5) < 1e-14);
}

TEST_CASE("joint_prob: Z then X on the identity-channel process", "[process]") {
  // P(z = 0) · P(x = + | state |0⟩) = 1 · 1/2, straight from the
  // sequential Born-plus-update computation.
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  const double p =
      joint_prob(w, {projector_event(0), effect_map(plus_projector(), "B")});
  CHECK(std::abs(p - 0.5) < 1e-12);
}

TEST_CASE("joint_prob vanishes when any map is the zero map", "[process]") {
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  const QuantumMap zero(Region{"A", 2, 2}, std::vector<ComplexMatrix>{});
  const double p = joint_prob(w, {zero, effect_map(plus_projector(), "B")});
  CHECK(p == 0.0);
}

TEST_CASE("joint_prob rejects region mismatches and invalid maps",
          "[process]") {
  const ProcessMatrix w = state_process(basis_projector(2, 0));
  CHECK_THROWS_AS(joint_prob(w, {projector_event(0)}), CompositionError);
  CHECK_THROWS_AS(
      joint_prob(w, {effect_map(basis_projector(2, 0)),
                     effect_map(basis_projector(2, 0), "B")}),
      CompositionError);
  // Trace-increasing "effect" 2·1.
  CHECK_THROWS_AS(
      joint_prob(w, {QuantumMap(Region{"A", 2, 1},
                                ComplexMatrix(2.0 *
                                              ComplexMatrix::Identity(2, 2)))}),
      ValidityError);
}

TEST_CASE("prob_table: sequential Z then X measurement", "[process]") {
  const ComplexMatrix rho = 0.5 * ComplexMatrix::Identity(2, 2);
  const ProcessMatrix w = identity_channel_process(rho);
  const Scenario scenario({z_instrument("A"), x_povm_instrument("B")}, w);
  const OutcomeDistribution table = prob_table(scenario);

  // Sequential oracle: P(k, ±) = tr(P_k ρ P_k) · tr(E_± · P_kρP_k / tr).
  for (Index k : {0, 1}) {
    const ComplexMatrix post = basis_projector(2, k) * rho *
                               basis_projector(2, k);
    const double pk = post.trace().real();
    const double p_plus = born_value(plus_projector(), post / pk);
    CHECK(std::abs(table.at({std::to_string(k), "+"}) - pk * p_plus) < 1e-12);
    CHECK(std::abs(table.at({std::to_string(k), "-"}) - pk * (1 - p_plus)) <
          1e-12);
  }
  CHECK(std::abs(table.total() - 1.0) < 1e-12);
}

TEST_CASE("prob_table: deterministic instruments give a unit entry",
          "[process]") {
  Rng rng(31);
  const ComplexMatrix rho = random_density(2, rng);
  const ProcessMatrix w = identity_channel_process(rho);
  const Instrument id_instrument(
      std::vector<QuantumMap>{QuantumMap(
          Region{"A", 2, 2},
          std::vector<ComplexMatrix>{ComplexMatrix::Identity(2, 2)})},
      {"go"});
  const Instrument discard(
      std::vector<QuantumMap>{effect_map(ComplexMatrix::Identity(2, 2), "B")},
      {"done"});
  const OutcomeDistribution table =
      prob_table(Scenario({id_instrument, discard}, w));
  REQUIRE(table.probs.size() == 1);
  CHECK(std::abs(table.at({"go", "done"}) - 1.0) < 1e-12);
}

TEST_CASE("prob_table: spacelike product process factorizes", "[process]") {
  Rng rng(32);
  const ComplexMatrix rho_a = random_density(2, rng);
  const ComplexMatrix rho_b = random_density(3, rng);
  const ProcessMatrix w = spacelike_process(kron(rho_a, rho_b), 2, 3);

  const Instrument povm_a = z_povm_instrument("A");
  const Instrument povm_b = povm_to_instrument(
      Povm{{basis_projector(3, 0), basis_projector(3, 1), basis_projector(3, 2)},
           {"0", "1", "2"}},
      "B");
  const OutcomeDistribution table = prob_table(Scenario({povm_a, povm_b}, w));
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) {
      const double expected = born_value(basis_projector(2, i), rho_a) *
                              born_value(basis_projector(3, j), rho_b);
      CHECK(std::abs(table.at({std::to_string(i), std::to_string(j)}) -
                     expected) < 1e-12);
    }
}

TEST_CASE("validate_process passes for every constructor", "[process]") {
  Rng rng(33);
  const ComplexMatrix rho2 = random_density(2, rng);
  for (const ProcessMatrix& w :
       {state_process(rho2), identity_channel_process(rho2),
        identity_channel_process(random_density(3, rng), 3),
        spacelike_process(kron(rho2, random_density(2, rng)), 2, 2),
        sequential_identity_process(
            rho2, {Region{"A", 2, 2}, Region{"B", 2, 2}, Region{"C", 2, 1}})}) {
    const ProcessReport report = validate_process(w, 50, 1234);
    INFO("psd " << report.psd_margin << " norm "
                << report.max_normalization_defect << " trace "
                << report.trace_defect);
    CHECK(report.passed);
  }
}

TEST_CASE("validate_process: zero matrix fails normalization with defect 1",
          "[process]") {
  const ProcessMatrix w({Region{"A", 2, 1}}, ComplexMatrix::Zero(2, 2));
  const ProcessReport report = validate_process(w, 20, 55);
  CHECK(report.psd_ok);
  CHECK_FALSE(report.normalization_ok);
  CHECK(std::abs(report.max_normalization_defect - 1.0) < 1e-12);
  CHECK_FALSE(report.passed);
}

TEST_CASE("validate_process: doubled process keeps PSD, breaks normalization",
          "[process]") {
  Rng rng(34);
  const ProcessMatrix w = identity_channel_process(random_density(2, rng));
  const ProcessMatrix doubled(w.regions(), ComplexMatrix(2.0 * w.matrix()));
  const ProcessReport report = validate_process(doubled, 20, 56);
  CHECK(report.psd_ok);
  CHECK_FALSE(report.normalization_ok);
  CHECK(std::abs(report.max_normalization_defect - 1.0) < 1e-12);
}

TEST_CASE("identity_channel_process trace identity", "[process]") {
  const ProcessMatrix w =
      identity_channel_process(0.5 * ComplexMatrix::Identity(2, 2));
  CHECK(std::abs(w.matrix().trace() - Complex(2.0)) < 1e-14);
  CHECK(w.output_dim_product() == 2);
}

TEST_CASE("constructors reject invalid density matrices", "[process]") {
  CHECK_THROWS_AS(state_process(ComplexMatrix::Identity(2, 2)), ValidityError);
  ComplexMatrix negative = basis_projector(2, 0);
  negative(1, 1) = -0.1;
  negative(0, 0) = 1.1;
  CHECK_THROWS_AS(identity_channel_process(negative), ValidityError);
}

TEST_CASE("conditional_prob: Z outcome 0 then X outcome +", "[process]") {
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  const Instrument za = z_instrument("A");
  const double p = conditional_prob(w, "A", za.elements()[0], za,
                                    effect_map(plus_projector(), "B"));
  CHECK(std::abs(p - 0.5) < 1e-12);
}

TEST_CASE("conditional_prob on a deterministic event is the marginal",
          "[process]") {
  Rng rng(35);
  const ComplexMatrix rho = random_density(2, rng);
  const ProcessMatrix w = identity_channel_process(rho);
  const QuantumMap id_channel(
      Region{"A", 2, 2},
      std::vector<ComplexMatrix>{ComplexMatrix::Identity(2, 2)});
  const Instrument deterministic(std::vector<QuantumMap>{id_channel});
  const QuantumMap query = effect_map(plus_projector(), "B");
  const double conditioned =
      conditional_prob(w, "A", id_channel, deterministic, query);
  const double marginal = born_value(plus_projector(), rho);
  CHECK(std::abs(conditioned - marginal) < 1e-12);
}

TEST_CASE("conditional_prob rejects zero-probability conditioning",
          "[process]") {
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  const Instrument za = z_instrument("A");
  CHECK_THROWS_AS(conditional_prob(w, "A", za.elements()[1], za,
                                   effect_map(plus_projector(), "B")),
                  UndefinedConditionalError);
}

TEST_CASE("conditional_prob rejects events outside their instrument",
          "[process]") {
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  const Instrument za = z_instrument("A");
  const QuantumMap foreign(Region{"A", 2, 2},
                           std::vector<ComplexMatrix>{plus_projector()});
  CHECK_THROWS_AS(conditional_prob(w, "A", foreign, za,
                                   effect_map(plus_projector(), "B")),
                  UndefinedConditionalError);
}

TEST_CASE("update_process recovers the collapse rule", "[process]") {
  Rng rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix rho = random_density(2, rng);
    const ProcessMatrix w = identity_channel_process(rho);
    const Instrument instrument =
        random_instrument(Region{"A", 2, 2}, 2 + trial % 2, rng);
    const QuantumMap& event = instrument.elements()[0];

    const ComplexMatrix post = event.apply(rho);
    if (post.trace().real() < 1e-6) continue;  // vanishing-probability branch
    const ComplexMatrix collapsed = post / post.trace().real();

    const ProcessMatrix updated = update_process(w, "A", event);
    REQUIRE(updated.regions().size() == 1);
    CHECK(updated.regions()[0].label == "B");
    // ρ̃ ⊗ 1 on B's wires, with B's trivial output wire: just ρ̃.
    CHECK(max_abs_diff(updated.matrix(), collapsed) < 1e-10);
  }
}

TEST_CASE("update_process with the identity channel leaves the state",
          "[process]") {
  Rng rng(37);
  const ComplexMatrix rho = random_density(2, rng);
  const ProcessMatrix w = identity_channel_process(rho, 2);
  const QuantumMap id_channel(
      Region{"A", 2, 2},
      std::vector<ComplexMatrix>{ComplexMatrix::Identity(2, 2)});
  const ProcessMatrix updated = update_process(w, "A", id_channel);
  // ρ^{B_I} ⊗ 1^{B_O} with a nontrivial output wire this time.
  CHECK(max_abs_diff(updated.matrix(),
                     kron(rho, ComplexMatrix::Identity(2, 2))) < 1e-12);
  CHECK(validate_process(updated, 50, 77).passed);
}

TEST_CASE("update_process: Z projector on the maximally mixed state",
          "[process]") {
  const ProcessMatrix w =
      identity_channel_process(0.5 * ComplexMatrix::Identity(2, 2));
  const ProcessMatrix updated =
      update_process(w, "A", projector_event(0, "A"));
  CHECK(max_abs_diff(updated.matrix(), basis_projector(2, 0)) < 1e-12);
}

TEST_CASE("update_process rejects zero-probability events", "[process]") {
  const ProcessMatrix w = identity_channel_process(basis_projector(2, 0));
  CHECK_THROWS_AS(update_process(w, "A", projector_event(1, "A")),
                  UndefinedConditionalError);
}

TEST_CASE("update_process needs at least two regions", "[process]") {
  const ProcessMatrix w = state_process(basis_projector(2, 0));
  CHECK_THROWS_AS(
      update_process(w, "A", effect_map(basis_projector(2, 0), "A")),
      CompositionError);
}

TEST_CASE("updated processes validate, including three-region chains",
          "[process]") {
  Rng rng(38);
  const ComplexMatrix rho = random_density(2, rng);
  const ProcessMatrix w = sequential_identity_process(
      rho, {Region{"A", 2, 2}, Region{"B", 2, 2}, Region{"C", 2, 1}});
  const Instrument instrument = random_instrument(Region{"A", 2, 2}, 2, rng);
  const ProcessMatrix updated =
      update_process(w, "A", instrument.elements()[0]);
  REQUIRE(updated.regions().size() == 2);
  CHECK(validate_process(updated, 100, 99).passed);

  // Iterated conditioning agrees with the sequential oracle.
  const ComplexMatrix post = instrument.elements()[0].apply(rho);
  const ComplexMatrix collapsed = post / post.trace().real();
  const ProcessMatrix expected = sequential_identity_process(
      collapsed, {Region{"B", 2, 2}, Region{"C", 2, 1}});
  CHECK(max_abs_diff(updated.matrix(), expected.matrix()) < 1e-10);
}

TEST_CASE("iterated conditioning matches the sequential oracle", "[process]") {
  Rng rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix rho = random_density(2, rng);
    const ProcessMatrix w = sequential_identity_process(
        rho, {Region{"A", 2, 2}, Region{"B", 2, 2}, Region{"C", 2, 1}});
    const Instrument ia = random_instrument(Region{"A", 2, 2}, 2, rng);
    const Instrument ib = random_instrument(Region{"B", 2, 2}, 2, rng);
    const QuantumMap& event_a = ia.elements()[0];
    const QuantumMap& event_b = ib.elements()[1];

    ComplexMatrix state = event_a.apply(rho);
    if (state.trace().real() < 1e-3) continue;
    state /= state.trace().real();
    ComplexMatrix next = event_b.apply(state);
    if (next.trace().real() < 1e-3) continue;
    next /= next.trace().real();

    const ProcessMatrix once = update_process(w, "A", event_a);
    const ProcessMatrix twice = update_process(once, "B", event_b);
    REQUIRE(twice.regions().size() == 1);
    CHECK(max_abs_diff(twice.matrix(), next) < 1e-10);
  }
}

TEST_CASE("joint_prob is convex-multilinear", "[process]") {
  Rng rng(39);
  for (int trial = 0; trial < 30; ++trial) {
    const ComplexMatrix rho = random_density(2, rng);
    const ProcessMatrix w = identity_channel_process(rho, 2);
    const Region ra{"A", 2, 2}, rb{"B", 2, 2};
    const std::size_t focus = trial % 2;
    const QuantumMap other = random_cptp(focus == 0 ? rb : ra, rng);
    const Instrument instrument =
        random_instrument(focus == 0 ? ra : rb, 2, rng);
    const QuantumMap& m1 = instrument.elements()[0];
    const QuantumMap& m2 = instrument.elements()[1];
    const double p = uniform_double(rng);

    const QuantumMap mixed(
        m1.region(),
        ComplexMatrix(p * m1.choi() + (1.0 - p) * m2.choi()));
    auto probe = [&](const QuantumMap& m) {
      std::vector<QuantumMap> maps;
      if (focus == 0) {
        maps = {m, other};
      } else {
        maps = {other, m};
      }
      return joint_prob(w, maps);
    };
    CHECK(std::abs(probe(mixed) -
                   (p * probe(m1) + (1.0 - p) * probe(m2))) < 1e-10);
  }
}

TEST_CASE("joint_prob ignores the instrument context of a map", "[process]") {
  // The same projector embedded in two different instruments: the
  // deliberately non-contextual API cannot see the difference, which this
  // pins down as a regression guard.
  const ProcessMatrix w =
      identity_channel_process(0.5 * ComplexMatrix::Identity(2, 2));
  const QuantumMap shared = projector_event(0, "A");

  const Instrument context1(
      std::vector<QuantumMap>{shared, projector_event(1, "A")});
  const QuantumMap half_0(
      Region{"A", 2, 2},
      ComplexMatrix(0.5 * projector_event(1, "A").choi()));
  const Instrument context2(std::vector<QuantumMap>{shared, half_0, half_0});
  REQUIRE(validate_instrument(context1).passed);
  REQUIRE(validate_instrument(context2).passed);

  const QuantumMap query = effect_map(plus_projector(), "B");
  const double p1 = joint_prob(w, {context1.elements()[0], query});
  const double p2 = joint_prob(w, {context2.elements()[0], query});
  CHECK(p1 == p2);
}

TEST_CASE("prob_table is normalized on random valid scenarios", "[process]") {
  Rng rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = random_density(2, rng);
    const ProcessMatrix w = identity_channel_process(rho, 1 + trial % 3);
    std::vector<Instrument> instruments;
    instruments.push_back(
        random_instrument(w.regions()[0], 1 + trial % 3, rng));
    instruments.push_back(
        random_instrument(w.regions()[1], 1 + (trial + 1) % 4, rng));
    const OutcomeDistribution table =
        prob_table(Scenario(std::move(instruments), w));
    CHECK(std::abs(table.total() - 1.0) < 1e-9);
    for (const auto& [outcome, p] : table.probs) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("Born recovery on random states and POVMs", "[process]") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 3;
    const ComplexMatrix rho = random_density(d, rng);
    const ProcessMatrix w = state_process(rho);
    const Instrument instrument =
        random_instrument(Region{"A", d, 1}, 2 + trial % 3, rng);
    const OutcomeDistribution table = prob_table(Scenario({instrument}, w));
    for (std::size_t k = 0; k < instrument.size(); ++k) {
      // Effects are the Choi matrices of measure-and-discard maps.
      const double expected = born_value(instrument.elements()[k].choi(), rho);
      CHECK(std::abs(table.at({instrument.outcomes()[k]}) - expected) < 1e-10);
    }
  }
}

TEST_CASE("conditional_prob agrees with the updated process route",
          "[process]") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix rho = random_density(2, rng);
    const ProcessMatrix w = identity_channel_process(rho, 1 + trial % 2);
    const Instrument ia = random_instrument(w.regions()[0], 2, rng);
    const Instrument ib = random_instrument(w.regions()[1], 2, rng);
    const QuantumMap& event = ia.elements()[trial % 2];

    std::vector<ComplexMatrix> marginal{event.choi(),
                                        depolarizing_choi(w.regions()[1])};
    if (contract(w, marginal).real() < 1e-3) continue;

    for (const QuantumMap& query : ib.elements()) {
      const double via_op = conditional_prob(w, "A", event, ia, query);
      const double joint = joint_prob(w, {event, query});
      const double marginal_p = contract(w, marginal).real();
      CHECK(std::abs(via_op - joint / marginal_p) < 1e-10);
    }
  }
}

TEST_CASE("update denominator is independent of the completion", "[process]") {
  Rng rng(43);
  const ComplexMatrix rho = random_density(3, rng);
  const ProcessMatrix w = identity_channel_process(rho, 2);
  const Instrument instrument = random_instrument(w.regions()[0], 3, rng);
  const QuantumMap& event = instrument.elements()[1];

  std::vector<double> denominators;
  for (int rep = 0; rep < 10; ++rep) {
    const QuantumMap completion = random_cptp(w.regions()[1], rng);
    denominators.push_back(
        contract(w, {event.choi(), completion.choi()}).real());
  }
  for (double d : denominators)
    CHECK(std::abs(d - denominators.front()) < 1e-10);
}
