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

#include "qproc/inner.hpp"

#include "test_helpers.hpp"

using namespace qproc;

namespace {

QuantumMap unitary_channel(const ComplexMatrix& u, const std::string& label) {
  return QuantumMap(Region{label, u.rows(), u.rows()},
                    std::vector<ComplexMatrix>{u});
}

}  // namespace

TEST_CASE("inner products of the qubit identity channel equal 4", "[inner]") {
  const QuantumMap id = unitary_channel(ComplexMatrix::Identity(2, 2), "A");
  const Complex via_super = super_inner(id, id, hs_basis(2));
  const Complex via_cj = cj_inner(id, id);
  CHECK(std::abs(via_super - Complex(4.0)) < 1e-12);
  CHECK(std::abs(via_cj - Complex(4.0)) < 1e-12);
}

TEST_CASE("inner product with the zero map vanishes", "[inner]") {
  const Region region{"A", 2, 2};
  const QuantumMap zero(region, std::vector<ComplexMatrix>{});
  const QuantumMap id = unitary_channel(ComplexMatrix::Identity(2, 2), "A");
  CHECK(std::abs(super_inner(zero, id, hs_basis(2))) == 0.0);
  CHECK(std::abs(cj_inner(zero, id)) == 0.0);
  CHECK(std::abs(cj_inner(id, zero)) == 0.0);
}

TEST_CASE("orthogonal unitary channels have vanishing CJ product", "[inner]") {
  const QuantumMap id = unitary_channel(ComplexMatrix::Identity(2, 2), "A");
  const QuantumMap conj_x = unitary_channel(pauli_x(), "A");
  CHECK(std::abs(cj_inner(id, conj_x)) < 1e-14);
}

TEST_CASE("super_inner is basis independent", "[inner]") {
  Rng rng(21);
  const Region region{"A", 3, 2};
  const QuantumMap m = random_cptp(region, rng);
  const QuantumMap n = random_cptp(region, rng);
  const Complex reference = super_inner(m, n, hs_basis(3));
  for (int rep = 0; rep < 5; ++rep) {
    const Complex value = super_inner(m, n, random_hs_basis(3, rng));
    CHECK(std::abs(value - reference) < 1e-10);
  }
}

TEST_CASE("super_inner is conjugate symmetric", "[inner]") {
  Rng rng(22);
  const Region region{"A", 2, 2};
  const QuantumMap m = random_cptp(region, rng);
  const QuantumMap n = random_cptp(region, rng);
  const HermBasis basis = hs_basis(2);
  CHECK(std::abs(super_inner(m, n, basis) -
                 std::conj(super_inner(n, m, basis))) < 1e-12);
}

TEST_CASE("self inner product of a nonzero map is real and positive",
          "[inner]") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Region region{"A", 2 + Index(trial % 3), 1 + Index(trial % 2)};
    const QuantumMap m = random_cptp(region, rng);
    const Complex value = cj_inner(m, m);
    CHECK(std::abs(value.imag()) < 1e-12);
    CHECK(value.real() > 0.0);
  }
}

TEST_CASE("super_inner equals cj_inner on random map pairs", "[inner]") {
  Rng rng(24);
  for (Index d : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Region region{"A", d, (trial % 2 == 0) ? d : Index{1}};
      const QuantumMap m = random_cptp(region, rng);
      QuantumMap n = random_cptp(region, rng);
      n = QuantumMap(region, ComplexMatrix(uniform_double(rng) * n.choi()));
      const HermBasis basis =
          (trial % 3 == 0) ? hs_basis(d) : random_hs_basis(d, rng);
      CHECK(std::abs(super_inner(m, n, basis) - cj_inner(m, n)) < 1e-9);
    }
  }
}

TEST_CASE("cj_inner is sesquilinear", "[inner]") {
  Rng rng(25);
  const Region region{"A", 2, 2};
  const QuantumMap m = random_cptp(region, rng);
  const QuantumMap n1 = random_cptp(region, rng);
  const QuantumMap n2 = random_cptp(region, rng);
  const Complex alpha(0.3, -1.2), beta(-0.7, 0.4);

  const QuantumMap combo(region,
                         ComplexMatrix(alpha * n1.choi() + beta * n2.choi()));
  CHECK(std::abs(cj_inner(m, combo) -
                 (alpha * cj_inner(m, n1) + beta * cj_inner(m, n2))) < 1e-10);
  CHECK(std::abs(cj_inner(combo, m) -
                 (std::conj(alpha) * cj_inner(n1, m) +
                  std::conj(beta) * cj_inner(n2, m))) < 1e-10);
}

TEST_CASE("inner products reject region mismatches", "[inner]") {
  const QuantumMap a = unitary_channel(ComplexMatrix::Identity(2, 2), "A");
  const QuantumMap b = unitary_channel(ComplexMatrix::Identity(2, 2), "B");
  CHECK_THROWS_AS(cj_inner(a, b), ShapeError);
  CHECK_THROWS_AS(super_inner(a, b, hs_basis(2)), ShapeError);
  CHECK_THROWS_AS(super_inner(a, a, hs_basis(3)), ShapeError);
}

TEST_CASE("verify_methods_lemmas passes for d = 2 and d = 3", "[inner]") {
  for (Index d : {2, 3}) {
    const MethodsLemmaReport report = verify_methods_lemmas(d, 50, 77);
    INFO("d = " << d << ", swap " << report.swap_defect << ", completeness "
                << report.completeness_defect << ", inner "
                << report.inner_defect);
    CHECK(report.passed);
    CHECK(report.swap_defect < 1e-10);
    CHECK(report.completeness_defect < 1e-10);
    CHECK(report.inner_defect < 1e-10);
  }
}

TEST_CASE("verify_methods_lemmas is trivial for d = 1", "[inner]") {
  const MethodsLemmaReport report = verify_methods_lemmas(1, 10, 5);
  CHECK(report.passed);
}
