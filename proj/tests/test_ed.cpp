#include <cmath>

#include "doctest.h"
#include "qpd/ed.hpp"
#include "qpd/errors.hpp"
#include "test_helpers.hpp"

using namespace qpd;

TEST_SUITE_BEGIN("ed");

TEST_CASE("small fixtures") {
  const PauliSum h1 = build_hamiltonian(make_chain(1), {0.0, 1.0, 0.0});
  const Spectrum s1 = low_energy_spectrum(h1, 2);
  CHECK(s1.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s1.eigenvalues[1] == doctest::Approx(1.0));

  const PauliSum h2 = build_hamiltonian(make_chain(2), {1.0, 1.0, 0.0});
  const Spectrum s2 = low_energy_spectrum(h2, 4);
  CHECK(s2.eigenvalues[0] == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("eigenpair residuals stay small") {
  const PauliSum h = build_hamiltonian(make_chain(6), {0.9, 1.0, 0.2});
  double scale = 0;
  for (const auto& t : h.terms) scale += std::abs(t.coefficient);
  const Spectrum spec = low_energy_spectrum(h, 8);
  for (int i = 0; i < spec.count(); ++i) {
    StateVector hv = apply_pauli_sum(spec.eigenvectors[i], h);
    for (std::size_t j = 0; j < hv.dim(); ++j)
      hv.amp[j] -= spec.eigenvalues[i] * spec.eigenvectors[i].amp[j];
    CHECK(norm(spec.eigenvectors[i]) == doctest::Approx(1.0));
    CHECK(norm(hv) < 1e-9 * scale);
  }
}

TEST_CASE("dense and Krylov paths agree") {
  const PauliSum h = build_hamiltonian(make_chain(10), {1.0, 1.0, 0.3});
  const int count = 12;
  EdOptions dense;
  dense.dense_max_sites = 12;
  EdOptions krylov;
  krylov.dense_max_sites = 4;  // force the iterative path
  const Spectrum sd = low_energy_spectrum(h, count, dense);
  const Spectrum sk = low_energy_spectrum(h, count, krylov);
  for (int i = 0; i < count; ++i)
    CHECK(std::abs(sd.eigenvalues[i] - sk.eigenvalues[i]) < 1e-9);
}

TEST_CASE("ground and 1QP states carry opposite Z parity when h_l = 0") {
  const ClusterGraph g = make_chain(4);
  const PauliSum h = build_hamiltonian(g, {0.6, 1.0, 0.0});
  const Spectrum spec = low_energy_spectrum(h, default_state_request(4));
  const Selected1QP sel = select_1qp_subspace(spec, unperturbed_states(g));
  PauliSum parity{4, {parity_operator(4)}};
  CHECK(expectation_and_square(sel.gs, parity).energy == doctest::Approx(1.0));
  for (const StateVector& q : sel.one_qp)
    CHECK(expectation_and_square(q, parity).energy == doctest::Approx(-1.0));
}

TEST_CASE("selection at J = 0 returns the unperturbed flips") {
  const ClusterGraph g = make_chain(3);
  const PauliSum h = build_hamiltonian(g, {0.0, 1.0, 0.0});
  const Spectrum spec = low_energy_spectrum(h, 8);
  const Selected1QP sel = select_1qp_subspace(spec, unperturbed_states(g));
  CHECK(sel.gs_energy == doctest::Approx(-3.0));
  for (double w : sel.weights) CHECK(w == doctest::Approx(1.0));
  for (double e : sel.one_qp_energies) CHECK(e == doctest::Approx(-1.0));
  CHECK(!sel.weak_overlap_warning);
}

TEST_CASE("selection weights on dressed chains") {
  const ClusterGraph g = make_chain(4);
  {
    const PauliSum h = build_hamiltonian(g, {0.5, 1.0, 0.0});
    const Selected1QP sel =
        select_1qp_subspace(low_energy_spectrum(h, default_state_request(4)), unperturbed_states(g));
    for (double w : sel.weights) CHECK(w > 0.9);
  }
  {
    const PauliSum h = build_hamiltonian(g, {0.5, 1.0, 0.5});
    const Selected1QP sel =
        select_1qp_subspace(low_energy_spectrum(h, default_state_request(4)), unperturbed_states(g));
    for (double w : sel.weights) CHECK(w > 0.3);
  }
}

TEST_CASE("ties for the last slot raise an error") {
  // Hand-built spectrum: two degenerate-weight candidates compete for the
  // single 1QP slot of a one-site cluster... use two sites with one slot taken
  // and candidates sharing the remaining weight equally.
  const ClusterGraph g = make_chain(1);
  const UnperturbedBasis basis = unperturbed_states(g);
  Spectrum fake;
  fake.eigenvalues = {-1.0, 0.2, 0.3};
  fake.eigenvectors.push_back(basis_state(1, "0"));
  StateVector a = basis_state(1, "0");
  a.amp[0] = std::sqrt(0.5);
  a.amp[1] = std::sqrt(0.5);
  StateVector b = basis_state(1, "0");
  b.amp[0] = std::sqrt(0.5);
  b.amp[1] = -std::sqrt(0.5);
  fake.eigenvectors.push_back(a);
  fake.eigenvectors.push_back(b);
  CHECK_THROWS_AS(select_1qp_subspace(fake, basis), AdiabaticAmbiguity);
}

TEST_CASE("continuation tracks the adiabatic manifold across crossings") {
  // On a disconnected union the product structure is exact, so continuation
  // must reproduce the direct sum of the solo solves.
  const ModelParams lf{0.5, 1.0, 0.5};
  const ClusterGraph a = make_chain(2), b = make_chain(3);
  const Selected1QP sa = select_1qp_with_continuation(a, lf);
  const Selected1QP sb = select_1qp_with_continuation(b, lf);
  const ClusterGraph ab = disconnected_union(a, b);
  const Selected1QP sab = select_1qp_with_continuation(ab, lf);
  CHECK(sab.gs_energy == doctest::Approx(sa.gs_energy + sb.gs_energy).epsilon(1e-10));
  REQUIRE(sab.one_qp_energies.size() == 5);
  std::vector<double> expect;
  for (double e : sa.one_qp_energies) expect.push_back(e + sb.gs_energy);
  for (double e : sb.one_qp_energies) expect.push_back(e + sa.gs_energy);
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 5; ++i)
    CHECK(sab.one_qp_energies[i] == doctest::Approx(expect[i]).epsilon(1e-10));
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("ed");

TEST_CASE("an exhausted cycle budget is an error") {
  const PauliSum h = build_hamiltonian(make_chain(6), {0.8, 1.0, 0.2});
  EdOptions opts;
  opts.dense_max_sites = 4;  // force the Krylov path
  opts.max_cycles = 0;
  CHECK_THROWS_AS(low_energy_spectrum(h, 4, opts), NonConvergence);
}

TEST_SUITE_END();
