#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qpd/errors.hpp"
#include "qpd/statevector.hpp"
#include "test_helpers.hpp"

using namespace qpd;

TEST_SUITE_BEGIN("statevector");

TEST_CASE("pauli products and commutation") {
  const PauliTerm x{1.0, {{0, Axis::X}}};
  const PauliTerm y{1.0, {{0, Axis::Y}}};
  const PauliTerm z{1.0, {{0, Axis::Z}}};
  auto [phase, term] = pauli_product(x, y);
  CHECK(phase == cplx{0, 1});
  REQUIRE(term.factors.size() == 1);
  CHECK(term.factors[0].axis == Axis::Z);
  auto [phase_rev, term_rev] = pauli_product(y, x);
  CHECK(phase_rev == cplx{0, -1});
  auto [phase_sq, term_sq] = pauli_product(z, z);
  CHECK(phase_sq == cplx{1, 0});
  CHECK(term_sq.factors.empty());

  CHECK(!terms_commute(x, z));
  CHECK(terms_commute(x, x));
  const PauliTerm xx{1.0, {{0, Axis::X}, {1, Axis::X}}};
  const PauliTerm zz{1.0, {{0, Axis::Z}, {1, Axis::Z}}};
  CHECK(terms_commute(xx, zz));  // two anticommuting sites
  const PauliTerm z0{1.0, {{0, Axis::Z}}};
  CHECK(!terms_commute(xx, z0));
}

TEST_CASE("basis states and the bit convention") {
  const StateVector one = basis_state(1, "0");
  CHECK(one.amp[0] == cplx{1, 0});
  CHECK(one.amp[1] == cplx{0, 0});

  // "10" flips site 0, so the amplitude sits at index 1.
  const StateVector two = basis_state(2, "10");
  CHECK(two.amp[1] == cplx{1, 0});
  CHECK(norm(two) == doctest::Approx(1.0));

  const StateVector three = basis_state(3, "000");
  CHECK(three.amp[0] == cplx{1, 0});
  for (std::size_t i = 1; i < 8; ++i) CHECK(three.amp[i] == cplx{0, 0});

  CHECK_THROWS_AS(basis_state(2, "101"), std::invalid_argument);
  CHECK_THROWS_AS(basis_state(25, std::string(25, '0')), DimensionOverflow);
}

TEST_CASE("apply_pauli_sum on hand fixtures") {
  PauliSum mz{1, {{-1.0, {{0, Axis::Z}}}}};
  StateVector out = apply_pauli_sum(basis_state(1, "0"), mz);
  CHECK(out.amp[0] == cplx{-1, 0});
  out = apply_pauli_sum(basis_state(1, "1"), mz);
  CHECK(out.amp[1] == cplx{1, 0});

  // two-site TFIM, J = h = 1, applied to |00>: -2|00> - |11>
  PauliSum h{2,
             {{-1.0, {{0, Axis::Z}}},
              {-1.0, {{1, Axis::Z}}},
              {-1.0, {{0, Axis::X}, {1, Axis::X}}}}};
  out = apply_pauli_sum(basis_state(2, "00"), h);
  CHECK(out.amp[0].real() == doctest::Approx(-2.0));
  CHECK(out.amp[3].real() == doctest::Approx(-1.0));
  CHECK(std::abs(out.amp[1]) == doctest::Approx(0.0));
  CHECK(std::abs(out.amp[2]) == doctest::Approx(0.0));
}

TEST_CASE("inner products") {
  CHECK(inner_product(basis_state(3, "000"), basis_state(3, "000")) == cplx{1, 0});
  CHECK(inner_product(basis_state(1, "0"), basis_state(1, "1")) == cplx{0, 0});
  StateVector plus = basis_state(1, "0");
  plus.amp[0] = plus.amp[1] = 1.0 / std::numbers::sqrt2;
  CHECK(inner_product(plus, basis_state(1, "0")).real() ==
        doctest::Approx(1.0 / std::numbers::sqrt2));
}

TEST_CASE("expectation and square") {
  const PauliSum mz{1, {{-1.0, {{0, Axis::Z}}}}};
  EnergyMoments m = expectation_and_square(basis_state(1, "0"), mz);
  CHECK(m.energy == doctest::Approx(-1.0));
  CHECK(m.energy_sq == doctest::Approx(1.0));
  CHECK(m.variance() == doctest::Approx(0.0));

  StateVector plus = basis_state(1, "0");
  plus.amp[0] = plus.amp[1] = 1.0 / std::numbers::sqrt2;
  m = expectation_and_square(plus, mz);
  CHECK(m.energy == doctest::Approx(0.0));
  CHECK(m.energy_sq == doctest::Approx(1.0));

  // N=2 chain, J=0.5: <H> = -2, <H^2> = 4.25 on |00>
  const PauliSum h{2,
                   {{-1.0, {{0, Axis::Z}}},
                    {-1.0, {{1, Axis::Z}}},
                    {-0.5, {{0, Axis::X}, {1, Axis::X}}}}};
  m = expectation_and_square(basis_state(2, "00"), h);
  CHECK(m.energy == doctest::Approx(-2.0));
  CHECK(m.energy_sq == doctest::Approx(4.25));
}

TEST_CASE("exp block fixtures") {
  const double theta = 0.37;
  StateVector s = basis_state(1, "0");
  const ExpTerm z{{1.0, {{0, Axis::Z}}}, theta};
  apply_exp_block(s, std::span{&z, 1});
  CHECK(s.amp[0].real() == doctest::Approx(std::cos(theta)));
  CHECK(s.amp[0].imag() == doctest::Approx(std::sin(theta)));

  s = basis_state(1, "0");
  const ExpTerm x{{1.0, {{0, Axis::X}}}, std::numbers::pi / 2};
  apply_exp_block(s, std::span{&x, 1});
  CHECK(std::abs(s.amp[0]) == doctest::Approx(0.0));
  CHECK(s.amp[1].imag() == doctest::Approx(1.0));

  s = basis_state(2, "00");
  const ExpTerm xx{{1.0, {{0, Axis::X}, {1, Axis::X}}}, theta};
  apply_exp_block(s, std::span{&xx, 1});
  CHECK(s.amp[0].real() == doctest::Approx(std::cos(theta)));
  CHECK(s.amp[3].imag() == doctest::Approx(std::sin(theta)));
  CHECK(norm(s) == doctest::Approx(1.0));
}

TEST_CASE("non-commuting blocks are rejected") {
  std::vector<ExpTerm> bad{{{1.0, {{0, Axis::X}}}, 0.1}, {{1.0, {{0, Axis::Z}}}, 0.2}};
  StateVector s = basis_state(1, "0");
  CHECK_THROWS_AS(apply_exp_block(s, bad), std::invalid_argument);
}

TEST_CASE("matrix-free apply agrees with the dense oracle") {
  for (int n = 2; n <= 6; n += 2) {
    const PauliSum op = oracle::random_pauli_sum(n, 8, 100 + n);
    const StateVector psi = random_state(n, 7 + n);
    const StateVector fast = apply_pauli_sum(psi, op);
    const Eigen::VectorXcd slow = oracle::dense_matrix(op) * oracle::to_eigen(psi);
    CHECK((oracle::to_eigen(fast) - slow).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exp block agrees with the dense exponential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  for (int n : {2, 4, 6}) {
    // an XX-chain block plus a Z block, all commuting within each block
    std::vector<ExpTerm> xx, z;
    for (int i = 0; i + 1 < n; ++i)
      xx.push_back({{1.0, {{i, Axis::X}, {i + 1, Axis::X}}}, angle(rng)});
    for (int i = 0; i < n; ++i) z.push_back({{1.0, {{i, Axis::Z}}}, angle(rng)});
    StateVector s = random_state(n, 23 + n);
    Eigen::VectorXcd ref = oracle::to_eigen(s);
    apply_exp_block(s, xx);
    apply_exp_block(s, z);
    ref = oracle::block_exponential(z, n) * (oracle::block_exponential(xx, n) * ref);
    CHECK((oracle::to_eigen(s) - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(norm(s) - 1.0) < 1e-12);
  }
}

TEST_CASE("variance is never negative") {
  for (int trial = 0; trial < 20; ++trial) {
    const PauliSum op = oracle::random_pauli_sum(4, 6, 555 + trial);
    const StateVector psi = random_state(4, 900 + trial);
    CHECK(expectation_and_square(psi, op).variance() >= -1e-10);
  }
}

TEST_CASE("serial and parallel kernels match") {
  const int n = 7;
  const PauliSum op = oracle::random_pauli_sum(n, 10, 4242);
  const StateVector psi = random_state(n, 17);

  StateVector a, b;
  apply_pauli_sum_into(a, psi, op);
  serial::apply_pauli_sum_into(b, psi, op);
  double diff = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) diff = std::max(diff, std::abs(a.amp[i] - b.amp[i]));
  CHECK(diff < 1e-13);

  CHECK(std::abs(inner_product(psi, a) - serial::inner_product(psi, b)) < 1e-12);

  const EnergyMoments mp = expectation_and_square(psi, op);
  const EnergyMoments ms = serial::expectation_and_square(psi, op);
  CHECK(mp.energy == doctest::Approx(ms.energy).epsilon(1e-12));
  CHECK(mp.energy_sq == doctest::Approx(ms.energy_sq).epsilon(1e-12));

  std::vector<ExpTerm> block;
  for (int i = 0; i + 1 < n; ++i)
    block.push_back({{1.0, {{i, Axis::X}, {i + 1, Axis::X}}}, 0.3 + 0.1 * i});
  StateVector sp = psi, ss = psi;
  apply_exp_block(sp, block);
  serial::apply_exp_block(ss, block);
  diff = 0;
  for (std::size_t i = 0; i < sp.dim(); ++i)
    diff = std::max(diff, std::abs(sp.amp[i] - ss.amp[i]));
  CHECK(diff < 1e-13);
}

TEST_SUITE_END();
