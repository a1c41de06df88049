#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qpd/ed.hpp"
#include "qpd/errors.hpp"
#include "qpd/nlce.hpp"
#include "qpd/pcat.hpp"

using namespace qpd;

namespace {

Effective1QP chain_eff(int length, const ModelParams& p) {
  const ClusterGraph g = make_chain(length);
  const PauliSum h = build_hamiltonian(g, p);
  const Spectrum spec = low_energy_spectrum(h, default_state_request(length));
  const Selected1QP sel = select_1qp_subspace(spec, unperturbed_states(g));
  return pcat_effective(sel.gs, sel.one_qp, h, g);
}

Effective1QP diagonal_eff(int lm, int ln, double value) {
  Effective1QP eff;
  const int n = lm * ln;
  eff.matrix = value * Eigen::MatrixXcd::Identity(n, n);
  for (int x = 0; x < lm; ++x)
    for (int y = 0; y < ln; ++y) eff.site_coords.push_back({x, y});
  return eff;
}

}  // namespace

TEST_SUITE_BEGIN("nlce");

TEST_CASE("k-space block fixtures") {
  CHECK(kspace_block(diagonal_eff(4, 1, 2.0), 0.41).real() == doctest::Approx(8.0));

  Effective1QP hop;
  hop.matrix.resize(2, 2);
  const double d = 1.7, t = -0.4;
  hop.matrix << d, t, t, d;
  hop.site_coords = {{0, 0}, {1, 0}};
  for (double k : {0.0, 0.7, 2.2})
    CHECK(kspace_block(hop, k).real() == doctest::Approx(2 * d + 2 * t * std::cos(k)));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = cplx{gauss(rng), gauss(rng)};
  Effective1QP rnd;
  rnd.matrix = a + a.adjoint();
  rnd.site_coords = {{0, 0}, {1, 0}, {2, 0}};
  CHECK(kspace_block(rnd, 0.0).real() == doctest::Approx(rnd.matrix.sum().real()));
  // Hermitian input keeps the block real
  CHECK(std::abs(kspace_block(rnd, 1.3).imag()) < 1e-12);
}

TEST_CASE("unperturbed chain gives the flat band") {
  const ModelParams p0{0.0, 1.0, 0.0};
  const DispersionCurve curve =
      reduced_dispersion_chain(chain_eff(4, p0), chain_eff(3, p0), uniform_grid_1d(51));
  for (double w : curve.omega) CHECK(w == doctest::Approx(2.0));
}

TEST_CASE("chain telescoping identity") {
  const ModelParams p{0.9, 1.0, 0.25};
  std::map<int, Effective1QP> by_length;
  for (int l = 1; l <= 6; ++l) by_length[l] = chain_eff(l, p);
  const std::vector<double> grid = uniform_grid_1d(41);
  const DispersionCurve full = reduced_dispersion_chain_full(by_length, grid);
  const DispersionCurve two = reduced_dispersion_chain(by_length.at(6), by_length.at(5), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(full.omega[i] - two.omega[i]) < 1e-12);
}

TEST_CASE("dispersion is symmetric under k -> -k") {
  const ModelParams p{1.0, 1.0, 0.0};
  const DispersionCurve curve =
      reduced_dispersion_chain(chain_eff(6, p), chain_eff(5, p), uniform_grid_1d(81));
  const std::size_t n = curve.omega.size();
  for (std::size_t i = 0; i < n; ++i)
    CHECK(curve.omega[i] == doctest::Approx(curve.omega[n - 1 - i]).epsilon(1e-9));
}

TEST_CASE("interior reduced contributions vanish for uniform diagonal input") {
  // nine-term stencil on c*I effective Hamiltonians: identically zero once
  // both extents reach 3
  const double c = 1.37;
  const auto block = [&](int lm, int ln, double kx, double ky) {
    return lm < 1 || ln < 1 ? 0.0 : kspace_block(diagonal_eff(lm, ln, c), kx, ky).real();
  };
  const double stencil[3] = {1, -2, 1};
  for (int lm : {3, 4})
    for (int ln : {3, 4}) {
      double reduced = 0;
      for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t)
          reduced += stencil[s] * stencil[t] * block(lm - s, ln - t, 0.3, -0.9);
      CHECK(std::abs(reduced) < 1e-12);
    }
}

TEST_CASE("square flat band at J = 0 for any order") {
  const double c = 2.0;  // unperturbed gap
  for (int n_max : {2, 4, 6}) {
    ExtentMap effs;
    for (int lm = 1; lm <= n_max; ++lm)
      for (int ln = 1; lm * ln <= n_max; ++ln) effs[{lm, ln}] = diagonal_eff(lm, ln, c);
    const DispersionCurve curve = reduced_dispersion_square(effs, path_grid_2d(9), n_max);
    for (double w : curve.omega) CHECK(w == doctest::Approx(2.0));
  }
}

TEST_CASE("missing extents are reported") {
  ExtentMap effs;
  effs[{1, 1}] = diagonal_eff(1, 1, 2.0);
  CHECK_THROWS_AS(reduced_dispersion_square(effs, path_grid_2d(3), 2), MissingCluster);
}

TEST_CASE("momentum grids") {
  const auto grid1 = uniform_grid_1d(201);
  CHECK(grid1.size() == 201);
  CHECK(grid1.front() == doctest::Approx(-std::numbers::pi));
  CHECK(grid1.back() == doctest::Approx(std::numbers::pi));
  CHECK(grid1[100] == doctest::Approx(0.0));

  const auto path = path_grid_2d(67);
  CHECK(path.size() == 3 * 67 - 2);
  CHECK(path.front().kx == doctest::Approx(0.0));
  CHECK(path.back().ky == doctest::Approx(0.0));  // back to Gamma

  const auto grid2 = full_grid_2d(5);
  CHECK(grid2.size() == 25);
}

TEST_CASE("additivity check dimensions") {
  const Effective1QP a = diagonal_eff(2, 1, 1.0), b = diagonal_eff(3, 1, 1.0);
  CHECK_THROWS_AS(additivity_check(a, b, diagonal_eff(4, 1, 1.0)), std::invalid_argument);
  CHECK(additivity_check(a, b, diagonal_eff(5, 1, 1.0)) == doctest::Approx(0.0));
}

TEST_SUITE_END();
