#include "qpd/nlce.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpd/errors.hpp"

namespace qpd {

std::complex<double> kspace_block(const Effective1QP& eff, double kx, double ky) {
  const int n = eff.size();
  if (static_cast<int>(eff.site_coords.size()) != n)
    throw std::invalid_argument("effective Hamiltonian lacks site coordinates");
  std::complex<double> sum{0, 0};
  for (int nu = 0; nu < n; ++nu)
    for (int mu = 0; mu < n; ++mu) {
      const double dx = eff.site_coords[nu].x - eff.site_coords[mu].x;
      const double dy = eff.site_coords[nu].y - eff.site_coords[mu].y;
      sum += eff.matrix(nu, mu) * std::polar(1.0, kx * dx + ky * dy);
    }
  return sum;
}

DispersionCurve reduced_dispersion_chain(const Effective1QP& eff_n, const Effective1QP& eff_nm1,
                                         const std::vector<double>& k_grid) {
  if (eff_n.size() != eff_nm1.size() + 1)
    throw std::invalid_argument("chain expansion needs consecutive cluster sizes");
  DispersionCurve curve;
  curve.kdim = 1;
  curve.order = eff_n.size();
  curve.momenta.reserve(k_grid.size());
  curve.omega.reserve(k_grid.size());
  for (double k : k_grid) {
    const std::complex<double> w = kspace_block(eff_n, k) - kspace_block(eff_nm1, k);
    assert(std::abs(w.imag()) < 1e-9);
    curve.momenta.push_back({k, 0.0});
    curve.omega.push_back(w.real());
  }
  return curve;
}

DispersionCurve reduced_dispersion_chain_full(const std::map<int, Effective1QP>& eff_by_length,
                                              const std::vector<double>& k_grid) {
  if (eff_by_length.empty() || eff_by_length.begin()->first != 1)
    throw MissingCluster("chain expansion needs every length from 1 up");
  const int n_max = eff_by_length.rbegin()->first;
  for (int l = 1; l <= n_max; ++l)
    if (!eff_by_length.count(l))
      throw MissingCluster("missing chain length " + std::to_string(l));

  static constexpr double stencil[3] = {1.0, -2.0, 1.0};
  DispersionCurve curve;
  curve.kdim = 1;
  curve.order = n_max;
  for (double k : k_grid) {
    double omega = 0;
    for (int l = 1; l <= n_max; ++l)
      for (int s = 0; s < 3; ++s) {
        if (l - s < 1) continue;
        omega += stencil[s] * kspace_block(eff_by_length.at(l - s), k).real();
      }
    curve.momenta.push_back({k, 0.0});
    curve.omega.push_back(omega);
  }
  return curve;
}

DispersionCurve reduced_dispersion_square(const ExtentMap& eff_map,
                                          const std::vector<KPoint>& k_grid, int n_max) {
  // Every sub-extent of an included extent is included itself, so a complete
  // map up to n_max covers all nine stencil terms.
  std::vector<Extent> extents;
  for (int lm = 1; lm <= n_max; ++lm)
    for (int ln = 1; lm * ln <= n_max; ++ln) {
      if (!eff_map.count({lm, ln}))
        throw MissingCluster("effective Hamiltonian missing for extent " + std::to_string(lm) +
                             "x" + std::to_string(ln));
      extents.push_back({lm, ln});
    }

  static constexpr double stencil[3] = {1.0, -2.0, 1.0};
  DispersionCurve curve;
  curve.kdim = 2;
  curve.order = n_max;
  curve.momenta = k_grid;
  curve.omega.reserve(k_grid.size());
  for (const KPoint& k : k_grid) {
    std::map<Extent, double> block;
    for (const Extent& e : extents) {
      const std::complex<double> b = kspace_block(eff_map.at(e), k.kx, k.ky);
      assert(std::abs(b.imag()) < 1e-9);
      block[e] = b.real();
    }
    double omega = 0;
    for (const Extent& e : extents)
      for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t) {
          const Extent sub{e.first - s, e.second - t};
          if (sub.first < 1 || sub.second < 1) continue;
          omega += stencil[s] * stencil[t] * block.at(sub);
        }
    curve.omega.push_back(omega);
  }
  return curve;
}

double additivity_check(const Effective1QP& eff_a, const Effective1QP& eff_b,
                        const Effective1QP& eff_ab) {
  const int na = eff_a.size();
  const int nb = eff_b.size();
  if (eff_ab.size() != na + nb)
    throw std::invalid_argument("union block size must equal the sum of the parts");
  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(na + nb, na + nb);
  direct.topLeftCorner(na, na) = eff_a.matrix;
  direct.bottomRightCorner(nb, nb) = eff_b.matrix;
  return (eff_ab.matrix - direct).cwiseAbs().maxCoeff();
}

std::vector<double> uniform_grid_1d(int points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> k(points);
  for (int i = 0; i < points; ++i)
    k[i] = -std::numbers::pi + 2.0 * std::numbers::pi * i / (points - 1);
  return k;
}

std::vector<KPoint> path_grid_2d(int points_per_segment) {
  if (points_per_segment < 2) throw std::invalid_argument("segment needs at least two points");
  const double pi = std::numbers::pi;
  const KPoint gamma{0, 0}, xpt{pi, 0}, mpt{pi, pi};
  const std::array<std::pair<KPoint, KPoint>, 3> segments{
      {{gamma, xpt}, {xpt, mpt}, {mpt, gamma}}};
  std::vector<KPoint> path;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& [from, to] = segments[s];
    for (int i = s == 0 ? 0 : 1; i < points_per_segment; ++i) {
      const double f = static_cast<double>(i) / (points_per_segment - 1);
      path.push_back({from.kx + f * (to.kx - from.kx), from.ky + f * (to.ky - from.ky)});
    }
  }
  return path;
}

std::vector<KPoint> full_grid_2d(int points_per_axis) {
  if (points_per_axis < 2) throw std::invalid_argument("grid needs at least two points");
  const double pi = std::numbers::pi;
  std::vector<KPoint> grid;
  grid.reserve(static_cast<std::size_t>(points_per_axis) * points_per_axis);
  for (int i = 0; i < points_per_axis; ++i)
    for (int j = 0; j < points_per_axis; ++j)
      grid.push_back({-pi + 2 * pi * i / (points_per_axis - 1),
                      -pi + 2 * pi * j / (points_per_axis - 1)});
  return grid;
}

}  // namespace qpd
