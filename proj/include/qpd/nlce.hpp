#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qpd/pcat.hpp"

namespace qpd {

// Fourier block sum_{nu,mu} H_eff[nu,mu] exp(i k.(r_nu - r_mu)); real up to
// roundoff for Hermitian input.
std::complex<double> kspace_block(const Effective1QP& eff, double kx, double ky = 0.0);

struct KPoint {
  double kx = 0.0;
  double ky = 0.0;
};

struct DispersionCurve {
  std::vector<KPoint> momenta;
  int kdim = 1;  // 1 for the chain, 2 for the square lattice
  std::vector<double> omega;
  int order = 0;  // N_max of the expansion
  std::string solver;
  std::string cost;
};

// Chain expansion: all interior contributions cancel, leaving the two-cluster
// difference omega(k) = H_N(k) - H_{N-1}(k).
DispersionCurve reduced_dispersion_chain(const Effective1QP& eff_n, const Effective1QP& eff_nm1,
                                         const std::vector<double>& k_grid);

// Same sum without the telescoping shortcut: per segment length the reduced
// contribution H_L - 2 H_{L-1} + H_{L-2}, summed over all lengths. Must agree
// with the two-term form identically.
DispersionCurve reduced_dispersion_chain_full(const std::map<int, Effective1QP>& eff_by_length,
                                              const std::vector<double>& k_grid);

using Extent = std::pair<int, int>;  // (L_m, L_n)
using ExtentMap = std::map<Extent, Effective1QP>;

// Rectangular-lattice inclusion-exclusion: per extent the nine-term reduced
// contribution with coefficients (1,-2,1) x (1,-2,1); extents with a
// dimension below one contribute zero. Summed over all ordered extents with
// L_m * L_n <= n_max.
DispersionCurve reduced_dispersion_square(const ExtentMap& eff_map,
                                          const std::vector<KPoint>& k_grid, int n_max);

// Largest |entry| of eff_ab - (eff_a  direct-sum  eff_b): zero for a
// cluster-additive transformation on a disconnected union.
double additivity_check(const Effective1QP& eff_a, const Effective1QP& eff_b,
                        const Effective1QP& eff_ab);

std::vector<double> uniform_grid_1d(int points = 201);                   // [-pi, pi]
std::vector<KPoint> path_grid_2d(int points_per_segment = 67);           // Gamma-X-M-Gamma
std::vector<KPoint> full_grid_2d(int points_per_axis);                   // [-pi, pi]^2

}  // namespace qpd
