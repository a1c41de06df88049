#pragma once

#include <cstdint>
#include <vector>

#include "qpd/model.hpp"
#include "qpd/pauli.hpp"
#include "qpd/statevector.hpp"

namespace qpd {

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  std::vector<StateVector> eigenvectors;

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

struct EdOptions {
  int dense_max_sites = 12;  // dense solve up to here, restarted Krylov beyond
  double tol = 1e-10;        // residual target relative to sum |coefficients|
  int max_cycles = 400;
  int basis_cap = 220;       // Krylov basis vectors held across a cycle
  std::uint64_t seed = 0x9d2c5680ULL;
};

// The `count` lowest eigenpairs of h.
Spectrum low_energy_spectrum(const PauliSum& h, int count, const EdOptions& opts = {});

struct Selected1QP {
  StateVector gs;
  double gs_energy = 0.0;
  std::vector<StateVector> one_qp;  // ascending energy
  std::vector<double> one_qp_energies;
  std::vector<double> weights;      // 1QP-span projection weight per kept state
  bool weak_overlap_warning = false;
};

// Picks the ground state plus the N eigenstates with the largest projection
// onto the unperturbed single-flip span (ties for the last slot are an error).
Selected1QP select_1qp_subspace(const Spectrum& spectrum, const UnperturbedBasis& unperturbed);

// Fallback when dominant-overlap selection is ambiguous: ramp the couplings
// from zero in `steps` increments, matching states by successive overlap.
Selected1QP select_1qp_with_continuation(const ClusterGraph& graph, const ModelParams& params,
                                         int steps = 10, const EdOptions& opts = {});

// Eigenpairs requested per cluster solve: the band plus headroom for
// interleaved 2QP/3QP states.
int default_state_request(int n_sites);

}  // namespace qpd
