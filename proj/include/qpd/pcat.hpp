#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qpd/model.hpp"
#include "qpd/pauli.hpp"
#include "qpd/statevector.hpp"

namespace qpd {

// The three (N+1)x(N+1) matrices extracted from a cluster solve. Row/column 0
// is the ground slot, 1..N the one quasi-particle slots.
struct SubspaceMatrices {
  Eigen::MatrixXcd overlap_unperturbed;  // O_aj = <chi_a | Phi_j>
  Eigen::MatrixXcd gram;                 // S_ab = <chi_a | chi_b>
  Eigen::MatrixXcd ham;                  // Ht_ab = <chi_a | H | chi_b>
  double gram_asymmetry = 0.0;           // max |S - S^dag| / 2 before symmetrization
  double ham_asymmetry = 0.0;

  int n_qp() const { return static_cast<int>(ham.rows()) - 1; }
};

SubspaceMatrices assemble_matrices(const StateVector& gs, std::span<const StateVector> one_qp,
                                   const PauliSum& h, const UnperturbedBasis& unperturbed);

// Step 1: solve Ht v = lambda S v, sort ascending, take the lowest eigenvalue
// as the ground-state energy, and rotate all three matrices into the
// orthonormal eigenbasis (Ht becomes diagonal, S the identity).
struct OrthoResult {
  SubspaceMatrices rotated;
  Eigen::MatrixXcd transform;  // columns are the generalized eigenvectors
  double gs_energy = 0.0;
};
OrthoResult step1_orthonormalize(const SubspaceMatrices& m);

// Step 2: modified 1QP overlap, X_ik = O_ik - (O_i0 / O_00) O_0k for i,k >= 1.
// Removes every ground-state admixture from the solved 1QP states.
Eigen::MatrixXcd step2_modified_overlap(const SubspaceMatrices& rotated);

// Step 3: unitary polar factor of the modified overlap via SVD (Moore-Penrose
// convention, singular values below 1e-8 are a rank error). Column k of the
// result expands the dressed state attached to site k in the solved states.
Eigen::MatrixXcd step3_correction(const Eigen::MatrixXcd& modified_overlap);

// Cluster-additive effective 1QP Hamiltonian in the site basis, ground-state
// energy already subtracted.
struct Effective1QP {
  Eigen::MatrixXcd matrix;
  std::vector<Coord> site_coords;
  double gs_energy = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }
};

// Step 4: H_eff = V^dag Ht^[11] V - E0, then Hermitian symmetrization.
Effective1QP step4_effective(const Eigen::MatrixXcd& rotated_ham,
                             const Eigen::MatrixXcd& correction, double gs_energy,
                             std::vector<Coord> site_coords);

// Steps 1-4 in sequence.
Effective1QP pcat_effective(const StateVector& gs, std::span<const StateVector> one_qp,
                            const PauliSum& h, const ClusterGraph& graph);

// Two-block (Schrieffer-Wolff style) baseline: same pipeline but with the
// unmodified 1QP overlap block, i.e. no ground-state subtraction. Not
// cluster-additive once parity is broken.
Effective1QP sw_effective(const StateVector& gs, std::span<const StateVector> one_qp,
                          const PauliSum& h, const ClusterGraph& graph);

// The transposed rectangle: swap the coordinate axes, keep the matrix.
Effective1QP transpose_effective(const Effective1QP& eff);

}  // namespace qpd
