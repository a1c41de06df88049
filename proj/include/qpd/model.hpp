#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qpd/pauli.hpp"
#include "qpd/statevector.hpp"

namespace qpd {

enum class Lattice { Chain, Square };

struct Coord {
  int x = 0;  // position along the L_m extent
  int y = 0;  // position along the L_n extent
  friend bool operator==(const Coord&, const Coord&) = default;
};

// Open-boundary L_m x L_n rectangle. Site index is row-major: x * ln + y.
// Chains are stored as L x 1 rectangles.
struct ClusterGraph {
  Lattice lattice = Lattice::Chain;
  int lm = 0, ln = 0;
  std::vector<Coord> sites;
  std::vector<std::pair<int, int>> bonds;  // nearest neighbors, i < j

  int num_sites() const { return static_cast<int>(sites.size()); }
  std::string key() const;  // "chain-8" / "square-3x4"
};

ClusterGraph make_chain(int length);
ClusterGraph make_rectangle(int lm, int ln);  // tagged Square, also for ln == 1

// Union of two clusters with no connecting bonds; b is shifted past a along x
// with a 2-site gap so the pieces never touch.
ClusterGraph disconnected_union(const ClusterGraph& a, const ClusterGraph& b);

struct ModelParams {
  double coupling_j = 0.0;  // Ising coupling J >= 0 (ferromagnetic)
  double field_h = 1.0;     // transverse field, the energy unit
  double field_hl = 0.0;    // longitudinal field
};

// H = -h sum Z - J sum_bonds XX - h_l sum X.
PauliSum build_hamiltonian(const ClusterGraph& graph, const ModelParams& params);

// Z parity, conserved for h_l = 0; the ground state is even, single flips odd.
PauliTerm parity_operator(int num_sites);

// Chain: segments 1..n_max. Square: all ordered (L_m, L_n) with product <= n_max,
// sorted by size; transposes are distinct entries (needed for the embedding sum).
std::vector<ClusterGraph> enumerate_clusters(Lattice lattice, int n_max);

// Unordered shapes lm <= ln, one representative per transpose pair (the model
// is isotropic, so a shape is solved once and transposed).
std::vector<ClusterGraph> solve_shapes(Lattice lattice, int n_max);

struct UnperturbedBasis {
  StateVector gs;                    // |00...0>
  std::vector<StateVector> one_qp;   // X_i |00...0>
};
UnperturbedBasis unperturbed_states(const ClusterGraph& graph);

// Orbits of the spatial point group: reflections for rectangles, plus the
// diagonal flip when lm == ln. Class ids are dense and ordered by the
// smallest member (site index / bond position).
struct SymmetryClasses {
  std::vector<int> site_class;  // size num_sites
  std::vector<int> bond_class;  // size bonds.size()
  int n_site_classes = 0;
  int n_bond_classes = 0;
};
SymmetryClasses symmetry_classes(const ClusterGraph& graph);

// Identity partition, used when parameter tying is disabled.
SymmetryClasses untied_classes(const ClusterGraph& graph);

}  // namespace qpd
