#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qpd/pauli.hpp"

namespace qpd {

// Dense amplitude vector on n_sites qubits. Site i maps to bit i of the
// amplitude index (little-endian), fixed globally.
struct StateVector {
  int n_sites = 0;
  std::vector<cplx> amp;

  std::size_t dim() const { return amp.size(); }
};

// Qubit cap guarding against accidental huge allocations (default 20).
int max_sites();
void set_max_sites(int n);

StateVector zero_state(int n_sites);
StateVector basis_state(int n_sites, std::string_view bits);
StateVector basis_state_index(int n_sites, std::uint64_t index);
StateVector random_state(int n_sites, std::uint64_t seed);

cplx inner_product(const StateVector& a, const StateVector& b);
double norm(const StateVector& s);

// out = sum_t c_t P_t |in>, term by term, never materializing a matrix.
void apply_pauli_sum_into(StateVector& out, const StateVector& in, const PauliSum& op);
StateVector apply_pauli_sum(const StateVector& in, const PauliSum& op);

struct EnergyMoments {
  double energy = 0.0;     // <H>
  double energy_sq = 0.0;  // <H^2>, computed as |H|psi>|^2
  double variance() const { return energy_sq - energy * energy; }
};
EnergyMoments expectation_and_square(const StateVector& s, const PauliSum& op);

// One factor exp(i * angle * term) of a mutually commuting block.
struct ExpTerm {
  PauliTerm term;
  double angle = 0.0;
};

// Applies prod_t exp(i theta_t P_t) in place. All terms must commute pairwise;
// violations throw std::invalid_argument.
void apply_exp_block(StateVector& s, std::span<const ExpTerm> block);

// Straight-line single-threaded reference kernels, kept for testing the
// OpenMP implementations above and for the kernel benchmark.
namespace serial {
void apply_pauli_sum_into(StateVector& out, const StateVector& in, const PauliSum& op);
cplx inner_product(const StateVector& a, const StateVector& b);
EnergyMoments expectation_and_square(const StateVector& s, const PauliSum& op);
void apply_exp_block(StateVector& s, std::span<const ExpTerm> block);
}  // namespace serial

}  // namespace qpd
