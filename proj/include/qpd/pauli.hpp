#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace qpd {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { X, Y, Z };

struct PauliFactor {
  int site = 0;
  Axis axis = Axis::Z;
};

// One weighted Pauli string. An empty factor list is the identity.
struct PauliTerm {
  double coefficient = 0.0;
  std::vector<PauliFactor> factors;
};

// Hermitian operator as a real-weighted sum of Pauli strings on num_sites qubits.
struct PauliSum {
  int num_sites = 0;
  std::vector<PauliTerm> terms;
};

// Bitmask form consumed by the statevector kernels. A string acts on a basis
// state as P|j> = weight * sign(popcount(j & phase_mask)) |j ^ flip>, where
// weight folds the coefficient together with the i^{#Y} prefactor.
struct TermMasks {
  std::uint64_t flip = 0;        // sites carrying X or Y
  std::uint64_t phase_mask = 0;  // sites carrying Z or Y
  std::complex<double> weight{1.0, 0.0};
};

TermMasks term_masks(const PauliTerm& term);

// Symplectic check: even number of pairwise anticommuting single-site factors.
bool terms_commute(const PauliTerm& a, const PauliTerm& b);

// Product of two Pauli strings: phase * result, with unit coefficients on the
// inputs understood (coefficients of a and b are multiplied into phase).
std::pair<std::complex<double>, PauliTerm> pauli_product(const PauliTerm& a,
                                                         const PauliTerm& b);

}  // namespace qpd
