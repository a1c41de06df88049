#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qpd/statevector.hpp"

// Reference kernels: one plain loop each, no tiling, no pragmas. These are the
// ground truth the OpenMP kernels are tested against and benchmarked over.

namespace qpd::serial {

namespace {

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

}  // namespace

void apply_pauli_sum_into(StateVector& out, const StateVector& in, const PauliSum& op) {
  if (op.num_sites != in.n_sites)
    throw std::invalid_argument("operator and state site counts differ");
  out.n_sites = in.n_sites;
  out.amp.assign(in.dim(), cplx{0, 0});
  for (const PauliTerm& term : op.terms) {
    const TermMasks m = term_masks(term);
    for (std::uint64_t j = 0; j < in.dim(); ++j)
      out.amp[j ^ m.flip] += m.weight * parity_sign(j & m.phase_mask) * in.amp[j];
  }
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("state dimensions do not match");
  cplx acc{0, 0};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amp[i]) * b.amp[i];
  return acc;
}

EnergyMoments expectation_and_square(const StateVector& s, const PauliSum& op) {
  StateVector hs;
  serial::apply_pauli_sum_into(hs, s, op);
  EnergyMoments m;
  m.energy = serial::inner_product(s, hs).real();
  m.energy_sq = serial::inner_product(hs, hs).real();
  return m;
}

void apply_exp_block(StateVector& s, std::span<const ExpTerm> block) {
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j)
      if (!terms_commute(block[i].term, block[j].term))
        throw std::invalid_argument("exp block contains non-commuting terms");
  for (const ExpTerm& et : block) {
    PauliTerm unit = et.term;
    const double theta = et.angle * unit.coefficient;
    unit.coefficient = 1.0;
    const TermMasks m = term_masks(unit);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    if (m.flip == 0) {
      for (std::uint64_t j = 0; j < s.dim(); ++j) {
        const double sign = parity_sign(j & m.phase_mask);
        s.amp[j] *= cplx{c, sn * sign};
      }
      continue;
    }
    const std::uint64_t pivot = m.flip & (~m.flip + 1);
    for (std::uint64_t j = 0; j < s.dim(); ++j) {
      if (j & pivot) continue;
      const std::uint64_t p = j ^ m.flip;
      const cplx ph_j = m.weight * parity_sign(j & m.phase_mask);
      const cplx ph_p = m.weight * parity_sign(p & m.phase_mask);
      const cplx a = s.amp[j];
      const cplx b = s.amp[p];
      s.amp[j] = c * a + cplx{0, sn} * ph_p * b;
      s.amp[p] = c * b + cplx{0, sn} * ph_j * a;
    }
  }
}

}  // namespace qpd::serial
