#include "qpd/statevector.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpd/errors.hpp"

namespace qpd {

namespace {

int g_max_sites = 20;

// Fixed reduction block: partial sums are always accumulated in block order,
// so reductions are bit-identical regardless of thread count.
constexpr std::size_t kBlock = std::size_t{1} << 12;
constexpr std::size_t kParallelCutoff = std::size_t{1} << 12;

// Parallel regions only pay off with real threads behind them; with one
// thread (or inside an enclosing region) the per-term region entry dominates.
inline bool parallel_worthwhile(std::size_t n) {
#ifdef _OPENMP
  return n >= kParallelCutoff && omp_get_max_threads() > 1 && !omp_in_parallel();
#else
  (void)n;
  return false;
#endif
}

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

void check_same_shape(const StateVector& a, const StateVector& b) {
  if (a.n_sites != b.n_sites || a.dim() != b.dim())
    throw std::invalid_argument("state dimensions do not match");
}

cplx blocked_dot(const cplx* a, const cplx* b, std::size_t n) {
  // Always accumulate per fixed-size block and then in block order, so the
  // reduction order (and hence the result, bit for bit) is independent of the
  // thread count.
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  if (nb <= 1) {
    cplx acc{0, 0};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
    return acc;
  }
  std::vector<cplx> partial(nb);
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nb); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n);
    cplx acc{0, 0};
    for (std::size_t i = lo; i < hi; ++i) acc += std::conj(a[i]) * b[i];
    partial[static_cast<std::size_t>(blk)] = acc;
  }
  cplx total{0, 0};
  for (const cplx& p : partial) total += p;
  return total;
}

void check_block_commutes(std::span<const ExpTerm> block) {
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j)
      if (!terms_commute(block[i].term, block[j].term))
        throw std::invalid_argument("exp block contains non-commuting terms");
}

}  // namespace

int max_sites() { return g_max_sites; }

void set_max_sites(int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("max_sites out of range");
  g_max_sites = n;
}

StateVector zero_state(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
  if (n_sites > g_max_sites)
    throw DimensionOverflow("state on " + std::to_string(n_sites) +
                            " sites exceeds the cap of " + std::to_string(g_max_sites));
  StateVector s;
  s.n_sites = n_sites;
  s.amp.assign(std::size_t{1} << n_sites, cplx{0, 0});
  return s;
}

StateVector basis_state_index(int n_sites, std::uint64_t index) {
  StateVector s = zero_state(n_sites);
  if (index >= s.dim()) throw std::invalid_argument("basis index out of range");
  s.amp[index] = cplx{1, 0};
  return s;
}

StateVector basis_state(int n_sites, std::string_view bits) {
  if (static_cast<int>(bits.size()) != n_sites)
    throw std::invalid_argument("bit string length does not match n_sites");
  std::uint64_t index = 0;
  for (int i = 0; i < n_sites; ++i) {
    if (bits[i] == '1')
      index |= std::uint64_t{1} << i;
    else if (bits[i] != '0')
      throw std::invalid_argument("bit string must contain only 0/1");
  }
  return basis_state_index(n_sites, index);
}

StateVector random_state(int n_sites, std::uint64_t seed) {
  StateVector s = zero_state(n_sites);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& a : s.amp) a = cplx{gauss(rng), gauss(rng)};
  const double nrm = norm(s);
  for (auto& a : s.amp) a /= nrm;
  return s;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  check_same_shape(a, b);
  return blocked_dot(a.amp.data(), b.amp.data(), a.dim());
}

double norm(const StateVector& s) {
  return std::sqrt(blocked_dot(s.amp.data(), s.amp.data(), s.dim()).real());
}

void apply_pauli_sum_into(StateVector& out, const StateVector& in, const PauliSum& op) {
  if (op.num_sites != in.n_sites)
    throw std::invalid_argument("operator and state site counts differ");
  out.n_sites = in.n_sites;
  out.amp.assign(in.dim(), cplx{0, 0});
  const std::ptrdiff_t dim = static_cast<std::ptrdiff_t>(in.dim());
  const cplx* src = in.amp.data();
  cplx* dst = out.amp.data();
  for (const PauliTerm& term : op.terms) {
    const TermMasks m = term_masks(term);
    if (m.weight == cplx{0, 0}) continue;
    // j -> j ^ flip is a bijection, so the scatter below is race-free.
#pragma omp parallel for schedule(static) if (parallel_worthwhile(in.dim()))
    for (std::ptrdiff_t j = 0; j < dim; ++j) {
      const std::uint64_t uj = static_cast<std::uint64_t>(j);
      dst[uj ^ m.flip] += m.weight * parity_sign(uj & m.phase_mask) * src[uj];
    }
  }
}

StateVector apply_pauli_sum(const StateVector& in, const PauliSum& op) {
  StateVector out;
  apply_pauli_sum_into(out, in, op);
  return out;
}

EnergyMoments expectation_and_square(const StateVector& s, const PauliSum& op) {
  const StateVector hs = apply_pauli_sum(s, op);
  const cplx e = inner_product(s, hs);
  assert(std::abs(e.imag()) < 1e-10);
  EnergyMoments m;
  m.energy = e.real();
  m.energy_sq = blocked_dot(hs.amp.data(), hs.amp.data(), hs.dim()).real();
  return m;
}

void apply_exp_block(StateVector& s, std::span<const ExpTerm> block) {
  check_block_commutes(block);
  const std::ptrdiff_t dim = static_cast<std::ptrdiff_t>(s.dim());
  cplx* amp = s.amp.data();
  for (const ExpTerm& et : block) {
    PauliTerm unit = et.term;
    const double theta = et.angle * unit.coefficient;
    unit.coefficient = 1.0;
    const TermMasks m = term_masks(unit);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    if (m.flip == 0) {
      // Pure-Z string: diagonal phases exp(i theta * sign).
      const cplx plus{c, sn};
      const cplx minus{c, -sn};
#pragma omp parallel for schedule(static) if (parallel_worthwhile(s.dim()))
      for (std::ptrdiff_t j = 0; j < dim; ++j) {
        const std::uint64_t uj = static_cast<std::uint64_t>(j);
        amp[uj] *= (std::popcount(uj & m.phase_mask) & 1) ? minus : plus;
      }
      continue;
    }
    const std::uint64_t pivot = m.flip & (~m.flip + 1);
    const std::uint64_t low = pivot - 1;
    const std::ptrdiff_t half = dim / 2;
#pragma omp parallel for schedule(static) if (parallel_worthwhile(s.dim() / 2))
    for (std::ptrdiff_t t = 0; t < half; ++t) {
      const std::uint64_t ut = static_cast<std::uint64_t>(t);
      const std::uint64_t j = ((ut & ~low) << 1) | (ut & low);
      const std::uint64_t p = j ^ m.flip;
      const cplx ph_j = m.weight * parity_sign(j & m.phase_mask);
      const cplx ph_p = m.weight * parity_sign(p & m.phase_mask);
      const cplx a = amp[j];
      const cplx b = amp[p];
      amp[j] = c * a + cplx{0, sn} * ph_p * b;
      amp[p] = c * b + cplx{0, sn} * ph_j * a;
    }
  }
}

}  // namespace qpd
