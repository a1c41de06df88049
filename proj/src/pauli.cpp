#include "qpd/pauli.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace qpd {

TermMasks term_masks(const PauliTerm& term) {
  TermMasks m;
  int y_count = 0;
  for (const auto& f : term.factors) {
    const std::uint64_t bit = std::uint64_t{1} << f.site;
    switch (f.axis) {
      case Axis::X:
        m.flip |= bit;
        break;
      case Axis::Y:
        m.flip |= bit;
        m.phase_mask |= bit;
        ++y_count;
        break;
      case Axis::Z:
        m.phase_mask |= bit;
        break;
    }
  }
  static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  m.weight = term.coefficient * i_pow[y_count & 3];
  return m;
}

bool terms_commute(const PauliTerm& a, const PauliTerm& b) {
  const TermMasks ma = term_masks(a);
  const TermMasks mb = term_masks(b);
  // x/z masks in the symplectic sense: x = flip, z = phase_mask.
  const int anti = std::popcount(ma.flip & mb.phase_mask) +
                   std::popcount(ma.phase_mask & mb.flip);
  return (anti & 1) == 0;
}

namespace {

// Single-site products sigma_a * sigma_b -> (phase, sigma_c), with
// I encoded as -1. Axis values X=0, Y=1, Z=2.
struct SiteProduct {
  cplx phase;
  int axis;  // -1 for identity
};

SiteProduct site_product(int a, int b) {
  if (a == b) return {{1, 0}, -1};
  // eps: XY=iZ, YZ=iX, ZX=iY; reversed order picks up a minus sign.
  static constexpr int third[3][3] = {{-1, 2, 1}, {2, -1, 0}, {1, 0, -1}};
  const bool forward = (b - a + 3) % 3 == 1;
  return {forward ? cplx{0, 1} : cplx{0, -1}, third[a][b]};
}

}  // namespace

std::pair<std::complex<double>, PauliTerm> pauli_product(const PauliTerm& a,
                                                         const PauliTerm& b) {
  std::map<int, int> site_axis;  // site -> axis index, sorted for canonical output
  cplx phase = a.coefficient * b.coefficient;
  for (const auto& f : a.factors) site_axis[f.site] = static_cast<int>(f.axis);
  for (const auto& f : b.factors) {
    auto it = site_axis.find(f.site);
    const int bi = static_cast<int>(f.axis);
    if (it == site_axis.end()) {
      site_axis[f.site] = bi;
      continue;
    }
    const SiteProduct p = site_product(it->second, bi);
    phase *= p.phase;
    if (p.axis < 0) {
      site_axis.erase(it);
    } else {
      it->second = p.axis;
    }
  }
  PauliTerm out;
  out.coefficient = 1.0;
  for (const auto& [site, axis] : site_axis)
    out.factors.push_back({site, static_cast<Axis>(axis)});
  return {phase, out};
}

}  // namespace qpd
