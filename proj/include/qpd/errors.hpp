#pragma once

#include <stdexcept>
#include <string>

namespace qpd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State dimension would exceed the configured qubit limit.
struct DimensionOverflow : Error {
  using Error::Error;
};

// Gram matrix of the prepared states is (numerically) singular.
struct IllConditioned : Error {
  using Error::Error;
};

// |O_00| below tolerance: the solved ground state carries no weight on the
// unperturbed reference state, so the modified-overlap subtraction is undefined.
struct GroundOverlapVanishing : Error {
  using Error::Error;
};

// Modified overlap matrix lost rank; the solved and unperturbed one
// quasi-particle spaces have collapsed onto each other.
struct RankDeficient : Error {
  using Error::Error;
};

// Two eigenstates compete for the last one quasi-particle slot with
// indistinguishable projection weights.
struct AdiabaticAmbiguity : Error {
  using Error::Error;
};

// Cost or gradient evaluated to NaN/inf during optimization.
struct NonFinite : Error {
  using Error::Error;
};

// Iterative eigensolver exhausted its budget.
struct NonConvergence : Error {
  using Error::Error;
};

// A required cluster extent is absent from the effective-Hamiltonian map.
struct MissingCluster : Error {
  using Error::Error;
};

// Cached result file failed its embedded checksum.
struct CacheCorrupt : Error {
  using Error::Error;
};

}  // namespace qpd
