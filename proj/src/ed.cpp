#include "qpd/ed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qpd/errors.hpp"

namespace qpd {

namespace {

double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

bool has_y_factor(const PauliSum& h) {
  for (const auto& t : h.terms)
    for (const auto& f : t.factors)
      if (f.axis == Axis::Y) return true;
  return false;
}

double operator_scale(const PauliSum& h) {
  double s = 0;
  for (const auto& t : h.terms) s += std::abs(t.coefficient);
  return std::max(s, 1.0);
}

Spectrum dense_spectrum(const PauliSum& h, int count) {
  const std::size_t dim = std::size_t{1} << h.num_sites;
  Spectrum out;
  if (!has_y_factor(h)) {
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& term : h.terms) {
      const TermMasks m = term_masks(term);
      for (std::uint64_t j = 0; j < dim; ++j)
        mat(j ^ m.flip, j) += m.weight.real() * parity_sign(j & m.phase_mask);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
    if (es.info() != Eigen::Success) throw NonConvergence("dense eigensolver failed");
    for (int i = 0; i < count; ++i) {
      out.eigenvalues.push_back(es.eigenvalues()(i));
      StateVector v = zero_state(h.num_sites);
      for (std::size_t j = 0; j < dim; ++j) v.amp[j] = cplx{es.eigenvectors()(j, i), 0.0};
      out.eigenvectors.push_back(std::move(v));
    }
    return out;
  }
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : h.terms) {
    const TermMasks m = term_masks(term);
    for (std::uint64_t j = 0; j < dim; ++j)
      mat(j ^ m.flip, j) += m.weight * parity_sign(j & m.phase_mask);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
  if (es.info() != Eigen::Success) throw NonConvergence("dense eigensolver failed");
  for (int i = 0; i < count; ++i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
    StateVector v = zero_state(h.num_sites);
    for (std::size_t j = 0; j < dim; ++j) v.amp[j] = es.eigenvectors()(j, i);
    out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

// Thick-restart Krylov: grow an orthonormal basis by repeated matrix-free
// applies with full reorthogonalization, Rayleigh-Ritz on the projected
// matrix, keep the lowest Ritz vectors, restart from the worst residual.
Spectrum krylov_spectrum(const PauliSum& h, int count, const EdOptions& opts) {
  const int n = h.num_sites;
  const std::size_t dim = std::size_t{1} << n;
  const int m = std::min<int>(opts.basis_cap, static_cast<int>(dim));
  const double tol_abs = opts.tol * operator_scale(h);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto random_vector = [&] {
    Eigen::VectorXcd v(dim);
    for (std::size_t i = 0; i < dim; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
    return v;
  };

  StateVector work = zero_state(n), hwork;
  const auto apply_h = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    Eigen::Map<Eigen::VectorXcd>(work.amp.data(), dim) = v;
    apply_pauli_sum_into(hwork, work, h);
    return Eigen::Map<const Eigen::VectorXcd>(hwork.amp.data(), dim);
  };

  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(m);
  const auto orthogonalize = [&](Eigen::VectorXcd& v) -> bool {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= (b.dot(v)) * b;
    const double nrm = v.norm();
    if (nrm < 1e-12) return false;
    v /= nrm;
    return true;
  };

  Eigen::VectorXcd start = random_vector();
  start.normalize();
  basis.push_back(start);

  std::vector<Eigen::VectorXcd> h_basis;  // H applied to each basis vector
  h_basis.reserve(m);

  for (int cycle = 0; cycle < opts.max_cycles; ++cycle) {
    // Extend the Krylov chain to the basis cap.
    while (static_cast<int>(basis.size()) < m) {
      h_basis.resize(basis.size() - 1);
      Eigen::VectorXcd w = apply_h(basis.back());
      h_basis.push_back(w);
      if (!orthogonalize(w)) {
        w = random_vector();
        if (!orthogonalize(w)) break;  // space exhausted
      }
      basis.push_back(std::move(w));
    }
    h_basis.resize(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (h_basis[j].size() == 0) h_basis[j] = apply_h(basis[j]);

    const int msz = static_cast<int>(basis.size());
    Eigen::MatrixXcd t(msz, msz);
    for (int i = 0; i < msz; ++i)
      for (int j = 0; j < msz; ++j) t(i, j) = basis[i].dot(h_basis[j]);
    t = 0.5 * (t + t.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t);

    const int keep = std::min(msz, std::min(count + 20, m - 2));
    std::vector<Eigen::VectorXcd> ritz(keep), h_ritz(keep);
    for (int r = 0; r < keep; ++r) {
      ritz[r] = Eigen::VectorXcd::Zero(dim);
      h_ritz[r] = Eigen::VectorXcd::Zero(dim);
      for (int j = 0; j < msz; ++j) {
        ritz[r] += es.eigenvectors()(j, r) * basis[j];
        h_ritz[r] += es.eigenvectors()(j, r) * h_basis[j];
      }
    }

    bool converged = count <= keep;
    int worst = -1;
    double worst_res = 0;
    for (int r = 0; r < std::min(count, keep); ++r) {
      const double res = (h_ritz[r] - es.eigenvalues()(r) * ritz[r]).norm();
      if (res > tol_abs) {
        converged = false;
        if (res > worst_res) {
          worst_res = res;
          worst = r;
        }
      }
    }

    if (converged && static_cast<int>(dim) >= count) {
      Spectrum out;
      for (int r = 0; r < count; ++r) {
        out.eigenvalues.push_back(es.eigenvalues()(r));
        StateVector v = zero_state(n);
        Eigen::Map<Eigen::VectorXcd>(v.amp.data(), dim) = ritz[r];
        out.eigenvectors.push_back(std::move(v));
      }
      return out;
    }

    // Restart: kept Ritz vectors plus the residual direction of the worst pair.
    basis.clear();
    h_basis.clear();
    for (int r = 0; r < keep; ++r) {
      basis.push_back(std::move(ritz[r]));
      h_basis.push_back(std::move(h_ritz[r]));
    }
    Eigen::VectorXcd r0 = worst >= 0 ? (h_basis[worst] - es.eigenvalues()(worst) * basis[worst]).eval()
                                     : random_vector();
    if (!orthogonalize(r0)) {
      r0 = random_vector();
      if (!orthogonalize(r0)) throw NonConvergence("Krylov basis collapsed");
    }
    basis.push_back(std::move(r0));
  }
  throw NonConvergence("eigensolver exhausted its cycle budget");
}

}  // namespace

int default_state_request(int n_sites) {
  const std::int64_t dim = std::int64_t{1} << n_sites;
  return static_cast<int>(std::min<std::int64_t>(dim, 4 * n_sites + 9));
}

namespace {

// Exactly degenerate multiplets come out of the eigensolver in an arbitrary
// internal basis, which can smear quasi-particle character across sector
// boundaries (the critical chain has exact one- vs three-particle
// resonances). Rotating each multiplet to diagonalize the projection onto the
// reference span separates the characters without leaving the eigenspace.
void split_degenerate_multiplets(Spectrum& spec, std::span<const StateVector> reference) {
  double scale = 1.0;
  for (double e : spec.eigenvalues) scale = std::max(scale, std::abs(e));
  const double tol = 1e-8 * scale;
  int lo = 0;
  while (lo < spec.count()) {
    int hi = lo + 1;
    while (hi < spec.count() && spec.eigenvalues[hi] - spec.eigenvalues[hi - 1] < tol) ++hi;
    const int m = hi - lo;
    if (m > 1) {
      Eigen::MatrixXcd c(m, reference.size());
      for (int a = 0; a < m; ++a)
        for (std::size_t r = 0; r < reference.size(); ++r)
          c(a, r) = inner_product(spec.eigenvectors[lo + a], reference[r]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c * c.adjoint());
      std::vector<StateVector> rotated(m, zero_state(spec.eigenvectors[lo].n_sites));
      for (int k = 0; k < m; ++k)
        for (int a = 0; a < m; ++a) {
          const cplx w = es.eigenvectors()(a, k);
          for (std::size_t t = 0; t < rotated[k].dim(); ++t)
            rotated[k].amp[t] += w * spec.eigenvectors[lo + a].amp[t];
        }
      for (int k = 0; k < m; ++k) spec.eigenvectors[lo + k] = std::move(rotated[k]);
    }
    lo = hi;
  }
}

}  // namespace

Spectrum low_energy_spectrum(const PauliSum& h, int count, const EdOptions& opts) {
  const std::size_t dim = std::size_t{1} << h.num_sites;
  if (count < 1 || static_cast<std::size_t>(count) > dim)
    throw std::invalid_argument("requested state count exceeds the Hilbert space");
  if (h.num_sites <= opts.dense_max_sites || static_cast<std::size_t>(count) + 2 >= dim ||
      static_cast<std::size_t>(count) + 20 >= static_cast<std::size_t>(opts.basis_cap))
    return dense_spectrum(h, count);
  return krylov_spectrum(h, count, opts);
}

Selected1QP select_1qp_subspace(const Spectrum& spectrum, const UnperturbedBasis& unperturbed) {
  const int n = static_cast<int>(unperturbed.one_qp.size());
  if (spectrum.count() < n + 1)
    throw std::invalid_argument("spectrum holds fewer than N+1 states");
  Spectrum split = spectrum;
  split_degenerate_multiplets(split, unperturbed.one_qp);

  struct Candidate {
    int index;
    double weight;
    double energy;
  };
  std::vector<Candidate> cand;
  for (int s = 1; s < split.count(); ++s) {
    double w = 0;
    for (const StateVector& phi : unperturbed.one_qp)
      w += std::norm(inner_product(phi, split.eigenvectors[s]));
    cand.push_back({s, w, split.eigenvalues[s]});
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.energy < b.energy;
  });
  if (static_cast<int>(cand.size()) > n &&
      std::abs(cand[n - 1].weight - cand[n].weight) < 1e-6)
    throw AdiabaticAmbiguity("projection weights tie for the last 1QP slot");

  std::vector<Candidate> picked(cand.begin(), cand.begin() + n);
  std::sort(picked.begin(), picked.end(),
            [](const Candidate& a, const Candidate& b) { return a.energy < b.energy; });

  Selected1QP sel;
  sel.gs = split.eigenvectors[0];
  sel.gs_energy = split.eigenvalues[0];
  for (const Candidate& c : picked) {
    sel.one_qp.push_back(split.eigenvectors[c.index]);
    sel.one_qp_energies.push_back(c.energy);
    sel.weights.push_back(c.weight);
    if (c.weight < 0.5) sel.weak_overlap_warning = true;
  }
  return sel;
}

Selected1QP select_1qp_with_continuation(const ClusterGraph& graph, const ModelParams& params,
                                         int steps, const EdOptions& opts) {
  if (steps < 1) throw std::invalid_argument("continuation needs at least one step");
  const int n = graph.num_sites();
  const int request = default_state_request(n);
  const UnperturbedBasis basis = unperturbed_states(graph);

  // Track the whole (N+1)-dimensional low-energy subspace rather than
  // individual states: crossings inside the manifold then cannot derail the
  // matching, and PCAT only needs the span plus the ground state.
  std::vector<StateVector> tracked;
  tracked.push_back(basis.gs);
  for (const StateVector& q : basis.one_qp) tracked.push_back(q);

  std::vector<int> indices;
  Spectrum spec;
  for (int s = 1; s <= steps; ++s) {
    const double lambda = static_cast<double>(s) / steps;
    const ModelParams scaled{params.coupling_j * lambda, params.field_h, params.field_hl * lambda};
    spec = low_energy_spectrum(build_hamiltonian(graph, scaled), request, opts);
    split_degenerate_multiplets(spec, tracked);
    std::vector<std::pair<double, int>> weight_index;
    for (int cnd = 0; cnd < spec.count(); ++cnd) {
      double w = 0;
      for (const StateVector& prev : tracked)
        w += std::norm(inner_product(prev, spec.eigenvectors[cnd]));
      weight_index.push_back({w, cnd});
    }
    std::stable_sort(weight_index.begin(), weight_index.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    indices.clear();
    for (int i = 0; i <= n; ++i) indices.push_back(weight_index[i].second);
    std::sort(indices.begin(), indices.end());  // ascending energy
    tracked.clear();
    for (int idx : indices) tracked.push_back(spec.eigenvectors[idx]);
  }

  Selected1QP sel;
  sel.gs = std::move(tracked[0]);
  sel.gs_energy = spec.eigenvalues[indices[0]];
  for (int i = 1; i <= n; ++i) {
    double w = 0;
    for (const StateVector& phi : basis.one_qp) w += std::norm(inner_product(phi, tracked[i]));
    sel.one_qp.push_back(std::move(tracked[i]));
    sel.one_qp_energies.push_back(spec.eigenvalues[indices[i]]);
    sel.weights.push_back(w);
    if (w < 0.5) sel.weak_overlap_warning = true;
  }
  return sel;
}

}  // namespace qpd
