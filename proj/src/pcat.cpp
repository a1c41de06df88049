#include "qpd/pcat.hpp"

#include <cmath>
#include <stdexcept>

#include "qpd/errors.hpp"

namespace qpd {

namespace {

constexpr double kRankTolerance = 1e-8;
constexpr double kGramRankTolerance = 1e-10;
constexpr double kGramConditionLimit = 1e10;

// Hermitize in place, returning the largest asymmetry that was averaged away.
double hermitize(Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd anti = 0.5 * (m - m.adjoint().eval());
  m = 0.5 * (m + m.adjoint().eval());
  return anti.cwiseAbs().maxCoeff();
}

}  // namespace

SubspaceMatrices assemble_matrices(const StateVector& gs, std::span<const StateVector> one_qp,
                                   const PauliSum& h, const UnperturbedBasis& unperturbed) {
  const int n = static_cast<int>(one_qp.size());
  if (static_cast<int>(unperturbed.one_qp.size()) != n)
    throw std::invalid_argument("solved and unperturbed 1QP counts differ");

  std::vector<const StateVector*> chi(n + 1);
  chi[0] = &gs;
  for (int i = 0; i < n; ++i) chi[i + 1] = &one_qp[i];
  std::vector<const StateVector*> phi(n + 1);
  phi[0] = &unperturbed.gs;
  for (int j = 0; j < n; ++j) phi[j + 1] = &unperturbed.one_qp[j];

  std::vector<StateVector> h_chi(n + 1);
  for (int b = 0; b <= n; ++b) apply_pauli_sum_into(h_chi[b], *chi[b], h);

  SubspaceMatrices m;
  m.overlap_unperturbed.resize(n + 1, n + 1);
  m.gram.resize(n + 1, n + 1);
  m.ham.resize(n + 1, n + 1);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      m.overlap_unperturbed(a, b) = inner_product(*chi[a], *phi[b]);
      m.gram(a, b) = inner_product(*chi[a], *chi[b]);
      m.ham(a, b) = inner_product(*chi[a], h_chi[b]);
    }
  m.gram_asymmetry = hermitize(m.gram);
  m.ham_asymmetry = hermitize(m.ham);
  return m;
}

OrthoResult step1_orthonormalize(const SubspaceMatrices& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram_es(m.gram, Eigen::EigenvaluesOnly);
  const double lo = gram_es.eigenvalues().minCoeff();
  const double hi = gram_es.eigenvalues().maxCoeff();
  if (lo <= kGramRankTolerance || hi / lo > kGramConditionLimit)
    throw IllConditioned("gram matrix of the prepared states is near-singular");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.ham, m.gram);
  if (es.info() != Eigen::Success)
    throw IllConditioned("generalized eigensolver failed on the subspace matrices");

  // Eigen returns ascending eigenvalues with B-orthonormal eigenvectors, so
  // slot 0 is the lowest-energy state: the physical ground state for these
  // all-negative spectra (picking the smallest |lambda| instead would not be).
  OrthoResult out;
  out.transform = es.eigenvectors();
  out.gs_energy = es.eigenvalues()(0);
  const int sz = static_cast<int>(m.ham.rows());
  out.rotated.ham = Eigen::MatrixXcd::Zero(sz, sz);
  out.rotated.ham.diagonal() = es.eigenvalues().cast<cplx>();
  out.rotated.gram = Eigen::MatrixXcd::Identity(sz, sz);
  out.rotated.overlap_unperturbed = out.transform.adjoint() * m.overlap_unperturbed;
  out.rotated.gram_asymmetry = m.gram_asymmetry;
  out.rotated.ham_asymmetry = m.ham_asymmetry;
  return out;
}

Eigen::MatrixXcd step2_modified_overlap(const SubspaceMatrices& rotated) {
  const int n = rotated.n_qp();
  const Eigen::MatrixXcd& o = rotated.overlap_unperturbed;
  if (std::abs(o(0, 0)) <= kRankTolerance)
    throw GroundOverlapVanishing("solved ground state has no weight on the reference state");
  Eigen::MatrixXcd x(n, n);
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= n; ++k) x(i - 1, k - 1) = o(i, k) - o(i, 0) / o(0, 0) * o(0, k);
  return x;
}

Eigen::MatrixXcd step3_correction(const Eigen::MatrixXcd& modified_overlap) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(modified_overlap,
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < kRankTolerance)
    throw RankDeficient("modified 1QP overlap is rank deficient");
  // Polar factor X (X^dag X)^{-1/2} = U V^dag: the pseudo-inverse square root
  // collapses the singular values to one.
  return svd.matrixU() * svd.matrixV().adjoint();
}

Effective1QP step4_effective(const Eigen::MatrixXcd& rotated_ham,
                             const Eigen::MatrixXcd& correction, double gs_energy,
                             std::vector<Coord> site_coords) {
  const int n = static_cast<int>(correction.rows());
  const Eigen::MatrixXcd h1 = rotated_ham.bottomRightCorner(n, n);
  Effective1QP eff;
  eff.matrix = correction.adjoint() * h1 * correction -
               gs_energy * Eigen::MatrixXcd::Identity(n, n);
  hermitize(eff.matrix);
  eff.site_coords = std::move(site_coords);
  eff.gs_energy = gs_energy;
  return eff;
}

Effective1QP pcat_effective(const StateVector& gs, std::span<const StateVector> one_qp,
                            const PauliSum& h, const ClusterGraph& graph) {
  const SubspaceMatrices m = assemble_matrices(gs, one_qp, h, unperturbed_states(graph));
  const OrthoResult ortho = step1_orthonormalize(m);
  const Eigen::MatrixXcd x = step2_modified_overlap(ortho.rotated);
  const Eigen::MatrixXcd v = step3_correction(x);
  return step4_effective(ortho.rotated.ham, v, ortho.gs_energy, graph.sites);
}

Effective1QP sw_effective(const StateVector& gs, std::span<const StateVector> one_qp,
                          const PauliSum& h, const ClusterGraph& graph) {
  const int n = static_cast<int>(one_qp.size());
  const SubspaceMatrices m = assemble_matrices(gs, one_qp, h, unperturbed_states(graph));
  const OrthoResult ortho = step1_orthonormalize(m);
  const Eigen::MatrixXcd x = ortho.rotated.overlap_unperturbed.bottomRightCorner(n, n);
  const Eigen::MatrixXcd v = step3_correction(x);
  return step4_effective(ortho.rotated.ham, v, ortho.gs_energy, graph.sites);
}

Effective1QP transpose_effective(const Effective1QP& eff) {
  Effective1QP out = eff;
  for (Coord& c : out.site_coords) std::swap(c.x, c.y);
  return out;
}

}  // namespace qpd
