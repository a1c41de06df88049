#pragma once

// Dense-matrix oracles for the unit tests. Everything here is built the slow,
// obviously-correct way (explicit 2x2 Pauli matrices and Kronecker products)
// so it stays independent of the kernel implementations under test.

#include <Eigen/Dense>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "qpd/pauli.hpp"
#include "qpd/statevector.hpp"

namespace oracle {

using qpd::cplx;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix pauli_2x2(qpd::Axis axis) {
  Matrix m(2, 2);
  switch (axis) {
    case qpd::Axis::X: m << 0, 1, 1, 0; break;
    case qpd::Axis::Y: m << 0, cplx{0, -1}, cplx{0, 1}, 0; break;
    case qpd::Axis::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Site i owns bit i of the amplitude index, so site n-1 is the leftmost
// Kronecker factor.
inline Matrix term_matrix(const qpd::PauliTerm& term, int n_sites) {
  std::vector<Matrix> site(n_sites, Matrix::Identity(2, 2));
  for (const auto& f : term.factors) site[f.site] = pauli_2x2(f.axis);
  Matrix acc = Matrix::Identity(1, 1);
  for (int s = 0; s < n_sites; ++s) acc = kron(site[s], acc);
  return term.coefficient * acc;
}

inline Matrix dense_matrix(const qpd::PauliSum& op) {
  const Eigen::Index dim = Eigen::Index{1} << op.num_sites;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : op.terms) m += term_matrix(t, op.num_sites);
  return m;
}

inline Vector to_eigen(const qpd::StateVector& s) {
  return Eigen::Map<const Vector>(s.amp.data(), static_cast<Eigen::Index>(s.dim()));
}

inline qpd::StateVector from_eigen(int n_sites, const Vector& v) {
  qpd::StateVector s = qpd::zero_state(n_sites);
  Eigen::Map<Vector>(s.amp.data(), v.size()) = v;
  return s;
}

// Dense matrix exponential of a commuting block generator i * sum theta_t P_t.
inline Matrix block_exponential(std::span<const qpd::ExpTerm> block, int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Matrix gen = Matrix::Zero(dim, dim);
  for (const auto& et : block) gen += et.angle * term_matrix(et.term, n_sites);
  return (cplx{0, 1} * gen).exp();
}

inline qpd::PauliSum random_pauli_sum(int n_sites, int n_terms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_int_distribution<int> nsup(1, std::min(3, n_sites));
  qpd::PauliSum sum;
  sum.num_sites = n_sites;
  for (int t = 0; t < n_terms; ++t) {
    qpd::PauliTerm term;
    term.coefficient = coeff(rng);
    std::vector<int> sites(n_sites);
    std::iota(sites.begin(), sites.end(), 0);
    std::shuffle(sites.begin(), sites.end(), rng);
    const int support = nsup(rng);
    for (int s = 0; s < support; ++s)
      term.factors.push_back({sites[s], static_cast<qpd::Axis>(axis(rng))});
    sum.terms.push_back(std::move(term));
  }
  return sum;
}

}  // namespace oracle
