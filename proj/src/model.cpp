#include "qpd/model.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qpd {

std::string ClusterGraph::key() const {
  if (lattice == Lattice::Chain) return "chain-" + std::to_string(lm);
  return "square-" + std::to_string(lm) + "x" + std::to_string(ln);
}

namespace {

ClusterGraph build_rect(Lattice tag, int lm, int ln) {
  if (lm < 1 || ln < 1) throw std::invalid_argument("cluster extents must be positive");
  ClusterGraph g;
  g.lattice = tag;
  g.lm = lm;
  g.ln = ln;
  g.sites.reserve(static_cast<std::size_t>(lm) * ln);
  for (int x = 0; x < lm; ++x)
    for (int y = 0; y < ln; ++y) g.sites.push_back({x, y});
  const auto idx = [ln](int x, int y) { return x * ln + y; };
  for (int x = 0; x < lm; ++x)
    for (int y = 0; y < ln; ++y) {
      if (x + 1 < lm) g.bonds.emplace_back(idx(x, y), idx(x + 1, y));
      if (y + 1 < ln) g.bonds.emplace_back(idx(x, y), idx(x, y + 1));
    }
  return g;
}

}  // namespace

ClusterGraph make_chain(int length) { return build_rect(Lattice::Chain, length, 1); }

ClusterGraph make_rectangle(int lm, int ln) { return build_rect(Lattice::Square, lm, ln); }

ClusterGraph disconnected_union(const ClusterGraph& a, const ClusterGraph& b) {
  ClusterGraph g;
  g.lattice = a.lattice;
  g.lm = a.lm + 2 + b.lm;
  g.ln = std::max(a.ln, b.ln);
  g.sites = a.sites;
  const int offset = a.num_sites();
  const int shift = a.lm + 2;
  for (const Coord& c : b.sites) g.sites.push_back({c.x + shift, c.y});
  g.bonds = a.bonds;
  for (const auto& [i, j] : b.bonds) g.bonds.emplace_back(i + offset, j + offset);
  return g;
}

PauliSum build_hamiltonian(const ClusterGraph& graph, const ModelParams& params) {
  PauliSum h;
  h.num_sites = graph.num_sites();
  for (int i = 0; i < h.num_sites; ++i)
    h.terms.push_back({-params.field_h, {{i, Axis::Z}}});
  if (params.field_hl != 0.0)
    for (int i = 0; i < h.num_sites; ++i)
      h.terms.push_back({-params.field_hl, {{i, Axis::X}}});
  for (const auto& [i, j] : graph.bonds)
    h.terms.push_back({-params.coupling_j, {{i, Axis::X}, {j, Axis::X}}});
  return h;
}

PauliTerm parity_operator(int num_sites) {
  PauliTerm p;
  p.coefficient = 1.0;
  for (int i = 0; i < num_sites; ++i) p.factors.push_back({i, Axis::Z});
  return p;
}

std::vector<ClusterGraph> enumerate_clusters(Lattice lattice, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  std::vector<ClusterGraph> out;
  if (lattice == Lattice::Chain) {
    for (int l = 1; l <= n_max; ++l) out.push_back(make_chain(l));
    return out;
  }
  std::vector<std::pair<int, int>> extents;
  for (int lm = 1; lm <= n_max; ++lm)
    for (int ln = 1; lm * ln <= n_max; ++ln) extents.emplace_back(lm, ln);
  std::sort(extents.begin(), extents.end(), [](const auto& a, const auto& b) {
    const int na = a.first * a.second, nb = b.first * b.second;
    return na != nb ? na < nb : a < b;
  });
  for (const auto& [lm, ln] : extents) out.push_back(make_rectangle(lm, ln));
  return out;
}

std::vector<ClusterGraph> solve_shapes(Lattice lattice, int n_max) {
  std::vector<ClusterGraph> out;
  for (ClusterGraph& g : enumerate_clusters(lattice, n_max))
    if (g.lm <= g.ln) out.push_back(std::move(g));
  return out;
}

UnperturbedBasis unperturbed_states(const ClusterGraph& graph) {
  const int n = graph.num_sites();
  UnperturbedBasis basis;
  basis.gs = basis_state_index(n, 0);
  basis.one_qp.reserve(n);
  for (int i = 0; i < n; ++i)
    basis.one_qp.push_back(basis_state_index(n, std::uint64_t{1} << i));
  return basis;
}

namespace {

using CoordMap = std::function<Coord(const Coord&)>;

std::vector<std::vector<int>> point_group_permutations(const ClusterGraph& g) {
  const int lm = g.lm, ln = g.ln;
  std::vector<CoordMap> ops;
  ops.push_back([](const Coord& c) { return c; });
  ops.push_back([lm](const Coord& c) { return Coord{lm - 1 - c.x, c.y}; });
  ops.push_back([ln](const Coord& c) { return Coord{c.x, ln - 1 - c.y}; });
  ops.push_back([lm, ln](const Coord& c) { return Coord{lm - 1 - c.x, ln - 1 - c.y}; });
  if (g.lattice == Lattice::Square && lm == ln) {
    const std::size_t base = ops.size();
    for (std::size_t i = 0; i < base; ++i) {
      CoordMap prev = ops[i];
      ops.push_back([prev](const Coord& c) {
        const Coord t = prev(c);
        return Coord{t.y, t.x};
      });
    }
  }
  std::map<std::pair<int, int>, int> index;
  for (int i = 0; i < g.num_sites(); ++i) index[{g.sites[i].x, g.sites[i].y}] = i;
  std::vector<std::vector<int>> perms;
  for (const CoordMap& op : ops) {
    std::vector<int> perm(g.sites.size());
    for (int i = 0; i < g.num_sites(); ++i) {
      const Coord t = op(g.sites[i]);
      perm[i] = index.at({t.x, t.y});
    }
    perms.push_back(std::move(perm));
  }
  return perms;
}

std::vector<int> dense_classes(const std::vector<int>& representative, int* n_classes) {
  std::map<int, int> remap;
  std::vector<int> out(representative.size());
  for (std::size_t i = 0; i < representative.size(); ++i) {
    const auto it = remap.try_emplace(representative[i], static_cast<int>(remap.size())).first;
    out[i] = it->second;
  }
  *n_classes = static_cast<int>(remap.size());
  return out;
}

}  // namespace

SymmetryClasses symmetry_classes(const ClusterGraph& graph) {
  const auto perms = point_group_permutations(graph);
  SymmetryClasses sc;

  std::vector<int> site_rep(graph.sites.size());
  for (int i = 0; i < graph.num_sites(); ++i) {
    int rep = i;
    for (const auto& p : perms) rep = std::min(rep, p[i]);
    site_rep[i] = rep;
  }
  sc.site_class = dense_classes(site_rep, &sc.n_site_classes);

  std::map<std::pair<int, int>, int> bond_pos;
  for (std::size_t b = 0; b < graph.bonds.size(); ++b) bond_pos[graph.bonds[b]] = static_cast<int>(b);
  std::vector<int> bond_rep(graph.bonds.size());
  for (std::size_t b = 0; b < graph.bonds.size(); ++b) {
    std::pair<int, int> best = graph.bonds[b];
    for (const auto& p : perms) {
      std::pair<int, int> img{p[graph.bonds[b].first], p[graph.bonds[b].second]};
      if (img.first > img.second) std::swap(img.first, img.second);
      best = std::min(best, img);
    }
    bond_rep[b] = bond_pos.at(best);
  }
  sc.bond_class = dense_classes(bond_rep, &sc.n_bond_classes);
  return sc;
}

SymmetryClasses untied_classes(const ClusterGraph& graph) {
  SymmetryClasses sc;
  sc.site_class.resize(graph.sites.size());
  std::iota(sc.site_class.begin(), sc.site_class.end(), 0);
  sc.bond_class.resize(graph.bonds.size());
  std::iota(sc.bond_class.begin(), sc.bond_class.end(), 0);
  sc.n_site_classes = graph.num_sites();
  sc.n_bond_classes = static_cast<int>(graph.bonds.size());
  return sc;
}

}  // namespace qpd
