#include "qpd/hva.hpp"

#include <stdexcept>

namespace qpd {

int layer_count(int n_sites, LayerPolicy policy) {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
  return policy == LayerPolicy::HalfN ? (n_sites + 1) / 2 : n_sites;
}

namespace {

SymmetryClasses classes_for(const ClusterGraph& graph, bool tied) {
  return tied ? symmetry_classes(graph) : untied_classes(graph);
}

}  // namespace

int hva_param_count(const ClusterGraph& graph, int n_layers, bool tied) {
  const SymmetryClasses sc = classes_for(graph, tied);
  return n_layers * (sc.n_bond_classes + 2 * sc.n_site_classes);
}

HvaParams zero_params(const ClusterGraph& graph, int n_layers, bool tied) {
  HvaParams p;
  p.n_layers = n_layers;
  p.tied = tied;
  p.angles.assign(hva_param_count(graph, n_layers, tied), 0.0);
  return p;
}

void apply_ansatz(StateVector& state, const ClusterGraph& graph, const HvaParams& params) {
  if (state.n_sites != graph.num_sites())
    throw std::invalid_argument("state and graph site counts differ");
  const SymmetryClasses sc = classes_for(graph, params.tied);
  const int per_layer = sc.n_bond_classes + 2 * sc.n_site_classes;
  if (static_cast<int>(params.angles.size()) != params.n_layers * per_layer)
    throw std::invalid_argument("angle count does not match the parameter layout");

  std::vector<ExpTerm> xx_block(graph.bonds.size());
  for (std::size_t b = 0; b < graph.bonds.size(); ++b)
    xx_block[b].term = {1.0, {{graph.bonds[b].first, Axis::X}, {graph.bonds[b].second, Axis::X}}};
  std::vector<ExpTerm> x_block(graph.sites.size());
  std::vector<ExpTerm> z_block(graph.sites.size());
  for (int i = 0; i < graph.num_sites(); ++i) {
    x_block[i].term = {1.0, {{i, Axis::X}}};
    z_block[i].term = {1.0, {{i, Axis::Z}}};
  }

  for (int l = 0; l < params.n_layers; ++l) {
    const double* layer = params.angles.data() + static_cast<std::size_t>(l) * per_layer;
    const double* th_xx = layer;
    const double* th_x = layer + sc.n_bond_classes;
    const double* th_z = th_x + sc.n_site_classes;
    for (std::size_t b = 0; b < graph.bonds.size(); ++b)
      xx_block[b].angle = th_xx[sc.bond_class[b]];
    for (int i = 0; i < graph.num_sites(); ++i) {
      x_block[i].angle = th_x[sc.site_class[i]];
      z_block[i].angle = th_z[sc.site_class[i]];
    }
    apply_exp_block(state, xx_block);
    apply_exp_block(state, x_block);
    apply_exp_block(state, z_block);
  }
}

}  // namespace qpd
