#pragma once

#include <vector>

#include "qpd/model.hpp"
#include "qpd/statevector.hpp"

namespace qpd {

enum class LayerPolicy { HalfN, FullN };

// ceil(N/2) or N layers.
int layer_count(int n_sites, LayerPolicy policy);

// Flat angle storage. Per layer the order is: one theta^XX per bond class,
// one theta^X per site class, one theta^Z per site class. With tying disabled
// every bond/site is its own class.
struct HvaParams {
  int n_layers = 0;
  bool tied = true;
  std::vector<double> angles;
};

int hva_param_count(const ClusterGraph& graph, int n_layers, bool tied);
HvaParams zero_params(const ClusterGraph& graph, int n_layers, bool tied = true);

// One ansatz layer applies exp(i sum theta^XX XX), then exp(i sum theta^X X),
// then exp(i sum theta^Z Z); layers are applied innermost (l = 1) first.
void apply_ansatz(StateVector& state, const ClusterGraph& graph, const HvaParams& params);

}  // namespace qpd
