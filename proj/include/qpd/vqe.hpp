#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qpd/hva.hpp"
#include "qpd/model.hpp"
#include "qpd/pauli.hpp"
#include "qpd/statevector.hpp"

namespace qpd {

// Var1QP / Tr1QP optimize the 1QP sector with a separate stage-1 ground-state
// unitary; the GS kinds decouple both sectors with a single unitary.
enum class CostKind { Var1QP, VarGS1QP, Tr1QP, TrGS1QP };

bool cost_is_variance(CostKind k);
bool cost_single_unitary(CostKind k);
std::string cost_name(CostKind k);
CostKind cost_from_name(const std::string& name);

enum class InitPolicy { NearZero, GroundStateWarmStart, Auto };
std::string init_name(InitPolicy p);
InitPolicy init_from_name(const std::string& name);

struct OptimizerConfig {
  double grad_tolerance = 1e-8;
  int max_iterations = 2000;
  double fd_step = 1e-6;
  int restart_period = 0;  // 0: use the parameter count
  InitPolicy init = InitPolicy::GroundStateWarmStart;
  std::uint64_t seed = 1;
  bool tied = true;
  // Line search (the backtracking Armijo defaults).
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  double initial_step = 1.0;
};

struct IterRecord {
  int stage = 0;  // 1 = ground-state energy, 2 = subspace cost
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};
using IterSink = std::function<void(const IterRecord&, std::span<const double> angles)>;

// Uniform angles in [-1e-3, 1e-3]; hand-rolled from the raw generator so runs
// are reproducible bit for bit across standard libraries.
std::vector<double> near_zero_angles(std::size_t count, std::uint64_t seed);

double eval_cost(const ClusterGraph& graph, const ModelParams& params, const HvaParams& hva,
                 CostKind kind);
double eval_gs_energy(const ClusterGraph& graph, const ModelParams& params, const HvaParams& hva);

// Cost on an explicit (possibly rotated) basis instead of the unperturbed one.
double eval_cost_on_basis(const ClusterGraph& graph, const PauliSum& h, const HvaParams& hva,
                          CostKind kind, const StateVector& gs,
                          std::span<const StateVector> one_qp);

// Central finite differences per tied-parameter coordinate.
std::vector<double> cost_gradient(const ClusterGraph& graph, const ModelParams& params,
                                  const HvaParams& hva, CostKind kind, double fd_step = 1e-6);

// Generic FD gradient used by the optimizer; evaluations run in parallel.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double step);

struct CgProblem {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

struct CgResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> history;  // accepted costs, monotone non-increasing
  bool converged = false;       // gradient norm fell below tolerance
  int iterations = 0;
};

// Polak-Ribiere+ with backtracking Armijo line search; restarts to steepest
// descent on schedule and on non-descent directions. Throws NonFinite if the
// objective or gradient stops being finite.
CgResult minimize_cg(const CgProblem& problem, std::vector<double> initial,
                     const OptimizerConfig& config, const IterSink& sink = {}, int stage = 0);

struct VqeSolution {
  CostKind kind = CostKind::VarGS1QP;
  HvaParams params_gs;        // stage-1 result
  HvaParams params_subspace;  // stage-2 result
  double stage1_energy = 0.0;
  double final_cost = 0.0;
  std::vector<double> cost_history;
  bool converged = false;
  int iterations = 0;
  bool near_zero_fallback = false;  // Auto init re-ran stage 2 from near zero
};

// Stage 1 minimizes the ground-state energy from near-zero angles; stage 2
// optimizes the requested cost from the warm start or from near zero.
VqeSolution solve_cluster(const ClusterGraph& graph, const ModelParams& params, CostKind kind,
                          LayerPolicy layers, const OptimizerConfig& config,
                          const IterSink& sink = {});

struct PreparedStates {
  StateVector gs;
  std::vector<StateVector> one_qp;
};
PreparedStates prepared_states(const ClusterGraph& graph, const VqeSolution& solution);

}  // namespace qpd
