#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpd/ed.hpp"
#include "qpd/nlce.hpp"
#include "qpd/vqe.hpp"

namespace qpd {

using json = nlohmann::ordered_json;

enum class SolverKind { Ed, Vqe, Mixed };
std::string solver_name(SolverKind s);
SolverKind solver_from_name(const std::string& name);

std::string lattice_name(Lattice l);
Lattice lattice_from_name(const std::string& name);

struct RunConfig {
  Lattice lattice = Lattice::Chain;
  double coupling_j = 1.0;
  double field_hl = 0.0;
  int n_max = 8;
  SolverKind solver = SolverKind::Ed;
  int mixed_vqe_min_sites = 9;  // Mixed: clusters at least this large go to VQE
  CostKind cost = CostKind::VarGS1QP;
  LayerPolicy layers = LayerPolicy::HalfN;
  OptimizerConfig optimizer;  // init policy, seed, tying and CG knobs live here
  bool sw_baseline = false;   // additionally emit the two-block dispersion (ED only)
  int kpoints_1d = 201;
  int kpoints_2d = 67;  // per path segment
  bool full_grid = false;
  int full_grid_points = 33;
  std::string cache_dir;  // empty: caching off
  std::string out_dir;    // empty: no files written
  int workers = 1;
  EdOptions ed;
  bool continuation = false;  // ED fallback when overlap selection is ambiguous
};

void validate(const RunConfig& config);
json config_json(const RunConfig& config);
std::string run_hash(const RunConfig& config);

// Content address of one cluster solve: model + solver + (for VQE) every knob
// that can change the optimum. The seed enters only the VQE hash.
std::string cluster_solve_hash(const RunConfig& config, const std::string& solver_used,
                               const ClusterGraph& graph);

struct ClusterRecord {
  std::string key;
  std::string solver;  // "ed", "vqe" or "sw"
  std::string hash;
  Effective1QP eff;
  bool converged = true;
  bool from_cache = false;
  double final_cost = 0.0;   // stage-2 cost (VQE)
  int iterations = 0;        // accepted CG steps (VQE)
  double min_weight = 1.0;   // smallest 1QP projection weight (ED)
  bool near_zero_fallback = false;
  json hva;  // optimized angles and their layout (VQE solves)
};

struct PipelineResult {
  DispersionCurve dispersion;
  std::optional<DispersionCurve> sw_dispersion;
  std::vector<ClusterRecord> clusters;
  bool all_converged = true;
  json provenance;
};

// The full run: enumerate clusters, solve each (worker pool, cache-aware),
// post-process, assemble the thermodynamic-limit dispersion, write outputs.
PipelineResult run_pipeline(const RunConfig& config);

// Which solver a cluster gets under this config ("ed" or "vqe").
std::string solver_for(const RunConfig& config, const ClusterGraph& graph);

// One cache-aware cluster solve, including result-file and log output. When
// sw_out is non-null (ED solves only) the two-block baseline is produced too.
ClusterRecord solve_one_cluster(const RunConfig& config, const ClusterGraph& graph,
                                ClusterRecord* sw_out = nullptr);

// Parse "chain-8" / "square-3x4" back into a cluster.
ClusterGraph cluster_from_key(const std::string& key);

json effective_to_json(const Effective1QP& eff);
Effective1QP effective_from_json(const json& j);
std::uint64_t fnv1a(std::string_view data);

void write_dispersion_csv(std::ostream& os, const DispersionCurve& curve,
                          const std::string& hash);
json dispersion_to_json(const DispersionCurve& curve);

std::optional<Effective1QP> cache_load(const std::string& dir, const std::string& key,
                                       const std::string& hash);
void cache_store(const std::string& dir, const std::string& key, const std::string& hash,
                 const Effective1QP& eff, const json& provenance);

// Projection of the optimized subspace onto exact eigenstates, recorded at
// checkpoint iterations: the energy-decomposition diagnostic for trapped runs.
struct ProjectionRecord {
  int iter = 0;
  int state = 0;
  double energy = 0.0;
  double norm = 0.0;        // |P_VQE |Psi_n>|
  int dominant_sector = 0;  // quasi-particle number with the largest weight
};
std::vector<ProjectionRecord> diagnose_projections(const ClusterGraph& graph,
                                                   const ModelParams& params, CostKind kind,
                                                   LayerPolicy layers,
                                                   const OptimizerConfig& config, int stride,
                                                   int max_states,
                                                   VqeSolution* solution_out = nullptr);

}  // namespace qpd
