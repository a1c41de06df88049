#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "qpd/errors.hpp"
#include "qpd/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qpd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNonConverged = 3;  // completed, but a cluster solve did not converge

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_clusters(const RunConfig& config) {
  std::printf("%-12s %6s %6s %12s %12s %10s\n", "key", "sites", "bonds", "site-classes",
              "bond-classes", "solver");
  for (const ClusterGraph& g : enumerate_clusters(config.lattice, config.n_max)) {
    const SymmetryClasses sc = symmetry_classes(g);
    std::printf("%-12s %6d %6zu %12d %12d %10s\n", g.key().c_str(), g.num_sites(),
                g.bonds.size(), sc.n_site_classes, sc.n_bond_classes,
                solver_for(config, g).c_str());
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& config, const std::string& key) {
  const ClusterGraph graph = cluster_from_key(key);
  ClusterRecord sw;
  ClusterRecord rec = solve_one_cluster(config, graph, config.sw_baseline ? &sw : nullptr);
  std::printf("cluster   %s  (%s%s)\n", rec.key.c_str(), rec.solver.c_str(),
              rec.from_cache ? ", cached" : "");
  std::printf("E0        %s\n", fmt12(rec.eff.gs_energy).c_str());
  if (rec.solver == "vqe") {
    std::printf("cost      %s after %d iterations (%s)\n", fmt12(rec.final_cost).c_str(),
                rec.iterations, rec.converged ? "converged" : "not converged");
    if (rec.near_zero_fallback) std::printf("init      near-zero fallback engaged\n");
  } else {
    std::printf("min 1QP projection weight %s\n", fmt12(rec.min_weight).c_str());
  }
  const Eigen::VectorXd evs =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rec.eff.matrix).eigenvalues();
  std::ostringstream line;
  for (int i = 0; i < evs.size(); ++i) line << (i ? " " : "") << fmt12(evs(i));
  std::printf("1QP levels %s\n", line.str().c_str());
  return rec.converged ? kExitOk : kExitNonConverged;
}

int cmd_disperse(const RunConfig& config) {
  const PipelineResult result = run_pipeline(config);
  int solved = 0, cached = 0;
  for (const ClusterRecord& r : result.clusters) (r.from_cache ? cached : solved) += 1;
  std::printf("clusters  %zu (%d solved, %d cached)\n", result.clusters.size(), solved, cached);
  const DispersionCurve& c = result.dispersion;
  double lo = c.omega[0], hi = c.omega[0];
  for (double w : c.omega) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  std::printf("dispersion order %d, %zu k-points, omega in [%s, %s]\n", c.order,
              c.omega.size(), fmt12(lo).c_str(), fmt12(hi).c_str());
  if (!config.out_dir.empty())
    std::printf("wrote %s/dispersion.{csv,json}\n", config.out_dir.c_str());
  if (!result.all_converged) {
    std::fprintf(stderr, "[qpd] warning: at least one cluster did not converge\n");
    return kExitNonConverged;
  }
  return kExitOk;
}

int cmd_compare(RunConfig config, const std::vector<std::string>& with) {
  const std::set<std::string> variants(with.begin(), with.end());
  for (const std::string& v : variants)
    if (v != "ed" && v != "vqe" && v != "sw")
      throw std::invalid_argument("--with accepts ed, vqe, sw");

  std::map<std::string, DispersionCurve> curves;
  bool all_converged = true;
  if (variants.count("ed") || variants.count("sw")) {
    RunConfig ed_config = config;
    ed_config.solver = SolverKind::Ed;
    ed_config.sw_baseline = variants.count("sw") > 0;
    PipelineResult r = run_pipeline(ed_config);
    if (variants.count("ed")) curves["ed"] = r.dispersion;
    if (variants.count("sw")) curves["sw"] = *r.sw_dispersion;
    all_converged &= r.all_converged;
  }
  if (variants.count("vqe")) {
    RunConfig vqe_config = config;
    vqe_config.solver = SolverKind::Vqe;
    vqe_config.sw_baseline = false;
    PipelineResult r = run_pipeline(vqe_config);
    curves["vqe"] = r.dispersion;
    all_converged &= r.all_converged;
  }

  const DispersionCurve& first = curves.begin()->second;
  std::ostringstream header;
  header << (first.kdim == 1 ? "k" : "kx,ky");
  for (const auto& [name, curve] : curves) header << ",omega_" << name;
  std::ostringstream body;
  for (std::size_t i = 0; i < first.omega.size(); ++i) {
    body << fmt12(first.momenta[i].kx);
    if (first.kdim == 2) body << ',' << fmt12(first.momenta[i].ky);
    for (const auto& [name, curve] : curves) body << ',' << fmt12(curve.omega[i]);
    body << '\n';
  }
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    std::ofstream csv(fs::path(config.out_dir) / "compare.csv");
    csv << "# qpd compare, hash=" << run_hash(config) << "\n" << header.str() << "\n" << body.str();
    std::printf("wrote %s/compare.csv\n", config.out_dir.c_str());
  } else {
    std::cout << header.str() << "\n" << body.str();
  }
  for (const auto& [name, curve] : curves) {
    double lo = curve.omega[0], hi = curve.omega[0];
    for (double w : curve.omega) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    std::printf("%-4s omega in [%s, %s]\n", name.c_str(), fmt12(lo).c_str(), fmt12(hi).c_str());
  }
  return all_converged ? kExitOk : kExitNonConverged;
}

int cmd_diagnose(const RunConfig& config, const std::string& key, int stride, int states) {
  const ClusterGraph graph = cluster_from_key(key);
  const ModelParams params{config.coupling_j, 1.0, config.field_hl};
  VqeSolution sol;
  const std::vector<ProjectionRecord> recs = diagnose_projections(
      graph, params, config.cost, config.layers, config.optimizer, stride, states, &sol);

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    std::ofstream out(fs::path(config.out_dir) / "diagnose.ndjson");
    for (const ProjectionRecord& r : recs)
      out << "{\"iter\":" << r.iter << ",\"state\":" << r.state << ",\"energy\":"
          << fmt12(r.energy) << ",\"norm\":" << fmt12(r.norm) << ",\"sector\":"
          << r.dominant_sector << "}\n";
    std::printf("wrote %s/diagnose.ndjson (%zu records)\n", config.out_dir.c_str(), recs.size());
  }

  std::printf("final cost %s after %d iterations (%s)\n", fmt12(sol.final_cost).c_str(),
              sol.iterations, sol.converged ? "converged" : "not converged");
  const int last_iter = recs.empty() ? 0 : recs.back().iter;
  std::printf("projection norms at iteration %d (states with |P psi| > 0.25):\n", last_iter);
  std::printf("%6s %4s %12s %8s\n", "state", "nQP", "energy", "norm");
  for (const ProjectionRecord& r : recs)
    if (r.iter == last_iter && r.norm > 0.25)
      std::printf("%6d %4d %12s %8.4f\n", r.state, r.dominant_sector,
                  fmt12(r.energy).c_str(), r.norm);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qpd: one quasi-particle dispersions of the transverse-field Ising model in the\n"
      "thermodynamic limit, via rectangular-cluster NLCE with exact-diagonalization or\n"
      "simulated-VQE cluster solvers and cluster-additive post-processing."};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);

  RunConfig config;
  std::string lattice = "chain", solver = "ed", cost = "var-gs1qp", layers = "halfn",
              init = "warm-start";
  bool untied = false;

  app.add_option("--lattice", lattice, "Lattice: chain or square")
      ->check(CLI::IsMember({"chain", "square"}));
  app.add_option("--J", config.coupling_j, "Ising coupling (h = 1 is the energy unit)");
  app.add_option("--hl", config.field_hl, "Longitudinal field");
  app.add_option("--nmax", config.n_max, "Largest cluster size in the expansion");
  app.add_option("--solver", solver, "Cluster solver: ed, vqe or mixed")
      ->check(CLI::IsMember({"ed", "vqe", "mixed"}));
  app.add_option("--cost", cost, "VQE cost: var-1qp, var-gs1qp, tr-1qp, tr-gs1qp")
      ->check(CLI::IsMember({"var-1qp", "var-gs1qp", "tr-1qp", "tr-gs1qp"}));
  app.add_option("--layers", layers, "HVA depth: halfn (ceil N/2) or fulln")
      ->check(CLI::IsMember({"halfn", "fulln"}));
  app.add_option("--init", init, "Stage-2 start: warm-start, near-zero or auto")
      ->check(CLI::IsMember({"warm-start", "near-zero", "auto"}));
  app.add_option("--seed", config.optimizer.seed, "Seed for the near-zero angle draws");
  app.add_option("--out", config.out_dir, "Output directory");
  app.add_option("--cache", config.cache_dir, "Cluster result cache directory");
  app.add_option("--workers", config.workers, "Worker pool size for cluster solves");
  app.add_flag("--sw-baseline", config.sw_baseline,
               "Also emit the two-block (non-additive) baseline, ED solver only");
  app.add_flag("--untied", untied, "Disable symmetry tying of ansatz parameters");
  app.add_option("--mixed-min-sites", config.mixed_vqe_min_sites,
                 "Mixed solver: smallest cluster that goes to VQE");
  app.add_option("--grad-tol", config.optimizer.grad_tolerance, "CG gradient-norm stop");
  app.add_option("--max-iter", config.optimizer.max_iterations, "CG iteration budget");
  app.add_option("--fd-step", config.optimizer.fd_step, "Finite-difference step");
  app.add_option("--restart-period", config.optimizer.restart_period,
                 "CG restart period (0: parameter count)");
  app.add_option("--kpoints", config.kpoints_1d, "Momentum points for chain dispersions");
  app.add_option("--kpoints-2d", config.kpoints_2d, "Points per Gamma-X-M-Gamma segment");
  app.add_flag("--full-grid", config.full_grid, "Full-BZ grid instead of the 2D path");
  app.add_option("--full-grid-points", config.full_grid_points, "Full-grid points per axis");
  app.add_option("--dense-max", config.ed.dense_max_sites,
                 "Largest cluster solved by dense diagonalization");
  app.add_flag("--continuation", config.continuation,
               "ED: resolve ambiguous 1QP selection by coupling continuation");

  CLI::App* clusters = app.add_subcommand("clusters", "Enumerate the NLCE cluster set");
  CLI::App* solve = app.add_subcommand("solve", "Solve a single cluster");
  std::string cluster_key;
  solve->add_option("--cluster", cluster_key, "Cluster key, e.g. chain-8 or square-3x4")
      ->required();
  CLI::App* disperse = app.add_subcommand("disperse", "Run the full NLCE pipeline");
  CLI::App* compare =
      app.add_subcommand("compare", "Overlay dispersions from several solvers");
  std::vector<std::string> with{"ed", "vqe"};
  compare->add_option("--with", with, "Curves to produce: any of ed, vqe, sw")->delimiter(',');
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Track subspace projections onto exact eigenstates during a VQE solve");
  std::string diag_key;
  int diag_stride = 50;
  int diag_states = 256;
  diagnose->add_option("--cluster", diag_key, "Cluster key")->required();
  diagnose->add_option("--stride", diag_stride, "Checkpoint every this many iterations");
  diagnose->add_option("--states", diag_states, "Exact eigenstates to project onto");

  for (CLI::App* sub : {clusters, solve, disperse, compare, diagnose}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    config.lattice = lattice_from_name(lattice);
    config.solver = solver_from_name(solver);
    config.cost = cost_from_name(cost);
    config.layers = layers == "halfn" ? LayerPolicy::HalfN : LayerPolicy::FullN;
    config.optimizer.init = init_from_name(init);
    config.optimizer.tied = !untied;
    validate(config);

    if (clusters->parsed()) return cmd_clusters(config);
    if (solve->parsed()) return cmd_solve(config, cluster_key);
    if (disperse->parsed()) return cmd_disperse(config);
    if (compare->parsed()) return cmd_compare(config, with);
    if (diagnose->parsed()) return cmd_diagnose(config, diag_key, diag_stride, diag_states);
  } catch (const std::exception& err) {
    std::cerr << "[qpd] error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
