#include "qpd/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qpd/errors.hpp"

namespace qpd {

namespace fs = std::filesystem;

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::Ed: return "ed";
    case SolverKind::Vqe: return "vqe";
    case SolverKind::Mixed: return "mixed";
  }
  return "?";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "ed") return SolverKind::Ed;
  if (name == "vqe") return SolverKind::Vqe;
  if (name == "mixed") return SolverKind::Mixed;
  throw std::invalid_argument("unknown solver: " + name);
}

std::string lattice_name(Lattice l) { return l == Lattice::Chain ? "chain" : "square"; }

Lattice lattice_from_name(const std::string& name) {
  if (name == "chain") return Lattice::Chain;
  if (name == "square") return Lattice::Square;
  throw std::invalid_argument("unknown lattice: " + name);
}

void validate(const RunConfig& c) {
  if (c.coupling_j < 0) throw std::invalid_argument("J must be non-negative");
  if (c.n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (c.n_max > max_sites())
    throw std::invalid_argument("n_max exceeds the configured qubit cap");
  if (c.sw_baseline && c.solver != SolverKind::Ed)
    throw std::invalid_argument("the two-block baseline needs exact eigenstates (solver ed)");
  if (c.workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (c.kpoints_1d < 2 || c.kpoints_2d < 2)
    throw std::invalid_argument("momentum grids need at least two points");
  if (c.optimizer.fd_step <= 0 || c.optimizer.grad_tolerance <= 0 ||
      c.optimizer.max_iterations <= 0)
    throw std::invalid_argument("optimizer tolerances and budgets must be positive");
  if (c.mixed_vqe_min_sites < 1)
    throw std::invalid_argument("mixed-solver threshold must be positive");
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

json config_json(const RunConfig& c) {
  json j;
  j["lattice"] = lattice_name(c.lattice);
  j["J"] = c.coupling_j;
  j["h"] = 1.0;
  j["h_l"] = c.field_hl;
  j["n_max"] = c.n_max;
  j["solver"] = solver_name(c.solver);
  j["mixed_vqe_min_sites"] = c.mixed_vqe_min_sites;
  j["cost"] = cost_name(c.cost);
  j["layers"] = c.layers == LayerPolicy::HalfN ? "halfn" : "fulln";
  j["init"] = init_name(c.optimizer.init);
  j["seed"] = c.optimizer.seed;
  j["tied"] = c.optimizer.tied;
  j["grad_tolerance"] = c.optimizer.grad_tolerance;
  j["max_iterations"] = c.optimizer.max_iterations;
  j["fd_step"] = c.optimizer.fd_step;
  j["restart_period"] = c.optimizer.restart_period;
  j["sw_baseline"] = c.sw_baseline;
  j["kpoints_1d"] = c.kpoints_1d;
  j["kpoints_2d"] = c.kpoints_2d;
  j["full_grid"] = c.full_grid;
  j["full_grid_points"] = c.full_grid_points;
  j["workers"] = c.workers;
  j["ed_dense_max_sites"] = c.ed.dense_max_sites;
  j["continuation"] = c.continuation;
  return j;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex16(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string run_hash(const RunConfig& c) { return hex16(fnv1a(config_json(c).dump())); }

std::string cluster_solve_hash(const RunConfig& c, const std::string& solver_used,
                               const ClusterGraph& graph) {
  std::ostringstream key;
  key << "key=" << graph.key() << ";J=" << fmt(c.coupling_j) << ";h=1;hl=" << fmt(c.field_hl)
      << ";solver=" << solver_used;
  if (solver_used == "ed" || solver_used == "sw") {
    key << ";dense_max=" << c.ed.dense_max_sites << ";tol=" << fmt(c.ed.tol)
        << ";continuation=" << c.continuation;
  } else {
    const OptimizerConfig& o = c.optimizer;
    key << ";cost=" << cost_name(c.cost)
        << ";layers=" << (c.layers == LayerPolicy::HalfN ? "halfn" : "fulln")
        << ";init=" << init_name(o.init) << ";seed=" << o.seed << ";tied=" << o.tied
        << ";gtol=" << fmt(o.grad_tolerance) << ";maxit=" << o.max_iterations
        << ";fd=" << fmt(o.fd_step) << ";restart=" << o.restart_period
        << ";armijo=" << fmt(o.armijo_slope) << ";shrink=" << fmt(o.backtrack_factor)
        << ";step0=" << fmt(o.initial_step);
  }
  return hex16(fnv1a(key.str()));
}

json effective_to_json(const Effective1QP& eff) {
  json j;
  j["gs_energy"] = eff.gs_energy;
  json coords = json::array();
  for (const Coord& c : eff.site_coords) coords.push_back({c.x, c.y});
  j["coords"] = std::move(coords);
  json re = json::array(), im = json::array();
  for (int r = 0; r < eff.size(); ++r) {
    json row_re = json::array(), row_im = json::array();
    for (int col = 0; col < eff.size(); ++col) {
      row_re.push_back(eff.matrix(r, col).real());
      row_im.push_back(eff.matrix(r, col).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  j["matrix_re"] = std::move(re);
  j["matrix_im"] = std::move(im);
  return j;
}

Effective1QP effective_from_json(const json& j) {
  Effective1QP eff;
  eff.gs_energy = j.at("gs_energy").get<double>();
  for (const auto& c : j.at("coords"))
    eff.site_coords.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  const auto& re = j.at("matrix_re");
  const auto& im = j.at("matrix_im");
  const int n = static_cast<int>(re.size());
  eff.matrix.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col)
      eff.matrix(r, col) = cplx{re.at(r).at(col).get<double>(), im.at(r).at(col).get<double>()};
  return eff;
}

namespace {

std::string cache_path(const std::string& dir, const std::string& key, const std::string& hash) {
  return (fs::path(dir) / (key + "-" + hash + ".json")).string();
}

}  // namespace

std::optional<Effective1QP> cache_load(const std::string& dir, const std::string& key,
                                       const std::string& hash) {
  if (dir.empty()) return std::nullopt;
  const std::string path = cache_path(dir, key, hash);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw CacheCorrupt("unreadable cache file " + path);
  }
  if (!j.contains("eff") || !j.contains("checksum"))
    throw CacheCorrupt("cache file missing fields: " + path);
  const std::string expect = hex16(fnv1a(j["eff"].dump()));
  if (j["checksum"].get<std::string>() != expect)
    throw CacheCorrupt("checksum mismatch in " + path);
  return effective_from_json(j["eff"]);
}

void cache_store(const std::string& dir, const std::string& key, const std::string& hash,
                 const Effective1QP& eff, const json& provenance) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  json j;
  j["format"] = "qpd-cluster-v1";
  j["key"] = key;
  j["hash"] = hash;
  j["provenance"] = provenance;
  j["eff"] = effective_to_json(eff);
  j["checksum"] = hex16(fnv1a(j["eff"].dump()));
  std::ofstream out(cache_path(dir, key, hash));
  out << j.dump(1) << '\n';
}

void write_dispersion_csv(std::ostream& os, const DispersionCurve& curve,
                          const std::string& hash) {
  os << "# qpd dispersion\n";
  os << "# hash=" << hash << " solver=" << curve.solver << " cost=" << curve.cost
     << " order=" << curve.order << "\n";
  if (curve.kdim == 1) {
    os << "k,omega,order\n";
    for (std::size_t i = 0; i < curve.omega.size(); ++i)
      os << fmt12(curve.momenta[i].kx) << ',' << fmt12(curve.omega[i]) << ',' << curve.order
         << '\n';
  } else {
    os << "kx,ky,omega,order\n";
    for (std::size_t i = 0; i < curve.omega.size(); ++i)
      os << fmt12(curve.momenta[i].kx) << ',' << fmt12(curve.momenta[i].ky) << ','
         << fmt12(curve.omega[i]) << ',' << curve.order << '\n';
  }
}

json dispersion_to_json(const DispersionCurve& curve) {
  json j;
  j["kdim"] = curve.kdim;
  j["order"] = curve.order;
  j["solver"] = curve.solver;
  j["cost"] = curve.cost;
  json momenta = json::array();
  for (const KPoint& k : curve.momenta)
    momenta.push_back(curve.kdim == 1 ? json::array({k.kx}) : json::array({k.kx, k.ky}));
  j["momenta"] = std::move(momenta);
  j["omega"] = curve.omega;
  return j;
}

namespace {

struct SolveJob {
  ClusterGraph graph;
  std::string solver;  // "ed" or "vqe"
};

ClusterRecord solve_ed_cluster(const RunConfig& config, const ClusterGraph& graph,
                               bool want_sw, ClusterRecord* sw_record) {
  const ModelParams params{config.coupling_j, 1.0, config.field_hl};
  const PauliSum h = build_hamiltonian(graph, params);
  const UnperturbedBasis basis = unperturbed_states(graph);
  // One adiabatic definition for the whole run: mixing dominant-overlap and
  // continuation picks across clusters breaks the consistency the expansion
  // relies on, so the continuation flag switches every ED solve at once.
  Selected1QP sel;
  if (config.continuation) {
    sel = select_1qp_with_continuation(graph, params, 10, config.ed);
  } else {
    const Spectrum spec =
        low_energy_spectrum(h, default_state_request(graph.num_sites()), config.ed);
    sel = select_1qp_subspace(spec, basis);
    if (sel.weak_overlap_warning)
      std::cerr << "[qpd] " << graph.key()
                << ": weakest 1QP projection weight below 0.5; consider --continuation\n";
  }

  ClusterRecord rec;
  rec.key = graph.key();
  rec.solver = "ed";
  rec.eff = pcat_effective(sel.gs, sel.one_qp, h, graph);
  rec.min_weight = sel.weights.empty()
                       ? 1.0
                       : *std::min_element(sel.weights.begin(), sel.weights.end());
  if (want_sw) {
    sw_record->key = graph.key();
    sw_record->solver = "sw";
    sw_record->eff = sw_effective(sel.gs, sel.one_qp, h, graph);
    sw_record->min_weight = rec.min_weight;
  }
  return rec;
}

ClusterRecord solve_vqe_cluster(const RunConfig& config, const ClusterGraph& graph,
                                const IterSink& sink) {
  const ModelParams params{config.coupling_j, 1.0, config.field_hl};
  const PauliSum h = build_hamiltonian(graph, params);
  const VqeSolution sol =
      solve_cluster(graph, params, config.cost, config.layers, config.optimizer, sink);
  const PreparedStates prepared = prepared_states(graph, sol);
  ClusterRecord rec;
  rec.key = graph.key();
  rec.solver = "vqe";
  rec.eff = pcat_effective(prepared.gs, prepared.one_qp, h, graph);
  rec.converged = sol.converged;
  rec.final_cost = sol.final_cost;
  rec.iterations = sol.iterations;
  rec.near_zero_fallback = sol.near_zero_fallback;
  rec.hva["n_layers"] = sol.params_subspace.n_layers;
  rec.hva["tied"] = sol.params_subspace.tied;
  rec.hva["angles_gs"] = sol.params_gs.angles;
  rec.hva["angles_subspace"] = sol.params_subspace.angles;
  return rec;
}

json record_provenance(const RunConfig& config, const ClusterRecord& rec) {
  json j;
  j["key"] = rec.key;
  j["solver"] = rec.solver;
  j["hash"] = rec.hash;
  j["converged"] = rec.converged;
  j["from_cache"] = rec.from_cache;
  j["final_cost"] = rec.final_cost;
  j["iterations"] = rec.iterations;
  j["min_1qp_weight"] = rec.min_weight;
  j["near_zero_fallback"] = rec.near_zero_fallback;
  if (!rec.hva.is_null()) j["hva"] = rec.hva;
  j["config"] = config_json(config);
  return j;
}

void write_record_file(const RunConfig& config, const ClusterRecord& rec) {
  if (config.out_dir.empty()) return;
  const fs::path dir = fs::path(config.out_dir) / "clusters";
  fs::create_directories(dir);
  json j;
  j["format"] = "qpd-cluster-v1";
  j["key"] = rec.key;
  j["hash"] = rec.hash;
  j["provenance"] = record_provenance(config, rec);
  j["eff"] = effective_to_json(rec.eff);
  j["checksum"] = hex16(fnv1a(j["eff"].dump()));
  std::ofstream out(dir / (rec.key + "-" + rec.solver + ".json"));
  out << j.dump(1) << '\n';
}

bool try_cache(const RunConfig& config, const ClusterGraph& graph,
               const std::string& solver_used, ClusterRecord& rec) {
  rec.key = graph.key();
  rec.solver = solver_used;
  rec.hash = cluster_solve_hash(config, solver_used, graph);
  if (config.cache_dir.empty()) return false;
  try {
    if (auto eff = cache_load(config.cache_dir, rec.key, rec.hash)) {
      rec.eff = std::move(*eff);
      rec.from_cache = true;
      return true;
    }
  } catch (const CacheCorrupt& err) {
    std::cerr << "[qpd] " << err.what() << " (re-solving)\n";
  }
  return false;
}

}  // namespace

std::string solver_for(const RunConfig& config, const ClusterGraph& graph) {
  const bool use_vqe = config.solver == SolverKind::Vqe ||
                       (config.solver == SolverKind::Mixed &&
                        graph.num_sites() >= config.mixed_vqe_min_sites);
  return use_vqe ? "vqe" : "ed";
}

ClusterGraph cluster_from_key(const std::string& key) {
  if (key.rfind("chain-", 0) == 0) return make_chain(std::stoi(key.substr(6)));
  if (key.rfind("square-", 0) == 0) {
    const std::string ext = key.substr(7);
    const std::size_t x = ext.find('x');
    if (x != std::string::npos)
      return make_rectangle(std::stoi(ext.substr(0, x)), std::stoi(ext.substr(x + 1)));
  }
  throw std::invalid_argument("unrecognized cluster key: " + key);
}

ClusterRecord solve_one_cluster(const RunConfig& config, const ClusterGraph& graph,
                                ClusterRecord* sw_out) {
  const std::string solver_used = solver_for(config, graph);
  ClusterRecord rec;
  const bool cached = try_cache(config, graph, solver_used, rec);

  if (solver_used == "ed") {
    bool sw_cached = true;
    if (sw_out) sw_cached = try_cache(config, graph, "sw", *sw_out);
    if (!cached || !sw_cached) {
      ClusterRecord fresh_sw;
      ClusterRecord fresh = solve_ed_cluster(config, graph, sw_out != nullptr, &fresh_sw);
      if (!cached) {
        fresh.hash = rec.hash;
        rec = std::move(fresh);
      }
      if (sw_out && !sw_cached) {
        fresh_sw.hash = sw_out->hash;
        *sw_out = std::move(fresh_sw);
      }
    }
  } else if (!cached) {
    std::ofstream log;
    IterSink sink;
    if (!config.out_dir.empty()) {
      const fs::path dir = fs::path(config.out_dir) / "logs";
      fs::create_directories(dir);
      log.open(dir / (graph.key() + ".ndjson"));
      sink = [&log](const IterRecord& r, std::span<const double>) {
        log << "{\"stage\":" << r.stage << ",\"iter\":" << r.iter << ",\"cost\":" << fmt(r.cost)
            << ",\"grad_norm\":" << fmt(r.grad_norm) << ",\"step\":" << fmt(r.step) << "}\n";
      };
    }
    ClusterRecord fresh = solve_vqe_cluster(config, graph, sink);
    fresh.hash = rec.hash;
    rec = std::move(fresh);
  }

  if (!rec.from_cache)
    cache_store(config.cache_dir, rec.key, rec.hash, rec.eff, record_provenance(config, rec));
  write_record_file(config, rec);
  if (sw_out && solver_used == "ed") {
    if (!sw_out->from_cache)
      cache_store(config.cache_dir, sw_out->key, sw_out->hash, sw_out->eff,
                  record_provenance(config, *sw_out));
    write_record_file(config, *sw_out);
  }
  return rec;
}

PipelineResult run_pipeline(const RunConfig& config) {
  validate(config);
  const bool chain = config.lattice == Lattice::Chain;

  // Shapes that actually need a solve: for the chain only the top two cluster
  // sizes contribute; for the square lattice one representative per
  // transpose pair.
  std::vector<ClusterGraph> shapes;
  if (chain) {
    if (config.n_max > 1) shapes.push_back(make_chain(config.n_max - 1));
    shapes.push_back(make_chain(config.n_max));
  } else {
    shapes = solve_shapes(Lattice::Square, config.n_max);
  }

  std::vector<ClusterRecord> records(shapes.size());
  std::vector<ClusterRecord> sw_records(shapes.size());

  // ED jobs go to a worker pool; VQE jobs run one at a time so the inner
  // finite-difference loops get the threads instead.
  std::vector<std::size_t> ed_jobs, vqe_jobs;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    (solver_for(config, shapes[i]) == "vqe" ? vqe_jobs : ed_jobs).push_back(i);

  std::exception_ptr failure;
  const int pool = std::max(1, std::min<int>(config.workers, static_cast<int>(ed_jobs.size())));
#pragma omp parallel for schedule(dynamic, 1) num_threads(pool) if (pool > 1)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(ed_jobs.size()); ++jj) {
    const std::size_t i = ed_jobs[static_cast<std::size_t>(jj)];
    try {
      records[i] =
          solve_one_cluster(config, shapes[i], config.sw_baseline ? &sw_records[i] : nullptr);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const std::size_t i : vqe_jobs) records[i] = solve_one_cluster(config, shapes[i]);

  PipelineResult result;
  for (const ClusterRecord& rec : records)
    if (!rec.converged) result.all_converged = false;

  const auto assemble = [&](bool sw) {
    DispersionCurve curve;
    const auto& recs = sw ? sw_records : records;
    if (chain) {
      const std::vector<double> grid = uniform_grid_1d(config.kpoints_1d);
      if (config.n_max == 1) {
        curve.kdim = 1;
        curve.order = 1;
        for (double k : grid) {
          curve.momenta.push_back({k, 0.0});
          curve.omega.push_back(kspace_block(recs.back().eff, k).real());
        }
      } else {
        curve = reduced_dispersion_chain(recs.back().eff, recs.front().eff, grid);
      }
    } else {
      ExtentMap eff_map;
      for (std::size_t i = 0; i < shapes.size(); ++i) {
        eff_map[{shapes[i].lm, shapes[i].ln}] = recs[i].eff;
        if (shapes[i].lm != shapes[i].ln)
          eff_map[{shapes[i].ln, shapes[i].lm}] = transpose_effective(recs[i].eff);
      }
      const std::vector<KPoint> grid = config.full_grid ? full_grid_2d(config.full_grid_points)
                                                        : path_grid_2d(config.kpoints_2d);
      curve = reduced_dispersion_square(eff_map, grid, config.n_max);
    }
    curve.solver = sw ? "sw" : solver_name(config.solver);
    curve.cost = cost_name(config.cost);
    return curve;
  };

  result.dispersion = assemble(false);
  if (config.sw_baseline) result.sw_dispersion = assemble(true);
  result.clusters = records;
  if (config.sw_baseline)
    result.clusters.insert(result.clusters.end(), sw_records.begin(), sw_records.end());

  result.provenance["config"] = config_json(config);
  result.provenance["hash"] = run_hash(config);
  json cluster_list = json::array();
  for (const ClusterRecord& r : result.clusters) cluster_list.push_back(record_provenance(config, r));
  result.provenance["clusters"] = std::move(cluster_list);

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    {
      std::ofstream csv(fs::path(config.out_dir) / "dispersion.csv");
      write_dispersion_csv(csv, result.dispersion, run_hash(config));
    }
    if (result.sw_dispersion) {
      std::ofstream csv(fs::path(config.out_dir) / "dispersion_sw.csv");
      write_dispersion_csv(csv, *result.sw_dispersion, run_hash(config));
    }
    json out = result.provenance;
    out["dispersion"] = dispersion_to_json(result.dispersion);
    if (result.sw_dispersion) out["dispersion_sw"] = dispersion_to_json(*result.sw_dispersion);
    std::ofstream js(fs::path(config.out_dir) / "dispersion.json");
    js << out.dump(1) << '\n';
  }
  return result;
}

std::vector<ProjectionRecord> diagnose_projections(const ClusterGraph& graph,
                                                   const ModelParams& params, CostKind kind,
                                                   LayerPolicy layers,
                                                   const OptimizerConfig& config, int stride,
                                                   int max_states, VqeSolution* solution_out) {
  const int n = graph.num_sites();
  const std::size_t dim = std::size_t{1} << n;
  const PauliSum h = build_hamiltonian(graph, params);
  const int count = static_cast<int>(std::min<std::size_t>(max_states, dim));
  const Spectrum spec = low_energy_spectrum(h, count);

  std::vector<int> sector(count);
  for (int s = 0; s < count; ++s) {
    std::vector<double> weight(n + 1, 0.0);
    for (std::size_t j = 0; j < dim; ++j)
      weight[std::popcount(j)] += std::norm(spec.eigenvectors[s].amp[j]);
    sector[s] = static_cast<int>(
        std::max_element(weight.begin(), weight.end()) - weight.begin());
  }

  const bool with_gs = cost_single_unitary(kind);
  std::vector<ProjectionRecord> out;
  const auto checkpoint = [&](int iter, std::span<const double> angles) {
    HvaParams p = zero_params(graph, layer_count(n, layers), config.tied);
    p.angles.assign(angles.begin(), angles.end());
    std::vector<StateVector> chi;
    if (with_gs) {
      chi.push_back(basis_state_index(n, 0));
      apply_ansatz(chi.back(), graph, p);
    }
    for (int i = 0; i < n; ++i) {
      chi.push_back(basis_state_index(n, std::uint64_t{1} << i));
      apply_ansatz(chi.back(), graph, p);
    }
    for (int s = 0; s < count; ++s) {
      double norm_sq = 0;
      for (const StateVector& c : chi) norm_sq += std::norm(inner_product(c, spec.eigenvectors[s]));
      out.push_back({iter, s, spec.eigenvalues[s], std::sqrt(norm_sq), sector[s]});
    }
  };

  const IterSink sink = [&](const IterRecord& r, std::span<const double> angles) {
    if (r.stage == 2 && r.iter % stride == 0) checkpoint(r.iter, angles);
  };
  VqeSolution sol = solve_cluster(graph, params, kind, layers, config, sink);
  checkpoint(sol.iterations, sol.params_subspace.angles);
  if (solution_out) *solution_out = sol;
  return out;
}

}  // namespace qpd
