#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qpd/errors.hpp"
#include "qpd/pipeline.hpp"

using namespace qpd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qpd-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("cluster keys round-trip") {
  CHECK(cluster_from_key("chain-8").key() == "chain-8");
  CHECK(cluster_from_key("square-3x4").key() == "square-3x4");
  CHECK_THROWS_AS(cluster_from_key("hex-7"), std::invalid_argument);
}

TEST_CASE("config validation") {
  RunConfig config;
  config.n_max = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.n_max = 4;
  config.solver = SolverKind::Vqe;
  config.sw_baseline = true;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.sw_baseline = false;
  CHECK_NOTHROW(validate(config));
}

TEST_CASE("mixed solver routing") {
  RunConfig config;
  config.solver = SolverKind::Mixed;
  config.mixed_vqe_min_sites = 5;
  CHECK(solver_for(config, make_chain(4)) == "ed");
  CHECK(solver_for(config, make_chain(5)) == "vqe");
}

TEST_CASE("cache stores and reloads the effective Hamiltonian") {
  TempDir dir("cache");
  Effective1QP eff;
  eff.matrix.resize(2, 2);
  eff.matrix << cplx{2.0, 0.0}, cplx{0.25, 0.125}, cplx{0.25, -0.125}, cplx{2.5, 0.0};
  eff.site_coords = {{0, 0}, {1, 0}};
  eff.gs_energy = -3.25;
  cache_store(dir.path.string(), "chain-2", "abc123", eff, json{{"solver", "ed"}});
  const auto loaded = cache_load(dir.path.string(), "chain-2", "abc123");
  REQUIRE(loaded.has_value());
  CHECK((loaded->matrix - eff.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded->gs_energy == eff.gs_energy);
  CHECK(loaded->site_coords == eff.site_coords);
  CHECK(!cache_load(dir.path.string(), "chain-2", "otherhash").has_value());
}

TEST_CASE("corrupt cache files are detected") {
  TempDir dir("corrupt");
  Effective1QP eff;
  eff.matrix = Eigen::MatrixXcd::Identity(1, 1);
  eff.site_coords = {{0, 0}};
  cache_store(dir.path.string(), "chain-1", "h1", eff, json::object());
  const fs::path file = dir.path / "chain-1-h1.json";
  json j;
  {
    std::ifstream in(file);
    in >> j;
  }
  j["eff"]["gs_energy"] = 99.0;  // tamper without refreshing the checksum
  {
    std::ofstream out(file);
    out << j.dump();
  }
  CHECK_THROWS_AS(cache_load(dir.path.string(), "chain-1", "h1"), CacheCorrupt);
}

TEST_CASE("solve hashes separate what must not be shared") {
  RunConfig config;
  config.coupling_j = 1.0;
  const ClusterGraph g = make_chain(3);
  const std::string ed_hash = cluster_solve_hash(config, "ed", g);

  RunConfig other = config;
  other.coupling_j = 0.5;
  CHECK(cluster_solve_hash(other, "ed", g) != ed_hash);

  // the seed enters only the VQE hash
  RunConfig seeded = config;
  seeded.optimizer.seed = 777;
  CHECK(cluster_solve_hash(seeded, "ed", g) == ed_hash);
  CHECK(cluster_solve_hash(seeded, "vqe", g) != cluster_solve_hash(config, "vqe", g));

  RunConfig cost_changed = config;
  cost_changed.cost = CostKind::Tr1QP;
  CHECK(cluster_solve_hash(cost_changed, "vqe", g) != cluster_solve_hash(config, "vqe", g));
  CHECK(cluster_solve_hash(cost_changed, "ed", g) == ed_hash);
}

TEST_CASE("pipeline reuses the cache across runs") {
  TempDir cache("reuse");
  RunConfig config;
  config.lattice = Lattice::Chain;
  config.coupling_j = 0.4;
  config.n_max = 3;
  config.cache_dir = cache.path.string();
  const PipelineResult first = run_pipeline(config);
  for (const auto& rec : first.clusters) CHECK(!rec.from_cache);
  const PipelineResult second = run_pipeline(config);
  for (const auto& rec : second.clusters) CHECK(rec.from_cache);
  for (std::size_t i = 0; i < first.dispersion.omega.size(); ++i)
    CHECK(first.dispersion.omega[i] == second.dispersion.omega[i]);
}

TEST_CASE("identical configs produce byte-identical output") {
  TempDir out1("det1"), out2("det2");
  RunConfig config;
  config.lattice = Lattice::Chain;
  config.coupling_j = 0.6;
  config.n_max = 4;
  config.kpoints_1d = 21;
  config.out_dir = out1.path.string();
  run_pipeline(config);
  config.out_dir = out2.path.string();
  run_pipeline(config);
  CHECK(slurp(out1.path / "dispersion.csv") == slurp(out2.path / "dispersion.csv"));
  CHECK(!slurp(out1.path / "dispersion.csv").empty());
}

TEST_CASE("a small VQE pipeline runs end to end") {
  TempDir out("vqe-e2e");
  RunConfig config;
  config.lattice = Lattice::Chain;
  config.coupling_j = 0.3;
  config.n_max = 3;
  config.solver = SolverKind::Vqe;
  config.cost = CostKind::TrGS1QP;
  config.kpoints_1d = 11;
  config.optimizer.max_iterations = 400;
  config.optimizer.grad_tolerance = 1e-7;
  config.out_dir = out.path.string();
  const PipelineResult result = run_pipeline(config);
  CHECK(result.dispersion.omega.size() == 11);
  // a weakly coupled chain keeps the gap near 2
  for (double w : result.dispersion.omega) {
    CHECK(w > 1.0);
    CHECK(w < 3.0);
  }
  CHECK(fs::exists(out.path / "clusters" / "chain-3-vqe.json"));
  CHECK(fs::exists(out.path / "logs" / "chain-3.ndjson"));
  CHECK(fs::exists(out.path / "dispersion.json"));
}

TEST_CASE("square-lattice ED pipeline reproduces the flat band") {
  RunConfig config;
  config.lattice = Lattice::Square;
  config.coupling_j = 0.0;
  config.n_max = 4;
  config.kpoints_2d = 5;
  const PipelineResult result = run_pipeline(config);
  for (double w : result.dispersion.omega) CHECK(w == doctest::Approx(2.0));
}

TEST_SUITE_END();
