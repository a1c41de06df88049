#include "qpd/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpd/errors.hpp"

namespace qpd {

bool cost_is_variance(CostKind k) {
  return k == CostKind::Var1QP || k == CostKind::VarGS1QP;
}

bool cost_single_unitary(CostKind k) {
  return k == CostKind::VarGS1QP || k == CostKind::TrGS1QP;
}

std::string cost_name(CostKind k) {
  switch (k) {
    case CostKind::Var1QP: return "var-1qp";
    case CostKind::VarGS1QP: return "var-gs1qp";
    case CostKind::Tr1QP: return "tr-1qp";
    case CostKind::TrGS1QP: return "tr-gs1qp";
  }
  return "?";
}

CostKind cost_from_name(const std::string& name) {
  if (name == "var-1qp") return CostKind::Var1QP;
  if (name == "var-gs1qp") return CostKind::VarGS1QP;
  if (name == "tr-1qp") return CostKind::Tr1QP;
  if (name == "tr-gs1qp") return CostKind::TrGS1QP;
  throw std::invalid_argument("unknown cost kind: " + name);
}

std::string init_name(InitPolicy p) {
  switch (p) {
    case InitPolicy::NearZero: return "near-zero";
    case InitPolicy::GroundStateWarmStart: return "warm-start";
    case InitPolicy::Auto: return "auto";
  }
  return "?";
}

InitPolicy init_from_name(const std::string& name) {
  if (name == "near-zero") return InitPolicy::NearZero;
  if (name == "warm-start") return InitPolicy::GroundStateWarmStart;
  if (name == "auto") return InitPolicy::Auto;
  throw std::invalid_argument("unknown init policy: " + name);
}

std::vector<double> near_zero_angles(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (double& a : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    a = (2.0 * u - 1.0) * 1e-3;
  }
  return out;
}

namespace {

inline bool threads_available() {
#ifdef _OPENMP
  return omp_get_max_threads() > 1 && !omp_in_parallel();
#else
  return false;
#endif
}

// Transformed basis states and H applied to them; slot 0 is the ground state
// when the kind includes it.
double cost_from_states(const PauliSum& h, CostKind kind, std::vector<StateVector>& psi) {
  const int total = static_cast<int>(psi.size());
  std::vector<StateVector> hpsi(total);
  for (int t = 0; t < total; ++t) apply_pauli_sum_into(hpsi[t], psi[t], h);

  if (!cost_is_variance(kind)) {
    double sum = 0;
    for (int t = 0; t < total; ++t) sum += inner_product(psi[t], hpsi[t]).real();
    return sum;
  }

  const int qp0 = cost_single_unitary(kind) ? 1 : 0;
  double cost = 0;
  if (kind == CostKind::VarGS1QP) {
    const double e = inner_product(psi[0], hpsi[0]).real();
    const double e2 = inner_product(hpsi[0], hpsi[0]).real();
    cost += e2 - e * e;
  }
  double sum_h2 = 0;
  for (int i = qp0; i < total; ++i) sum_h2 += inner_product(hpsi[i], hpsi[i]).real();
  double sum_offdiag = 0;
  for (int i = qp0; i < total; ++i)
    for (int j = qp0; j < total; ++j) sum_offdiag += std::norm(inner_product(psi[i], hpsi[j]));
  return cost + sum_h2 - sum_offdiag;
}

double eval_cost_impl(const ClusterGraph& graph, const PauliSum& h, const HvaParams& hva,
                      CostKind kind) {
  const int n = graph.num_sites();
  const bool with_gs = cost_single_unitary(kind);
  const int total = with_gs ? n + 1 : n;
  std::vector<StateVector> psi(total);
#pragma omp parallel for schedule(dynamic) if (threads_available())
  for (int t = 0; t < total; ++t) {
    const int site = with_gs ? t - 1 : t;
    const std::uint64_t index = site < 0 ? 0 : std::uint64_t{1} << site;
    psi[t] = basis_state_index(n, index);
    apply_ansatz(psi[t], graph, hva);
  }
  return cost_from_states(h, kind, psi);
}

}  // namespace

double eval_cost(const ClusterGraph& graph, const ModelParams& params, const HvaParams& hva,
                 CostKind kind) {
  return eval_cost_impl(graph, build_hamiltonian(graph, params), hva, kind);
}

double eval_gs_energy(const ClusterGraph& graph, const ModelParams& params, const HvaParams& hva) {
  const PauliSum h = build_hamiltonian(graph, params);
  StateVector psi = basis_state_index(graph.num_sites(), 0);
  apply_ansatz(psi, graph, hva);
  return expectation_and_square(psi, h).energy;
}

double eval_cost_on_basis(const ClusterGraph& graph, const PauliSum& h, const HvaParams& hva,
                          CostKind kind, const StateVector& gs,
                          std::span<const StateVector> one_qp) {
  const bool with_gs = cost_single_unitary(kind);
  std::vector<StateVector> psi;
  if (with_gs) psi.push_back(gs);
  for (const StateVector& q : one_qp) psi.push_back(q);
  for (StateVector& s : psi) apply_ansatz(s, graph, hva);
  return cost_from_states(h, kind, psi);
}

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double step) {
  const int dim = static_cast<int>(x.size());
  std::vector<double> grad(dim);
#pragma omp parallel for schedule(dynamic) if (threads_available())
  for (int j = 0; j < dim; ++j) {
    std::vector<double> probe = x;
    probe[j] = x[j] + step;
    const double up = f(probe);
    probe[j] = x[j] - step;
    const double down = f(probe);
    grad[j] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<double> cost_gradient(const ClusterGraph& graph, const ModelParams& params,
                                  const HvaParams& hva, CostKind kind, double fd_step) {
  const PauliSum h = build_hamiltonian(graph, params);
  HvaParams layout = hva;
  const auto value = [&](const std::vector<double>& x) {
    HvaParams q = layout;
    q.angles = x;
    return eval_cost_impl(graph, h, q, kind);
  };
  return fd_gradient(value, hva.angles, fd_step);
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace

CgResult minimize_cg(const CgProblem& problem, std::vector<double> initial,
                     const OptimizerConfig& config, const IterSink& sink, int stage) {
  const int dim = static_cast<int>(initial.size());
  const int restart = config.restart_period > 0 ? config.restart_period : std::max(dim, 1);

  CgResult res;
  res.x = std::move(initial);
  res.value = problem.value(res.x);
  if (!std::isfinite(res.value)) throw NonFinite("initial cost is not finite");
  res.history.push_back(res.value);

  std::vector<double> g = problem.gradient(res.x);
  if (!all_finite(g)) throw NonFinite("gradient is not finite");
  if (sink) sink({stage, 0, res.value, norm2(g), 0.0}, res.x);

  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
  double alpha_prev = config.initial_step;
  double slope_prev = 0;
  std::vector<double> trial(g.size());

  for (int it = 1; it <= config.max_iterations; ++it) {
    const double gnorm = norm2(g);
    if (gnorm < config.grad_tolerance) {
      res.converged = true;
      break;
    }
    double slope = dot(g, d);
    if (slope >= 0) {  // not a descent direction: restart to steepest
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
      slope = -gnorm * gnorm;
    }

    const auto value_at = [&](double a) {
      for (std::size_t i = 0; i < d.size(); ++i) trial[i] = res.x[i] + a * d[i];
      const double f = problem.value(trial);
      if (!std::isfinite(f)) throw NonFinite("cost became non-finite in line search");
      return f;
    };
    const auto armijo_ok = [&](double a, double f) {
      return f <= res.value + config.armijo_slope * a * slope;
    };

    // Slope-ratio initial trial (first iteration uses the configured step);
    // if it is accepted outright, expand while the model keeps paying off.
    bool accepted = false;
    bool steepest_retry = false;
    double alpha = it == 1 ? config.initial_step
                           : std::clamp(alpha_prev * slope_prev / slope, 1e-10, 1e3);
    double f_trial = 0;
    while (true) {
      f_trial = value_at(alpha);
      if (armijo_ok(alpha, f_trial)) {
        accepted = true;
        for (int grow = 0; grow < 20; ++grow) {
          const double wide = 2.0 * alpha;
          const double f_wide = value_at(wide);
          if (!armijo_ok(wide, f_wide) || f_wide >= f_trial) break;
          alpha = wide;
          f_trial = f_wide;
        }
        // value_at leaves `trial` at the last probed point; restore the winner.
        for (std::size_t i = 0; i < d.size(); ++i) trial[i] = res.x[i] + alpha * d[i];
      } else {
        for (int bt = 0; bt < config.max_backtracks; ++bt) {
          alpha *= config.backtrack_factor;
          f_trial = value_at(alpha);
          if (armijo_ok(alpha, f_trial)) {
            accepted = true;
            break;
          }
        }
      }
      if (accepted || steepest_retry) break;
      // Retry once along steepest descent before declaring a stall.
      steepest_retry = true;
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
      slope = -gnorm * gnorm;
      alpha = config.initial_step;
    }
    if (!accepted) break;  // no descent to machine precision

    res.x = trial;
    res.value = f_trial;
    res.history.push_back(f_trial);
    res.iterations = it;
    alpha_prev = std::max(alpha, 1e-12);
    slope_prev = slope;

    std::vector<double> g_new = problem.gradient(res.x);
    if (!all_finite(g_new)) throw NonFinite("gradient is not finite");

    double beta = 0;
    const double denom = dot(g, g);
    if (it % restart != 0 && denom > 0) {
      double num = 0;
      for (std::size_t i = 0; i < g.size(); ++i) num += g_new[i] * (g_new[i] - g[i]);
      beta = std::max(0.0, num / denom);
    }
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g_new[i] + beta * d[i];
    g = std::move(g_new);
    if (sink) sink({stage, it, res.value, norm2(g), alpha}, res.x);
  }

  if (!res.converged) res.converged = norm2(g) < config.grad_tolerance;
  return res;
}

VqeSolution solve_cluster(const ClusterGraph& graph, const ModelParams& params, CostKind kind,
                          LayerPolicy layers, const OptimizerConfig& config,
                          const IterSink& sink) {
  const int n = graph.num_sites();
  const int n_layers = layer_count(n, layers);
  const HvaParams layout = zero_params(graph, n_layers, config.tied);
  const std::size_t dim = layout.angles.size();
  const PauliSum h = build_hamiltonian(graph, params);

  const auto with_angles = [&](const std::vector<double>& x) {
    HvaParams q = layout;
    q.angles = x;
    return q;
  };

  // Stage 1: ground-state energy from near-zero angles.
  CgProblem gs_problem;
  gs_problem.value = [&](const std::vector<double>& x) {
    return eval_gs_energy(graph, params, with_angles(x));
  };
  gs_problem.gradient = [&](const std::vector<double>& x) {
    return fd_gradient(gs_problem.value, x, config.fd_step);
  };
  const CgResult stage1 =
      minimize_cg(gs_problem, near_zero_angles(dim, config.seed), config, sink, 1);

  // Stage 2: subspace cost, warm-started from the stage-1 angles by default.
  CgProblem sub_problem;
  sub_problem.value = [&](const std::vector<double>& x) {
    return eval_cost_impl(graph, h, with_angles(x), kind);
  };
  sub_problem.gradient = [&](const std::vector<double>& x) {
    return fd_gradient(sub_problem.value, x, config.fd_step);
  };

  const bool warm = config.init != InitPolicy::NearZero;
  CgResult stage2 = minimize_cg(
      sub_problem, warm ? stage1.x : near_zero_angles(dim, config.seed + 1), config, sink, 2);

  VqeSolution sol;
  // Warm-started variance optimizations can get trapped in local minima with
  // residuals an order of magnitude above a successful run; with Auto init we
  // then retry once from near zero and keep the better result.
  if (config.init == InitPolicy::Auto && cost_is_variance(kind) &&
      stage2.value > 0.02 * n + 0.03) {
    CgResult retry =
        minimize_cg(sub_problem, near_zero_angles(dim, config.seed + 1), config, sink, 2);
    if (retry.value < stage2.value) {
      stage2 = std::move(retry);
      sol.near_zero_fallback = true;
    }
  }

  sol.kind = kind;
  sol.params_gs = with_angles(stage1.x);
  sol.params_subspace = with_angles(stage2.x);
  sol.stage1_energy = stage1.value;
  sol.final_cost = stage2.value;
  sol.cost_history = std::move(stage2.history);
  sol.converged = stage2.converged;
  sol.iterations = stage2.iterations;
  return sol;
}

PreparedStates prepared_states(const ClusterGraph& graph, const VqeSolution& solution) {
  const int n = graph.num_sites();
  PreparedStates out;
  out.gs = basis_state_index(n, 0);
  const HvaParams& gs_params =
      cost_single_unitary(solution.kind) ? solution.params_subspace : solution.params_gs;
  apply_ansatz(out.gs, graph, gs_params);
  out.one_qp.resize(n);
#pragma omp parallel for schedule(dynamic) if (threads_available())
  for (int i = 0; i < n; ++i) {
    out.one_qp[i] = basis_state_index(n, std::uint64_t{1} << i);
    apply_ansatz(out.one_qp[i], graph, solution.params_subspace);
  }
  return out;
}

}  // namespace qpd
