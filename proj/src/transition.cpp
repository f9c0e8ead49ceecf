#include "hmc/transition.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hmc/math.hpp"

namespace hmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double accept_probability(double h0, double h1) {
  if (!std::isfinite(h1)) return 0.0;
  return std::min(1.0, std::exp(h0 - h1));
}

double new_side_probability(double lw_old, double lw_new, MergeMode mode) {
  if (lw_new == kNegInf) return 0.0;  // covers the double -inf tie: keep old
  if (mode == MergeMode::Biased) return std::min(1.0, std::exp(lw_new - lw_old));
  return std::exp(lw_new - log_sum_exp(lw_old, lw_new));
}

std::size_t multinomial_select(std::span<const double> log_weights, Rng& rng) {
  double total = log_sum_exp(log_weights);
  double u = rng.uniform();
  double cum = 0;
  std::size_t last_live = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (log_weights[i] == kNegInf) continue;
    last_live = i;
    cum += std::exp(log_weights[i] - total);
    if (u < cum) return i;
  }
  return last_live;  // guards against cum rounding below 1
}

TreeState merge_proposal(const TreeState& old_tree, const TreeState& new_tree,
                         MergeMode mode, int direction, Rng& rng) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("merge_proposal: direction must be +1 or -1");
  TreeState m;
  if (direction == 1) {
    m.z_minus = old_tree.z_minus;
    m.z_plus = new_tree.z_plus;
  } else {
    m.z_minus = new_tree.z_minus;
    m.z_plus = old_tree.z_plus;
  }
  m.rho = old_tree.rho + new_tree.rho;
  m.log_weight = log_sum_exp(old_tree.log_weight, new_tree.log_weight);
  double p_new = new_side_probability(old_tree.log_weight, new_tree.log_weight, mode);
  m.proposal = rng.uniform() < p_new ? new_tree.proposal : old_tree.proposal;
  m.depth = std::max(old_tree.depth, new_tree.depth) + 1;
  m.n_states = old_tree.n_states + new_tree.n_states;
  m.sum_accept_stat = old_tree.sum_accept_stat + new_tree.sum_accept_stat;
  m.terminated = old_tree.terminated || new_tree.terminated;
  m.divergent = old_tree.divergent || new_tree.divergent;
  return m;
}

bool u_turn(const Metric& metric, const TreeState& tree) {
  return metric.velocity(tree.z_plus.p).dot(tree.rho) < 0 &&
         metric.velocity(tree.z_minus.p).dot(tree.rho) < 0;
}

TreeState build_subtree(const Target& target, const Metric& metric,
                        const PhasePoint& z_edge, StepSize eps, int depth,
                        int direction, double h0, const DivergenceConfig& div,
                        MergeMode mode, Rng& rng) {
  if (depth == 0) {
    PhasePoint z = leapfrog_step(target, metric, z_edge, eps, direction);
    TreeState leaf;
    bool dvg = check_divergence(h0, z.energy, div);
    leaf.z_minus = z;
    leaf.z_plus = z;
    leaf.rho = z.p;
    leaf.log_weight = dvg ? kNegInf : h0 - z.energy;
    leaf.proposal = std::move(z);
    leaf.depth = 0;
    leaf.n_states = 1;
    leaf.sum_accept_stat = accept_probability(h0, leaf.proposal.energy);
    leaf.terminated = dvg;
    leaf.divergent = dvg;
    return leaf;
  }
  TreeState first = build_subtree(target, metric, z_edge, eps, depth - 1,
                                  direction, h0, div, mode, rng);
  if (first.terminated) return first;  // partial tree, flags carry up
  const PhasePoint& inner_edge = direction == 1 ? first.z_plus : first.z_minus;
  TreeState second = build_subtree(target, metric, inner_edge, eps, depth - 1,
                                   direction, h0, div, mode, rng);
  TreeState merged = merge_proposal(first, second, mode, direction, rng);
  merged.depth = depth;
  // a doomed merge only needs its bookkeeping; skip the u-turn scan then
  merged.terminated = merged.terminated || u_turn(metric, merged);
  return merged;
}

Draw static_hmc_transition_z(const Target& target, const Metric& metric,
                             const PhasePoint& z0, StepSize eps, int steps,
                             const DivergenceConfig& div, Rng& rng) {
  IntegrateResult res = integrate(target, metric, z0, eps, steps, div);
  Draw d;
  d.step_size = eps.value();
  d.n_leapfrog = res.steps;
  d.depth = 0;
  if (res.divergent) {
    d.q = z0.q;
    d.energy = z0.energy;
    d.accept_stat = 0;
    d.divergent = true;
    return d;
  }
  double a = accept_probability(z0.energy, res.final_state.energy);
  d.accept_stat = a;
  if (rng.uniform() < a) {
    d.q = res.final_state.q;
    d.energy = res.final_state.energy;
  } else {
    d.q = z0.q;
    d.energy = z0.energy;
  }
  return d;
}

Draw static_hmc_transition(const Target& target, const Metric& metric,
                           const Eigen::VectorXd& q0, StepSize eps, int steps,
                           const DivergenceConfig& div, Rng& rng) {
  return static_hmc_transition_z(target, metric, lift(target, metric, q0, rng),
                                 eps, steps, div, rng);
}

Draw static_multinomial_transition_z(const Target& target, const Metric& metric,
                                     const PhasePoint& z0, StepSize eps, int steps,
                                     const DivergenceConfig& div, Rng& rng) {
  if (steps < 1)
    throw std::invalid_argument("static_multinomial_transition: steps must be >= 1");
  const double h0 = z0.energy;
  Draw d;
  d.step_size = eps.value();
  d.depth = 0;
  if (steps == 1) {  // the window is the initial point itself
    d.q = z0.q;
    d.energy = h0;
    d.accept_stat = 1;
    return d;
  }

  struct Candidate {
    Eigen::VectorXd q;
    double energy;
  };
  std::vector<Candidate> states{{z0.q, h0}};
  std::vector<double> lw{0.0};
  double sum_accept = 0;
  std::int64_t n_visited = 0;

  // the initial point sits at a uniformly random offset inside the window
  const std::int64_t offset = static_cast<std::int64_t>(rng.uniform_int(steps));
  for (int dir : {-1, +1}) {
    std::int64_t span = dir == -1 ? offset : steps - 1 - offset;
    PhasePoint z = z0;
    for (std::int64_t k = 0; k < span; ++k) {
      z = leapfrog_step(target, metric, z, eps, dir);
      ++d.n_leapfrog;
      ++n_visited;
      sum_accept += accept_probability(h0, z.energy);
      if (check_divergence(h0, z.energy, div)) {  // truncate this side
        d.divergent = true;
        break;
      }
      states.push_back({z.q, z.energy});
      lw.push_back(h0 - z.energy);
    }
  }
  std::size_t pick = multinomial_select(lw, rng);
  d.q = states[pick].q;
  d.energy = states[pick].energy;
  d.accept_stat = n_visited > 0 ? sum_accept / static_cast<double>(n_visited) : 1.0;
  return d;
}

Draw static_multinomial_transition(const Target& target, const Metric& metric,
                                   const Eigen::VectorXd& q0, StepSize eps,
                                   int steps, const DivergenceConfig& div, Rng& rng) {
  return static_multinomial_transition_z(
      target, metric, lift(target, metric, q0, rng), eps, steps, div, rng);
}

DynamicResult dynamic_transition_tree(const Target& target, const Metric& metric,
                                      const PhasePoint& z0, StepSize eps,
                                      int max_depth, const DivergenceConfig& div,
                                      Rng& rng) {
  if (max_depth < 1)
    throw std::invalid_argument("dynamic_transition: max_depth must be >= 1");
  const double h0 = z0.energy;
  TreeState tree;
  tree.z_minus = z0;
  tree.z_plus = z0;
  tree.rho = z0.p;
  tree.log_weight = 0;
  tree.proposal = z0;
  tree.depth = 0;
  tree.n_states = 1;

  Draw d;
  d.step_size = eps.value();
  double sum_accept = 0;
  std::int64_t n_visited = 0;
  int depth = 0;
  while (depth < max_depth) {
    int dir = rng.coin() ? 1 : -1;
    const PhasePoint& edge = dir == 1 ? tree.z_plus : tree.z_minus;
    TreeState sub = build_subtree(target, metric, edge, eps, depth, dir, h0, div,
                                  MergeMode::Uniform, rng);
    d.n_leapfrog += sub.n_states;
    sum_accept += sub.sum_accept_stat;
    n_visited += sub.n_states;
    if (sub.divergent) {
      d.divergent = true;
      break;
    }
    if (sub.terminated) break;  // expansion rejected, keep the current proposal
    tree = merge_proposal(tree, sub, MergeMode::Biased, dir, rng);
    tree.depth = ++depth;
    if (u_turn(metric, tree)) break;
  }
  d.q = tree.proposal.q;
  d.energy = tree.proposal.energy;
  d.depth = depth;
  d.accept_stat = n_visited > 0 ? sum_accept / static_cast<double>(n_visited) : 1.0;
  return {std::move(d), std::move(tree)};
}

Draw dynamic_transition(const Target& target, const Metric& metric,
                        const Eigen::VectorXd& q0, StepSize eps, int max_depth,
                        const DivergenceConfig& div, Rng& rng) {
  return dynamic_transition_tree(target, metric, lift(target, metric, q0, rng),
                                 eps, max_depth, div, rng)
      .draw;
}

}  // namespace hmc
