#ifndef HMC_TRANSITION_HPP
#define HMC_TRANSITION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "hmc/leapfrog.hpp"
#include "hmc/metric.hpp"
#include "hmc/phase_point.hpp"
#include "hmc/rng.hpp"
#include "hmc/target.hpp"

namespace hmc {

// one MCMC draw plus the per-transition statistics the sampler records
struct Draw {
  Eigen::VectorXd q;
  double energy = 0;
  double accept_stat = 0;
  int depth = 0;
  std::int64_t n_leapfrog = 0;
  bool divergent = false;
  double step_size = 0;
};

// summary of a trajectory segment built by doubling
struct TreeState {
  PhasePoint z_minus;  // backward-time boundary, momentum in forward-time sense
  PhasePoint z_plus;   // forward-time boundary
  Eigen::VectorXd rho;  // sum of the momenta of all states in the segment
  double log_weight = 0;  // log-sum-exp of -(H - H0) over the segment
  PhasePoint proposal;
  int depth = 0;
  std::int64_t n_states = 0;
  double sum_accept_stat = 0;
  bool terminated = false;
  bool divergent = false;
};

enum class MergeMode { Uniform, Biased };

// Metropolis probability min(1, exp(H0 - H1)); 0 for non-finite H1
double accept_probability(double h0, double h1);

// probability that a merge takes the new segment's proposal.
// Uniform: w_new / (w_old + w_new). Biased: min(1, w_new / w_old).
double new_side_probability(double lw_old, double lw_new, MergeMode mode);

// index sampled proportionally to exp(log_weights[i])
std::size_t multinomial_select(std::span<const double> log_weights, Rng& rng);

// combine two adjacent segments; direction says which side the new one extends
TreeState merge_proposal(const TreeState& old_tree, const TreeState& new_tree,
                         MergeMode mode, int direction, Rng& rng);

// generalized u-turn: terminate when ever the velocities at both boundaries
// point against the segment's momentum sum
bool u_turn(const Metric& metric, const TreeState& tree);

// recursively build a 2^depth-state segment by integrating away from z_edge.
// Incomplete segments (internal u-turn or divergence) return with terminated
// set and only the states actually built accounted for.
TreeState build_subtree(const Target& target, const Metric& metric,
                        const PhasePoint& z_edge, StepSize eps, int depth,
                        int direction, double h0, const DivergenceConfig& div,
                        MergeMode mode, Rng& rng);

// fixed-length trajectory with a Metropolis accept of the endpoint
Draw static_hmc_transition(const Target& target, const Metric& metric,
                           const Eigen::VectorXd& q0, StepSize eps, int steps,
                           const DivergenceConfig& div, Rng& rng);
Draw static_hmc_transition_z(const Target& target, const Metric& metric,
                             const PhasePoint& z0, StepSize eps, int steps,
                             const DivergenceConfig& div, Rng& rng);

// fixed-length trajectory with a random window offset and multinomial
// selection among its states
Draw static_multinomial_transition(const Target& target, const Metric& metric,
                                   const Eigen::VectorXd& q0, StepSize eps,
                                   int steps, const DivergenceConfig& div, Rng& rng);
Draw static_multinomial_transition_z(const Target& target, const Metric& metric,
                                     const PhasePoint& z0, StepSize eps, int steps,
                                     const DivergenceConfig& div, Rng& rng);

// multiplicative expansion with u-turn termination (dynamic trajectories)
Draw dynamic_transition(const Target& target, const Metric& metric,
                        const Eigen::VectorXd& q0, StepSize eps, int max_depth,
                        const DivergenceConfig& div, Rng& rng);

struct DynamicResult {
  Draw draw;
  TreeState tree;
};

// instrumented variant starting from a fixed phase point; exposes the final
// trajectory summary for inspection
DynamicResult dynamic_transition_tree(const Target& target, const Metric& metric,
                                      const PhasePoint& z0, StepSize eps,
                                      int max_depth, const DivergenceConfig& div,
                                      Rng& rng);

}  // namespace hmc

#endif
