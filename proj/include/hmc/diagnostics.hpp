#ifndef HMC_DIAGNOSTICS_HPP
#define HMC_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hmc/transition.hpp"

namespace hmc {

// completed sampling-phase draws; all chains the same length
struct ChainSet {
  std::vector<std::vector<Draw>> chains;
  int dim = 0;
  int max_depth = 0;  // 0 when the sampler has no depth cap (static samplers)
};

// effective sample size via autocorrelations truncated by Geyer's
// initial-monotone-positive-pair rule; clamped to (0, N*chains]
double ess(const std::vector<std::vector<double>>& chains);
double ess(const std::vector<double>& values);

// sample sd / sqrt(ess)
double mcmc_se(const std::vector<std::vector<double>>& chains);
double mcmc_se(const std::vector<double>& values);

// potential scale reduction over half-chains
double split_rhat(const std::vector<std::vector<double>>& chains);

// energy fraction of missing information for one chain's energy series
double e_bfmi(const std::vector<double>& energies);

struct ParamSummary {
  std::string name;
  double mean = 0;
  double sd = 0;
  double ess = 0;
  double mcmc_se = 0;
  double rhat = 0;
};

struct Report {
  std::vector<ParamSummary> params;
  std::int64_t divergences = 0;
  std::int64_t max_depth_hits = 0;
  std::int64_t total_draws = 0;
  std::vector<double> e_bfmi;  // per chain
  std::vector<std::string> warnings;
};

Report summarize(const ChainSet& set);

// fixed-column text table of the per-parameter summaries
std::string render_table(const Report& report);

// the full report as a JSON document
std::string report_json(const Report& report);

}  // namespace hmc

#endif
