#ifndef HMC_SAMPLER_HPP
#define HMC_SAMPLER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmc/diagnostics.hpp"
#include "hmc/metric.hpp"
#include "hmc/target.hpp"

namespace hmc {

enum class SamplerKind { StaticHmc, StaticMultinomial, Dynamic };

struct RunConfig {
  TargetConfig target;
  SamplerKind sampler = SamplerKind::Dynamic;
  int chains = 4;
  std::int64_t num_warmup = 1000;
  std::int64_t num_samples = 1000;
  std::uint64_t seed = 1;
  Eigen::VectorXd init_point;  // empty -> random init in [-r, r]^D
  double init_radius = 2.0;
  double step_size = 0;  // 0 -> probe for one automatically
  int L = 0;             // trajectory length, static samplers only
  int max_depth = 10;
  MetricForm metric = MetricForm::Diagonal;
  bool adapt = true;
  double target_accept = 0.8;
  double divergence_threshold = 1000.0;
  int threads = 0;  // 0 -> library default; 1 -> strictly serial
  std::string out_prefix = "hmc";
  bool progress = false;
};

struct RunResult {
  ChainSet chains;
  Report report;
  std::vector<double> step_sizes;  // frozen post-warm-up step size per chain
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// thrown by parse_config when the user asked for --help
struct ConfigHelp {
  std::string text;
};

// throws ConfigError on any inconsistency; run() calls this itself
void validate(const RunConfig& cfg);

// warm up, sample, and summarize all chains; deterministic in (seed, config)
RunResult run(const RunConfig& cfg);

// <prefix>_chain_<k>.csv per chain plus <prefix>_diagnostics.json
void write_output(const RunResult& result, const RunConfig& cfg);

// 0 clean, 3 when the report carries divergences, bad R-hat, or low E-BFMI
int exit_code_for(const Report& report);

// command-line flags layered over an optional JSON --config file
RunConfig parse_config(int argc, const char* const* argv);

// "key = value" lines describing the statistical configuration
std::string config_echo(const RunConfig& cfg);

}  // namespace hmc

#endif
