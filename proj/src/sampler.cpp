#include "hmc/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hmc/adapt.hpp"
#include "hmc/leapfrog.hpp"
#include "hmc/phase_point.hpp"
#include "hmc/rng.hpp"
#include "hmc/transition.hpp"

namespace hmc {

namespace {

const char* sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::StaticHmc: return "static_hmc";
    case SamplerKind::StaticMultinomial: return "static_multinomial";
    default: return "dynamic";
  }
}

const char* metric_name(MetricForm f) {
  switch (f) {
    case MetricForm::Unit: return "unit";
    case MetricForm::Diagonal: return "diag";
    default: return "dense";
  }
}

Metric initial_metric(MetricForm form, int dim) {
  switch (form) {
    case MetricForm::Unit: return Metric::unit(dim);
    case MetricForm::Diagonal: return Metric::diagonal(Eigen::VectorXd::Ones(dim));
    default: return Metric::dense(Eigen::MatrixXd::Identity(dim, dim));
  }
}

Eigen::VectorXd initial_point(const Target& target, const RunConfig& cfg, Rng& rng) {
  if (cfg.init_point.size() > 0) {
    if (!std::isfinite(target.log_density(cfg.init_point)))
      throw std::runtime_error("initialization failed: non-finite density at the given init point");
    return cfg.init_point;
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd q(target.dim());
    for (int i = 0; i < target.dim(); ++i)
      q[i] = cfg.init_radius * (2 * rng.uniform() - 1);
    if (std::isfinite(target.log_density(q))) return q;
  }
  throw std::runtime_error("initialization failed: no finite-density point in 100 attempts");
}

Draw one_transition(const RunConfig& cfg, const Target& target, const Metric& metric,
                    const Eigen::VectorXd& q, double eps, const DivergenceConfig& div,
                    Rng& rng) {
  switch (cfg.sampler) {
    case SamplerKind::StaticHmc:
      return static_hmc_transition(target, metric, q, StepSize(eps), cfg.L, div, rng);
    case SamplerKind::StaticMultinomial:
      return static_multinomial_transition(target, metric, q, StepSize(eps), cfg.L, div,
                                           rng);
    default:
      return dynamic_transition(target, metric, q, StepSize(eps), cfg.max_depth, div,
                                rng);
  }
}

struct ChainOutput {
  std::vector<Draw> draws;
  double step_size = 0;
};

ChainOutput run_chain(const RunConfig& cfg, const Target& target, int chain_id) {
  Rng rng = chain_rng(cfg.seed, chain_id);
  const DivergenceConfig div{cfg.divergence_threshold};
  Eigen::VectorXd q = initial_point(target, cfg, rng);
  Metric metric = initial_metric(cfg.metric, target.dim());
  double eps = cfg.step_size > 0 ? cfg.step_size
                                 : init_step_size(target, metric, q, rng);

  if (cfg.num_warmup > 0 && cfg.adapt) {
    WarmupSchedule plan = plan_warmup(cfg.num_warmup);
    StepSizeAdaptState da = step_size_adapt_init(eps, cfg.target_accept);
    auto adapt_iter = [&](bool accumulate, MetricAdaptState* acc) {
      Draw d = one_transition(cfg, target, metric, q, current_step_size(da), div, rng);
      q = d.q;
      update_step_size(da, d.accept_stat);
      if (accumulate) update_metric(*acc, q);
    };
    if (cfg.metric == MetricForm::Unit) {
      // no metric to learn: one uninterrupted step-size run
      for (std::int64_t i = 0; i < cfg.num_warmup; ++i) adapt_iter(false, nullptr);
    } else {
      // one continuous step size run; the averaging gain grows fast enough
      // to track each metric switch, and restarting it mid-warmup would leave
      // the short terminal window frozen inside a fresh transient
      for (std::int64_t i = 0; i < plan.init_fast; ++i) adapt_iter(false, nullptr);
      for (std::int64_t w : plan.windows) {
        MetricAdaptState acc = metric_adapt_init(cfg.metric, target.dim());
        for (std::int64_t i = 0; i < w; ++i) adapt_iter(true, &acc);
        metric = finalize_metric(acc);
      }
      for (std::int64_t i = 0; i < plan.term_fast; ++i) adapt_iter(false, nullptr);
    }
    eps = adapted_step_size(da);
  } else {
    for (std::int64_t i = 0; i < cfg.num_warmup; ++i) {
      Draw d = one_transition(cfg, target, metric, q, eps, div, rng);
      q = d.q;
    }
  }

  ChainOutput out;
  out.step_size = eps;
  out.draws.reserve(static_cast<std::size_t>(cfg.num_samples));
  for (std::int64_t i = 0; i < cfg.num_samples; ++i) {
    Draw d = one_transition(cfg, target, metric, q, eps, div, rng);
    q = d.q;
    out.draws.push_back(std::move(d));
  }
  return out;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.target.kind.empty())
    throw ConfigError("a target distribution is required (--target)");
  if (cfg.chains < 1) throw ConfigError("chains must be at least 1");
  if (cfg.num_samples < 1) throw ConfigError("num_samples must be at least 1");
  if (cfg.num_warmup < 0) throw ConfigError("num_warmup must be non-negative");
  if (cfg.adapt && cfg.num_warmup > 0 && cfg.num_warmup < 20)
    throw ConfigError("num_warmup must be 0 or at least 20 when adaptation is on");
  bool is_static = cfg.sampler != SamplerKind::Dynamic;
  if (is_static && cfg.L < 1)
    throw ConfigError("static samplers require a trajectory length (--L)");
  if (!is_static && cfg.L != 0)
    throw ConfigError("L applies only to static samplers");
  if (cfg.max_depth < 1 || cfg.max_depth > 30)
    throw ConfigError("max_depth must be between 1 and 30");
  if (!(cfg.target_accept > 0) || !(cfg.target_accept < 1))
    throw ConfigError("target_accept must be inside (0, 1)");
  if (cfg.step_size < 0 || !std::isfinite(cfg.step_size))
    throw ConfigError("step_size must be positive (or omitted for automatic)");
  if (!(cfg.init_radius > 0)) throw ConfigError("init_radius must be positive");
  if (!(cfg.divergence_threshold > 0))
    throw ConfigError("divergence_threshold must be positive");
  if (cfg.threads < 0) throw ConfigError("threads must be non-negative");
  try {
    Target probe = make_target(cfg.target);  // validates the target descriptor
    if (cfg.init_point.size() > 0 && cfg.init_point.size() != probe.dim())
      throw ConfigError("init point dimension does not match the target");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunResult run(const RunConfig& cfg) {
  validate(cfg);
  Target target = make_target(cfg.target);
  const int n = cfg.chains;
  std::vector<ChainOutput> outputs(n);

  int threads = cfg.threads;
#ifdef _OPENMP
  if (threads == 0) threads = omp_get_max_threads();
#else
  threads = 1;
#endif

  auto work = [&](int c) {
    outputs[c] = run_chain(cfg, target, c);
    if (cfg.progress) {
      std::string line = "chain " + std::to_string(c) + ": " +
                         std::to_string(cfg.num_warmup) + " warm-up + " +
                         std::to_string(cfg.num_samples) + " draws done\n";
      std::fputs(line.c_str(), stderr);
    }
  };

  if (threads > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int c = 0; c < n; ++c) work(c);
#else
    for (int c = 0; c < n; ++c) work(c);
#endif
  } else {
    for (int c = 0; c < n; ++c) work(c);  // serial reference path
  }

  RunResult res;
  res.chains.dim = target.dim();
  res.chains.max_depth = cfg.sampler == SamplerKind::Dynamic ? cfg.max_depth : 0;
  for (int c = 0; c < n; ++c) {
    res.chains.chains.push_back(std::move(outputs[c].draws));
    res.step_sizes.push_back(outputs[c].step_size);
  }
  res.report = summarize(res.chains);
  return res;
}

std::string config_echo(const RunConfig& cfg) {
  // nothing execution-specific here (threads, paths): echoed lines must be
  // identical across runs that should produce identical draws
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  kv("target", cfg.target.kind);
  if (cfg.target.kind == "std_normal" || cfg.target.kind == "funnel")
    kv("dim", std::to_string(cfg.target.dim));
  if (cfg.target.kind == "mvn_precision")
    kv("dim", std::to_string(cfg.target.precision.rows()));
  if (cfg.target.kind == "beta_family") kv("beta", std::to_string(cfg.target.beta));
  if (cfg.target.kind == "funnel") kv("scale", std::to_string(cfg.target.scale));
  kv("sampler", sampler_name(cfg.sampler));
  kv("chains", std::to_string(cfg.chains));
  kv("num_warmup", std::to_string(cfg.num_warmup));
  kv("num_samples", std::to_string(cfg.num_samples));
  kv("seed", std::to_string(cfg.seed));
  if (cfg.init_point.size() > 0) {
    std::string pt = "[";
    for (Eigen::Index i = 0; i < cfg.init_point.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", cfg.init_point[i]);
      pt += std::string(i ? "," : "") + buf;
    }
    kv("init", pt + "]");
  } else {
    kv("init_radius", std::to_string(cfg.init_radius));
  }
  if (cfg.step_size > 0) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", cfg.step_size);
    kv("step_size", buf);
  } else {
    kv("step_size", "auto");
  }
  if (cfg.sampler != SamplerKind::Dynamic) kv("L", std::to_string(cfg.L));
  if (cfg.sampler == SamplerKind::Dynamic)
    kv("max_depth", std::to_string(cfg.max_depth));
  kv("metric", metric_name(cfg.metric));
  kv("adapt", cfg.adapt ? "true" : "false");
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", cfg.target_accept);
    kv("target_accept", buf);
    std::snprintf(buf, sizeof(buf), "%g", cfg.divergence_threshold);
    kv("divergence_threshold", buf);
  }
  return s;
}

void write_output(const RunResult& result, const RunConfig& cfg) {
  Target target = make_target(cfg.target);
  const int dim = result.chains.dim;
  for (std::size_t c = 0; c < result.chains.chains.size(); ++c) {
    std::string path = cfg.out_prefix + "_chain_" + std::to_string(c) + ".csv";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    std::string echo = config_echo(cfg);
    echo += "chain = " + std::to_string(c) + "\n";
    std::string commented = "# ";
    for (char ch : echo) {
      commented += ch;
      if (ch == '\n') commented += "# ";
    }
    commented.erase(commented.size() - 2);  // trailing "# "
    std::fputs(commented.c_str(), f);

    std::fputs("lp__,accept_stat__,stepsize__,treedepth__,n_leapfrog__,divergent__,energy__", f);
    for (int j = 1; j <= dim; ++j) std::fprintf(f, ",q.%d", j);
    std::fputc('\n', f);

    for (const Draw& d : result.chains.chains[c]) {
      double lp = target.log_density(d.q);
      std::fprintf(f, "%.17g,%.17g,%.17g,%d,%lld,%d,%.17g", lp, d.accept_stat,
                   d.step_size, d.depth, static_cast<long long>(d.n_leapfrog),
                   d.divergent ? 1 : 0, d.energy);
      for (int j = 0; j < dim; ++j) std::fprintf(f, ",%.17g", d.q[j]);
      std::fputc('\n', f);
    }
    std::fclose(f);
  }
  std::string diag_path = cfg.out_prefix + "_diagnostics.json";
  std::FILE* f = std::fopen(diag_path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open output file: " + diag_path);
  std::fputs(report_json(result.report).c_str(), f);
  std::fclose(f);
}

int exit_code_for(const Report& report) {
  if (report.divergences > 0) return 3;
  for (const auto& p : report.params)
    if (std::isfinite(p.rhat) && p.rhat > 1.01) return 3;
  for (double v : report.e_bfmi)
    if (std::isfinite(v) && v < 0.3) return 3;
  return 0;
}

}  // namespace hmc
