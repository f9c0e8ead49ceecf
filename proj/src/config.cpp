#include <CLI11.hpp>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "hmc/sampler.hpp"

namespace hmc {

namespace {

using nlohmann::json;

SamplerKind sampler_from_name(const std::string& s) {
  if (s == "static_hmc") return SamplerKind::StaticHmc;
  if (s == "static_multinomial") return SamplerKind::StaticMultinomial;
  if (s == "dynamic") return SamplerKind::Dynamic;
  throw ConfigError("unknown sampler '" + s +
                    "' (expected static_hmc, static_multinomial, or dynamic)");
}

MetricForm metric_from_name(const std::string& s) {
  if (s == "unit") return MetricForm::Unit;
  if (s == "diag") return MetricForm::Diagonal;
  if (s == "dense") return MetricForm::Dense;
  throw ConfigError("unknown metric '" + s + "' (expected unit, diag, or dense)");
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a JSON array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must be a JSON array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(what + " must be a JSON array of equal-length rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array())
      throw ConfigError(what + " must be a JSON array of equal-length rows");
    if (r == 0) {
      cols = j[r].size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    if (j[r].size() != cols)
      throw ConfigError(what + " must be a JSON array of equal-length rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ConfigError(what + " must be a JSON array of equal-length rows");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig cfg;
  cfg.progress = true;  // batch front-end default; --quiet turns it off

  std::string config_path, target_kind, sampler_name = "dynamic",
                           metric_name = "diag", init_text, precision_text;
  bool quiet = false;

  CLI::App app{"Hamiltonian Monte Carlo batch sampler"};
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--target", target_kind,
                 "target distribution: std_normal, mvn_precision, funnel, beta_family");
  app.add_option("--dim", cfg.target.dim, "dimension (std_normal, funnel)");
  app.add_option("--beta", cfg.target.beta, "beta_family exponent");
  app.add_option("--scale", cfg.target.scale, "funnel scale");
  app.add_option("--precision", precision_text,
                 "mvn_precision matrix, JSON rows");
  app.add_option("--sampler", sampler_name,
                 "static_hmc, static_multinomial, or dynamic");
  app.add_option("--chains", cfg.chains, "number of chains");
  app.add_option("--num-warmup", cfg.num_warmup, "warm-up iterations per chain");
  app.add_option("--num-samples", cfg.num_samples, "sampling iterations per chain");
  app.add_option("--seed", cfg.seed, "base RNG seed");
  app.add_option("--init", init_text, "initial point as a JSON array");
  app.add_option("--init-radius", cfg.init_radius,
                 "random init draws per-component from [-r, r]");
  app.add_option("--step-size", cfg.step_size, "fixed step size (default: automatic)");
  app.add_option("--L", cfg.L, "leapfrog steps per trajectory (static samplers)");
  app.add_option("--max-depth", cfg.max_depth, "doubling cap (dynamic sampler)");
  app.add_option("--metric", metric_name, "unit, diag, or dense");
  app.add_option("--adapt", cfg.adapt, "enable warm-up adaptation (default true)");
  app.add_option("--target-accept", cfg.target_accept, "step size adaptation target");
  app.add_option("--divergence-threshold", cfg.divergence_threshold,
                 "energy error treated as a divergence");
  app.add_option("--threads", cfg.threads, "chain threads (0 = all, 1 = serial)");
  app.add_option("--out", cfg.out_prefix, "output path prefix");
  app.add_flag("--quiet", quiet, "suppress per-chain progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw ConfigHelp{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  cfg.progress = !quiet;

  json file;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file: " + config_path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    file = parse_json_text(text, "config file");
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
  }

  // command-line flags override file values, so apply a file key only when
  // its flag is absent
  auto unset = [&](const char* flag) { return app.count(flag) == 0; };
  try {
    for (const auto& [key, value] : file.items()) {
      if (key == "target") {
        if (unset("--target")) target_kind = value.get<std::string>();
      } else if (key == "dim") {
        if (unset("--dim")) cfg.target.dim = value.get<int>();
      } else if (key == "beta") {
        if (unset("--beta")) cfg.target.beta = value.get<double>();
      } else if (key == "scale") {
        if (unset("--scale")) cfg.target.scale = value.get<double>();
      } else if (key == "precision") {
        if (unset("--precision"))
          cfg.target.precision = matrix_from_json(value, "precision");
      } else if (key == "sampler") {
        if (unset("--sampler")) sampler_name = value.get<std::string>();
      } else if (key == "chains") {
        if (unset("--chains")) cfg.chains = value.get<int>();
      } else if (key == "num_warmup") {
        if (unset("--num-warmup")) cfg.num_warmup = value.get<std::int64_t>();
      } else if (key == "num_samples") {
        if (unset("--num-samples")) cfg.num_samples = value.get<std::int64_t>();
      } else if (key == "seed") {
        if (unset("--seed")) cfg.seed = value.get<std::uint64_t>();
      } else if (key == "init") {
        if (unset("--init")) cfg.init_point = vector_from_json(value, "init");
      } else if (key == "init_radius") {
        if (unset("--init-radius")) cfg.init_radius = value.get<double>();
      } else if (key == "step_size") {
        if (unset("--step-size")) cfg.step_size = value.get<double>();
      } else if (key == "L") {
        if (unset("--L")) cfg.L = value.get<int>();
      } else if (key == "max_depth") {
        if (unset("--max-depth")) cfg.max_depth = value.get<int>();
      } else if (key == "metric") {
        if (unset("--metric")) metric_name = value.get<std::string>();
      } else if (key == "adapt") {
        if (unset("--adapt")) cfg.adapt = value.get<bool>();
      } else if (key == "target_accept") {
        if (unset("--target-accept")) cfg.target_accept = value.get<double>();
      } else if (key == "divergence_threshold") {
        if (unset("--divergence-threshold"))
          cfg.divergence_threshold = value.get<double>();
      } else if (key == "threads") {
        if (unset("--threads")) cfg.threads = value.get<int>();
      } else if (key == "out") {
        if (unset("--out")) cfg.out_prefix = value.get<std::string>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }

  cfg.target.kind = target_kind;
  cfg.sampler = sampler_from_name(sampler_name);
  cfg.metric = metric_from_name(metric_name);
  if (!init_text.empty())
    cfg.init_point = vector_from_json(parse_json_text(init_text, "init"), "init");
  if (!precision_text.empty())
    cfg.target.precision =
        matrix_from_json(parse_json_text(precision_text, "precision"), "precision");

  validate(cfg);
  return cfg;
}

}  // namespace hmc
