#include "hmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

namespace hmc {

namespace {

void check_chains(const std::vector<std::vector<double>>& chains, std::size_t min_len) {
  if (chains.empty()) throw std::invalid_argument("diagnostics: no chains");
  std::size_t n = chains.front().size();
  if (n < min_len) throw std::invalid_argument("diagnostics: chains too short");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("diagnostics: unequal chain lengths");
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// biased autocovariance (1/N normalization) at one lag
double autocov(const std::vector<double>& x, double mean, std::size_t lag) {
  const std::size_t n = x.size();
  double s = 0;
  for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
  return s / static_cast<double>(n);
}

}  // namespace

double ess(const std::vector<std::vector<double>>& chains) {
  check_chains(chains, 4);
  const std::size_t c = chains.size();
  const std::size_t n = chains.front().size();

  // catch exactly-constant input before rounding dust in the autocovariance
  // can masquerade as signal
  bool constant = true;
  for (const auto& chain : chains)
    for (double v : chain)
      if (v != chains.front().front()) {
        constant = false;
        break;
      }
  if (constant) throw std::domain_error("ess: undefined for constant input");
  const double total = static_cast<double>(c) * static_cast<double>(n);

  std::vector<double> means(c);
  std::vector<double> acov0(c);
  for (std::size_t k = 0; k < c; ++k) {
    means[k] = mean_of(chains[k]);
    acov0[k] = autocov(chains[k], means[k], 0);
  }
  double mean_var = 0;
  for (std::size_t k = 0; k < c; ++k)
    mean_var += acov0[k] * static_cast<double>(n) / static_cast<double>(n - 1);
  mean_var /= static_cast<double>(c);

  double var_plus = mean_var * static_cast<double>(n - 1) / static_cast<double>(n);
  if (c > 1) {
    double gm = mean_of(means);
    double b = 0;
    for (double m : means) b += (m - gm) * (m - gm);
    var_plus += b / static_cast<double>(c - 1);
  }
  if (!(var_plus > 0)) throw std::domain_error("ess: undefined for constant input");

  auto rho = [&](std::size_t lag) {
    double a = 0;
    for (std::size_t k = 0; k < c; ++k) a += autocov(chains[k], means[k], lag);
    a /= static_cast<double>(c);
    return 1.0 - (mean_var - a) / var_plus;
  };

  // Geyer pairs: accumulate while positive, enforce monotone decrease
  double sum_pairs = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0;; ++m) {
    std::size_t even = 2 * m, odd = 2 * m + 1;
    if (odd + 3 > n) break;
    double pair = (m == 0 ? 1.0 : rho(even)) + rho(odd);
    if (pair <= 0 && m > 0) break;
    pair = std::max(pair, 0.0);
    pair = std::min(pair, prev);
    sum_pairs += pair;
    prev = pair;
    if (m == 0 && pair <= 0) break;
  }
  double tau = 2 * sum_pairs - 1;
  if (!(tau > 0)) return total;  // superefficient; clamp to the draw count
  return std::min(total / tau, total);
}

double ess(const std::vector<double>& values) {
  return ess(std::vector<std::vector<double>>{values});
}

double mcmc_se(const std::vector<std::vector<double>>& chains) {
  double e = ess(chains);
  double n = 0, mean = 0, m2 = 0;  // pooled one-pass variance
  for (const auto& chain : chains)
    for (double v : chain) {
      n += 1;
      double d = v - mean;
      mean += d / n;
      m2 += d * (v - mean);
    }
  double sd = std::sqrt(m2 / (n - 1));
  return sd / std::sqrt(e);
}

double mcmc_se(const std::vector<double>& values) {
  return mcmc_se(std::vector<std::vector<double>>{values});
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  check_chains(chains, 4);
  const std::size_t half = chains.front().size() / 2;
  std::vector<std::vector<double>> halves;
  for (const auto& chain : chains) {
    halves.emplace_back(chain.begin(), chain.begin() + half);
    halves.emplace_back(chain.begin() + half, chain.begin() + 2 * half);
  }
  const double m = static_cast<double>(halves.size());
  const double n = static_cast<double>(half);
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    double mu = mean_of(h);
    double v = 0;
    for (double x : h) v += (x - mu) * (x - mu);
    means.push_back(mu);
    vars.push_back(v / (n - 1));
  }
  double w = mean_of(vars);
  if (!(w > 0)) throw std::domain_error("split_rhat: zero within-chain variance");
  double gm = mean_of(means);
  double var_means = 0;
  for (double mu : means) var_means += (mu - gm) * (mu - gm);
  var_means /= (m - 1);
  return std::sqrt(((n - 1) / n * w + var_means) / w);
}

double e_bfmi(const std::vector<double>& energies) {
  if (energies.size() < 2) throw std::invalid_argument("e_bfmi: need at least 2 energies");
  double num = 0;
  for (std::size_t i = 1; i < energies.size(); ++i) {
    double d = energies[i] - energies[i - 1];
    num += d * d;
  }
  double mean = mean_of(energies);
  double den = 0;
  for (double e : energies) den += (e - mean) * (e - mean);
  if (!(den > 0)) throw std::domain_error("e_bfmi: undefined for constant energies");
  return num / den;
}

Report summarize(const ChainSet& set) {
  Report report;
  if (set.chains.empty()) return report;
  const int dim = set.dim;
  const std::size_t n_chains = set.chains.size();

  for (const auto& chain : set.chains) {
    for (const Draw& d : chain) {
      if (d.divergent) ++report.divergences;
      if (set.max_depth > 0 && d.depth >= set.max_depth) ++report.max_depth_hits;
    }
    report.total_draws += static_cast<std::int64_t>(chain.size());
  }

  report.params.resize(dim);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int j = 0; j < dim; ++j) {
    std::vector<std::vector<double>> series(n_chains);
    for (std::size_t k = 0; k < n_chains; ++k) {
      series[k].reserve(set.chains[k].size());
      for (const Draw& d : set.chains[k]) series[k].push_back(d.q[j]);
    }
    ParamSummary p;
    p.name = "q." + std::to_string(j + 1);
    double count = 0, mean = 0, m2 = 0;
    for (const auto& s : series)
      for (double v : s) {
        count += 1;
        double d = v - mean;
        mean += d / count;
        m2 += d * (v - mean);
      }
    p.mean = mean;
    p.sd = count > 1 ? std::sqrt(m2 / (count - 1)) : 0.0;
    try {
      p.ess = ess(series);
      p.mcmc_se = mcmc_se(series);
      p.rhat = split_rhat(series);
    } catch (const std::exception&) {
      p.ess = p.mcmc_se = p.rhat = std::numeric_limits<double>::quiet_NaN();
    }
    report.params[j] = std::move(p);
  }

  for (const auto& chain : set.chains) {
    std::vector<double> energies;
    energies.reserve(chain.size());
    for (const Draw& d : chain) energies.push_back(d.energy);
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = e_bfmi(energies);
    } catch (const std::exception&) {
    }
    report.e_bfmi.push_back(v);
  }

  if (report.divergences > 0)
    report.warnings.push_back(std::to_string(report.divergences) +
                              " divergent transitions; results may be biased");
  double max_rhat = 0;
  for (const auto& p : report.params)
    if (std::isfinite(p.rhat)) max_rhat = std::max(max_rhat, p.rhat);
  if (max_rhat > 1.01)
    report.warnings.push_back("split R-hat above 1.01; chains may not have mixed");
  for (std::size_t k = 0; k < report.e_bfmi.size(); ++k)
    if (std::isfinite(report.e_bfmi[k]) && report.e_bfmi[k] < 0.3) {
      report.warnings.push_back("E-BFMI below 0.3 in chain " + std::to_string(k) +
                                "; the kinetic energy may be poorly matched");
      break;
    }
  if (report.max_depth_hits > 0)
    report.warnings.push_back(std::to_string(report.max_depth_hits) +
                              " draws saturated max_depth");
  return report;
}

std::string render_table(const Report& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %12s %12s %12s %12s %10s\n", "parameter",
                "mean", "sd", "ess", "mcmc_se", "rhat");
  out += line;
  for (const auto& p : report.params) {
    std::snprintf(line, sizeof(line), "%-12s %12.5g %12.5g %12.5g %12.5g %10.4f\n",
                  p.name.c_str(), p.mean, p.sd, p.ess, p.mcmc_se, p.rhat);
    out += line;
  }
  return out;
}

std::string report_json(const Report& report) {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::ordered_json::array();
  for (const auto& p : report.params) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["mean"] = p.mean;
    pj["sd"] = p.sd;
    pj["ess"] = p.ess;
    pj["mcmc_se"] = p.mcmc_se;
    pj["rhat"] = p.rhat;
    j["params"].push_back(std::move(pj));
  }
  j["divergences"] = report.divergences;
  j["max_depth_hits"] = report.max_depth_hits;
  j["total_draws"] = report.total_draws;
  j["e_bfmi"] = report.e_bfmi;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

}  // namespace hmc
