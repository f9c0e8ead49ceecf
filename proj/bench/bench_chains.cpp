#include <chrono>
#include <cstddef>
#include <cstdio>
#include <vector>

#include "hmc/sampler.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Times the same run twice: threads = 1 takes the plain serial loop over
// chains, threads = 0 takes the OpenMP path on all cores. The two must
// produce bitwise-identical draws; speedup is reported per scenario.

namespace {

double timed_run(hmc::RunConfig cfg, int threads, hmc::RunResult& out) {
  cfg.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  out = hmc::run(cfg);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

bool same_draws(const hmc::RunResult& a, const hmc::RunResult& b) {
  if (a.chains.chains.size() != b.chains.chains.size()) return false;
  for (std::size_t c = 0; c < a.chains.chains.size(); ++c) {
    const auto& ca = a.chains.chains[c];
    const auto& cb = b.chains.chains[c];
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (ca[i].energy != cb[i].energy) return false;
      if (ca[i].n_leapfrog != cb[i].n_leapfrog) return false;
      if ((ca[i].q.array() != cb[i].q.array()).any()) return false;
    }
  }
  return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, %d threads available\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n\n");
#endif

  struct Scenario {
    const char* name;
    hmc::RunConfig cfg;
  };
  std::vector<Scenario> scenarios;

  {
    hmc::RunConfig cfg;
    cfg.target.kind = "std_normal";
    cfg.target.dim = 20;
    cfg.chains = 8;
    cfg.num_warmup = 1000;
    cfg.num_samples = 2000;
    cfg.seed = 42;
    scenarios.push_back({"std_normal D=20, 8 chains", cfg});
  }
  {
    hmc::RunConfig cfg;
    cfg.target.kind = "funnel";
    cfg.target.dim = 10;
    cfg.chains = 8;
    cfg.num_warmup = 1000;
    cfg.num_samples = 1000;
    cfg.seed = 42;
    cfg.target_accept = 0.9;
    scenarios.push_back({"funnel D=10, 8 chains", cfg});
  }

  std::printf("%-28s %10s %10s %9s %6s\n", "scenario", "serial s", "openmp s",
              "speedup", "match");
  int failures = 0;
  for (const auto& s : scenarios) {
    hmc::RunResult serial, parallel;
    const double t_serial = timed_run(s.cfg, 1, serial);
    const double t_parallel = timed_run(s.cfg, 0, parallel);
    const bool match = same_draws(serial, parallel);
    if (!match) ++failures;
    std::printf("%-28s %10.3f %10.3f %8.2fx %6s\n", s.name, t_serial, t_parallel,
                t_serial / t_parallel, match ? "yes" : "NO");
  }
  if (failures) {
    std::fprintf(stderr, "\n%d scenario(s) gave different draws\n", failures);
    return 1;
  }
  return 0;
}
