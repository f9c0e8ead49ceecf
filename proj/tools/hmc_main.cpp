#include <cstdio>
#include <exception>

#include "hmc/sampler.hpp"

// exit codes: 0 clean, 1 bad configuration, 2 runtime failure,
// 3 finished but the diagnostics flagged the run
int main(int argc, char** argv) {
  hmc::RunConfig cfg;
  try {
    cfg = hmc::parse_config(argc, argv);
  } catch (const hmc::ConfigHelp& help) {
    std::fputs(help.text.c_str(), stdout);
    return 0;
  } catch (const hmc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }

  try {
    const hmc::RunResult result = hmc::run(cfg);
    hmc::write_output(result, cfg);
    std::fputs(hmc::render_table(result.report).c_str(), stdout);
    for (const auto& warning : result.report.warnings)
      std::fprintf(stderr, "warning: %s\n", warning.c_str());
    return hmc::exit_code_for(result.report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
