// Designs an 8-of-10 antenna beamformer for the default scenario and prints
// the selected antennas and headline metrics.

#include <cstdio>

#include "dfrc/commands.hpp"

int main() {
  dfrc::Scenario scenario;  // defaults: N=10, two users at -45/45 deg, K=8
  try {
    const auto d = dfrc::design(scenario, scenario.seed);
    std::printf("support %s\n", dfrc::format_support(d.support).c_str());
    std::printf("tx power %.4f W, MSRR %.2f dB\n", d.report.tx_power, d.report.msrr_db);
    for (dfrc::Index m = 0; m < d.report.sinr.size(); ++m) {
      std::printf("user %ld SINR %.2f dB\n", static_cast<long>(m), dfrc::linear_to_db(d.report.sinr[m]));
    }
  } catch (const dfrc::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
