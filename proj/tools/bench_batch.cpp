#include <chrono>
#include <cstdio>
#include <iostream>
#include <vector>

#include "bodesim/batch.hpp"
#include "bodesim/presets.hpp"

// Times the scenario batch runner in serial and OpenMP mode over the same
// inputs and checks the reports agree byte for byte. Independent runs are
// the parallel grain; one run is always sequential.

using namespace bodesim;

namespace {

double time_batch(const std::vector<Scenario>& scenarios, BatchMode mode,
                  std::vector<SimReport>& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = run_batch(scenarios, mode);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int copies = 8;
    if (argc > 1)
        copies = std::atoi(argv[1]);

    Scenario base = preset_scenario("aqm-sweep");
    base.duration_s = 60;
    std::vector<Scenario> scenarios;
    for (int i = 0; i < copies; ++i) {
        Scenario sc = base;
        sc.seed = static_cast<std::uint64_t>(1000 + i);
        sc.name += "-" + std::to_string(i);
        scenarios.push_back(std::move(sc));
    }

    std::vector<SimReport> serial, parallel;
    const double ts = time_batch(scenarios, BatchMode::Serial, serial);
    const double tp = time_batch(scenarios, BatchMode::Parallel, parallel);

    bool equal = serial.size() == parallel.size();
    for (std::size_t i = 0; equal && i < serial.size(); ++i)
        equal = serial[i].log == parallel[i].log;

    std::printf("openmp:   %s\n", openmp_enabled() ? "enabled" : "disabled");
    std::printf("runs:     %d x %llds\n", copies, static_cast<long long>(base.duration_s));
    std::printf("serial:   %.3f s\n", ts);
    std::printf("parallel: %.3f s  (speedup %.2fx)\n", tp, ts / tp);
    std::printf("logs:     %s\n", equal ? "identical" : "MISMATCH");
    return equal ? 0 : 1;
}
