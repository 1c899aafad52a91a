#pragma once

#include <string>
#include <vector>

#include "bodesim/engine.hpp"
#include "bodesim/metrics.hpp"
#include "bodesim/scenario.hpp"

namespace bodesim {

struct SimReport {
    Scenario scenario;
    EventLog log;
    Summary total;
    std::vector<Summary> per_class;
};

SimReport run_scenario(const Scenario& sc);

// Independent runs share nothing mutable, so the batch fans out with OpenMP
// when built with it. The serial path is the reference; results are
// identical by construction and a test pins that.
enum class BatchMode { Serial, Parallel };
std::vector<SimReport> run_batch(const std::vector<Scenario>& scenarios,
                                 BatchMode mode = BatchMode::Parallel);

bool openmp_enabled();

} // namespace bodesim
