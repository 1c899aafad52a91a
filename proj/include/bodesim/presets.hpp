#pragma once

#include <string>
#include <vector>

#include "bodesim/scenario.hpp"

namespace bodesim {

struct PresetInfo {
    std::string name;
    std::string summary;
    bool for_compare = false; // expands to a multi-discipline comparison
};

const std::vector<PresetInfo>& preset_list();
bool has_preset(const std::string& name);
Scenario preset_scenario(const std::string& name);

// Disciplines a comparison preset sweeps (every kind, delay bound taken from
// the scenario's class 0).
std::vector<AqmKind> preset_sweep_kinds(const std::string& name);

// The same scenario with every class's discipline swapped for `kind`, all
// secondary parameters re-derived from the class delay bound exactly as the
// parser would: CoDel target = bound/2 and interval = 5 x min RTT, PIE
// reference = bound, byte-capped queues at 1.5 MB, bounded-delay uncapped.
Scenario sweep_variant(const Scenario& base, AqmKind kind);

} // namespace bodesim
