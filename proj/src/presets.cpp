#include "bodesim/presets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bodesim/trace.hpp"

namespace bodesim {

namespace {

// Shared variable-rate trace for the multiclass presets: a fading walk
// between 4 and 19 Mb/s. The FIFO preset tunes its per-class caps from this
// trace's rate floor, so both presets must agree on it exactly.
constexpr const char* kMulticlassTrace = R"(
    "synthetic": {
      "kind": "random_walk",
      "duration_s": 60,
      "min_mbps": 4.0,
      "max_mbps": 19.0,
      "step_interval_ms": 500,
      "seed": 21
    })";

constexpr const char* kMulticlassSources = R"(
  "sources": [
    {"kind": "cbr", "flow_id": 1, "class_id": 0, "rate_mbps": 2.0},
    {"kind": "cbr", "flow_id": 2, "class_id": 1, "rate_mbps": 4.0},
    {"kind": "aimd", "flow_id": 3, "class_id": 2, "initial_cwnd": 10, "initial_ssthresh": 10}
  ])";

std::string fig2_text(const char* name, const char* discipline) {
    std::ostringstream out;
    out << R"({
  "name": ")" << name
        << R"(",
  "preset": "interactive",
  "engine": {"duration_s": 20, "min_rtt_ms": 10, "seed": 11},
  "trace": {
    "synthetic": {
      "kind": "step",
      "duration_s": 20,
      "rate_before_mbps": 6.0,
      "rate_after_mbps": 0.6,
      "step_at_s": 10.0
    }
  },
  "discipline": )" << discipline
        << R"(,
  "sources": [
    {
      "kind": "adaptive",
      "flow_id": 1,
      "rate_mbps": 5.0,
      "min_rate_mbps": 0.3,
      "max_rate_mbps": 6.0,
      "increase_step_mbps": 0.1,
      "decrease_factor": 0.85
    }
  ]
}
)";
    return out.str();
}

std::string multiclass_bode_text() {
    std::ostringstream out;
    out << R"({
  "name": "multiclass-bode",
  "engine": {"duration_s": 60, "min_rtt_ms": 10, "seed": 21},
  "trace": {)" << kMulticlassTrace
        << R"(
  },
  "classes": [
    {"class_id": 0, "delay_requirement_ms": 50,
     "discipline": {"kind": "bode", "bounded_delay_ms": 50}},
    {"class_id": 1, "delay_requirement_ms": 100,
     "discipline": {"kind": "bode", "bounded_delay_ms": 100}},
    {"class_id": 2,
     "discipline": {"kind": "taildrop", "capacity": 1500000}}
  ],)" << kMulticlassSources
        << R"(
}
)";
    return out.str();
}

std::string multiclass_fifo_text() {
    // Cap tuning: per class, the slowest drain rate this trace ever leaves
    // for the class times its delay budget. Honest best effort for a static
    // FIFO; enough on the trace it was tuned for, brittle anywhere else.
    SyntheticTraceSpec walk;
    walk.kind = SyntheticTraceSpec::Kind::RandomWalk;
    walk.duration_s = 60;
    walk.min_mbps = 4.0;
    walk.max_mbps = 19.0;
    walk.step_interval_ms = 500;
    walk.seed = 21;
    const double floor_bps = walk.min_mbps * 1e6;
    const auto cap_for = [&](double drain_bps, double budget_s) {
        return static_cast<std::int64_t>(std::llround(drain_bps * budget_s / 8.0));
    };

    std::ostringstream out;
    out << R"({
  "name": "multiclass-fifo",
  "engine": {"duration_s": 60, "min_rtt_ms": 10, "seed": 21},
  "trace": {)" << kMulticlassTrace
        << R"(
  },
  "classes": [
    {"class_id": 0, "delay_requirement_ms": 50,
     "discipline": {"kind": "taildrop", "capacity": )"
        << cap_for(floor_bps, 0.050) << R"(}},
    {"class_id": 1, "delay_requirement_ms": 100,
     "discipline": {"kind": "taildrop", "capacity": )"
        << cap_for(floor_bps - 2e6, 0.100) << R"(}},
    {"class_id": 2,
     "discipline": {"kind": "taildrop", "capacity": 1500000}}
  ],)" << kMulticlassSources
        << R"(
}
)";
    return out.str();
}

std::string aqm_sweep_text() {
    // A link that swings across more than an order of magnitude and a
    // loss-driven bulk sender: the deep fades strand a full window behind
    // the bottleneck, which is exactly where the disciplines separate.
    return R"({
  "name": "aqm-sweep",
  "engine": {"duration_s": 300, "min_rtt_ms": 10, "seed": 7},
  "trace": {
    "synthetic": {
      "kind": "random_walk",
      "duration_s": 300,
      "min_mbps": 0.5,
      "max_mbps": 20.0,
      "step_interval_ms": 500,
      "seed": 2
    }
  },
  "discipline": {"kind": "bode", "bounded_delay_ms": 20, "protect_threshold": 4},
  "sources": [
    {
      "kind": "aimd",
      "flow_id": 1,
      "initial_cwnd": 10,
      "initial_ssthresh": 10
    }
  ]
}
)";
}

std::string preset_text(const std::string& name) {
    if (name == "fig2-taildrop")
        return fig2_text("fig2-taildrop", R"({"kind": "taildrop", "capacity": 1500000})");
    if (name == "fig2-bode")
        return fig2_text("fig2-bode", R"({"kind": "bode", "bounded_delay_ms": 100})");
    if (name == "multiclass-bode")
        return multiclass_bode_text();
    if (name == "multiclass-fifo")
        return multiclass_fifo_text();
    if (name == "aqm-sweep")
        return aqm_sweep_text();
    throw std::runtime_error("unknown preset: " + name);
}

} // namespace

const std::vector<PresetInfo>& preset_list() {
    static const std::vector<PresetInfo> presets = {
        {"fig2-taildrop", "step-down link under a deep FIFO: the standing-queue pathology",
         false},
        {"fig2-bode", "same step-down link with the bounded-delay queue", false},
        {"multiclass-bode", "three priority classes, each with its own delay bound", false},
        {"multiclass-fifo", "same classes over FIFOs with capacity tuned to this trace", false},
        {"aqm-sweep", "variable cellular link, loss-driven sender, every discipline", true},
    };
    return presets;
}

bool has_preset(const std::string& name) {
    for (const auto& p : preset_list())
        if (p.name == name)
            return true;
    return false;
}

Scenario preset_scenario(const std::string& name) {
    return parse_scenario_text(preset_text(name), "");
}

std::vector<AqmKind> preset_sweep_kinds(const std::string& name) {
    for (const auto& p : preset_list()) {
        if (p.name == name)
            return p.for_compare ? std::vector<AqmKind>{AqmKind::Bode, AqmKind::Codel,
                                                        AqmKind::Pie, AqmKind::TailDrop,
                                                        AqmKind::HeadDrop}
                                 : std::vector<AqmKind>{};
    }
    throw std::runtime_error("unknown preset: " + name);
}

Scenario sweep_variant(const Scenario& base, AqmKind kind) {
    Scenario sc = base;
    for (auto& c : sc.classes) {
        DisciplineConfig d;
        d.kind = kind;
        d.bounded_delay = c.discipline.bounded_delay;
        d.protect_threshold = c.discipline.protect_threshold;
        d.codel_target = d.bounded_delay / 2;
        d.codel_interval = 5 * sc.min_rtt;
        if (kind == AqmKind::Bode || kind == AqmKind::Codel) {
            d.cap_mode = CapMode::Unlimited;
            d.capacity_bytes = 0;
        } else {
            d.cap_mode = CapMode::Bytes;
            d.capacity_bytes = 1'500'000;
        }
        c.discipline = d;
    }
    return sc;
}

} // namespace bodesim
