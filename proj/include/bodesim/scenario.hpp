#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bodesim/sim_time.hpp"
#include "bodesim/trace.hpp"

namespace bodesim {

enum class AqmKind { Bode, Codel, Pie, TailDrop, HeadDrop };

const char* aqm_kind_name(AqmKind k);
AqmKind aqm_kind_from_name(const std::string& name);

enum class CapMode { Unlimited, Auto, Bytes };

// Fully resolved discipline configuration. Parsing fills every field from the
// profile defaults (interactive: 100 ms delay bound, otherwise 20 ms; CoDel
// target = bound/2 and interval = 5 x min RTT; PIE reference = bound).
struct DisciplineConfig {
    AqmKind kind = AqmKind::Bode;
    SimTime bounded_delay = 0; // delay bound / CoDel target base / PIE reference
    int protect_threshold = 3;
    CapMode cap_mode = CapMode::Unlimited;
    std::int64_t capacity_bytes = 0; // resolved value when cap_mode != Unlimited
    SimTime codel_target = 0;
    SimTime codel_interval = 0;
    double pie_alpha = 0.125;
    double pie_beta = 1.25;
    SimTime pie_update_interval = msec(30);

    bool operator==(const DisciplineConfig&) const = default;
};

struct ClassConfig {
    int class_id = 0;
    DisciplineConfig discipline;
    SimTime delay_requirement = kNever; // reporting only

    bool operator==(const ClassConfig&) const = default;
};

struct SourceConfig {
    enum class Kind { Cbr, Adaptive, Aimd };
    Kind kind = Kind::Cbr;
    std::int64_t flow_id = 0;
    int class_id = 0;
    int packet_size_bytes = 1500;
    double start_s = 0.0;
    double stop_s = -1.0; // -1 = run end

    double rate_mbps = 1.0; // CBR and adaptive initial rate

    double min_rate_mbps = 0.1; // adaptive
    double max_rate_mbps = 10.0;
    double increase_step_mbps = 0.1;
    double decrease_factor = 0.85;
    SimTime comfort_delay = kNever; // kNever = class delay bound (or 100 ms)

    double initial_cwnd = 10.0; // AIMD
    double initial_ssthresh = 64.0;

    bool operator==(const SourceConfig&) const = default;
};

struct TraceConfig {
    std::string file; // empty when synthetic
    std::optional<SyntheticTraceSpec> synthetic;

    bool operator==(const TraceConfig&) const = default;
};

struct OutputConfig {
    bool events_csv = false;
    bool cdf_csv = false;

    bool operator==(const OutputConfig&) const = default;
};

enum class Profile { Default, Interactive };

struct Scenario {
    std::string name = "scenario";
    Profile profile = Profile::Default;
    std::int64_t duration_s = 300;
    SimTime min_rtt = msec(10);
    std::uint64_t seed = 1;
    TraceConfig trace_cfg;
    Trace trace; // materialized at parse time
    std::vector<ClassConfig> classes;
    std::vector<SourceConfig> sources;
    OutputConfig outputs;

    SimTime duration() const { return seconds(duration_s); }
    bool operator==(const Scenario&) const = default;
};

// Parse and validate a scenario file. Unknown keys are rejected; messages
// carry the JSON path of the offending key. Relative trace paths resolve
// against the scenario file's directory.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir);
std::string emit_scenario(const Scenario& s); // round-trips through parse

} // namespace bodesim
