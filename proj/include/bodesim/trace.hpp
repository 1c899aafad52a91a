#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bodesim/sim_time.hpp"

namespace bodesim {

// A cellular link trace: non-decreasing integer millisecond timestamps, one
// delivery opportunity per line. Replay wraps modulo wrap_length_ms. Duplicate
// timestamps mean several opportunities in the same millisecond. Unused
// opportunities are wasted; capacity never carries over.
struct Trace {
    std::vector<std::int64_t> opportunities_ms;
    std::int64_t wrap_length_ms = 0;

    bool operator==(const Trace&) const = default;
};

struct SyntheticTraceSpec {
    enum class Kind { Constant, Step, RandomWalk };
    Kind kind = Kind::Constant;
    std::int64_t duration_s = 300;
    int packet_size_bytes = 1500;

    double rate_mbps = 12.0; // Constant

    double rate_before_mbps = 6.0; // Step
    double rate_after_mbps = 0.6;
    double step_at_s = 10.0;

    double min_mbps = 0.5; // RandomWalk: wanders near a working level, fades toward min
    double max_mbps = 20.0;
    std::int64_t step_interval_ms = 500;
    std::uint64_t seed = 1;

    double peak_rate_mbps() const;

    bool operator==(const SyntheticTraceSpec&) const = default;
};

Trace load_trace(const std::string& path);
void write_trace(const Trace& t, const std::string& path);
Trace generate_trace(const SyntheticTraceSpec& spec);

// Earliest opportunity strictly after `now`, as a pure query on the wrapped
// replay. Duplicate timestamps collapse here; the cursor below sees each one.
SimTime first_opportunity_after(const Trace& t, SimTime now);

// Stateful walk over the infinite replayed opportunity sequence. Each call to
// advance() consumes exactly one opportunity, so duplicate timestamps yield
// one opportunity each.
class OpportunityCursor {
  public:
    explicit OpportunityCursor(const Trace& t);

    SimTime peek() const; // time of the next unconsumed opportunity
    void advance();
    void skip_to_after(SimTime now); // drop all opportunities at or before now

  private:
    const Trace* trace_;
    std::size_t idx_ = 0;
    std::int64_t period_ = 0;
};

// Peak delivery rate estimate over 100 ms windows, for buffer auto-sizing of
// file traces (synthetic specs know their own configured peak).
std::int64_t estimate_peak_rate_bps(const Trace& t, int packet_size_bytes);

double mean_rate_mbps(const Trace& t, int packet_size_bytes);
SimTime max_opportunity_gap(const Trace& t);

} // namespace bodesim
