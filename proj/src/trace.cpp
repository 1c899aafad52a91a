#include "bodesim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bodesim/packet.hpp"

namespace bodesim {

namespace {

[[noreturn]] void trace_error(const std::string& path, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

void validate(const Trace& t, const std::string& origin) {
    if (t.opportunities_ms.empty())
        throw std::runtime_error(origin + ": trace has no delivery opportunities");
    if (t.opportunities_ms.front() < 0)
        throw std::runtime_error(origin + ": negative timestamp");
    if (!std::is_sorted(t.opportunities_ms.begin(), t.opportunities_ms.end()))
        throw std::runtime_error(origin + ": timestamps must be non-decreasing");
    if (t.wrap_length_ms < t.opportunities_ms.back())
        throw std::runtime_error(origin + ": wrap length shorter than last timestamp");
    if (t.wrap_length_ms <= 0)
        throw std::runtime_error(origin + ": trace period must be positive");
}

} // namespace

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + path);

    Trace t;
    std::string line;
    std::size_t lineno = 0;
    std::int64_t prev = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            trace_error(path, lineno, "empty line");
        std::size_t pos = 0;
        std::int64_t ms = 0;
        try {
            ms = std::stoll(line, &pos);
        } catch (const std::exception&) {
            trace_error(path, lineno, "not an integer: '" + line + "'");
        }
        if (pos != line.size())
            trace_error(path, lineno, "trailing junk: '" + line + "'");
        if (ms < 0)
            trace_error(path, lineno, "negative timestamp");
        if (ms < prev)
            trace_error(path, lineno, "timestamps must be non-decreasing");
        prev = ms;
        t.opportunities_ms.push_back(ms);
    }
    if (t.opportunities_ms.empty())
        throw std::runtime_error(path + ": trace has no delivery opportunities");
    t.wrap_length_ms = t.opportunities_ms.back();
    validate(t, path);
    return t;
}

void write_trace(const Trace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace file: " + path);
    for (std::int64_t ms : t.opportunities_ms)
        out << ms << "\n";
}

double SyntheticTraceSpec::peak_rate_mbps() const {
    switch (kind) {
    case Kind::Constant: return rate_mbps;
    case Kind::Step: return std::max(rate_before_mbps, rate_after_mbps);
    case Kind::RandomWalk: return max_mbps;
    }
    return rate_mbps;
}

namespace {

// Emit one segment of evenly spaced opportunities covering [t0_ms, t1_ms).
// The k-th opportunity lands at t0 + round(k * spacing); a segment that fits
// no opportunity at all is a configuration error (rate too low).
void emit_segment(std::vector<std::int64_t>& out, double t0_ms, double t1_ms, double rate_mbps,
                  int packet_size_bytes) {
    if (rate_mbps <= 0)
        throw std::runtime_error("synthetic trace: rate must be positive");
    const double bits = packet_size_bytes * 8.0;
    const double spacing_ms = bits / (rate_mbps * 1000.0);
    const auto n = static_cast<std::int64_t>(std::floor((t1_ms - t0_ms) / spacing_ms + 1e-9));
    if (n <= 0)
        throw std::runtime_error("synthetic trace: rate so low that packet spacing exceeds "
                                 "the segment length");
    for (std::int64_t k = 1; k <= n; ++k)
        out.push_back(static_cast<std::int64_t>(std::llround(t0_ms + k * spacing_ms)));
}

} // namespace

Trace generate_trace(const SyntheticTraceSpec& spec) {
    if (spec.duration_s <= 0)
        throw std::runtime_error("synthetic trace: duration must be positive");
    if (spec.packet_size_bytes <= 0 || spec.packet_size_bytes > kMaxPacketBytes)
        throw std::runtime_error("synthetic trace: packet size out of range");

    Trace t;
    const double total_ms = static_cast<double>(spec.duration_s) * 1000.0;

    switch (spec.kind) {
    case SyntheticTraceSpec::Kind::Constant:
        emit_segment(t.opportunities_ms, 0.0, total_ms, spec.rate_mbps, spec.packet_size_bytes);
        break;

    case SyntheticTraceSpec::Kind::Step: {
        const double step_ms = spec.step_at_s * 1000.0;
        if (step_ms <= 0 || step_ms >= total_ms)
            throw std::runtime_error("synthetic trace: step time must fall inside the duration");
        emit_segment(t.opportunities_ms, 0.0, step_ms, spec.rate_before_mbps,
                     spec.packet_size_bytes);
        emit_segment(t.opportunities_ms, step_ms, total_ms, spec.rate_after_mbps,
                     spec.packet_size_bytes);
        break;
    }

    case SyntheticTraceSpec::Kind::RandomWalk: {
        if (spec.min_mbps <= 0 || spec.max_mbps <= spec.min_mbps)
            throw std::runtime_error("synthetic trace: walk bounds must satisfy 0 < min < max");
        if (spec.step_interval_ms <= 0)
            throw std::runtime_error("synthetic trace: step interval must be positive");
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> jump(-1.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double range = spec.max_mbps - spec.min_mbps;
        // Cellular capacity holds a working level most of the time and
        // occasionally falls off a cliff for a sub-second fade before
        // climbing back: a tight mean-reverting wander plus Bernoulli dips
        // toward the bottom of the band.
        const double kAnchorFrac = 0.62; // working level within [min, max]
        const double kJumpFrac = 0.06;   // per-step wander amplitude
        const double kPull = 0.45;       // reversion toward the anchor
        const double kDipFrac = 0.08;    // fade floor within [min, max]
        const double kDipProb = 0.45;    // per-step fade probability
        const double anchor = spec.min_mbps + kAnchorFrac * range;
        double rate = anchor;
        for (double t0 = 0.0; t0 < total_ms; t0 += static_cast<double>(spec.step_interval_ms)) {
            const double t1 = std::min(t0 + static_cast<double>(spec.step_interval_ms), total_ms);
            emit_segment(t.opportunities_ms, t0, t1, rate, spec.packet_size_bytes);
            if (unit(rng) < kDipProb)
                rate = spec.min_mbps + (kDipFrac + 0.05 * unit(rng)) * range;
            else
                rate += jump(rng) * kJumpFrac * range + kPull * (anchor - rate);
            rate = std::clamp(rate, spec.min_mbps, spec.max_mbps);
        }
        break;
    }
    }

    std::sort(t.opportunities_ms.begin(), t.opportunities_ms.end());
    t.wrap_length_ms = std::max(t.opportunities_ms.back(), static_cast<std::int64_t>(total_ms));
    validate(t, "synthetic trace");
    return t;
}

SimTime first_opportunity_after(const Trace& t, SimTime now) {
    sim_check(now >= 0, "first_opportunity_after: negative time");
    const SimTime wrap_us = msec(t.wrap_length_ms);
    const SimTime period = now / wrap_us;
    const SimTime base = period * wrap_us;
    const SimTime rel = now - base;
    for (std::int64_t ms : t.opportunities_ms) {
        if (msec(ms) > rel)
            return base + msec(ms);
    }
    return base + wrap_us + msec(t.opportunities_ms.front());
}

OpportunityCursor::OpportunityCursor(const Trace& t) : trace_(&t) {
    sim_check(!t.opportunities_ms.empty() && t.wrap_length_ms > 0,
              "OpportunityCursor: invalid trace");
}

SimTime OpportunityCursor::peek() const {
    return msec(trace_->opportunities_ms[idx_] + period_ * trace_->wrap_length_ms);
}

void OpportunityCursor::advance() {
    if (++idx_ == trace_->opportunities_ms.size()) {
        idx_ = 0;
        ++period_;
    }
}

void OpportunityCursor::skip_to_after(SimTime now) {
    while (peek() <= now)
        advance();
}

std::int64_t estimate_peak_rate_bps(const Trace& t, int packet_size_bytes) {
    constexpr std::int64_t kWindowMs = 100;
    std::int64_t best = 1;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < t.opportunities_ms.size(); ++hi) {
        while (t.opportunities_ms[hi] - t.opportunities_ms[lo] >= kWindowMs)
            ++lo;
        best = std::max(best, static_cast<std::int64_t>(hi - lo + 1));
    }
    return best * packet_size_bytes * 8 * (1000 / kWindowMs);
}

double mean_rate_mbps(const Trace& t, int packet_size_bytes) {
    const double bits =
        static_cast<double>(t.opportunities_ms.size()) * packet_size_bytes * 8.0;
    return bits / (static_cast<double>(t.wrap_length_ms) / 1000.0) / 1e6;
}

SimTime max_opportunity_gap(const Trace& t) {
    std::int64_t gap = t.opportunities_ms.front(); // from period start
    for (std::size_t i = 1; i < t.opportunities_ms.size(); ++i)
        gap = std::max(gap, t.opportunities_ms[i] - t.opportunities_ms[i - 1]);
    // Wrap seam: last opportunity of one period to the first of the next.
    gap = std::max(gap, t.wrap_length_ms - t.opportunities_ms.back() +
                            t.opportunities_ms.front());
    return msec(gap);
}

} // namespace bodesim
