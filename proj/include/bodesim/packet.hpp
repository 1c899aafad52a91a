#pragma once

#include <cstdint>
#include <stdexcept>

#include "bodesim/sim_time.hpp"

namespace bodesim {

// One delivery opportunity drains at most one MTU-sized packet.
constexpr int kMaxPacketBytes = 1500;

struct Packet {
    std::int64_t id = -1;        // unique across a run, assigned by the engine
    std::int64_t flow_id = 0;
    int class_id = 0;            // 0 = highest priority
    int size_bytes = kMaxPacketBytes;
    SimTime created_at = 0;      // generation time at the source
    SimTime enqueued_at = 0;     // ingress tag at the bottleneck
    std::int64_t seq_no = 0;     // per-flow sequence, drives loss detection
    bool is_retransmission = false;

    bool operator==(const Packet&) const = default;
};

enum class DropReason {
    ExpiredAtEgress,
    TailOverflow,
    HeadOverflow,
    ProbabilisticEarly,
    CoDelDrop,
};

const char* drop_reason_name(DropReason r);

struct DropRecord {
    Packet packet;
    SimTime dropped_at = 0;
    DropReason reason = DropReason::TailOverflow;

    bool operator==(const DropRecord&) const = default;
};

// Precondition violations are programming errors; they abort the run.
inline void sim_check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(what);
}

inline SimTime sojourn_time(const Packet& p, SimTime now) {
    sim_check(now >= p.enqueued_at, "sojourn_time: now precedes enqueue");
    return now - p.enqueued_at;
}

} // namespace bodesim
