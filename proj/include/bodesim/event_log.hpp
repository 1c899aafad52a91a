#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bodesim/packet.hpp"

namespace bodesim {

// Complete per-packet history of a run. Indexed by packet id; kNever marks a
// stage the packet never reached. A served packet may still be in transit to
// the receiver when the run ends (delivered_at == kNever).
struct PacketRecord {
    std::int64_t id = -1;
    std::int64_t flow = 0;
    int klass = 0;
    std::int64_t seq = 0;
    int size_bytes = 0;
    bool retx = false;

    SimTime created_at = kNever;
    SimTime enqueued_at = kNever;
    SimTime served_at = kNever;
    SimTime delivered_at = kNever;
    SimTime acked_at = kNever;
    SimTime dropped_at = kNever;
    DropReason drop_reason = DropReason::TailOverflow;

    bool dropped() const { return dropped_at != kNever; }
    bool served() const { return served_at != kNever; }

    bool operator==(const PacketRecord&) const = default;
};

struct EventLog {
    std::vector<PacketRecord> records;

    PacketRecord& at(std::int64_t id) { return records.at(static_cast<std::size_t>(id)); }
    const PacketRecord& at(std::int64_t id) const {
        return records.at(static_cast<std::size_t>(id));
    }

    bool operator==(const EventLog&) const = default;
};

void write_events_csv(std::ostream& out, const EventLog& log);

} // namespace bodesim
