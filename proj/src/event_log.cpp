#include "bodesim/event_log.hpp"

#include <ostream>

namespace bodesim {

namespace {

void put_time(std::ostream& out, SimTime t) {
    if (t == kNever)
        out << "NA";
    else
        out << t;
}

} // namespace

void write_events_csv(std::ostream& out, const EventLog& log) {
    out << "id,flow,class,seq,retx,size_bytes,created_us,enqueued_us,served_us,"
           "delivered_us,acked_us,dropped_us,drop_reason\n";
    for (const auto& r : log.records) {
        out << r.id << ',' << r.flow << ',' << r.klass << ',' << r.seq << ','
            << (r.retx ? 1 : 0) << ',' << r.size_bytes << ',';
        put_time(out, r.created_at);
        out << ',';
        put_time(out, r.enqueued_at);
        out << ',';
        put_time(out, r.served_at);
        out << ',';
        put_time(out, r.delivered_at);
        out << ',';
        put_time(out, r.acked_at);
        out << ',';
        put_time(out, r.dropped_at);
        out << ',' << (r.dropped() ? drop_reason_name(r.drop_reason) : "NA") << '\n';
    }
}

} // namespace bodesim
