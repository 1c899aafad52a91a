#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "bodesim/diffserv.hpp"
#include "bodesim/event_log.hpp"
#include "bodesim/scenario.hpp"
#include "bodesim/sources.hpp"
#include "bodesim/trace.hpp"

namespace bodesim {

// Deterministic discrete-event loop. The clock never runs backwards; ties
// break on a fixed phase order (queue arrivals first, by flow id, then the
// delivery opportunity, then receiver-side events), and finally on insertion
// order. A (scenario, seed) pair fully determines the event log.
//
// Topology per packet: source -> fixed min_rtt/2 -> bottleneck queue ->
// delivery opportunity -> fixed min_rtt/2 -> receiver. Feedback rides an
// uncongested return path that completes the fixed round trip at min_rtt.
class Engine {
  public:
    explicit Engine(const Scenario& sc);

    bool step(); // process one event; false when nothing remains before run end
    void run();

    SimTime now() const { return now_; }
    const EventLog& log() const { return log_; }
    const PriorityScheduler& scheduler() const { return *sched_; }
    const Source& source(std::int64_t flow) const;

    // Invoked after every delivery opportunity; used by invariant suites.
    using OpportunityHook =
        std::function<void(const PriorityScheduler&, SimTime, const DequeueResult&)>;
    void set_opportunity_hook(OpportunityHook h) { hook_ = std::move(h); }

    std::int64_t peak_occupancy_bytes(int class_id) const;

  private:
    enum class EvKind : std::uint8_t {
        Arrival = 0,
        Opportunity = 1,
        Delivery = 2,
        GapLoss = 3,
        ControlTick = 4,
        SourceWake = 5,
        RtoCheck = 6,
    };

    struct Event {
        SimTime t = 0;
        EvKind kind = EvKind::Opportunity;
        std::int64_t key1 = 0; // flow / class index
        std::int64_t key2 = 0; // packet id / seq / timer generation
        std::uint64_t order = 0;
        Packet packet; // Arrival and Delivery carry their packet
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const;
    };

    struct RateReceiver {
        std::int64_t next_expected = 0;
    };
    struct AimdReceiver {
        std::int64_t next_expected = 0;
        std::int64_t acked_upto = 0; // records below this carry acked_at
        std::set<std::int64_t> out_of_order;
        std::map<std::int64_t, std::int64_t> delivered_id_by_seq; // first copy wins
    };
    struct RtoState {
        std::int64_t generation = 0; // stale-timer fence
        SimTime armed_deadline = kNever;
    };

    void schedule(Event ev);
    void schedule_wake(Source& src);
    void arm_rto(Source& src);
    void submit_sends(Source& src, std::vector<Packet>&& pkts, SimTime now);
    void handle_arrival(Event& ev);
    void handle_opportunity(const Event& ev);
    void handle_delivery(const Event& ev);
    void handle_gap_loss(const Event& ev);
    void log_drops(const std::vector<DropRecord>& drops);
    PacketRecord& record_for(const Packet& p);

    const Scenario scenario_;
    SimTime end_;
    SimTime half_rtt_;
    std::mt19937_64 rng_;
    std::unique_ptr<PriorityScheduler> sched_;
    OpportunityCursor cursor_;
    std::vector<std::unique_ptr<Source>> sources_;
    std::map<std::int64_t, Source*> by_flow_;
    std::map<std::int64_t, RateReceiver> rate_rx_;
    std::map<std::int64_t, AimdReceiver> aimd_rx_;
    std::map<std::int64_t, RtoState> rto_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> pq_;
    std::uint64_t order_counter_ = 0;
    std::int64_t next_packet_id_ = 0;
    SimTime now_ = 0;
    EventLog log_;
    OpportunityHook hook_;
    std::vector<std::int64_t> peak_occupancy_;
};

} // namespace bodesim
