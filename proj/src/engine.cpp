#include "bodesim/engine.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

namespace bodesim {

bool Engine::EventAfter::operator()(const Event& a, const Event& b) const {
    const auto ka = static_cast<std::uint8_t>(a.kind);
    const auto kb = static_cast<std::uint8_t>(b.kind);
    return std::tie(a.t, ka, a.key1, a.key2, a.order) >
           std::tie(b.t, kb, b.key1, b.key2, b.order);
}

Engine::Engine(const Scenario& sc)
    : scenario_(sc), end_(scenario_.duration()), half_rtt_(scenario_.min_rtt / 2),
      rng_(scenario_.seed),
      sched_(std::make_unique<PriorityScheduler>(scenario_.classes, rng_)),
      cursor_(scenario_.trace) {
    sim_check(!scenario_.trace.opportunities_ms.empty(), "engine: empty trace");
    sim_check(scenario_.min_rtt > 0 && scenario_.min_rtt % 2 == 0,
              "engine: min_rtt must be a positive, even microsecond count");
    peak_occupancy_.assign(sched_->num_classes(), 0);

    for (const auto& cfg : scenario_.sources) {
        sources_.push_back(make_source(cfg, scenario_.min_rtt, end_));
        Source* src = sources_.back().get();
        by_flow_[cfg.flow_id] = src;
        if (cfg.kind == SourceConfig::Kind::Aimd)
            aimd_rx_.emplace(cfg.flow_id, AimdReceiver{});
        else
            rate_rx_.emplace(cfg.flow_id, RateReceiver{});
        schedule_wake(*src);
    }

    Event op;
    op.t = cursor_.peek();
    op.kind = EvKind::Opportunity;
    schedule(std::move(op));

    for (std::size_t c = 0; c < sched_->num_classes(); ++c) {
        const SimTime iv = sched_->klass(c).control_interval();
        if (iv > 0) {
            Event tick;
            tick.t = iv;
            tick.kind = EvKind::ControlTick;
            tick.key1 = static_cast<std::int64_t>(c);
            schedule(std::move(tick));
        }
    }
}

const Source& Engine::source(std::int64_t flow) const { return *by_flow_.at(flow); }

std::int64_t Engine::peak_occupancy_bytes(int class_id) const {
    return peak_occupancy_.at(static_cast<std::size_t>(class_id));
}

void Engine::schedule(Event ev) {
    ev.order = order_counter_++;
    pq_.push(std::move(ev));
}

void Engine::schedule_wake(Source& src) {
    const SimTime t = src.next_wake();
    if (t == kNever)
        return;
    Event ev;
    ev.t = t;
    ev.kind = EvKind::SourceWake;
    ev.key1 = src.flow();
    schedule(std::move(ev));
}

void Engine::arm_rto(Source& src) {
    RtoState& st = rto_[src.flow()];
    const SimTime dl = src.rto_deadline();
    if (dl == st.armed_deadline)
        return; // the pending check is still the right one
    ++st.generation;
    st.armed_deadline = dl;
    if (dl == kNever)
        return;
    Event ev;
    // A deadline can already be due when it is re-armed after a stall; fire
    // the check immediately rather than scheduling into the past.
    ev.t = std::max(dl, now_);
    ev.kind = EvKind::RtoCheck;
    ev.key1 = src.flow();
    ev.key2 = st.generation;
    schedule(std::move(ev));
}

PacketRecord& Engine::record_for(const Packet& p) { return log_.at(p.id); }

void Engine::log_drops(const std::vector<DropRecord>& drops) {
    for (const auto& d : drops) {
        PacketRecord& rec = record_for(d.packet);
        rec.dropped_at = d.dropped_at;
        rec.drop_reason = d.reason;
    }
}

void Engine::submit_sends(Source& src, std::vector<Packet>&& pkts, SimTime now) {
    for (Packet& p : pkts) {
        p.id = next_packet_id_++;
        PacketRecord rec;
        rec.id = p.id;
        rec.flow = p.flow_id;
        rec.klass = p.class_id;
        rec.seq = p.seq_no;
        rec.size_bytes = p.size_bytes;
        rec.retx = p.is_retransmission;
        rec.created_at = p.created_at;
        log_.records.push_back(rec);

        Event ev;
        ev.t = now + half_rtt_;
        ev.kind = EvKind::Arrival;
        ev.key1 = p.flow_id;
        ev.key2 = p.id;
        ev.packet = p;
        schedule(std::move(ev));
    }
    (void)src;
}

void Engine::handle_arrival(Event& ev) {
    Packet p = std::move(ev.packet);
    record_for(p).enqueued_at = now_;
    const int cls = sched_->classify(p);
    EnqueueResult res = sched_->enqueue(std::move(p), now_);
    log_drops(res.drops);
    auto& peak = peak_occupancy_[static_cast<std::size_t>(cls)];
    peak = std::max(peak, sched_->klass(static_cast<std::size_t>(cls)).byte_occupancy());
}

void Engine::handle_opportunity(const Event&) {
    sim_check(cursor_.peek() == now_, "engine: opportunity out of step with trace");
    cursor_.advance();

    DequeueResult res = sched_->dequeue(now_);
    log_drops(res.drops);
    if (res.served) {
        record_for(*res.served).served_at = now_;
        Event d;
        d.t = now_ + half_rtt_;
        d.kind = EvKind::Delivery;
        d.key1 = res.served->flow_id;
        d.key2 = res.served->id;
        d.packet = *res.served;
        schedule(std::move(d));
    }

    Event next;
    next.t = cursor_.peek();
    next.kind = EvKind::Opportunity;
    schedule(std::move(next));

    if (hook_)
        hook_(*sched_, now_, res);
}

void Engine::handle_delivery(const Event& ev) {
    const Packet& p = ev.packet;
    PacketRecord& rec = record_for(p);
    rec.delivered_at = now_;
    const SimTime qdelay = rec.served_at - rec.enqueued_at;
    Source& src = *by_flow_.at(p.flow_id);

    auto ait = aimd_rx_.find(p.flow_id);
    if (ait != aimd_rx_.end()) {
        AimdReceiver& rx = ait->second;
        rx.delivered_id_by_seq.try_emplace(p.seq_no, p.id);
        if (p.seq_no == rx.next_expected) {
            ++rx.next_expected;
            while (rx.out_of_order.erase(rx.next_expected))
                ++rx.next_expected;
        } else if (p.seq_no > rx.next_expected) {
            rx.out_of_order.insert(p.seq_no);
        }
        for (; rx.acked_upto < rx.next_expected; ++rx.acked_upto) {
            auto it = rx.delivered_id_by_seq.find(rx.acked_upto);
            if (it != rx.delivered_id_by_seq.end())
                log_.at(it->second).acked_at = now_;
        }
        FeedbackEvent fb;
        fb.kind = FeedbackEvent::Kind::Ack;
        fb.seq = rx.next_expected;
        fb.queuing_delay = qdelay;
        submit_sends(src, src.on_feedback(fb, now_), now_);
        arm_rto(src);
        return;
    }

    RateReceiver& rx = rate_rx_.at(p.flow_id);
    if (p.seq_no >= rx.next_expected) {
        // The path is order-preserving per flow, so a sequence gap can only
        // mean drops. Report each missing packet after a grace of two round
        // trips, mirroring how a real receiver would run a reorder timer.
        for (std::int64_t s = rx.next_expected; s < p.seq_no; ++s) {
            Event g;
            g.t = now_ + 2 * scenario_.min_rtt;
            g.kind = EvKind::GapLoss;
            g.key1 = p.flow_id;
            g.key2 = s;
            schedule(std::move(g));
        }
        rx.next_expected = p.seq_no + 1;
    }
    FeedbackEvent fb;
    fb.kind = FeedbackEvent::Kind::Delivered;
    fb.seq = p.seq_no;
    fb.queuing_delay = qdelay;
    submit_sends(src, src.on_feedback(fb, now_), now_);
    schedule_wake(src);
}

void Engine::handle_gap_loss(const Event& ev) {
    Source& src = *by_flow_.at(ev.key1);
    FeedbackEvent fb;
    fb.kind = FeedbackEvent::Kind::Lost;
    fb.seq = ev.key2;
    submit_sends(src, src.on_feedback(fb, now_), now_);
    schedule_wake(src);
}

bool Engine::step() {
    if (pq_.empty() || pq_.top().t > end_)
        return false;
    Event ev = pq_.top();
    pq_.pop();
    sim_check(ev.t >= now_, "engine: clock ran backwards");
    now_ = ev.t;

    switch (ev.kind) {
    case EvKind::Arrival:
        handle_arrival(ev);
        break;
    case EvKind::Opportunity:
        handle_opportunity(ev);
        break;
    case EvKind::Delivery:
        handle_delivery(ev);
        break;
    case EvKind::GapLoss:
        handle_gap_loss(ev);
        break;
    case EvKind::ControlTick: {
        QueueDiscipline& q = sched_->klass(static_cast<std::size_t>(ev.key1));
        q.control_update(now_);
        Event next;
        next.t = now_ + q.control_interval();
        next.kind = EvKind::ControlTick;
        next.key1 = ev.key1;
        schedule(std::move(next));
        break;
    }
    case EvKind::SourceWake: {
        Source& src = *by_flow_.at(ev.key1);
        if (src.next_wake() != now_)
            break; // superseded by an earlier wake at this flow
        submit_sends(src, src.wake(now_), now_);
        arm_rto(src);
        schedule_wake(src);
        break;
    }
    case EvKind::RtoCheck: {
        Source& src = *by_flow_.at(ev.key1);
        if (ev.key2 != rto_[ev.key1].generation)
            break; // re-armed since this check was queued
        sim_check(src.rto_deadline() <= now_, "engine: rto fired before its deadline");
        submit_sends(src, src.on_timeout(now_), now_);
        arm_rto(src);
        break;
    }
    }
    return true;
}

void Engine::run() {
    while (step()) {
    }
}

} // namespace bodesim
