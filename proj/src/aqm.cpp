#include "bodesim/aqm.hpp"

#include <cmath>

namespace bodesim {

void QueueDiscipline::push_tail(const Packet& p) {
    q_.push_back(p);
    bytes_ += p.size_bytes;
}

Packet QueueDiscipline::pop_head() {
    sim_check(!q_.empty(), "pop_head on empty queue");
    Packet p = q_.front();
    q_.pop_front();
    bytes_ -= p.size_bytes;
    return p;
}

// -------------------------------------------------------------- bounded delay

BodeQueue::BodeQueue(BodeParams params) : params_(params) {
    sim_check(params_.bounded_delay > 0, "BodeQueue: delay bound must be positive");
    sim_check(params_.protect_threshold >= 1, "BodeQueue: protect threshold must be >= 1");
}

EnqueueResult BodeQueue::enqueue(Packet p, SimTime now) {
    note_offer();
    p.enqueued_at = now;
    if (params_.capacity_bytes && bytes_ + p.size_bytes > *params_.capacity_bytes) {
        note_drop();
        return {false, {DropRecord{p, now, DropReason::TailOverflow}}};
    }
    push_tail(p);
    return {true, {}};
}

DequeueResult BodeQueue::dequeue(SimTime now) {
    DequeueResult r;
    // Expire stale heads, but only while the queue stays long enough that a
    // loss remains observable through later deliveries. Length is re-read on
    // every iteration, so at most len - (protect - 1) packets can expire here.
    while (q_.size() >= static_cast<std::size_t>(params_.protect_threshold) &&
           sojourn_time(q_.front(), now) >= params_.bounded_delay) {
        r.drops.push_back(DropRecord{pop_head(), now, DropReason::ExpiredAtEgress});
        note_drop();
    }
    if (!q_.empty()) {
        r.served = pop_head();
        note_serve();
    }
    return r;
}

// ---------------------------------------------------------------------- codel

CodelQueue::CodelQueue(CodelParams params) : params_(params) {
    sim_check(params_.target > 0 && params_.interval > 0, "CodelQueue: bad parameters");
}

EnqueueResult CodelQueue::enqueue(Packet p, SimTime now) {
    note_offer();
    p.enqueued_at = now;
    push_tail(p);
    return {true, {}};
}

SimTime CodelQueue::control_law(SimTime t) const {
    return t + static_cast<SimTime>(std::llround(
                   static_cast<double>(params_.interval) / std::sqrt(static_cast<double>(count_))));
}

CodelQueue::DodequeueResult CodelQueue::dodequeue(SimTime now) {
    DodequeueResult r;
    if (q_.empty()) {
        first_above_time_ = 0;
        return r;
    }
    r.p = pop_head();
    const SimTime sojourn = sojourn_time(*r.p, now);
    if (sojourn < params_.target || bytes_ <= kMaxPacketBytes) {
        first_above_time_ = 0;
    } else if (first_above_time_ == 0) {
        first_above_time_ = now + params_.interval;
    } else if (now >= first_above_time_) {
        r.ok_to_drop = true;
    }
    return r;
}

DequeueResult CodelQueue::dequeue(SimTime now) {
    DequeueResult out;
    DodequeueResult r = dodequeue(now);
    if (dropping_) {
        if (!r.ok_to_drop) {
            dropping_ = false;
        } else {
            while (dropping_ && now >= drop_next_) {
                out.drops.push_back(DropRecord{*r.p, now, DropReason::CoDelDrop});
                note_drop();
                ++count_;
                r = dodequeue(now);
                if (!r.ok_to_drop)
                    dropping_ = false;
                else
                    drop_next_ = control_law(drop_next_);
            }
        }
    } else if (r.ok_to_drop) {
        out.drops.push_back(DropRecord{*r.p, now, DropReason::CoDelDrop});
        note_drop();
        r = dodequeue(now);
        dropping_ = true;
        // Re-entering drop state shortly after leaving it resumes near the
        // previous drop cadence instead of starting over.
        const std::uint32_t delta = count_ - lastcount_;
        count_ = (delta > 1 && now - drop_next_ < 16 * params_.interval) ? delta : 1;
        drop_next_ = control_law(now);
        lastcount_ = count_;
    }
    if (r.p) {
        out.served = *r.p;
        note_serve();
    }
    return out;
}

// ------------------------------------------------------------------------ pie

PieQueue::PieQueue(PieParams params, std::mt19937_64& rng) : params_(params), rng_(&rng) {
    sim_check(params_.update_interval > 0, "PieQueue: update interval must be positive");
    sim_check(params_.capacity_bytes > 0, "PieQueue: capacity must be positive");
}

SimTime PieQueue::estimated_qdelay() const {
    if (avg_dequeue_rate_ <= 0.0)
        return 0; // cold start: no departure observed yet
    const double sec = static_cast<double>(bytes_) / avg_dequeue_rate_;
    return static_cast<SimTime>(std::llround(sec * 1e6));
}

EnqueueResult PieQueue::enqueue(Packet p, SimTime now) {
    note_offer();
    p.enqueued_at = now;
    if (drop_prob_ > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(*rng_) < drop_prob_) {
            note_drop();
            return {false, {DropRecord{p, now, DropReason::ProbabilisticEarly}}};
        }
    }
    if (bytes_ + p.size_bytes > params_.capacity_bytes) {
        note_drop();
        return {false, {DropRecord{p, now, DropReason::TailOverflow}}};
    }
    push_tail(p);
    return {true, {}};
}

DequeueResult PieQueue::dequeue(SimTime) {
    DequeueResult r;
    if (!q_.empty()) {
        r.served = pop_head();
        departed_bytes_ += r.served->size_bytes;
        note_serve();
    }
    return r;
}

void PieQueue::control_update(SimTime) {
    if (departed_bytes_ > 0) {
        const double sample = static_cast<double>(departed_bytes_) /
                              to_sec(params_.update_interval);
        avg_dequeue_rate_ =
            avg_dequeue_rate_ <= 0.0 ? sample : 0.5 * avg_dequeue_rate_ + 0.5 * sample;
        departed_bytes_ = 0;
    }
    const double qdelay = to_sec(estimated_qdelay());
    const double qdelay_old = to_sec(qdelay_old_);
    const double ref = to_sec(params_.ref_delay);
    double p = drop_prob_ + params_.alpha * (qdelay - ref) + params_.beta * (qdelay - qdelay_old);
    drop_prob_ = std::clamp(p, 0.0, 1.0);
    qdelay_old_ = estimated_qdelay();
}

void PieQueue::force_state(double drop_prob, SimTime qdelay_old, double dequeue_rate_bps) {
    drop_prob_ = drop_prob;
    qdelay_old_ = qdelay_old;
    avg_dequeue_rate_ = dequeue_rate_bps / 8.0; // stored as bytes/s
    departed_bytes_ = 0;
}

// ----------------------------------------------------------------------- fifo

TailDropQueue::TailDropQueue(FifoParams params) : params_(params) {
    sim_check(params_.capacity_bytes > 0, "TailDropQueue: capacity must be positive");
}

EnqueueResult TailDropQueue::enqueue(Packet p, SimTime now) {
    note_offer();
    p.enqueued_at = now;
    // A packet that exactly fills the buffer is accepted.
    if (bytes_ + p.size_bytes > params_.capacity_bytes) {
        note_drop();
        return {false, {DropRecord{p, now, DropReason::TailOverflow}}};
    }
    push_tail(p);
    return {true, {}};
}

DequeueResult TailDropQueue::dequeue(SimTime) {
    DequeueResult r;
    if (!q_.empty()) {
        r.served = pop_head();
        note_serve();
    }
    return r;
}

HeadDropQueue::HeadDropQueue(FifoParams params) : params_(params) {
    sim_check(params_.capacity_bytes > 0, "HeadDropQueue: capacity must be positive");
}

EnqueueResult HeadDropQueue::enqueue(Packet p, SimTime now) {
    note_offer();
    p.enqueued_at = now;
    EnqueueResult r{true, {}};
    // Evict from the head: exactly as many packets as needed to make room.
    while (!q_.empty() && bytes_ + p.size_bytes > params_.capacity_bytes) {
        r.drops.push_back(DropRecord{pop_head(), now, DropReason::HeadOverflow});
        note_drop();
    }
    if (bytes_ + p.size_bytes > params_.capacity_bytes) {
        // Queue is empty and the packet alone exceeds the cap.
        note_drop();
        return {false, {DropRecord{p, now, DropReason::TailOverflow}}};
    }
    push_tail(p);
    return r;
}

DequeueResult HeadDropQueue::dequeue(SimTime) {
    DequeueResult r;
    if (!q_.empty()) {
        r.served = pop_head();
        note_serve();
    }
    return r;
}

// ----------------------------------------------------------------- dimensions

std::int64_t compute_buffer_requirement(std::int64_t max_rate_bps, int packet_size_bytes,
                                        SimTime bounded_delay) {
    sim_check(max_rate_bps > 0 && packet_size_bytes > 0 && bounded_delay > 0,
              "compute_buffer_requirement: arguments must be positive");
    // ceil(rate * delay / packet_bits), all in integer arithmetic:
    // packets = ceil((rate_bps * delay_us) / (packet_bits * 1e6)).
    const std::int64_t num = max_rate_bps * bounded_delay;
    const std::int64_t den = static_cast<std::int64_t>(packet_size_bytes) * 8 * 1'000'000;
    return (num + den - 1) / den;
}

} // namespace bodesim
