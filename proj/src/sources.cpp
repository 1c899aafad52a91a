#include "bodesim/sources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace bodesim {

namespace {

std::int64_t to_bps(double mbps) {
    return static_cast<std::int64_t>(std::llround(mbps * 1e6));
}

constexpr SimTime kRtoMax = seconds(60);

} // namespace

Source::Source(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end)
    : cfg_(cfg), min_rtt_(min_rtt),
      stop_(cfg.stop_s < 0 ? run_end
                           : static_cast<SimTime>(std::llround(cfg.stop_s * 1e6))) {
    sim_check(cfg_.packet_size_bytes > 0 && cfg_.packet_size_bytes <= kMaxPacketBytes,
              "source: packet size out of range");
}

Packet Source::fresh_packet(SimTime now, std::int64_t seq, bool retx) const {
    Packet p;
    p.flow_id = cfg_.flow_id;
    p.class_id = cfg_.class_id;
    p.size_bytes = cfg_.packet_size_bytes;
    p.created_at = now;
    p.seq_no = seq;
    p.is_retransmission = retx;
    return p;
}

// ------------------------------------------------------------------------ cbr

CbrSource::CbrSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end)
    : Source(cfg, min_rtt, run_end),
      start_(static_cast<SimTime>(std::llround(cfg.start_s * 1e6))) {
    sim_check(cfg.rate_mbps > 0, "cbr: rate must be positive");
}

SimTime CbrSource::send_time_of(std::int64_t k) const {
    // Exact rational pacing: the k-th packet goes out k * bits / rate after
    // the start, with no accumulated floating-point drift.
    const std::int64_t bits = static_cast<std::int64_t>(cfg_.packet_size_bytes) * 8;
    return start_ + (k * bits * 1'000'000) / to_bps(cfg_.rate_mbps);
}

SimTime CbrSource::next_wake() const {
    const SimTime t = send_time_of(next_k_);
    return t < stop_ ? t : kNever;
}

std::vector<Packet> CbrSource::wake(SimTime now) {
    std::vector<Packet> out;
    if (now >= stop_)
        return out;
    out.push_back(fresh_packet(now, next_k_));
    ++next_k_;
    return out;
}

// ------------------------------------------------------------------- adaptive

AdaptiveSource::AdaptiveSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end)
    : Source(cfg, min_rtt, run_end), rate_bps_(static_cast<double>(to_bps(cfg.rate_mbps))),
      min_bps_(static_cast<double>(to_bps(cfg.min_rate_mbps))),
      max_bps_(static_cast<double>(to_bps(cfg.max_rate_mbps))),
      step_bps_(static_cast<double>(to_bps(cfg.increase_step_mbps))),
      next_send_(static_cast<SimTime>(std::llround(cfg.start_s * 1e6))) {
    sim_check(min_bps_ > 0 && min_bps_ <= max_bps_, "adaptive: bad rate bounds");
    sim_check(cfg.decrease_factor > 0 && cfg.decrease_factor < 1,
              "adaptive: decrease factor must be in (0,1)");
    sim_check(cfg.comfort_delay > 0, "adaptive: comfort delay unresolved");
    rate_bps_ = std::clamp(rate_bps_, min_bps_, max_bps_);
}

SimTime AdaptiveSource::next_wake() const {
    return next_send_ < stop_ ? next_send_ : kNever;
}

std::vector<Packet> AdaptiveSource::wake(SimTime now) {
    std::vector<Packet> out;
    if (now >= stop_)
        return out;
    out.push_back(fresh_packet(now, next_seq_++));
    const double bits = cfg_.packet_size_bytes * 8.0;
    const auto gap = static_cast<SimTime>(std::llround(bits * 1e6 / rate_bps_));
    next_send_ = now + std::max<SimTime>(gap, 1);
    return out;
}

std::vector<Packet> AdaptiveSource::on_feedback(const FeedbackEvent& ev, SimTime now) {
    switch (ev.kind) {
    case FeedbackEvent::Kind::Lost:
        rate_bps_ = std::max(min_bps_, rate_bps_ * cfg_.decrease_factor);
        break;
    case FeedbackEvent::Kind::Delivered: {
        // Additive increase only while the path feels comfortable, and at
        // most once per round trip so a burst of deliveries is one step.
        const SimTime window = min_rtt_ + ev.queuing_delay;
        if (ev.queuing_delay < cfg_.comfort_delay &&
            (last_increase_ == kNever || now - last_increase_ >= window)) {
            rate_bps_ = std::min(max_bps_, rate_bps_ + step_bps_);
            last_increase_ = now;
        }
        last_delay_ = ev.queuing_delay;
        break;
    }
    case FeedbackEvent::Kind::Ack:
        break;
    }
    return {};
}

// ----------------------------------------------------------------------- aimd

AimdSource::AimdSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end)
    : Source(cfg, min_rtt, run_end), cwnd_(cfg.initial_cwnd), ssthresh_(cfg.initial_ssthresh),
      rto_(msec(200)), rto_min_(msec(200)) {
    sim_check(cwnd_ >= 1, "aimd: initial cwnd must be >= 1");
    sim_check(ssthresh_ >= 2, "aimd: initial ssthresh must be >= 2");
    if (cwnd_ >= ssthresh_)
        state_ = State::CongestionAvoidance;
}

SimTime AimdSource::next_wake() const {
    if (started_)
        return kNever; // ack-clocked from here on
    const auto start = static_cast<SimTime>(std::llround(cfg_.start_s * 1e6));
    return start < stop_ ? start : kNever;
}

std::vector<Packet> AimdSource::wake(SimTime now) {
    started_ = true;
    return send_window(now);
}

Packet AimdSource::transmit(std::int64_t seq, SimTime now, bool force_retx) {
    outstanding_.insert(seq);
    last_tx_[seq] = now;
    // A sequence with a recorded first transmission is a retransmission no
    // matter how it was triggered (timeout, dupacks, or a rewound window).
    const bool retx = force_retx || first_tx_.count(seq) > 0;
    if (retx)
        retransmitted_.insert(seq);
    else
        first_tx_[seq] = now;
    return fresh_packet(now, seq, retx);
}

std::vector<Packet> AimdSource::send_window(SimTime now) {
    std::vector<Packet> out;
    if (now >= stop_)
        return out;
    // Never more packets in flight than the window allows.
    while (static_cast<double>(outstanding_.size()) + 1.0 <= cwnd_ + 1e-9) {
        out.push_back(transmit(next_seq_, now, false));
        ++next_seq_;
    }
    return out;
}

void AimdSource::rtt_sample(SimTime sample) {
    if (srtt_ == 0) {
        srtt_ = sample;
        rttvar_ = sample / 2;
    } else {
        const SimTime err = std::abs(srtt_ - sample);
        rttvar_ = (3 * rttvar_ + err) / 4;
        srtt_ = (7 * srtt_ + sample) / 8;
    }
    rto_ = std::clamp(srtt_ + 4 * rttvar_, rto_min_, kRtoMax);
}

void AimdSource::enter_fast_recovery(SimTime now, std::vector<Packet>& out) {
    ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
    retx_seq_ = highest_ack_;
    state_ = State::FastRecovery;
    out.push_back(transmit(highest_ack_, now, true));
}

std::vector<Packet> AimdSource::on_feedback(const FeedbackEvent& ev, SimTime now) {
    if (ev.kind != FeedbackEvent::Kind::Ack)
        return {};
    std::vector<Packet> out;
    const std::int64_t ack = ev.seq;

    if (ack > highest_ack_) {
        // Karn's rule: sample only from segments that were never retransmitted.
        const std::int64_t probe = ack - 1;
        if (!retransmitted_.count(probe)) {
            auto it = first_tx_.find(probe);
            if (it != first_tx_.end())
                rtt_sample(now - it->second);
        }
        outstanding_.erase(outstanding_.begin(), outstanding_.lower_bound(ack));
        first_tx_.erase(first_tx_.begin(), first_tx_.lower_bound(ack));
        last_tx_.erase(last_tx_.begin(), last_tx_.lower_bound(ack));
        retransmitted_.erase(retransmitted_.begin(), retransmitted_.lower_bound(ack));

        if (state_ == State::FastRecovery && ack > retx_seq_) {
            // The retransmission got through: deflate and resume normally.
            cwnd_ = ssthresh_;
            state_ = State::CongestionAvoidance;
            retx_seq_ = -1;
        } else if (state_ == State::SlowStart) {
            cwnd_ += 1.0;
            if (cwnd_ >= ssthresh_)
                state_ = State::CongestionAvoidance;
        } else if (state_ == State::CongestionAvoidance) {
            cwnd_ += 1.0 / cwnd_;
        }
        highest_ack_ = ack;
        // A cumulative ack can overtake a rewound send pointer when the
        // receiver already held the data; never send below the ack line.
        if (next_seq_ < highest_ack_)
            next_seq_ = highest_ack_;
        dupacks_ = 0;
        auto sends = send_window(now);
        out.insert(out.end(), sends.begin(), sends.end());
        return out;
    }

    if (ack == highest_ack_ && !outstanding_.empty() && state_ != State::FastRecovery) {
        if (++dupacks_ == 3)
            enter_fast_recovery(now, out);
    }
    return out;
}

SimTime AimdSource::rto_deadline() const {
    if (outstanding_.empty())
        return kNever;
    return last_tx_.at(*outstanding_.begin()) + rto_;
}

std::vector<Packet> AimdSource::on_timeout(SimTime now) {
    std::vector<Packet> out;
    if (outstanding_.empty())
        return out;
    ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
    cwnd_ = 1.0;
    state_ = State::SlowStart;
    dupacks_ = 0;
    retx_seq_ = -1;
    rto_ = std::min(rto_ * 2, kRtoMax); // exponential backoff until a fresh sample
    // Everything in flight is presumed lost: rewind the send pointer so the
    // slow-start acks clock the remaining holes back out in order (go-back-N).
    const std::int64_t oldest = *outstanding_.begin();
    outstanding_.clear();
    next_seq_ = oldest;
    out.push_back(transmit(next_seq_, now, true));
    ++next_seq_;
    return out;
}

std::unique_ptr<Source> make_source(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end) {
    switch (cfg.kind) {
    case SourceConfig::Kind::Cbr: return std::make_unique<CbrSource>(cfg, min_rtt, run_end);
    case SourceConfig::Kind::Adaptive:
        return std::make_unique<AdaptiveSource>(cfg, min_rtt, run_end);
    case SourceConfig::Kind::Aimd: return std::make_unique<AimdSource>(cfg, min_rtt, run_end);
    }
    throw std::logic_error("make_source: unknown source kind");
}

} // namespace bodesim
