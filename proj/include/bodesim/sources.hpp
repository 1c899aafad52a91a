#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "bodesim/packet.hpp"
#include "bodesim/scenario.hpp"

namespace bodesim {

struct FeedbackEvent {
    enum class Kind { Delivered, Lost, Ack };
    Kind kind = Kind::Delivered;
    std::int64_t seq = 0;          // Delivered/Lost: data seq; Ack: cumulative next expected
    SimTime queuing_delay = 0;     // Delivered only
};

// Closed-loop sender. Sources never see queue state; everything they learn
// arrives through feedback events derived from their own deliveries.
class Source {
  public:
    Source(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end);
    virtual ~Source() = default;

    std::int64_t flow() const { return cfg_.flow_id; }
    int klass() const { return cfg_.class_id; }
    const SourceConfig& config() const { return cfg_; }

    virtual SimTime next_wake() const = 0;          // kNever when idle
    virtual std::vector<Packet> wake(SimTime now) = 0;
    virtual std::vector<Packet> on_feedback(const FeedbackEvent& ev, SimTime now) = 0;

    // AIMD timer plumbing; other sources have no retransmission clock.
    virtual SimTime rto_deadline() const { return kNever; }
    virtual std::vector<Packet> on_timeout(SimTime) { return {}; }

  protected:
    Packet fresh_packet(SimTime now, std::int64_t seq, bool retx = false) const;
    SimTime stop_time() const { return stop_; }

    SourceConfig cfg_;
    SimTime min_rtt_;
    SimTime stop_;
};

// Constant bit rate, evenly paced, drift-free integer pacing.
class CbrSource : public Source {
  public:
    CbrSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end);
    SimTime next_wake() const override;
    std::vector<Packet> wake(SimTime now) override;
    std::vector<Packet> on_feedback(const FeedbackEvent&, SimTime) override { return {}; }

  private:
    SimTime send_time_of(std::int64_t k) const;
    std::int64_t next_k_ = 0;
    std::int64_t start_;
};

// Rate-controlled interactive sender: multiplicative decrease on loss,
// small additive increase (at most once per RTT) while delay sits below the
// comfort threshold. Stands in for delay-sensitive conferencing apps.
class AdaptiveSource : public Source {
  public:
    AdaptiveSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end);
    SimTime next_wake() const override;
    std::vector<Packet> wake(SimTime now) override;
    std::vector<Packet> on_feedback(const FeedbackEvent& ev, SimTime now) override;

    double rate_bps() const { return rate_bps_; }

  private:
    double rate_bps_;
    double min_bps_, max_bps_, step_bps_;
    SimTime next_send_;
    SimTime last_increase_ = kNever;
    SimTime last_delay_ = 0;
    std::int64_t next_seq_ = 0;
};

// Window-based loss-driven sender (slow start / congestion avoidance /
// fast recovery), cumulative acks, one ack per delivered packet.
class AimdSource : public Source {
  public:
    enum class State { SlowStart, CongestionAvoidance, FastRecovery };

    AimdSource(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end);
    SimTime next_wake() const override;
    std::vector<Packet> wake(SimTime now) override;
    std::vector<Packet> on_feedback(const FeedbackEvent& ev, SimTime now) override;
    SimTime rto_deadline() const override;
    std::vector<Packet> on_timeout(SimTime now) override;

    double cwnd() const { return cwnd_; }
    double ssthresh() const { return ssthresh_; }
    State state() const { return state_; }
    SimTime rto() const { return rto_; }
    int dupack_count() const { return dupacks_; }
    std::int64_t in_flight() const { return static_cast<std::int64_t>(outstanding_.size()); }

  private:
    std::vector<Packet> send_window(SimTime now);
    Packet transmit(std::int64_t seq, SimTime now, bool retx);
    void enter_fast_recovery(SimTime now, std::vector<Packet>& out);
    void rtt_sample(SimTime sample);

    double cwnd_, ssthresh_;
    State state_ = State::SlowStart;
    std::int64_t next_seq_ = 0;
    std::int64_t highest_ack_ = 0; // cumulative: all seqs below are acked
    int dupacks_ = 0;
    std::int64_t retx_seq_ = -1; // seq retransmitted by the open fast recovery
    bool started_ = false;

    std::set<std::int64_t> outstanding_;          // sent, unacked (retx replaces original)
    std::map<std::int64_t, SimTime> first_tx_;    // Karn: no samples from retx seqs
    std::map<std::int64_t, SimTime> last_tx_;
    std::set<std::int64_t> retransmitted_;

    SimTime srtt_ = 0, rttvar_ = 0;
    SimTime rto_;
    SimTime rto_min_;
};

std::unique_ptr<Source> make_source(const SourceConfig& cfg, SimTime min_rtt, SimTime run_end);

} // namespace bodesim
