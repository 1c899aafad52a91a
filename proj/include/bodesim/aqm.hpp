#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "bodesim/packet.hpp"

namespace bodesim {

struct EnqueueResult {
    bool accepted = true;
    // Ingress drops: either the offered packet itself (tail drop, early drop)
    // or evicted head-of-line packets (head drop).
    std::vector<DropRecord> drops;
};

struct DequeueResult {
    std::optional<Packet> served;
    std::vector<DropRecord> drops; // egress drops taken before service
};

// Common queue-discipline contract. One dequeue() call corresponds to one
// delivery opportunity and serves at most one packet.
class QueueDiscipline {
  public:
    virtual ~QueueDiscipline() = default;

    virtual EnqueueResult enqueue(Packet p, SimTime now) = 0;
    virtual DequeueResult dequeue(SimTime now) = 0;

    // Periodic control-law update; 0 means none needed.
    virtual SimTime control_interval() const { return 0; }
    virtual void control_update(SimTime) {}

    std::size_t len() const { return q_.size(); }
    std::int64_t byte_occupancy() const { return bytes_; }
    const std::deque<Packet>& queue() const { return q_; }

    std::uint64_t offered_count() const { return offered_; }
    std::uint64_t served_count() const { return served_; }
    std::uint64_t dropped_count() const { return dropped_; }

  protected:
    void push_tail(const Packet& p);
    Packet pop_head();
    void note_offer() { ++offered_; }
    void note_serve() { ++served_; }
    void note_drop(std::size_t n = 1) { dropped_ += n; }

    std::deque<Packet> q_;
    std::int64_t bytes_ = 0;

  private:
    std::uint64_t offered_ = 0, served_ = 0, dropped_ = 0;
};

// Bounded-delay discipline: tag on ingress, expire stale packets at egress
// only, and never let the queue shrink below protect_threshold by expiry. A
// packet is served iff its sojourn is strictly below the bound; equality
// expires. The drop loop re-checks the length at every iteration.
struct BodeParams {
    SimTime bounded_delay = msec(100);
    int protect_threshold = 3;
    std::optional<std::int64_t> capacity_bytes; // nullopt = uncapped (default)
};

class BodeQueue : public QueueDiscipline {
  public:
    explicit BodeQueue(BodeParams params);
    EnqueueResult enqueue(Packet p, SimTime now) override;
    DequeueResult dequeue(SimTime now) override;
    const BodeParams& params() const { return params_; }

  private:
    BodeParams params_;
};

struct CodelParams {
    SimTime target = msec(10);   // default D/2
    SimTime interval = msec(50); // default 5 x min RTT
};

class CodelQueue : public QueueDiscipline {
  public:
    explicit CodelQueue(CodelParams params);
    EnqueueResult enqueue(Packet p, SimTime now) override;
    DequeueResult dequeue(SimTime now) override;

  private:
    struct DodequeueResult {
        std::optional<Packet> p;
        bool ok_to_drop = false;
    };
    DodequeueResult dodequeue(SimTime now);
    SimTime control_law(SimTime t) const;

    CodelParams params_;
    SimTime first_above_time_ = 0;
    SimTime drop_next_ = 0;
    std::uint32_t count_ = 0;
    std::uint32_t lastcount_ = 0;
    bool dropping_ = false;
};

// Proportional-integral controller with a linear update law. The drop
// probability moves with the queue-delay error and its trend; delay is
// estimated from byte occupancy over a smoothed dequeue rate and reads as
// zero until the first rate sample exists.
struct PieParams {
    SimTime ref_delay = msec(20);
    double alpha = 0.125;
    double beta = 1.25;
    SimTime update_interval = msec(30);
    std::int64_t capacity_bytes = 1'500'000;
};

class PieQueue : public QueueDiscipline {
  public:
    PieQueue(PieParams params, std::mt19937_64& rng);
    EnqueueResult enqueue(Packet p, SimTime now) override;
    DequeueResult dequeue(SimTime now) override;
    SimTime control_interval() const override { return params_.update_interval; }
    void control_update(SimTime now) override;

    double drop_prob() const { return drop_prob_; }
    // Test hooks: drive the update law at a chosen operating point.
    void force_state(double drop_prob, SimTime qdelay_old, double dequeue_rate_bps);
    SimTime estimated_qdelay() const;

  private:
    PieParams params_;
    std::mt19937_64* rng_;
    double drop_prob_ = 0.0;
    SimTime qdelay_old_ = 0;
    double avg_dequeue_rate_ = 0.0; // bytes per second, 0 = no sample yet
    std::int64_t departed_bytes_ = 0;
};

struct FifoParams {
    std::int64_t capacity_bytes = 1'500'000;
};

class TailDropQueue : public QueueDiscipline {
  public:
    explicit TailDropQueue(FifoParams params);
    EnqueueResult enqueue(Packet p, SimTime now) override;
    DequeueResult dequeue(SimTime now) override;

  private:
    FifoParams params_;
};

class HeadDropQueue : public QueueDiscipline {
  public:
    explicit HeadDropQueue(FifoParams params);
    EnqueueResult enqueue(Packet p, SimTime now) override;
    DequeueResult dequeue(SimTime now) override;

  private:
    FifoParams params_;
};

// Little's-law buffer dimensioning: the largest number of packets a queue
// serving at max_rate can hold while still draining within the delay bound.
// Exact integer ceiling; no floating point.
std::int64_t compute_buffer_requirement(std::int64_t max_rate_bps, int packet_size_bytes,
                                        SimTime bounded_delay);

} // namespace bodesim
