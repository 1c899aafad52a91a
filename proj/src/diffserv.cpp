#include "bodesim/diffserv.hpp"

#include <stdexcept>

namespace bodesim {

std::unique_ptr<QueueDiscipline> make_discipline(const DisciplineConfig& cfg,
                                                 std::mt19937_64& rng) {
    switch (cfg.kind) {
    case AqmKind::Bode: {
        BodeParams p;
        p.bounded_delay = cfg.bounded_delay;
        p.protect_threshold = cfg.protect_threshold;
        if (cfg.cap_mode != CapMode::Unlimited)
            p.capacity_bytes = cfg.capacity_bytes;
        return std::make_unique<BodeQueue>(p);
    }
    case AqmKind::Codel: {
        CodelParams p;
        p.target = cfg.codel_target;
        p.interval = cfg.codel_interval;
        return std::make_unique<CodelQueue>(p);
    }
    case AqmKind::Pie: {
        PieParams p;
        p.ref_delay = cfg.bounded_delay;
        p.alpha = cfg.pie_alpha;
        p.beta = cfg.pie_beta;
        p.update_interval = cfg.pie_update_interval;
        p.capacity_bytes = cfg.capacity_bytes;
        return std::make_unique<PieQueue>(p, rng);
    }
    case AqmKind::TailDrop: return std::make_unique<TailDropQueue>(FifoParams{cfg.capacity_bytes});
    case AqmKind::HeadDrop: return std::make_unique<HeadDropQueue>(FifoParams{cfg.capacity_bytes});
    }
    throw std::logic_error("make_discipline: unknown kind");
}

PriorityScheduler::PriorityScheduler(const std::vector<ClassConfig>& classes,
                                     std::mt19937_64& rng)
    : configs_(classes) {
    sim_check(!classes.empty(), "scheduler: at least one class required");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        sim_check(classes[i].class_id == static_cast<int>(i),
                  "scheduler: class ids must be contiguous from 0");
        queues_.push_back(make_discipline(classes[i].discipline, rng));
    }
}

int PriorityScheduler::classify(const Packet& p) const {
    sim_check(p.class_id >= 0 && p.class_id < static_cast<int>(queues_.size()),
              "classify: packet class id out of range");
    return p.class_id;
}

EnqueueResult PriorityScheduler::enqueue(Packet p, SimTime now) {
    return queues_[static_cast<std::size_t>(classify(p))]->enqueue(p, now);
}

DequeueResult PriorityScheduler::dequeue(SimTime now) {
    // Strict priority: the first backlogged class wins the opportunity.
    for (auto& q : queues_) {
        if (q->len() > 0)
            return q->dequeue(now);
    }
    return {};
}

std::size_t PriorityScheduler::total_len() const {
    std::size_t n = 0;
    for (const auto& q : queues_)
        n += q->len();
    return n;
}

} // namespace bodesim
