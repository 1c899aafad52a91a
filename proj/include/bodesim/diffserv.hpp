#pragma once

#include <memory>
#include <random>
#include <vector>

#include "bodesim/aqm.hpp"
#include "bodesim/scenario.hpp"

namespace bodesim {

std::unique_ptr<QueueDiscipline> make_discipline(const DisciplineConfig& cfg,
                                                 std::mt19937_64& rng);

// Strict-priority scheduler over per-class disciplines. Class ids are
// contiguous from 0 (highest priority); a lower class is served only when
// every higher one is empty. A single-queue setup is the one-class case.
class PriorityScheduler {
  public:
    PriorityScheduler(const std::vector<ClassConfig>& classes, std::mt19937_64& rng);

    int classify(const Packet& p) const; // validates class id

    EnqueueResult enqueue(Packet p, SimTime now);
    DequeueResult dequeue(SimTime now);

    std::size_t num_classes() const { return queues_.size(); }
    QueueDiscipline& klass(std::size_t idx) { return *queues_[idx]; }
    const QueueDiscipline& klass(std::size_t idx) const { return *queues_[idx]; }
    const ClassConfig& class_config(std::size_t idx) const { return configs_[idx]; }

    std::size_t total_len() const;

  private:
    std::vector<ClassConfig> configs_;
    std::vector<std::unique_ptr<QueueDiscipline>> queues_;
};

} // namespace bodesim
