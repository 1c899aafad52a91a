#include "bodesim/packet.hpp"

namespace bodesim {

const char* drop_reason_name(DropReason r) {
    switch (r) {
    case DropReason::ExpiredAtEgress: return "expired_at_egress";
    case DropReason::TailOverflow: return "tail_overflow";
    case DropReason::HeadOverflow: return "head_overflow";
    case DropReason::ProbabilisticEarly: return "probabilistic_early";
    case DropReason::CoDelDrop: return "codel_drop";
    }
    return "unknown";
}

} // namespace bodesim
