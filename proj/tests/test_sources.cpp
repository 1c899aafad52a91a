#include "doctest.h"

#include <cmath>
#include <random>

#include "bodesim/sources.hpp"

using namespace bodesim;

namespace {

constexpr SimTime kRunEnd = seconds(300);

SourceConfig cbr_cfg(double mbps) {
    SourceConfig cfg;
    cfg.kind = SourceConfig::Kind::Cbr;
    cfg.flow_id = 1;
    cfg.rate_mbps = mbps;
    return cfg;
}

SourceConfig adaptive_cfg() {
    SourceConfig cfg;
    cfg.kind = SourceConfig::Kind::Adaptive;
    cfg.flow_id = 1;
    cfg.rate_mbps = 5.0;
    cfg.min_rate_mbps = 0.5;
    cfg.max_rate_mbps = 10.0;
    cfg.increase_step_mbps = 0.1;
    cfg.decrease_factor = 0.85;
    cfg.comfort_delay = msec(100);
    return cfg;
}

SourceConfig aimd_cfg(double cwnd0, double ssthresh0) {
    SourceConfig cfg;
    cfg.kind = SourceConfig::Kind::Aimd;
    cfg.flow_id = 1;
    cfg.initial_cwnd = cwnd0;
    cfg.initial_ssthresh = ssthresh0;
    return cfg;
}

FeedbackEvent ack(std::int64_t next_expected) {
    FeedbackEvent ev;
    ev.kind = FeedbackEvent::Kind::Ack;
    ev.seq = next_expected;
    return ev;
}

FeedbackEvent delivered(std::int64_t seq, SimTime qdelay) {
    FeedbackEvent ev;
    ev.kind = FeedbackEvent::Kind::Delivered;
    ev.seq = seq;
    ev.queuing_delay = qdelay;
    return ev;
}

FeedbackEvent lost(std::int64_t seq) {
    FeedbackEvent ev;
    ev.kind = FeedbackEvent::Kind::Lost;
    ev.seq = seq;
    return ev;
}

} // namespace

// ------------------------------------------------------------------------ cbr

TEST_CASE("cbr paces packets at the exact configured spacing") {
    CbrSource src(cbr_cfg(6.0), msec(10), kRunEnd); // 12000 bits / 6 Mb/s = 2 ms
    for (int k = 0; k < 100; ++k) {
        const SimTime t = src.next_wake();
        CHECK(t == k * msec(2));
        const auto sent = src.wake(t);
        REQUIRE(sent.size() == 1);
        CHECK(sent[0].seq_no == k);
        CHECK(sent[0].flow_id == 1);
    }
}

TEST_CASE("cbr pacing accumulates no drift at awkward rates") {
    // 12000 bits at 7 Mb/s: every 7th packet lands on an exact multiple of
    // 12 ms; integer pacing must hit it dead on.
    CbrSource src(cbr_cfg(7.0), msec(10), kRunEnd);
    SimTime t7000 = 0;
    for (int k = 0; k <= 7'000; ++k) {
        t7000 = src.next_wake();
        src.wake(t7000);
    }
    CHECK(t7000 == msec(12'000));
}

TEST_CASE("cbr spacing scales inversely with rate") {
    CbrSource fast(cbr_cfg(12.0), msec(10), kRunEnd);
    fast.wake(fast.next_wake());
    CHECK(fast.next_wake() == msec(1));

    CbrSource slow(cbr_cfg(0.6), msec(10), kRunEnd);
    slow.wake(slow.next_wake());
    CHECK(slow.next_wake() == msec(20));
}

TEST_CASE("cbr stops sending at its stop time") {
    SourceConfig cfg = cbr_cfg(6.0);
    cfg.stop_s = 0.005;
    CbrSource src(cfg, msec(10), kRunEnd);
    CHECK(src.next_wake() == 0);
    src.wake(0);
    CHECK(src.next_wake() == msec(2));
    src.wake(msec(2));
    CHECK(src.next_wake() == msec(4));
    src.wake(msec(4));
    CHECK(src.next_wake() == kNever); // 6 ms >= stop
}

// ------------------------------------------------------------------- adaptive

TEST_CASE("adaptive source backs off multiplicatively on loss") {
    AdaptiveSource src(adaptive_cfg(), msec(10), kRunEnd);
    CHECK(src.rate_bps() == doctest::Approx(5e6));
    src.on_feedback(lost(0), msec(50));
    CHECK(src.rate_bps() == doctest::Approx(4.25e6));
    src.on_feedback(lost(1), msec(60));
    CHECK(src.rate_bps() == doctest::Approx(3.6125e6));
}

TEST_CASE("adaptive source never falls below its floor rate") {
    AdaptiveSource src(adaptive_cfg(), msec(10), kRunEnd);
    for (int i = 0; i < 100; ++i)
        src.on_feedback(lost(i), msec(i));
    CHECK(src.rate_bps() == doctest::Approx(0.5e6));
}

TEST_CASE("adaptive source raises its rate at most once per round trip") {
    AdaptiveSource src(adaptive_cfg(), msec(10), kRunEnd);
    // Three comfortable deliveries inside one RTT: one step only.
    src.on_feedback(delivered(0, msec(2)), msec(100));
    src.on_feedback(delivered(1, msec(2)), msec(101));
    src.on_feedback(delivered(2, msec(2)), msec(102));
    CHECK(src.rate_bps() == doctest::Approx(5.1e6));
    // A round trip later the next step is allowed.
    src.on_feedback(delivered(3, msec(2)), msec(120));
    CHECK(src.rate_bps() == doctest::Approx(5.2e6));
}

TEST_CASE("adaptive source holds its rate when delay is uncomfortable") {
    AdaptiveSource src(adaptive_cfg(), msec(10), kRunEnd);
    src.on_feedback(delivered(0, msec(150)), msec(100)); // above comfort
    CHECK(src.rate_bps() == doctest::Approx(5e6));
}

TEST_CASE("adaptive source saturates at its ceiling rate") {
    SourceConfig cfg = adaptive_cfg();
    cfg.rate_mbps = 9.95;
    AdaptiveSource src(cfg, msec(10), kRunEnd);
    SimTime now = 0;
    for (int i = 0; i < 50; ++i) {
        now += msec(50);
        src.on_feedback(delivered(i, msec(1)), now);
    }
    CHECK(src.rate_bps() == doctest::Approx(10e6));
}

TEST_CASE("adaptive source requires a resolved comfort delay") {
    SourceConfig cfg = adaptive_cfg();
    cfg.comfort_delay = kNever;
    CHECK_THROWS_AS(AdaptiveSource(cfg, msec(10), kRunEnd), std::logic_error);
}

// ----------------------------------------------------------------------- aimd

TEST_CASE("aimd opens with a full initial window") {
    AimdSource src(aimd_cfg(10, 64), msec(10), kRunEnd);
    CHECK(src.state() == AimdSource::State::SlowStart);
    CHECK(src.next_wake() == 0);
    const auto sent = src.wake(0);
    CHECK(sent.size() == 10);
    for (std::size_t i = 0; i < sent.size(); ++i) {
        CHECK(sent[i].seq_no == static_cast<std::int64_t>(i));
        CHECK(!sent[i].is_retransmission);
    }
    CHECK(src.in_flight() == 10);
    CHECK(src.next_wake() == kNever); // ack-clocked from now on
}

TEST_CASE("aimd slow start grows the window by one per new ack") {
    AimdSource src(aimd_cfg(2, 8), msec(10), kRunEnd);
    src.wake(0);
    src.on_feedback(ack(1), msec(10));
    CHECK(src.cwnd() == doctest::Approx(3.0));
    CHECK(src.state() == AimdSource::State::SlowStart);
    src.on_feedback(ack(2), msec(11));
    CHECK(src.cwnd() == doctest::Approx(4.0));
}

TEST_CASE("aimd congestion avoidance grows the window by one per window") {
    AimdSource src(aimd_cfg(8, 4), msec(10), kRunEnd);
    CHECK(src.state() == AimdSource::State::CongestionAvoidance);
    src.wake(0);
    src.on_feedback(ack(1), msec(10));
    CHECK(src.cwnd() == doctest::Approx(8.125));
}

TEST_CASE("aimd enters fast recovery on the third duplicate ack") {
    AimdSource src(aimd_cfg(10, 5), msec(10), kRunEnd);
    src.wake(0); // seqs 0..9 in flight
    CHECK(src.on_feedback(ack(0), msec(11)).empty());
    CHECK(src.on_feedback(ack(0), msec(12)).empty());
    CHECK(src.dupack_count() == 2);
    const auto retx = src.on_feedback(ack(0), msec(13));
    REQUIRE(retx.size() == 1);
    CHECK(retx[0].seq_no == 0);
    CHECK(retx[0].is_retransmission);
    CHECK(src.state() == AimdSource::State::FastRecovery);
    CHECK(src.ssthresh() == doctest::Approx(5.0));
    // Further duplicates change nothing.
    CHECK(src.on_feedback(ack(0), msec(14)).empty());
    CHECK(src.state() == AimdSource::State::FastRecovery);
}

TEST_CASE("aimd leaves fast recovery with the halved window") {
    AimdSource src(aimd_cfg(10, 5), msec(10), kRunEnd);
    src.wake(0);
    for (int i = 0; i < 3; ++i)
        src.on_feedback(ack(0), msec(11 + i));
    REQUIRE(src.state() == AimdSource::State::FastRecovery);
    src.on_feedback(ack(10), msec(25)); // covers the retransmitted hole
    CHECK(src.state() == AimdSource::State::CongestionAvoidance);
    CHECK(src.cwnd() == doctest::Approx(5.0));
    CHECK(src.dupack_count() == 0);
}

TEST_CASE("aimd timeout collapses to one segment and doubles the timer") {
    AimdSource src(aimd_cfg(20, 10), msec(10), kRunEnd);
    src.wake(0); // 20 packets
    CHECK(src.rto() == msec(200));
    CHECK(src.rto_deadline() == msec(200));

    const auto first = src.on_timeout(msec(200));
    REQUIRE(first.size() == 1);
    CHECK(first[0].seq_no == 0);
    CHECK(first[0].is_retransmission);
    CHECK(src.cwnd() == doctest::Approx(1.0));
    CHECK(src.ssthresh() == doctest::Approx(10.0));
    CHECK(src.state() == AimdSource::State::SlowStart);
    CHECK(src.rto() == msec(400));
    CHECK(src.in_flight() == 1); // go-back-N: only the retransmission remains

    const auto second = src.on_timeout(msec(600));
    REQUIRE(second.size() == 1);
    CHECK(second[0].seq_no == 0);
    CHECK(src.rto() == msec(800));
    CHECK(src.rto_deadline() == msec(600) + msec(800));
}

TEST_CASE("aimd resends the rewound window as retransmissions after timeout") {
    AimdSource src(aimd_cfg(20, 10), msec(10), kRunEnd);
    src.wake(0);
    src.on_timeout(msec(200));
    // The ack for the retransmitted head clocks out the next holes.
    const auto resent = src.on_feedback(ack(1), msec(215));
    REQUIRE(resent.size() == 2); // slow start: cwnd 1 -> 2
    CHECK(resent[0].seq_no == 1);
    CHECK(resent[1].seq_no == 2);
    CHECK(resent[0].is_retransmission); // sent before the rewind
    CHECK(resent[1].is_retransmission);
}

TEST_CASE("aimd never resends below a cumulative ack that overtakes the rewind") {
    AimdSource src(aimd_cfg(20, 10), msec(10), kRunEnd);
    src.wake(0);
    src.on_timeout(msec(200));
    // Receiver actually had 0..14 buffered; the retransmitted 0 fills the gap.
    const auto sent = src.on_feedback(ack(15), msec(215));
    for (const auto& p : sent)
        CHECK(p.seq_no >= 15);
}

TEST_CASE("aimd retransmission timer never dips below its floor") {
    AimdSource src(aimd_cfg(4, 64), msec(10), kRunEnd);
    src.wake(0);
    // Tiny RTT samples: srtt + 4*rttvar is far below the 200 ms floor.
    src.on_feedback(ack(1), msec(10));
    src.on_feedback(ack(2), msec(11));
    src.on_feedback(ack(3), msec(12));
    CHECK(src.rto() == msec(200));
}

TEST_CASE("aimd keeps packets in flight within the window under random acks") {
    AimdSource src(aimd_cfg(6, 12), msec(10), kRunEnd);
    src.wake(0);
    std::mt19937_64 rng(5);
    std::int64_t delivered_upto = 0;
    SimTime now = msec(10);
    for (int i = 0; i < 2'000; ++i) {
        now += 1 + static_cast<SimTime>(rng() % 3'000);
        if (rng() % 8 == 0 && src.in_flight() > 0) {
            src.on_timeout(src.rto_deadline());
        } else {
            delivered_upto += 1 + static_cast<std::int64_t>(rng() % 2);
            src.on_feedback(ack(delivered_upto), now);
        }
        CHECK(static_cast<double>(src.in_flight()) <= src.cwnd() + 1.0);
        CHECK(src.rto() >= msec(200));
        CHECK(src.cwnd() >= 1.0);
        CHECK(src.ssthresh() >= 2.0);
    }
}

TEST_CASE("aimd with nothing in flight reports no timer and ignores timeouts") {
    AimdSource src(aimd_cfg(10, 64), msec(10), kRunEnd);
    CHECK(src.rto_deadline() == kNever);
    CHECK(src.on_timeout(0).empty());
}

TEST_CASE("aimd rejects degenerate window parameters") {
    CHECK_THROWS_AS(AimdSource(aimd_cfg(0, 64), msec(10), kRunEnd), std::logic_error);
    CHECK_THROWS_AS(AimdSource(aimd_cfg(10, 1), msec(10), kRunEnd), std::logic_error);
}

TEST_CASE("make_source builds the kind the config names") {
    auto cbr = make_source(cbr_cfg(6.0), msec(10), kRunEnd);
    CHECK(dynamic_cast<CbrSource*>(cbr.get()) != nullptr);
    auto adaptive = make_source(adaptive_cfg(), msec(10), kRunEnd);
    CHECK(dynamic_cast<AdaptiveSource*>(adaptive.get()) != nullptr);
    auto aimd = make_source(aimd_cfg(10, 64), msec(10), kRunEnd);
    CHECK(dynamic_cast<AimdSource*>(aimd.get()) != nullptr);
}
