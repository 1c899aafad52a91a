#include "doctest.h"

#include <vector>

#include "bodesim/batch.hpp"

using namespace bodesim;

namespace {

Scenario make_scenario(AqmKind kind, std::uint64_t seed, std::uint64_t walk_seed) {
    SyntheticTraceSpec spec;
    spec.kind = SyntheticTraceSpec::Kind::RandomWalk;
    spec.min_mbps = 2.0;
    spec.max_mbps = 12.0;
    spec.seed = walk_seed;
    spec.duration_s = 8;

    Scenario sc;
    sc.name = std::string("batch-") + aqm_kind_name(kind);
    sc.duration_s = 8;
    sc.seed = seed;
    sc.trace_cfg.synthetic = spec;
    sc.trace = generate_trace(spec);

    ClassConfig c;
    c.discipline.kind = kind;
    c.discipline.bounded_delay = msec(20);
    c.discipline.codel_target = msec(10);
    c.discipline.codel_interval = msec(50);
    if (kind != AqmKind::Bode && kind != AqmKind::Codel) {
        c.discipline.cap_mode = CapMode::Bytes;
        c.discipline.capacity_bytes = 150'000;
    }
    sc.classes.push_back(c);

    SourceConfig src;
    src.kind = SourceConfig::Kind::Aimd;
    src.flow_id = 1;
    sc.sources.push_back(src);
    return sc;
}

} // namespace

TEST_CASE("running one scenario twice yields identical reports") {
    const Scenario sc = make_scenario(AqmKind::Bode, 7, 3);
    const SimReport a = run_scenario(sc);
    const SimReport b = run_scenario(sc);
    CHECK(a.log == b.log);
    CHECK(!a.log.records.empty());
    CHECK(a.total.served > 0);
}

TEST_CASE("parallel and serial batches produce identical logs") {
    std::vector<Scenario> scenarios;
    std::uint64_t seed = 1;
    for (AqmKind kind : {AqmKind::Bode, AqmKind::Codel, AqmKind::Pie, AqmKind::TailDrop,
                         AqmKind::HeadDrop}) {
        scenarios.push_back(make_scenario(kind, seed, seed + 10));
        ++seed;
    }

    const auto serial = run_batch(scenarios, BatchMode::Serial);
    const auto parallel = run_batch(scenarios, BatchMode::Parallel);
    REQUIRE(serial.size() == scenarios.size());
    REQUIRE(parallel.size() == scenarios.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].scenario.name == scenarios[i].name); // order preserved
        CHECK(serial[i].log == parallel[i].log);
        CHECK(serial[i].total.generated == parallel[i].total.generated);
    }
}

TEST_CASE("per-class summaries line up with the class list") {
    Scenario sc = make_scenario(AqmKind::Bode, 5, 4);
    ClassConfig second;
    second.class_id = 1;
    second.discipline.kind = AqmKind::TailDrop;
    second.discipline.cap_mode = CapMode::Bytes;
    second.discipline.capacity_bytes = 150'000;
    sc.classes.push_back(second);
    SourceConfig cbr;
    cbr.kind = SourceConfig::Kind::Cbr;
    cbr.flow_id = 2;
    cbr.class_id = 1;
    cbr.rate_mbps = 1.0;
    sc.sources.push_back(cbr);

    const SimReport rep = run_scenario(sc);
    REQUIRE(rep.per_class.size() == 2);
    CHECK(rep.per_class[0].class_id == 0);
    CHECK(rep.per_class[1].class_id == 1);
    CHECK(rep.per_class[0].generated + rep.per_class[1].generated == rep.total.generated);
}
