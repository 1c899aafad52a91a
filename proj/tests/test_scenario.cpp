#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bodesim/aqm.hpp"
#include "bodesim/presets.hpp"
#include "bodesim/scenario.hpp"

using namespace bodesim;

namespace {

// Minimal valid scenario with room to splice in overrides.
std::string minimal(const std::string& discipline = R"({"kind": "bode"})",
                    const std::string& extra_top = "") {
    return std::string(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20, "duration_s": 10}},
      "discipline": )") +
           discipline + R"(,
      "sources": [{"kind": "cbr", "flow_id": 1}])" + extra_top + "\n}";
}

std::string error_of(const std::string& text) {
    try {
        parse_scenario_text(text, "");
        return "";
    } catch (const std::runtime_error& e) {
        return e.what();
    }
}

} // namespace

TEST_CASE("defaults fill everything the file leaves unsaid") {
    const Scenario sc = parse_scenario_text(minimal(), "");
    CHECK(sc.name == "scenario");
    CHECK(sc.profile == Profile::Default);
    CHECK(sc.duration_s == 300);
    CHECK(sc.min_rtt == msec(10));
    CHECK(sc.seed == 1);
    REQUIRE(sc.classes.size() == 1);
    const DisciplineConfig& d = sc.classes[0].discipline;
    CHECK(d.kind == AqmKind::Bode);
    CHECK(d.bounded_delay == msec(20)); // default profile bound
    CHECK(d.protect_threshold == 3);
    CHECK(d.cap_mode == CapMode::Unlimited);
    CHECK(d.codel_target == msec(10));   // bound / 2
    CHECK(d.codel_interval == msec(50)); // 5 x min RTT
    CHECK(d.pie_alpha == 0.125);
    CHECK(d.pie_beta == 1.25);
    CHECK(d.pie_update_interval == msec(30));
    CHECK(sc.classes[0].delay_requirement == kNever);
    CHECK(!sc.trace.opportunities_ms.empty());
}

TEST_CASE("the interactive profile relaxes the delay bound to 100 ms") {
    const Scenario sc = parse_scenario_text(minimal(R"({"kind": "bode"})",
                                                    R"(, "preset": "interactive")"),
                                            "");
    CHECK(sc.profile == Profile::Interactive);
    CHECK(sc.classes[0].discipline.bounded_delay == msec(100));
    CHECK(sc.classes[0].discipline.codel_target == msec(50));
}

TEST_CASE("fifo disciplines default to a 1.5 MB cap") {
    const Scenario sc = parse_scenario_text(minimal(R"({"kind": "taildrop"})"), "");
    CHECK(sc.classes[0].discipline.cap_mode == CapMode::Bytes);
    CHECK(sc.classes[0].discipline.capacity_bytes == 1'500'000);
}

TEST_CASE("automatic sizing converts the delay bound into a byte cap") {
    // 20 Mb/s peak and a 20 ms bound hold ceil(33.3) = 34 full packets.
    const Scenario sc =
        parse_scenario_text(minimal(R"({"kind": "bode", "capacity": "auto"})"), "");
    CHECK(sc.classes[0].discipline.cap_mode == CapMode::Auto);
    CHECK(sc.classes[0].discipline.capacity_bytes == 34 * 1'500);
}

TEST_CASE("unknown keys are rejected with their JSON path") {
    CHECK(error_of(minimal(R"({"kind": "bode"})", R"(, "bogus": 1)")).find("/bogus") !=
          std::string::npos);
    // A protect threshold on a codel block is a config error, not a default.
    CHECK(error_of(minimal(R"({"kind": "codel", "protect_threshold": 3})"))
              .find("/discipline/protect_threshold") != std::string::npos);
    CHECK(error_of(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mpbs": 20}},
      "discipline": {"kind": "bode"},
      "sources": [{"kind": "cbr", "flow_id": 1}]})")
              .find("/trace/synthetic/rate_mpbs") != std::string::npos);
}

TEST_CASE("validation failures name the offending field") {
    CHECK(error_of(minimal(R"({"kind": "bode", "protect_threshold": 0})"))
              .find("protect_threshold") != std::string::npos);
    CHECK(error_of(minimal(R"({"kind": "taildrop", "capacity": -5})"))
              .find("must be positive") != std::string::npos);
    CHECK(error_of(minimal(R"({"kind": "taildrop", "capacity": "auto"})"))
              .find("/discipline/capacity") != std::string::npos);
    CHECK(error_of(minimal(R"({"kind": "pie", "capacity": "unlimited"})"))
              .find("/discipline/capacity") != std::string::npos);
    CHECK(error_of(minimal(R"({"kind": "quic"})")).find("quic") != std::string::npos);
}

TEST_CASE("structural rules: one queue spec, one trace spec, sane sources") {
    // Both discipline and classes present.
    CHECK(!error_of(std::string(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "discipline": {"kind": "bode"},
      "classes": [{"class_id": 0, "discipline": {"kind": "bode"}}],
      "sources": [{"kind": "cbr", "flow_id": 1}]})"))
               .empty());
    // Neither file nor synthetic.
    CHECK(error_of(R"({
      "trace": {},
      "discipline": {"kind": "bode"},
      "sources": [{"kind": "cbr", "flow_id": 1}]})")
              .find("file or synthetic") != std::string::npos);
    // Duplicate flow ids.
    CHECK(error_of(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "discipline": {"kind": "bode"},
      "sources": [{"kind": "cbr", "flow_id": 1}, {"kind": "cbr", "flow_id": 1}]})")
              .find("duplicate flow id") != std::string::npos);
    // Source pointing at a class that does not exist.
    CHECK(error_of(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "discipline": {"kind": "bode"},
      "sources": [{"kind": "cbr", "flow_id": 1, "class_id": 3}]})")
              .find("no such class") != std::string::npos);
    // Class ids with a gap.
    CHECK(error_of(R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "classes": [{"class_id": 0, "discipline": {"kind": "bode"}},
                  {"class_id": 2, "discipline": {"kind": "taildrop"}}],
      "sources": [{"kind": "cbr", "flow_id": 1}]})")
              .find("contiguous") != std::string::npos);
    // Non-integer where an integer is required.
    CHECK(error_of(minimal(R"({"kind": "bode"})",
                           R"(, "engine": {"duration_s": 1.5})"))
              .find("integer") != std::string::npos);
    CHECK(error_of("{not json").find("scenario text") != std::string::npos);
}

TEST_CASE("an adaptive source inherits its comfort delay from its class") {
    const std::string text = R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "classes": [{"class_id": 0, "discipline": {"kind": "bode", "bounded_delay_ms": 60}},
                  {"class_id": 1, "discipline": {"kind": "taildrop"}}],
      "sources": [{"kind": "adaptive", "flow_id": 1, "class_id": 0},
                  {"kind": "adaptive", "flow_id": 2, "class_id": 1},
                  {"kind": "adaptive", "flow_id": 3, "class_id": 0, "comfort_delay_ms": 25}]})";
    const Scenario sc = parse_scenario_text(text, "");
    CHECK(sc.sources[0].comfort_delay == msec(60)); // class bound
    CHECK(sc.sources[1].comfort_delay == msec(20)); // fifo: profile default
    CHECK(sc.sources[2].comfort_delay == msec(25)); // explicit wins
}

TEST_CASE("delay requirements parse per class and stay optional") {
    const std::string text = R"({
      "trace": {"synthetic": {"kind": "constant", "rate_mbps": 20}},
      "classes": [{"class_id": 0, "discipline": {"kind": "bode"}, "delay_requirement_ms": 50},
                  {"class_id": 1, "discipline": {"kind": "taildrop"}}],
      "sources": [{"kind": "cbr", "flow_id": 1}]})";
    const Scenario sc = parse_scenario_text(text, "");
    CHECK(sc.classes[0].delay_requirement == msec(50));
    CHECK(sc.classes[1].delay_requirement == kNever);
}

TEST_CASE("scenario files resolve trace paths relative to themselves") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path("scenario_test_dir");
    fs::create_directories(dir);
    {
        std::ofstream tr(dir / "link.tr");
        tr << "1\n2\n3\n";
        std::ofstream sf(dir / "sc.json");
        sf << R"({
          "trace": {"file": "link.tr"},
          "discipline": {"kind": "bode"},
          "sources": [{"kind": "cbr", "flow_id": 1}]})";
    }
    const Scenario sc = parse_scenario((dir / "sc.json").string());
    CHECK(sc.trace.opportunities_ms == std::vector<std::int64_t>{1, 2, 3});
    CHECK(sc.trace_cfg.file == (dir / "link.tr").string());
    fs::remove_all(dir);
}

TEST_CASE("emit and parse are a round trip") {
    const std::string text = R"({
      "name": "roundtrip",
      "preset": "interactive",
      "engine": {"duration_s": 120, "min_rtt_ms": 20, "seed": 9},
      "trace": {"synthetic": {"kind": "random_walk", "min_mbps": 1, "max_mbps": 8, "seed": 4}},
      "classes": [
        {"class_id": 0,
         "discipline": {"kind": "bode", "bounded_delay_ms": 50, "protect_threshold": 4,
                        "capacity": "auto"},
         "delay_requirement_ms": 50},
        {"class_id": 1, "discipline": {"kind": "codel", "codel_target_ms": 5}},
        {"class_id": 2, "discipline": {"kind": "pie", "pie_alpha": 0.25}},
        {"class_id": 3, "discipline": {"kind": "headdrop", "capacity": 30000}}
      ],
      "sources": [
        {"kind": "adaptive", "flow_id": 1, "class_id": 0, "rate_mbps": 2.5},
        {"kind": "aimd", "flow_id": 2, "class_id": 1, "initial_cwnd": 4},
        {"kind": "cbr", "flow_id": 3, "class_id": 2, "rate_mbps": 0.5, "stop_s": 60}
      ],
      "outputs": {"events_csv": true}})";
    const Scenario first = parse_scenario_text(text, "");
    const Scenario second = parse_scenario_text(emit_scenario(first), "");
    CHECK(first == second);
}

TEST_CASE("every preset round-trips through its own emission") {
    for (const PresetInfo& info : preset_list()) {
        const Scenario sc = preset_scenario(info.name);
        const Scenario back = parse_scenario_text(emit_scenario(sc), "");
        CHECK(sc == back);
    }
}

TEST_CASE("discipline names map both ways") {
    for (AqmKind k : {AqmKind::Bode, AqmKind::Codel, AqmKind::Pie, AqmKind::TailDrop,
                      AqmKind::HeadDrop})
        CHECK(aqm_kind_from_name(aqm_kind_name(k)) == k);
    CHECK_THROWS_AS(aqm_kind_from_name("red"), std::runtime_error);
}
