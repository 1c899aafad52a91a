#include "bodesim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bodesim/aqm.hpp"
#include "json.hpp"

namespace bodesim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("scenario" + (path.empty() ? "" : " at " + path) + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object())
        fail(path, "expected an object");
}

// Every recognized key must be listed; anything else is an error so typos
// never silently fall back to defaults.
void expect_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    expect_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            fail(path + "/" + it.key(), "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number())
        fail(path, "expected a number");
    return j.get<double>();
}

double get_positive(const json& j, const std::string& path) {
    const double v = get_number(j, path);
    if (v <= 0)
        fail(path, "must be positive");
    return v;
}

std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer())
        fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean())
        fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string())
        fail(path, "expected a string");
    return j.get<std::string>();
}

SimTime ms_field(const json& j, const std::string& path) {
    return static_cast<SimTime>(std::llround(get_positive(j, path) * 1000.0));
}

SyntheticTraceSpec parse_synthetic(const json& j, const std::string& path) {
    expect_keys(j, path,
                {"kind", "duration_s", "packet_size_bytes", "rate_mbps", "rate_before_mbps",
                 "rate_after_mbps", "step_at_s", "min_mbps", "max_mbps", "step_interval_ms",
                 "seed"});
    SyntheticTraceSpec s;
    const std::string kind = get_string(j.at("kind"), path + "/kind");
    if (kind == "constant")
        s.kind = SyntheticTraceSpec::Kind::Constant;
    else if (kind == "step")
        s.kind = SyntheticTraceSpec::Kind::Step;
    else if (kind == "random_walk")
        s.kind = SyntheticTraceSpec::Kind::RandomWalk;
    else
        fail(path + "/kind", "expected constant, step, or random_walk");

    if (j.count("duration_s"))
        s.duration_s = get_int(j.at("duration_s"), path + "/duration_s");
    if (j.count("packet_size_bytes"))
        s.packet_size_bytes =
            static_cast<int>(get_int(j.at("packet_size_bytes"), path + "/packet_size_bytes"));
    if (j.count("rate_mbps"))
        s.rate_mbps = get_positive(j.at("rate_mbps"), path + "/rate_mbps");
    if (j.count("rate_before_mbps"))
        s.rate_before_mbps = get_positive(j.at("rate_before_mbps"), path + "/rate_before_mbps");
    if (j.count("rate_after_mbps"))
        s.rate_after_mbps = get_positive(j.at("rate_after_mbps"), path + "/rate_after_mbps");
    if (j.count("step_at_s"))
        s.step_at_s = get_positive(j.at("step_at_s"), path + "/step_at_s");
    if (j.count("min_mbps"))
        s.min_mbps = get_positive(j.at("min_mbps"), path + "/min_mbps");
    if (j.count("max_mbps"))
        s.max_mbps = get_positive(j.at("max_mbps"), path + "/max_mbps");
    if (j.count("step_interval_ms"))
        s.step_interval_ms = get_int(j.at("step_interval_ms"), path + "/step_interval_ms");
    if (j.count("seed"))
        s.seed = static_cast<std::uint64_t>(get_int(j.at("seed"), path + "/seed"));
    return s;
}

// Keys are kind-specific so a CoDel block can't silently carry, say, a
// protect threshold. Inapplicable fields keep deterministic defaults derived
// from the delay bound and min RTT, which makes emit/parse a round trip.
DisciplineConfig parse_discipline(const json& j, const std::string& path, SimTime default_bound,
                                  SimTime min_rtt) {
    expect_object(j, path);
    if (!j.count("kind"))
        fail(path + "/kind", "missing");
    DisciplineConfig d;
    d.kind = aqm_kind_from_name(get_string(j.at("kind"), path + "/kind"));

    switch (d.kind) {
    case AqmKind::Bode:
        expect_keys(j, path, {"kind", "bounded_delay_ms", "protect_threshold", "capacity"});
        break;
    case AqmKind::Codel:
        expect_keys(j, path, {"kind", "bounded_delay_ms", "codel_target_ms", "codel_interval_ms"});
        break;
    case AqmKind::Pie:
        expect_keys(j, path,
                    {"kind", "bounded_delay_ms", "capacity", "pie_alpha", "pie_beta",
                     "pie_update_interval_ms"});
        break;
    case AqmKind::TailDrop:
    case AqmKind::HeadDrop: expect_keys(j, path, {"kind", "capacity"}); break;
    }

    d.bounded_delay =
        j.count("bounded_delay_ms") ? ms_field(j.at("bounded_delay_ms"), path + "/bounded_delay_ms")
                                    : default_bound;
    if (j.count("protect_threshold")) {
        d.protect_threshold =
            static_cast<int>(get_int(j.at("protect_threshold"), path + "/protect_threshold"));
        if (d.protect_threshold < 1)
            fail(path + "/protect_threshold", "must be >= 1");
    }

    // Capacity: the bounded-delay queue defaults to uncapped with "auto"
    // (delay-bound sizing) or an explicit byte count available; PIE and the
    // FIFO queues default to 1.5 MB.
    if (d.kind == AqmKind::Bode) {
        d.cap_mode = CapMode::Unlimited;
        d.capacity_bytes = 0;
    } else if (d.kind == AqmKind::Codel) {
        d.cap_mode = CapMode::Unlimited;
        d.capacity_bytes = 0;
    } else {
        d.cap_mode = CapMode::Bytes;
        d.capacity_bytes = 1'500'000;
    }
    if (j.count("capacity")) {
        const json& cap = j.at("capacity");
        if (cap.is_string()) {
            const std::string s = get_string(cap, path + "/capacity");
            if (s == "unlimited" && d.kind == AqmKind::Bode) {
                d.cap_mode = CapMode::Unlimited;
                d.capacity_bytes = 0;
            } else if (s == "auto" && d.kind == AqmKind::Bode) {
                d.cap_mode = CapMode::Auto; // resolved once the trace is known
            } else {
                fail(path + "/capacity", "expected a byte count" +
                                             std::string(d.kind == AqmKind::Bode
                                                             ? ", \"unlimited\", or \"auto\""
                                                             : ""));
            }
        } else {
            d.cap_mode = CapMode::Bytes;
            d.capacity_bytes = get_int(cap, path + "/capacity");
            if (d.capacity_bytes <= 0)
                fail(path + "/capacity", "must be positive");
        }
    }

    d.codel_target = j.count("codel_target_ms")
                         ? ms_field(j.at("codel_target_ms"), path + "/codel_target_ms")
                         : d.bounded_delay / 2;
    d.codel_interval = j.count("codel_interval_ms")
                           ? ms_field(j.at("codel_interval_ms"), path + "/codel_interval_ms")
                           : 5 * min_rtt;
    if (j.count("pie_alpha"))
        d.pie_alpha = get_positive(j.at("pie_alpha"), path + "/pie_alpha");
    if (j.count("pie_beta"))
        d.pie_beta = get_positive(j.at("pie_beta"), path + "/pie_beta");
    if (j.count("pie_update_interval_ms"))
        d.pie_update_interval =
            ms_field(j.at("pie_update_interval_ms"), path + "/pie_update_interval_ms");
    return d;
}

SourceConfig parse_source(const json& j, const std::string& path) {
    expect_object(j, path);
    if (!j.count("kind"))
        fail(path + "/kind", "missing");
    SourceConfig s;
    const std::string kind = get_string(j.at("kind"), path + "/kind");
    const std::set<std::string> common = {"kind",    "flow_id", "class_id",
                                          "packet_size_bytes", "start_s", "stop_s"};
    std::set<std::string> allowed = common;
    if (kind == "cbr") {
        s.kind = SourceConfig::Kind::Cbr;
        allowed.insert("rate_mbps");
    } else if (kind == "adaptive") {
        s.kind = SourceConfig::Kind::Adaptive;
        allowed.insert({"rate_mbps", "min_rate_mbps", "max_rate_mbps", "increase_step_mbps",
                        "decrease_factor", "comfort_delay_ms"});
    } else if (kind == "aimd") {
        s.kind = SourceConfig::Kind::Aimd;
        allowed.insert({"initial_cwnd", "initial_ssthresh"});
    } else {
        fail(path + "/kind", "expected cbr, adaptive, or aimd");
    }
    expect_keys(j, path, allowed);

    if (!j.count("flow_id"))
        fail(path + "/flow_id", "missing");
    s.flow_id = get_int(j.at("flow_id"), path + "/flow_id");
    if (j.count("class_id"))
        s.class_id = static_cast<int>(get_int(j.at("class_id"), path + "/class_id"));
    if (j.count("packet_size_bytes")) {
        s.packet_size_bytes =
            static_cast<int>(get_int(j.at("packet_size_bytes"), path + "/packet_size_bytes"));
        if (s.packet_size_bytes <= 0 || s.packet_size_bytes > kMaxPacketBytes)
            fail(path + "/packet_size_bytes", "must be in (0, 1500]");
    }
    if (j.count("start_s"))
        s.start_s = get_number(j.at("start_s"), path + "/start_s");
    if (j.count("stop_s"))
        s.stop_s = get_number(j.at("stop_s"), path + "/stop_s");
    if (j.count("rate_mbps"))
        s.rate_mbps = get_positive(j.at("rate_mbps"), path + "/rate_mbps");
    if (j.count("min_rate_mbps"))
        s.min_rate_mbps = get_positive(j.at("min_rate_mbps"), path + "/min_rate_mbps");
    if (j.count("max_rate_mbps"))
        s.max_rate_mbps = get_positive(j.at("max_rate_mbps"), path + "/max_rate_mbps");
    if (j.count("increase_step_mbps"))
        s.increase_step_mbps =
            get_positive(j.at("increase_step_mbps"), path + "/increase_step_mbps");
    if (j.count("decrease_factor"))
        s.decrease_factor = get_positive(j.at("decrease_factor"), path + "/decrease_factor");
    if (j.count("comfort_delay_ms"))
        s.comfort_delay = ms_field(j.at("comfort_delay_ms"), path + "/comfort_delay_ms");
    if (j.count("initial_cwnd"))
        s.initial_cwnd = get_positive(j.at("initial_cwnd"), path + "/initial_cwnd");
    if (j.count("initial_ssthresh"))
        s.initial_ssthresh = get_positive(j.at("initial_ssthresh"), path + "/initial_ssthresh");
    return s;
}

Scenario parse_json(const json& root, const std::string& base_dir) {
    expect_keys(root, "",
                {"name", "preset", "engine", "trace", "discipline", "classes", "sources",
                 "outputs"});
    Scenario sc;
    if (root.count("name"))
        sc.name = get_string(root.at("name"), "/name");
    if (root.count("preset")) {
        const std::string p = get_string(root.at("preset"), "/preset");
        if (p == "interactive")
            sc.profile = Profile::Interactive;
        else if (p == "default")
            sc.profile = Profile::Default;
        else
            fail("/preset", "expected \"interactive\" or \"default\"");
    }
    if (root.count("engine")) {
        const json& e = root.at("engine");
        expect_keys(e, "/engine", {"duration_s", "min_rtt_ms", "seed"});
        if (e.count("duration_s")) {
            sc.duration_s = get_int(e.at("duration_s"), "/engine/duration_s");
            if (sc.duration_s <= 0)
                fail("/engine/duration_s", "must be positive");
        }
        if (e.count("min_rtt_ms"))
            sc.min_rtt = ms_field(e.at("min_rtt_ms"), "/engine/min_rtt_ms");
        if (e.count("seed"))
            sc.seed = static_cast<std::uint64_t>(get_int(e.at("seed"), "/engine/seed"));
    }

    // Interactive traffic tolerates 100 ms; everything else gets 20 ms.
    const SimTime default_bound = sc.profile == Profile::Interactive ? msec(100) : msec(20);

    if (!root.count("trace"))
        fail("/trace", "missing");
    const json& tr = root.at("trace");
    expect_keys(tr, "/trace", {"file", "synthetic"});
    if (tr.count("file") == tr.count("synthetic"))
        fail("/trace", "exactly one of file or synthetic required");
    if (tr.count("file")) {
        std::filesystem::path p = get_string(tr.at("file"), "/trace/file");
        if (p.is_relative() && !base_dir.empty())
            p = std::filesystem::path(base_dir) / p;
        sc.trace_cfg.file = p.string();
        sc.trace = load_trace(sc.trace_cfg.file);
    } else {
        sc.trace_cfg.synthetic = parse_synthetic(tr.at("synthetic"), "/trace/synthetic");
        sc.trace = generate_trace(*sc.trace_cfg.synthetic);
    }

    if (root.count("discipline") == root.count("classes"))
        fail("", "exactly one of discipline or classes required");
    if (root.count("discipline")) {
        ClassConfig c;
        c.class_id = 0;
        c.discipline =
            parse_discipline(root.at("discipline"), "/discipline", default_bound, sc.min_rtt);
        sc.classes.push_back(c);
    } else {
        const json& cl = root.at("classes");
        if (!cl.is_array() || cl.empty())
            fail("/classes", "expected a non-empty array");
        for (std::size_t i = 0; i < cl.size(); ++i) {
            const std::string path = "/classes/" + std::to_string(i);
            expect_keys(cl[i], path, {"class_id", "discipline", "delay_requirement_ms"});
            ClassConfig c;
            c.class_id = static_cast<int>(get_int(cl[i].at("class_id"), path + "/class_id"));
            c.discipline = parse_discipline(cl[i].at("discipline"), path + "/discipline",
                                            default_bound, sc.min_rtt);
            if (cl[i].count("delay_requirement_ms"))
                c.delay_requirement =
                    ms_field(cl[i].at("delay_requirement_ms"), path + "/delay_requirement_ms");
            sc.classes.push_back(c);
        }
    }
    for (std::size_t i = 0; i < sc.classes.size(); ++i) {
        if (sc.classes[i].class_id != static_cast<int>(i))
            fail("/classes", "class ids must be contiguous from 0");
    }

    // Resolve automatic buffer sizing now that the trace is known. Synthetic
    // traces size against their configured peak (the link's rated maximum),
    // file traces against a windowed peak estimate.
    for (auto& c : sc.classes) {
        if (c.discipline.cap_mode == CapMode::Auto) {
            const std::int64_t peak_bps =
                sc.trace_cfg.synthetic
                    ? static_cast<std::int64_t>(
                          std::llround(sc.trace_cfg.synthetic->peak_rate_mbps() * 1e6))
                    : estimate_peak_rate_bps(sc.trace, kMaxPacketBytes);
            const std::int64_t pkts = compute_buffer_requirement(peak_bps, kMaxPacketBytes,
                                                                 c.discipline.bounded_delay);
            c.discipline.capacity_bytes = pkts * kMaxPacketBytes;
        }
    }

    if (!root.count("sources"))
        fail("/sources", "missing");
    const json& srcs = root.at("sources");
    if (!srcs.is_array() || srcs.empty())
        fail("/sources", "expected a non-empty array");
    std::set<std::int64_t> flows;
    for (std::size_t i = 0; i < srcs.size(); ++i) {
        SourceConfig s = parse_source(srcs[i], "/sources/" + std::to_string(i));
        if (!flows.insert(s.flow_id).second)
            fail("/sources/" + std::to_string(i) + "/flow_id", "duplicate flow id");
        if (s.class_id < 0 || s.class_id >= static_cast<int>(sc.classes.size()))
            fail("/sources/" + std::to_string(i) + "/class_id", "no such class");
        if (s.kind == SourceConfig::Kind::Adaptive && s.comfort_delay == kNever) {
            // Comfort defaults to the class's delay bound: the app is happy
            // exactly while the queue honors its target.
            const auto& d = sc.classes[static_cast<std::size_t>(s.class_id)].discipline;
            s.comfort_delay = d.kind == AqmKind::Bode || d.kind == AqmKind::Codel ||
                                      d.kind == AqmKind::Pie
                                  ? d.bounded_delay
                                  : default_bound;
        }
        sc.sources.push_back(s);
    }

    if (root.count("outputs")) {
        const json& o = root.at("outputs");
        expect_keys(o, "/outputs", {"events_csv", "cdf_csv"});
        if (o.count("events_csv"))
            sc.outputs.events_csv = get_bool(o.at("events_csv"), "/outputs/events_csv");
        if (o.count("cdf_csv"))
            sc.outputs.cdf_csv = get_bool(o.at("cdf_csv"), "/outputs/cdf_csv");
    }
    return sc;
}

json emit_synthetic(const SyntheticTraceSpec& s) {
    json j;
    switch (s.kind) {
    case SyntheticTraceSpec::Kind::Constant:
        j["kind"] = "constant";
        j["rate_mbps"] = s.rate_mbps;
        break;
    case SyntheticTraceSpec::Kind::Step:
        j["kind"] = "step";
        j["rate_before_mbps"] = s.rate_before_mbps;
        j["rate_after_mbps"] = s.rate_after_mbps;
        j["step_at_s"] = s.step_at_s;
        break;
    case SyntheticTraceSpec::Kind::RandomWalk:
        j["kind"] = "random_walk";
        j["min_mbps"] = s.min_mbps;
        j["max_mbps"] = s.max_mbps;
        j["step_interval_ms"] = s.step_interval_ms;
        j["seed"] = s.seed;
        break;
    }
    j["duration_s"] = s.duration_s;
    j["packet_size_bytes"] = s.packet_size_bytes;
    return j;
}

json emit_discipline(const DisciplineConfig& d) {
    json j;
    j["kind"] = aqm_kind_name(d.kind);
    const auto emit_cap = [&] {
        switch (d.cap_mode) {
        case CapMode::Unlimited: j["capacity"] = "unlimited"; break;
        case CapMode::Auto: j["capacity"] = "auto"; break;
        case CapMode::Bytes: j["capacity"] = d.capacity_bytes; break;
        }
    };
    switch (d.kind) {
    case AqmKind::Bode:
        j["bounded_delay_ms"] = to_ms(d.bounded_delay);
        j["protect_threshold"] = d.protect_threshold;
        emit_cap();
        break;
    case AqmKind::Codel:
        j["bounded_delay_ms"] = to_ms(d.bounded_delay);
        j["codel_target_ms"] = to_ms(d.codel_target);
        j["codel_interval_ms"] = to_ms(d.codel_interval);
        break;
    case AqmKind::Pie:
        j["bounded_delay_ms"] = to_ms(d.bounded_delay);
        emit_cap();
        j["pie_alpha"] = d.pie_alpha;
        j["pie_beta"] = d.pie_beta;
        j["pie_update_interval_ms"] = to_ms(d.pie_update_interval);
        break;
    case AqmKind::TailDrop:
    case AqmKind::HeadDrop: emit_cap(); break;
    }
    return j;
}

json emit_source(const SourceConfig& s) {
    json j;
    switch (s.kind) {
    case SourceConfig::Kind::Cbr: j["kind"] = "cbr"; break;
    case SourceConfig::Kind::Adaptive: j["kind"] = "adaptive"; break;
    case SourceConfig::Kind::Aimd: j["kind"] = "aimd"; break;
    }
    j["flow_id"] = s.flow_id;
    j["class_id"] = s.class_id;
    j["packet_size_bytes"] = s.packet_size_bytes;
    j["start_s"] = s.start_s;
    if (s.stop_s >= 0)
        j["stop_s"] = s.stop_s;
    if (s.kind != SourceConfig::Kind::Aimd)
        j["rate_mbps"] = s.rate_mbps;
    if (s.kind == SourceConfig::Kind::Adaptive) {
        j["min_rate_mbps"] = s.min_rate_mbps;
        j["max_rate_mbps"] = s.max_rate_mbps;
        j["increase_step_mbps"] = s.increase_step_mbps;
        j["decrease_factor"] = s.decrease_factor;
        j["comfort_delay_ms"] = to_ms(s.comfort_delay);
    }
    if (s.kind == SourceConfig::Kind::Aimd) {
        j["initial_cwnd"] = s.initial_cwnd;
        j["initial_ssthresh"] = s.initial_ssthresh;
    }
    return j;
}

} // namespace

const char* aqm_kind_name(AqmKind k) {
    switch (k) {
    case AqmKind::Bode: return "bode";
    case AqmKind::Codel: return "codel";
    case AqmKind::Pie: return "pie";
    case AqmKind::TailDrop: return "taildrop";
    case AqmKind::HeadDrop: return "headdrop";
    }
    return "unknown";
}

AqmKind aqm_kind_from_name(const std::string& name) {
    if (name == "bode")
        return AqmKind::Bode;
    if (name == "codel")
        return AqmKind::Codel;
    if (name == "pie")
        return AqmKind::Pie;
    if (name == "taildrop")
        return AqmKind::TailDrop;
    if (name == "headdrop")
        return AqmKind::HeadDrop;
    throw std::runtime_error("unknown discipline kind: " + name +
                             " (expected bode, codel, pie, taildrop, or headdrop)");
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return parse_json(root, std::filesystem::path(path).parent_path().string());
}

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("scenario text: ") + e.what());
    }
    return parse_json(root, base_dir);
}

std::string emit_scenario(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["preset"] = s.profile == Profile::Interactive ? "interactive" : "default";
    j["engine"] = {{"duration_s", s.duration_s},
                   {"min_rtt_ms", to_ms(s.min_rtt)},
                   {"seed", s.seed}};
    if (s.trace_cfg.synthetic)
        j["trace"] = {{"synthetic", emit_synthetic(*s.trace_cfg.synthetic)}};
    else
        j["trace"] = {{"file", s.trace_cfg.file}};
    json classes = json::array();
    for (const auto& c : s.classes) {
        json jc;
        jc["class_id"] = c.class_id;
        jc["discipline"] = emit_discipline(c.discipline);
        if (c.delay_requirement != kNever)
            jc["delay_requirement_ms"] = to_ms(c.delay_requirement);
        classes.push_back(jc);
    }
    j["classes"] = classes;
    json sources = json::array();
    for (const auto& src : s.sources)
        sources.push_back(emit_source(src));
    j["sources"] = sources;
    j["outputs"] = {{"events_csv", s.outputs.events_csv}, {"cdf_csv", s.outputs.cdf_csv}};
    return j.dump(2) + "\n";
}

} // namespace bodesim
