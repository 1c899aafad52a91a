#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bodesim/batch.hpp"
#include "bodesim/metrics.hpp"
#include "bodesim/presets.hpp"
#include "bodesim/scenario.hpp"
#include "bodesim/trace.hpp"

namespace {

using namespace bodesim;

struct LoadOpts {
    std::string scenario_file;
    std::string preset;
    std::int64_t seed = -1;
    std::int64_t duration_s = -1;
};

void add_load_opts(CLI::App* cmd, LoadOpts& o) {
    auto* file = cmd->add_option("-s,--scenario", o.scenario_file, "scenario JSON file");
    auto* preset = cmd->add_option("-p,--preset", o.preset, "built-in preset name");
    file->excludes(preset);
    cmd->add_option("--seed", o.seed, "override the engine seed");
    cmd->add_option("--duration-s", o.duration_s, "override the run duration");
}

Scenario load_scenario(const LoadOpts& o) {
    if (o.scenario_file.empty() == o.preset.empty())
        throw CLI::ValidationError("exactly one of --scenario or --preset is required");
    Scenario sc =
        o.preset.empty() ? parse_scenario(o.scenario_file) : preset_scenario(o.preset);
    if (o.seed >= 0)
        sc.seed = static_cast<std::uint64_t>(o.seed);
    if (o.duration_s > 0)
        sc.duration_s = o.duration_s;
    return sc;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string opt_fmt(bool defined, double v) { return defined ? fmt(v) : "NA"; }

void print_summary_line(const Summary& s, const std::string& label) {
    std::cout << "  " << label << ": throughput " << fmt(s.throughput_mbps) << " Mb/s, qdelay p50/p99/peak "
              << opt_fmt(s.delay_defined, s.qdelay_p50_ms) << "/"
              << opt_fmt(s.delay_defined, s.qdelay_p99_ms) << "/"
              << opt_fmt(s.delay_defined, s.qdelay_peak_ms) << " ms, drops "
              << s.dropped << "/" << s.offered << " (" << fmt(100.0 * s.drop_rate)
              << "%), power " << opt_fmt(s.power_defined, s.power) << "\n";
}

int cmd_run(const LoadOpts& lo, const std::string& out_dir, bool force_events,
            bool force_cdf, bool quiet) {
    Scenario sc = load_scenario(lo);
    if (force_events)
        sc.outputs.events_csv = true;
    if (force_cdf)
        sc.outputs.cdf_csv = true;

    SimReport rep = run_scenario(sc);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    std::vector<Summary> rows;
    rows.push_back(rep.total);
    if (rep.per_class.size() > 1)
        rows.insert(rows.end(), rep.per_class.begin(), rep.per_class.end());
    auto summary_out = open_out(dir / (sc.name + ".summary.csv"));
    write_summary_csv(summary_out, rows);

    if (sc.outputs.events_csv) {
        auto out = open_out(dir / (sc.name + ".events.csv"));
        write_events_csv(out, rep.log);
    }
    if (sc.outputs.cdf_csv) {
        const auto samples = queuing_delay_samples_ms(rep.log);
        if (!samples.empty()) {
            auto out = open_out(dir / (sc.name + ".cdf.csv"));
            export_cdf(samples, out);
        }
    }

    if (!quiet) {
        std::cout << sc.name << " (" << sc.duration_s << " s, seed " << sc.seed << ")\n";
        print_summary_line(rep.total, "total");
        if (rep.per_class.size() > 1) {
            for (const auto& s : rep.per_class)
                print_summary_line(s, "class " + std::to_string(s.class_id));
        }
        std::cout << "wrote " << (dir / (sc.name + ".summary.csv")).string() << "\n";
    }
    return 0;
}

int cmd_compare(const LoadOpts& lo, const std::string& out_dir,
                std::vector<std::string> kinds, bool quiet) {
    Scenario base = load_scenario(lo);
    if (kinds.empty()) {
        for (AqmKind k : {AqmKind::Bode, AqmKind::Codel, AqmKind::Pie, AqmKind::TailDrop,
                          AqmKind::HeadDrop})
            kinds.emplace_back(aqm_kind_name(k));
    }

    std::vector<Scenario> variants;
    for (const auto& name : kinds)
        variants.push_back(sweep_variant(base, aqm_kind_from_name(name)));

    std::vector<SimReport> reps = run_batch(variants);

    std::vector<CompareRow> rows;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        CompareRow r;
        r.scenario = base.name;
        r.discipline = kinds[i];
        r.summary = reps[i].total;
        rows.push_back(std::move(r));
    }
    rows = normalize_against_bode(rows);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto out = open_out(dir / (base.name + ".compare.csv"));
    write_compare_csv(out, rows);

    if (!quiet) {
        std::cout << base.name << " (" << base.duration_s << " s, seed " << base.seed << ")\n";
        for (const auto& r : rows)
            print_summary_line(r.summary, r.discipline);
        std::cout << "wrote " << (dir / (base.name + ".compare.csv")).string() << "\n";
    }
    return 0;
}

int cmd_gen_trace(const SyntheticTraceSpec& spec, const std::string& out_file, bool quiet) {
    Trace t = generate_trace(spec);
    write_trace(t, out_file);
    if (!quiet)
        std::cout << "wrote " << out_file << ": " << t.opportunities_ms.size()
                  << " opportunities over " << t.wrap_length_ms << " ms ("
                  << fmt(mean_rate_mbps(t, spec.packet_size_bytes)) << " Mb/s mean)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-driven bottleneck-link simulator with pluggable queue disciplines"};
    app.require_subcommand(1);

    bool quiet = false;

    LoadOpts run_opts;
    std::string run_out = ".";
    bool run_events = false, run_cdf = false;
    auto* run = app.add_subcommand("run", "simulate one scenario and write summary CSVs");
    add_load_opts(run, run_opts);
    run->add_option("-o,--out", run_out, "output directory")->capture_default_str();
    run->add_flag("--events-csv", run_events, "also write the per-packet event log");
    run->add_flag("--cdf-csv", run_cdf, "also write the queuing-delay CDF");
    run->add_flag("-q,--quiet", quiet, "suppress console output; files are still written");

    LoadOpts cmp_opts;
    std::string cmp_out = ".";
    std::vector<std::string> cmp_kinds;
    auto* cmp = app.add_subcommand(
        "compare", "run one scenario under several queue disciplines and tabulate");
    add_load_opts(cmp, cmp_opts);
    cmp->add_option("-o,--out", cmp_out, "output directory")->capture_default_str();
    cmp->add_option("-d,--discipline", cmp_kinds,
                    "discipline kinds to sweep (default: all five)");
    cmp->add_flag("-q,--quiet", quiet, "suppress console output; files are still written");

    SyntheticTraceSpec spec;
    std::string kind_name = "constant";
    std::string trace_out;
    auto* gen = app.add_subcommand("gen-trace", "write a synthetic link trace file");
    gen->add_option("-k,--kind", kind_name, "constant, step, or random_walk")
        ->capture_default_str();
    gen->add_option("-o,--out", trace_out, "output trace file")->required();
    gen->add_option("--duration-s", spec.duration_s)->capture_default_str();
    gen->add_option("--packet-size-bytes", spec.packet_size_bytes)->capture_default_str();
    gen->add_option("--rate-mbps", spec.rate_mbps)->capture_default_str();
    gen->add_option("--rate-before-mbps", spec.rate_before_mbps)->capture_default_str();
    gen->add_option("--rate-after-mbps", spec.rate_after_mbps)->capture_default_str();
    gen->add_option("--step-at-s", spec.step_at_s)->capture_default_str();
    gen->add_option("--min-mbps", spec.min_mbps)->capture_default_str();
    gen->add_option("--max-mbps", spec.max_mbps)->capture_default_str();
    gen->add_option("--step-interval-ms", spec.step_interval_ms)->capture_default_str();
    gen->add_option("--seed", spec.seed)->capture_default_str();
    gen->add_flag("-q,--quiet", quiet, "suppress console output; files are still written");

    auto* presets = app.add_subcommand("presets", "built-in scenarios");
    auto* plist = presets->add_subcommand("list", "name and describe every preset");
    std::string show_name;
    auto* pshow = presets->add_subcommand("show", "print a preset as scenario JSON");
    pshow->add_option("name", show_name, "preset name")->required();
    presets->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_opts, run_out, run_events, run_cdf, quiet);
        if (cmp->parsed())
            return cmd_compare(cmp_opts, cmp_out, cmp_kinds, quiet);
        if (gen->parsed()) {
            if (kind_name == "constant")
                spec.kind = SyntheticTraceSpec::Kind::Constant;
            else if (kind_name == "step")
                spec.kind = SyntheticTraceSpec::Kind::Step;
            else if (kind_name == "random_walk")
                spec.kind = SyntheticTraceSpec::Kind::RandomWalk;
            else
                throw std::runtime_error("unknown trace kind: " + kind_name);
            return cmd_gen_trace(spec, trace_out, quiet);
        }
        if (plist->parsed()) {
            for (const auto& p : preset_list())
                std::cout << p.name << (p.for_compare ? " [compare]" : "") << " - "
                          << p.summary << "\n";
            return 0;
        }
        if (pshow->parsed()) {
            std::cout << emit_scenario(preset_scenario(show_name));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
