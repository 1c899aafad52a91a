#include "bodesim/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bodesim {

double percentile(std::vector<double> samples, double q) {
    if (samples.empty())
        throw std::invalid_argument("percentile: no samples");
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("percentile: q outside (0, 1]");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    // Nearest rank. The epsilon keeps exact products like 0.99 * 100 from
    // ceiling up one slot on floating-point dust.
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::max<std::size_t>(rank, 1);
    return samples[rank - 1];
}

std::vector<double> queuing_delay_samples_ms(const EventLog& log, int class_filter) {
    std::vector<double> out;
    for (const auto& r : log.records) {
        if (class_filter >= 0 && r.klass != class_filter)
            continue;
        if (r.served())
            out.push_back(to_ms(r.served_at - r.enqueued_at));
    }
    return out;
}

Summary summarize(const EventLog& log, SimTime duration, int class_filter) {
    Summary s;
    s.class_id = class_filter;
    s.duration_s = to_sec(duration);

    std::int64_t served_bits = 0;
    std::int64_t sends = 0, retx_sends = 0;
    std::vector<double> delays;
    for (const auto& r : log.records) {
        if (class_filter >= 0 && r.klass != class_filter)
            continue;
        ++s.generated;
        ++sends;
        if (r.retx)
            ++retx_sends;
        if (r.enqueued_at != kNever)
            ++s.offered;
        if (r.served()) {
            ++s.served;
            served_bits += static_cast<std::int64_t>(r.size_bytes) * 8;
            delays.push_back(to_ms(r.served_at - r.enqueued_at));
            s.qdelay_peak_ms = std::max(s.qdelay_peak_ms, delays.back());
        } else if (r.dropped()) {
            ++s.dropped;
            switch (r.drop_reason) {
            case DropReason::ExpiredAtEgress: ++s.drops_expired; break;
            case DropReason::TailOverflow: ++s.drops_tail; break;
            case DropReason::HeadOverflow: ++s.drops_head; break;
            case DropReason::ProbabilisticEarly: ++s.drops_early; break;
            case DropReason::CoDelDrop: ++s.drops_codel; break;
            }
        } else if (r.enqueued_at != kNever) {
            ++s.in_queue_end;
        } else {
            ++s.in_flight_end;
        }
    }

    s.drop_rate = s.offered > 0 ? static_cast<double>(s.dropped) / static_cast<double>(s.offered)
                                : 0.0;
    s.throughput_mbps = s.duration_s > 0
                            ? static_cast<double>(served_bits) / s.duration_s / 1e6
                            : 0.0;
    if (!delays.empty()) {
        s.delay_defined = true;
        s.qdelay_p50_ms = percentile(delays, 0.50);
        s.qdelay_p99_ms = percentile(delays, 0.99);
        if (s.qdelay_p99_ms > 0.0) {
            s.power_defined = true;
            s.power = s.throughput_mbps / s.qdelay_p99_ms;
        }
    }
    s.retx_fraction = sends > 0 ? static_cast<double>(retx_sends) / static_cast<double>(sends)
                                : 0.0;
    return s;
}

RetxDelayResult e2e_delay_with_retx(const EventLog& log, std::int64_t flow) {
    // Per original sequence: earliest send vs. earliest successful delivery,
    // so a retransmitted packet pays for every lost attempt before it.
    std::map<std::int64_t, SimTime> first_send, first_delivery;
    for (const auto& r : log.records) {
        if (r.flow != flow)
            continue;
        auto [it, fresh] = first_send.try_emplace(r.seq, r.created_at);
        if (!fresh)
            it->second = std::min(it->second, r.created_at);
        if (r.delivered_at != kNever) {
            auto [dt, dfresh] = first_delivery.try_emplace(r.seq, r.delivered_at);
            if (!dfresh)
                dt->second = std::min(dt->second, r.delivered_at);
        }
    }
    RetxDelayResult out;
    for (const auto& [seq, sent] : first_send) {
        auto it = first_delivery.find(seq);
        if (it == first_delivery.end())
            ++out.undelivered;
        else
            out.samples_ms.push_back(to_ms(it->second - sent));
    }
    return out;
}

namespace {

std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void export_cdf(const std::vector<double>& samples, std::ostream& out) {
    if (samples.empty())
        throw std::invalid_argument("export_cdf: no samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    out << "value,cum_fraction\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        // Collapse runs of equal values to the run's final fraction.
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i])
            continue;
        out << full_precision(sorted[i]) << ','
            << full_precision(static_cast<double>(i + 1) / n) << '\n';
    }
}

std::vector<std::pair<double, double>> read_cdf(std::istream& in) {
    std::vector<std::pair<double, double>> cdf;
    std::string line;
    if (!std::getline(in, line) || line != "value,cum_fraction")
        throw std::runtime_error("cdf: bad header");
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("cdf: bad row: " + line);
        cdf.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return cdf;
}

double percentile_from_cdf(const std::vector<std::pair<double, double>>& cdf, double q) {
    if (cdf.empty())
        throw std::invalid_argument("percentile_from_cdf: empty");
    for (const auto& [value, frac] : cdf) {
        if (frac >= q - 1e-12)
            return value;
    }
    return cdf.back().first;
}

namespace {

void put_opt(std::ostream& out, bool defined, double v) {
    if (defined)
        out << full_precision(v);
    else
        out << "NA";
}

} // namespace

void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows) {
    out << "scenario,discipline,class,duration_s,generated,offered,served,dropped,"
           "drops_expired,drops_tail,drops_head,drops_early,drops_codel,in_queue_end,"
           "in_flight_end,drop_rate,throughput_mbps,qdelay_p50_ms,qdelay_p99_ms,"
           "qdelay_peak_ms,power,retx_fraction\n";
    for (const auto& s : rows) {
        out << s.scenario << ',' << s.discipline << ',';
        if (s.class_id < 0)
            out << "all";
        else
            out << s.class_id;
        out << ',' << full_precision(s.duration_s) << ',' << s.generated << ',' << s.offered
            << ',' << s.served << ',' << s.dropped << ',' << s.drops_expired << ','
            << s.drops_tail << ',' << s.drops_head << ',' << s.drops_early << ','
            << s.drops_codel << ',' << s.in_queue_end << ',' << s.in_flight_end << ','
            << full_precision(s.drop_rate) << ',' << full_precision(s.throughput_mbps) << ',';
        put_opt(out, s.delay_defined, s.qdelay_p50_ms);
        out << ',';
        put_opt(out, s.delay_defined, s.qdelay_p99_ms);
        out << ',';
        put_opt(out, s.delay_defined, s.qdelay_peak_ms);
        out << ',';
        put_opt(out, s.power_defined, s.power);
        out << ',' << full_precision(s.retx_fraction) << '\n';
    }
}

std::vector<CompareRow> normalize_against_bode(std::vector<CompareRow> rows) {
    // Per scenario, scale every discipline's figures by the bounded-delay
    // row so that row reads 1.0 across the board.
    std::map<std::string, const Summary*> base;
    for (const auto& r : rows) {
        if (r.discipline == "bode")
            base[r.scenario] = &r.summary;
    }
    for (auto& r : rows) {
        auto it = base.find(r.scenario);
        if (it == base.end())
            continue;
        const Summary& b = *it->second;
        if (b.throughput_mbps > 0 && b.delay_defined && b.power_defined && r.summary.delay_defined &&
            r.summary.power_defined) {
            r.norm_defined = true;
            r.norm_throughput = r.summary.throughput_mbps / b.throughput_mbps;
            r.norm_p99 = r.summary.qdelay_p99_ms / b.qdelay_p99_ms;
            r.norm_power = r.summary.power / b.power;
        }
    }
    return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "scenario,discipline,throughput_mbps,qdelay_p99_ms,power,drop_rate,"
           "norm_throughput,norm_qdelay_p99,norm_power\n";
    // Arithmetic mean of the normalized columns across scenarios, one trailing
    // row per discipline.
    std::map<std::string, std::array<double, 4>> acc; // sums + count
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.discipline << ','
            << full_precision(r.summary.throughput_mbps) << ',';
        put_opt(out, r.summary.delay_defined, r.summary.qdelay_p99_ms);
        out << ',';
        put_opt(out, r.summary.power_defined, r.summary.power);
        out << ',' << full_precision(r.summary.drop_rate) << ',';
        put_opt(out, r.norm_defined, r.norm_throughput);
        out << ',';
        put_opt(out, r.norm_defined, r.norm_p99);
        out << ',';
        put_opt(out, r.norm_defined, r.norm_power);
        out << '\n';
        if (r.norm_defined) {
            auto& a = acc[r.discipline];
            a[0] += r.norm_throughput;
            a[1] += r.norm_p99;
            a[2] += r.norm_power;
            a[3] += 1.0;
        }
    }
    for (const auto& [disc, a] : acc) {
        out << "mean," << disc << ",NA,NA,NA,NA," << full_precision(a[0] / a[3]) << ','
            << full_precision(a[1] / a[3]) << ',' << full_precision(a[2] / a[3]) << '\n';
    }
}

} // namespace bodesim
