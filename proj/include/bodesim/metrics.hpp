#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bodesim/event_log.hpp"

namespace bodesim {

// Aggregates over one run (optionally restricted to a class). Undefined
// quantities (no served packets) keep their *_defined flag false and are
// reported as "NA", never as infinity.
struct Summary {
    std::string scenario;
    std::string discipline;
    int class_id = -1; // -1 = every class
    double duration_s = 0;

    std::int64_t generated = 0;
    std::int64_t offered = 0; // reached the bottleneck
    std::int64_t served = 0;
    std::int64_t dropped = 0;
    std::int64_t drops_expired = 0;
    std::int64_t drops_tail = 0;
    std::int64_t drops_head = 0;
    std::int64_t drops_early = 0;
    std::int64_t drops_codel = 0;
    std::int64_t in_queue_end = 0;
    std::int64_t in_flight_end = 0;

    double drop_rate = 0; // dropped / offered
    double throughput_mbps = 0;

    bool delay_defined = false;
    double qdelay_p50_ms = 0;
    double qdelay_p99_ms = 0;
    double qdelay_peak_ms = 0;

    bool power_defined = false;
    double power = 0; // throughput_mbps / qdelay_p99_ms

    double retx_fraction = 0; // retransmitted sends / total sends
};

// Nearest-rank percentile: the ceil(q*N)-th smallest sample, q in (0, 1].
double percentile(std::vector<double> samples, double q);

Summary summarize(const EventLog& log, SimTime duration, int class_filter = -1);

std::vector<double> queuing_delay_samples_ms(const EventLog& log, int class_filter = -1);

// End-to-end delay including retransmission cost: for every original
// sequence number, first send to first successful delivery. Sequences never
// delivered are excluded from samples and counted separately.
struct RetxDelayResult {
    std::vector<double> samples_ms;
    std::int64_t undelivered = 0;
};
RetxDelayResult e2e_delay_with_retx(const EventLog& log, std::int64_t flow);

// Two-column CSV (value, cumulative fraction), sorted ascending, duplicates
// collapsed to their final fraction. Full-precision doubles so a re-read
// reproduces percentiles exactly.
void export_cdf(const std::vector<double>& samples, std::ostream& out);
std::vector<std::pair<double, double>> read_cdf(std::istream& in);
double percentile_from_cdf(const std::vector<std::pair<double, double>>& cdf, double q);

void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows);

// One comparison row: a discipline's metrics on one scenario plus the same
// metrics normalized to the bounded-delay discipline's row for that scenario.
struct CompareRow {
    std::string scenario;
    std::string discipline;
    Summary summary;
    bool norm_defined = false;
    double norm_throughput = 0;
    double norm_p99 = 0;
    double norm_power = 0;
};

std::vector<CompareRow> normalize_against_bode(std::vector<CompareRow> rows);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

} // namespace bodesim
