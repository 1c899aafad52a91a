#include "bodesim/batch.hpp"

namespace bodesim {

SimReport run_scenario(const Scenario& sc) {
    Engine eng(sc);
    eng.run();

    SimReport rep;
    rep.scenario = sc;
    rep.log = eng.log();
    rep.total = summarize(rep.log, sc.duration());
    rep.total.scenario = sc.name;
    rep.total.discipline = aqm_kind_name(sc.classes.front().discipline.kind);
    for (std::size_t c = 0; c < sc.classes.size(); ++c) {
        Summary s = summarize(rep.log, sc.duration(), sc.classes[c].class_id);
        s.scenario = sc.name;
        s.discipline = aqm_kind_name(sc.classes[c].discipline.kind);
        rep.per_class.push_back(std::move(s));
    }
    return rep;
}

std::vector<SimReport> run_batch(const std::vector<Scenario>& scenarios, BatchMode mode) {
    std::vector<SimReport> out(scenarios.size());
    if (mode == BatchMode::Serial) {
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            out[i] = run_scenario(scenarios[i]);
        return out;
    }
    const auto n = static_cast<std::int64_t>(scenarios.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = run_scenario(scenarios[static_cast<std::size_t>(i)]);
    return out;
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

} // namespace bodesim
