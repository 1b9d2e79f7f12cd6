#include "vlb/metrics.hpp"

#include <stdexcept>

namespace vlb {

namespace {

constexpr double kAuditEps = 1e-7;

// Price times quantity where a zero quantity never meets an infinite
// range endpoint.
double settle(double price, double quantity)
{
    return quantity == 0.0 ? 0.0 : price * quantity;
}

bool is_empty(double level)
{
    return level <= kModelEps;
}

}  // namespace

std::string_view to_string(PriceSelection selection)
{
    switch (selection) {
    case PriceSelection::point:
        return "point";
    case PriceSelection::range_min:
        return "range_min";
    case PriceSelection::range_max:
        return "range_max";
    }
    return "unknown";
}

PriceSelection price_selection_from_string(std::string_view name)
{
    for (auto s : {PriceSelection::point, PriceSelection::range_min, PriceSelection::range_max}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw std::invalid_argument("unknown price selection '" + std::string(name) + "'");
}

std::string_view to_string(ParticipantKind kind)
{
    switch (kind) {
    case ParticipantKind::load:
        return "load";
    case ParticipantKind::generator:
        return "generator";
    case ParticipantKind::storage:
        return "storage";
    }
    return "unknown";
}

std::string_view to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::pass:
        return "PASS";
    case Verdict::fail:
        return "FAIL";
    case Verdict::indeterminate:
        return "INDETERMINATE";
    }
    return "unknown";
}

Series settlement_prices(const ClearingResult& result, PriceSelection selection)
{
    if (selection == PriceSelection::point || result.price_range.empty()) {
        return result.price;
    }
    Series out;
    for (const auto& range : result.price_range) {
        out.push_back(selection == PriceSelection::range_min ? range.lower : range.upper);
    }
    return out;
}

std::vector<SurplusLine> participant_surpluses(const std::vector<ClearingResult>& results,
                                               const std::vector<IntervalSpec>& bids, PriceSelection selection)
{
    if (results.size() != bids.size()) {
        throw std::invalid_argument("results and bids are not aligned by interval");
    }
    std::vector<SurplusLine> lines;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        const auto& spec = bids[k];
        const auto price = settlement_prices(r, selection);
        const double dt = r.grid.delta_t;

        for (std::size_t l = 0; l < spec.loads.size(); ++l) {
            double s = 0.0;
            for (std::size_t t = 0; t < r.grid.n_periods; ++t) {
                s += spec.loads[l].utility[t] * r.load_dispatch[l][t] - settle(price[t], r.load_dispatch[l][t]);
            }
            lines.push_back({ParticipantKind::load, spec.loads[l].id, k + 1, dt * s});
        }
        for (std::size_t g = 0; g < spec.generators.size(); ++g) {
            double s = 0.0;
            for (std::size_t t = 0; t < r.grid.n_periods; ++t) {
                s += settle(price[t], r.generator_dispatch[g][t]) -
                     spec.generators[g].cost[t] * r.generator_dispatch[g][t];
            }
            lines.push_back({ParticipantKind::generator, spec.generators[g].id, k + 1, dt * s});
        }
        double storage = 0.0;
        for (std::size_t t = 0; t < r.grid.n_periods; ++t) {
            storage -= settle(price[t], r.storage_charge[t]);
        }
        lines.push_back({ParticipantKind::storage, "storage", k + 1, dt * storage});
    }
    return lines;
}

std::vector<Cycle> detect_cycles(const std::vector<ClearingResult>& results)
{
    std::vector<Cycle> cycles;
    std::size_t k = 0;
    while (k < results.size()) {
        const bool starts_empty = is_empty(results[k].initial_level);
        std::size_t j = k;
        while (j < results.size() && !is_empty(results[j].final_level())) {
            ++j;
        }
        if (j == results.size()) {
            cycles.push_back({k + 1, results.size(), false});
            break;
        }
        cycles.push_back({k + 1, j + 1, starts_empty});
        k = j + 1;
    }
    return cycles;
}

std::vector<CycleReport> cost_recovery_audit(const std::vector<ClearingResult>& results,
                                             const std::vector<IntervalSpec>& bids, PriceSelection selection)
{
    const auto lines = participant_surpluses(results, bids, selection);
    std::vector<CycleReport> reports;
    for (const auto& cycle : detect_cycles(results)) {
        CycleReport rep;
        rep.cycle = cycle;
        for (const auto& line : lines) {
            if (line.kind == ParticipantKind::storage && line.interval >= cycle.first && line.interval <= cycle.last) {
                rep.storage_surplus += line.surplus;
            }
        }
        if (!cycle.closed) {
            rep.verdict = Verdict::indeterminate;
        }
        else {
            rep.verdict = rep.storage_surplus >= -kAuditEps ? Verdict::pass : Verdict::fail;
        }
        rep.social_welfare = social_welfare(results, bids, cycle);
        reports.push_back(rep);
    }
    return reports;
}

double social_welfare(const std::vector<ClearingResult>& results, const std::vector<IntervalSpec>& bids,
                      const Cycle& cycle)
{
    if (cycle.first < 1 || cycle.last > results.size() || cycle.first > cycle.last || results.size() != bids.size()) {
        throw std::invalid_argument("cycle does not lie within the cleared intervals");
    }
    double sw = 0.0;
    for (std::size_t k = cycle.first - 1; k < cycle.last; ++k) {
        sw += social_welfare(results[k], bids[k]);
    }
    return sw;
}

}  // namespace vlb
