#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vlb/clearing.hpp"
#include "vlb/model.hpp"

namespace vlb {

/// Which member of each period's valid price range is used for settlement.
enum class PriceSelection { point, range_min, range_max };

std::string_view to_string(PriceSelection selection);
PriceSelection price_selection_from_string(std::string_view name);

/// Uniform price of every period of `result` under `selection`. Falls back
/// to the point price when the result carries no ranges.
Series settlement_prices(const ClearingResult& result, PriceSelection selection);

enum class ParticipantKind { load, generator, storage };

std::string_view to_string(ParticipantKind kind);

struct SurplusLine {
    ParticipantKind kind = ParticipantKind::load;
    std::string participant;
    std::size_t interval = 0;  // 1-based
    double surplus = 0.0;      // money

    bool operator==(const SurplusLine&) const = default;
};

/// Surplus of every load, generator, and the storage in every interval. The
/// storage pays the price when charging and is paid when discharging.
std::vector<SurplusLine> participant_surpluses(const std::vector<ClearingResult>& results,
                                               const std::vector<IntervalSpec>& bids,
                                               PriceSelection selection = PriceSelection::point);

/// Consecutive intervals, 1-based and inclusive. `closed` is false for a
/// trailing stretch after which the storage never returns to empty (and for
/// a leading stretch that starts non-empty).
struct Cycle {
    std::size_t first = 0;
    std::size_t last = 0;
    bool closed = true;

    bool operator==(const Cycle&) const = default;
};

/// Splits the sequence at every boundary where the storage is empty.
std::vector<Cycle> detect_cycles(const std::vector<ClearingResult>& results);

enum class Verdict { pass, fail, indeterminate };

std::string_view to_string(Verdict verdict);

struct CycleReport {
    Cycle cycle;
    double storage_surplus = 0.0;
    Verdict verdict = Verdict::indeterminate;
    double social_welfare = 0.0;

    bool operator==(const CycleReport&) const = default;
};

/// Storage cost recovery over every cycle: pass when the storage surplus is
/// non-negative (within tolerance), indeterminate for open cycles.
std::vector<CycleReport> cost_recovery_audit(const std::vector<ClearingResult>& results,
                                             const std::vector<IntervalSpec>& bids,
                                             PriceSelection selection = PriceSelection::point);

/// Utilities minus costs over the cycle's intervals.
double social_welfare(const std::vector<ClearingResult>& results, const std::vector<IntervalSpec>& bids,
                      const Cycle& cycle);

}  // namespace vlb
