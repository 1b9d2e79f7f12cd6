#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vlb/lp.hpp"
#include "vlb/model.hpp"

namespace vlb {

using Series = std::vector<double>;
/// Outer index is the participant (or bucket), inner index the period.
using SeriesMatrix = std::vector<Series>;

/// Intra/inter decomposition of the storage in a virtual-linking-bid clearing.
struct VlbStorage {
    ValueLedger ledger;            // buckets the interval was cleared against, in LP order
    Series intra_charge;           // MW, negative = intra discharge
    SeriesMatrix inter_discharge;  // [bucket][period], MW >= 0
    Series intra_level;            // MWh, may dip below zero before the last period
    SeriesMatrix inter_level;      // [bucket][period], MWh >= 0

    bool operator==(const VlbStorage&) const = default;
};

struct ClearingResult {
    Mode mode = Mode::split_end_level;
    TimeGrid grid;
    std::vector<std::string> load_ids;
    std::vector<std::string> generator_ids;
    SeriesMatrix load_dispatch;       // [load][period], MW
    SeriesMatrix generator_dispatch;  // [generator][period], MW
    Series storage_charge;            // net storage instruction, MW (negative = discharge)
    Series storage_level;             // total content at the end of each period, MWh
    double initial_level = 0.0;       // total content before the first period, MWh
    std::optional<VlbStorage> vlb;
    Series price;                         // money/MWh, balance-row point dual
    std::vector<lp::Interval> price_range;  // empty when ranges were not requested
    double objective = 0.0;

    double final_level() const { return storage_level.empty() ? initial_level : storage_level.back(); }

    bool operator==(const ClearingResult&) const = default;
};

/// Knobs shared by every clearing formulation.
struct ClearingOptions {
    const lp::Solver* solver = nullptr;  // null = embedded simplex
    bool price_ranges = true;
    /// Apply the simultaneous charge/discharge post-processing to VLB results.
    bool remove_simultaneous = true;
    /// Receives every clearing LP before it is solved (used for --dump-lp).
    std::function<void(const std::string& tag, const lp::LinearProgram&)> lp_observer;
    std::string tag;  // prefix passed to lp_observer
};

/// All intervals cleared jointly as one horizon; only the last interval's
/// end level is imposed, at the very last period.
ClearingResult clear_ideal(const StorageSpec& storage, const std::vector<IntervalSpec>& intervals,
                           const ClearingOptions& options = {});

/// One interval with the end-level equality e_T = E^end.
ClearingResult clear_split(const IntervalSpec& interval, const StorageSpec& storage, double initial_energy,
                           const ClearingOptions& options = {});

/// One interval whose objective is charged S^end per MWh left at the end.
ClearingResult clear_split_penalty(const IntervalSpec& interval, const StorageSpec& storage,
                                   double initial_energy, const ClearingOptions& options = {});

/// One interval with virtual linking bids for each ledger bucket.
ClearingResult clear_vlb(const IntervalSpec& interval, const StorageSpec& storage, const ValueLedger& ledger,
                         const ClearingOptions& options = {});

/// Cuts an ideal (multi-interval) result into per-interval views.
std::vector<ClearingResult> slice_by_interval(const ClearingResult& ideal, const std::vector<IntervalSpec>& intervals);

/// Utilities minus costs over accepted quantities.
double social_welfare(const ClearingResult& result, const IntervalSpec& bids);

}  // namespace vlb
