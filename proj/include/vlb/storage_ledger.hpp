#pragma once

#include <cstddef>

#include "vlb/clearing.hpp"
#include "vlb/lp.hpp"
#include "vlb/model.hpp"

namespace vlb {

/// Intra-storage charge split into energy arbitraged within the interval
/// (local) and energy handed to the inter-storage (moved).
struct ValuationSplit {
    Series local;  // MW per period
    Series moved;  // MW per period, >= 0
    double local_profit = 0.0;  // money, >= 0

    bool operator==(const ValuationSplit&) const = default;
};

/// Rewrites an optimal VLB result so that no period both charges the
/// intra-storage and discharges the inter-storage. Each step moves inter
/// discharge from a charging period to an intra-discharging one; dispatch,
/// objective, and the summed storage instruction are unchanged.
/// Throws InvariantError when no discharging period is left to absorb it.
ClearingResult remove_simultaneous(const ClearingResult& result);

/// Subtracts each bucket's discharged energy; empty buckets are dropped.
ValueLedger apply_net_discharge(const ValueLedger& ledger, const ClearingResult& result);

/// Cheapest split of the intra charge that still leaves the intra-storage a
/// non-negative profit at the published prices.
ValuationSplit assign_charge_values(const ClearingResult& result, const lp::Solver* solver = nullptr);

/// Net discharge, then (on net charge) new buckets priced at the periods
/// where energy was moved. `interval_index` is 1-based.
ValueLedger update_ledger(const ValueLedger& ledger, const ClearingResult& result, std::size_t interval_index,
                          const lp::Solver* solver = nullptr);

/// Multiplies by (1 - rate) the price of every bucket born before
/// `current_interval`.
ValueLedger apply_discount(const ValueLedger& ledger, double rate, std::size_t current_interval);

/// Sorts by ascending price (then birth) and merges buckets that share both.
ValueLedger normalize_ledger(ValueLedger ledger);

}  // namespace vlb
