#pragma once

#include <string>
#include <vector>

#include "vlb/clearing.hpp"
#include "vlb/lp.hpp"
#include "vlb/model.hpp"

namespace vlb::testing {

/// Best welfare (Δt-scaled, minus virtual bid payments for VLB) over every
/// dispatch whose quantities lie on a `step` grid. Returns -inf when no grid
/// point is feasible. Exponential; keep instances to a couple of periods.
double brute_force_split(const IntervalSpec& interval, const StorageSpec& storage, double initial_energy,
                         double step = 0.5);
double brute_force_ideal(const StorageSpec& storage, const std::vector<IntervalSpec>& intervals, double step = 0.5);
double brute_force_vlb(const IntervalSpec& interval, const StorageSpec& storage, const ValueLedger& ledger,
                       double step = 0.5);

struct VertexOptimum {
    lp::Status status = lp::Status::infeasible;
    double objective = 0.0;
};

/// Optimum of a small LP with finite bounds found by solving every square
/// subsystem of active rows and bounds. Never reports unbounded.
VertexOptimum enumerate_vertices(const lp::LinearProgram& lp);

/// Welfare recomputed from bids matched by participant id.
double welfare_by_id(const ClearingResult& result, const IntervalSpec& bids);

/// VLB objective recomputed from the result: welfare minus what the virtual
/// linking bids are paid.
double vlb_objective(const ClearingResult& result, const IntervalSpec& bids);

/// Human-readable list of every constraint the result breaks.
std::vector<std::string> market_violations(const ClearingResult& result, const IntervalSpec& bids,
                                           const StorageSpec& storage, double eps = 1e-7);
std::vector<std::string> vlb_violations(const ClearingResult& result, const IntervalSpec& bids,
                                        const StorageSpec& storage, double eps = 1e-7);

}  // namespace vlb::testing
