#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vlb/clearing.hpp"
#include "vlb/lp.hpp"
#include "vlb/metrics.hpp"
#include "vlb/model.hpp"

namespace vlb {

struct RunOptions {
    PriceSelection selection = PriceSelection::point;
    bool price_ranges = true;
    const lp::Solver* solver = nullptr;  // null = embedded simplex
    std::function<void(const std::string& tag, const lp::LinearProgram&)> lp_observer;
    /// Run compared modes on separate threads.
    bool parallel = true;
};

struct IntervalReport {
    std::size_t interval = 0;  // 1-based
    ClearingResult result;
    double social_welfare = 0.0;

    bool operator==(const IntervalReport&) const = default;
};

/// Ledger held by the storage around one VLB interval: after the discount,
/// before clearing, and after the update.
struct LedgerSnapshot {
    std::size_t interval = 0;  // 1-based
    ValueLedger before;
    ValueLedger after;

    bool operator==(const LedgerSnapshot&) const = default;
};

struct Totals {
    double social_welfare = 0.0;
    double objective = 0.0;
    double load_surplus = 0.0;
    double generator_surplus = 0.0;
    double storage_surplus = 0.0;

    bool operator==(const Totals&) const = default;
};

struct RunFailure {
    int exit_code = 1;
    std::string message;

    bool operator==(const RunFailure&) const = default;
};

struct ModeReport {
    Mode mode = Mode::vlb;
    std::vector<IntervalReport> intervals;
    std::vector<LedgerSnapshot> ledger_snapshots;
    std::vector<SurplusLine> surpluses;
    std::vector<CycleReport> cycles;
    Totals totals;
    std::optional<RunFailure> failure;

    bool operator==(const ModeReport&) const = default;
};

struct RunReport {
    PriceSelection selection = PriceSelection::point;
    std::vector<ModeReport> modes;

    bool operator==(const RunReport&) const = default;
};

/// Runs the scenario under its own mode. Errors propagate with the interval
/// and stage attached.
RunReport run(const Scenario& scenario, const RunOptions& options = {});

/// Runs the scenario once per mode. A failing mode is recorded in its
/// ModeReport and does not stop the others.
RunReport compare(const Scenario& scenario, const std::vector<Mode>& modes, const RunOptions& options = {});

/// Process exit code for an error escaping run(): 2 validation or parse,
/// 3 infeasible, 4 numerical or invariant, 1 anything else.
int exit_code_for(const std::exception& e);

/// Largest exit code among failed modes, 0 if every mode completed.
int exit_code_for(const RunReport& report);

}  // namespace vlb
