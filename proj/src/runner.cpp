#include "vlb/runner.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "vlb/errors.hpp"
#include "vlb/storage_ledger.hpp"

namespace vlb {

namespace {

// Runs one stage, tagging any engine error with where it happened.
template <typename F>
auto stage(std::size_t interval, const char* name, F&& body)
{
    try {
        return body();
    }
    catch (Error& e) {
        if (!e.interval()) {
            e.set_context(interval, name);
        }
        throw;
    }
    catch (const std::invalid_argument& e) {
        InvariantError err(e.what());
        err.set_context(interval, name);
        throw err;
    }
}

ClearingOptions clearing_options(const RunOptions& options, Mode mode, std::size_t interval)
{
    ClearingOptions c;
    c.solver = options.solver;
    c.price_ranges = options.price_ranges;
    c.remove_simultaneous = false;
    c.lp_observer = options.lp_observer;
    c.tag = std::string(to_string(mode)) + "_mi" + std::to_string(interval) + "_";
    return c;
}

std::vector<ClearingResult> run_vlb(const Scenario& s, const RunOptions& options, ModeReport& report)
{
    std::vector<ClearingResult> results;
    ValueLedger ledger = normalize_ledger(s.initial_ledger);
    for (std::size_t k = 1; k <= s.intervals.size(); ++k) {
        if (k > 1) {
            ledger = stage(k, "apply_discount", [&] { return apply_discount(ledger, s.discount_rate, k - 1); });
        }
        const auto opts = clearing_options(options, Mode::vlb, k);
        auto cleared = stage(k, "clear_vlb", [&] { return clear_vlb(s.intervals[k - 1], s.storage, ledger, opts); });
        cleared = stage(k, "remove_simultaneous", [&] { return remove_simultaneous(cleared); });
        ValueLedger next = stage(k, "update_ledger", [&] { return update_ledger(ledger, cleared, k, options.solver); });
        report.ledger_snapshots.push_back({k, ledger, next});
        ledger = std::move(next);
        results.push_back(std::move(cleared));
    }
    return results;
}

std::vector<ClearingResult> run_split(const Scenario& s, Mode mode, const RunOptions& options)
{
    std::vector<ClearingResult> results;
    double level = s.storage.initial_energy;
    for (std::size_t k = 1; k <= s.intervals.size(); ++k) {
        const auto opts = clearing_options(options, mode, k);
        const auto& spec = s.intervals[k - 1];
        auto cleared = mode == Mode::split_penalty
                           ? stage(k, "clear_split_penalty",
                                   [&] { return clear_split_penalty(spec, s.storage, level, opts); })
                           : stage(k, "clear_split", [&] { return clear_split(spec, s.storage, level, opts); });
        level = cleared.final_level();
        results.push_back(std::move(cleared));
    }
    return results;
}

std::vector<ClearingResult> run_ideal(const Scenario& s, const RunOptions& options)
{
    if (s.intervals.empty()) {
        return {};
    }
    const auto opts = clearing_options(options, Mode::ideal, 1);
    const auto whole = stage(1, "clear_ideal", [&] { return clear_ideal(s.storage, s.intervals, opts); });
    return stage(1, "slice_by_interval", [&] { return slice_by_interval(whole, s.intervals); });
}

ModeReport run_mode(const Scenario& scenario, Mode mode, const RunOptions& options)
{
    auto diagnostics = validate_scenario(scenario, mode);
    if (!diagnostics.empty()) {
        throw ValidationError(std::move(diagnostics));
    }

    ModeReport report;
    report.mode = mode;
    std::vector<ClearingResult> results;
    switch (mode) {
    case Mode::vlb:
        results = run_vlb(scenario, options, report);
        break;
    case Mode::split_end_level:
    case Mode::split_penalty:
        results = run_split(scenario, mode, options);
        break;
    case Mode::ideal:
        results = run_ideal(scenario, options);
        break;
    }

    for (std::size_t k = 0; k < results.size(); ++k) {
        const double sw = social_welfare(results[k], scenario.intervals[k]);
        report.totals.social_welfare += sw;
        report.totals.objective += results[k].objective;
        report.intervals.push_back({k + 1, std::move(results[k]), sw});
    }
    std::vector<ClearingResult> cleared;
    for (const auto& i : report.intervals) {
        cleared.push_back(i.result);
    }
    report.surpluses = participant_surpluses(cleared, scenario.intervals, options.selection);
    for (const auto& line : report.surpluses) {
        switch (line.kind) {
        case ParticipantKind::load:
            report.totals.load_surplus += line.surplus;
            break;
        case ParticipantKind::generator:
            report.totals.generator_surplus += line.surplus;
            break;
        case ParticipantKind::storage:
            report.totals.storage_surplus += line.surplus;
            break;
        }
    }
    report.cycles = cost_recovery_audit(cleared, scenario.intervals, options.selection);
    return report;
}

ModeReport guarded_run(const Scenario& scenario, Mode mode, const RunOptions& options)
{
    try {
        return run_mode(scenario, mode, options);
    }
    catch (const std::exception& e) {
        ModeReport failed;
        failed.mode = mode;
        failed.failure = RunFailure{exit_code_for(e), e.what()};
        return failed;
    }
}

}  // namespace

RunReport run(const Scenario& scenario, const RunOptions& options)
{
    RunReport report;
    report.selection = options.selection;
    report.modes.push_back(run_mode(scenario, scenario.mode, options));
    return report;
}

RunReport compare(const Scenario& scenario, const std::vector<Mode>& modes, const RunOptions& options)
{
    RunReport report;
    report.selection = options.selection;
    if (!options.parallel) {
        for (Mode m : modes) {
            report.modes.push_back(guarded_run(scenario, m, options));
        }
        return report;
    }
    std::vector<std::future<ModeReport>> pending;
    for (Mode m : modes) {
        pending.push_back(std::async(std::launch::async, guarded_run, std::cref(scenario), m, std::cref(options)));
    }
    for (auto& f : pending) {
        report.modes.push_back(f.get());
    }
    return report;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ValidationError*>(&e) != nullptr || dynamic_cast<const ParseError*>(&e) != nullptr) {
        return 2;
    }
    if (dynamic_cast<const InfeasibleError*>(&e) != nullptr) {
        return 3;
    }
    if (dynamic_cast<const NumericalError*>(&e) != nullptr || dynamic_cast<const InvariantError*>(&e) != nullptr) {
        return 4;
    }
    return 1;
}

int exit_code_for(const RunReport& report)
{
    int code = 0;
    for (const auto& m : report.modes) {
        if (m.failure) {
            code = std::max(code, m.failure->exit_code);
        }
    }
    return code;
}

}  // namespace vlb
