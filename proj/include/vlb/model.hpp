#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlb/errors.hpp"

namespace vlb {

/// Tolerance for invariant checks on quantities and prices.
inline constexpr double kModelEps = 1e-9;

/// Periods of one market interval. `delta_t` is in hours.
struct TimeGrid {
    std::size_t n_periods = 1;
    double delta_t = 1.0;

    bool operator==(const TimeGrid&) const = default;
};

/// Per-period utility (money/MWh) and maximum consumption (MW) of one load.
struct LoadBid {
    std::string id;
    std::vector<double> utility;
    std::vector<double> max_quantity;

    bool operator==(const LoadBid&) const = default;
};

/// Per-period cost (money/MWh) and maximum output (MW) of one generator.
struct GeneratorBid {
    std::string id;
    std::vector<double> cost;
    std::vector<double> max_quantity;

    bool operator==(const GeneratorBid&) const = default;
};

struct StorageSpec {
    double capacity = 0.0;        // MWh
    double initial_energy = 0.0;  // MWh; ignored in VLB mode (the ledger holds the content)

    bool operator==(const StorageSpec&) const = default;
};

struct IntervalSpec {
    TimeGrid grid;
    std::vector<LoadBid> loads;
    std::vector<GeneratorBid> generators;
    double end_level = 0.0;               // MWh
    std::optional<double> penalty_price;  // money/MWh, penalty mode only

    bool operator==(const IntervalSpec&) const = default;
};

/// Energy saved in the inter-storage at one charging price.
struct ValueBucket {
    double price = 0.0;     // money/MWh
    double quantity = 0.0;  // MWh
    std::size_t birth_interval = 0;  // 1-based market interval of the net charge; 0 = before the run

    bool operator==(const ValueBucket&) const = default;
};

/// Inter-storage state carried between market intervals.
struct ValueLedger {
    std::vector<ValueBucket> buckets;

    double total_quantity() const;
    bool empty() const noexcept { return buckets.empty(); }

    bool operator==(const ValueLedger&) const = default;
};

enum class Mode { ideal, split_end_level, split_penalty, vlb };

std::string_view to_string(Mode mode);
/// Throws std::invalid_argument on an unknown name.
Mode mode_from_string(std::string_view name);

struct Scenario {
    StorageSpec storage;
    std::vector<IntervalSpec> intervals;
    Mode mode = Mode::split_end_level;
    double discount_rate = 0.0;
    ValueLedger initial_ledger;

    bool operator==(const Scenario&) const = default;
};

/// Every violated invariant of `s`, checked against the scenario's own mode.
std::vector<Diagnostic> validate_scenario(const Scenario& s);

/// Same checks, but mode-specific requirements are taken from `mode`.
std::vector<Diagnostic> validate_scenario(const Scenario& s, Mode mode);

/// Parses and validates a scenario document. Throws ParseError on malformed
/// text and ValidationError when the content breaks an invariant.
Scenario parse_scenario(std::string_view text);

/// Inverse of parse_scenario: pretty-printed scenario document.
std::string serialize_scenario(const Scenario& s);

}  // namespace vlb
