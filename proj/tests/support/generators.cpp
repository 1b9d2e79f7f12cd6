#include "support/generators.hpp"

#include <algorithm>

namespace vlb::testing {

namespace {

double on_grid(Rng& rng, double max, double step)
{
    std::uniform_int_distribution<int> pick(0, static_cast<int>(max / step + 1e-9));
    return step * pick(rng);
}

int whole(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

IntervalSpec random_interval(Rng& rng, std::size_t n_periods, std::size_t n_loads, std::size_t n_generators,
                             double step, double max_quantity, int max_price)
{
    IntervalSpec spec;
    spec.grid = {n_periods, 1.0};
    for (std::size_t l = 0; l < n_loads; ++l) {
        LoadBid b;
        b.id = "L" + std::to_string(l + 1);
        for (std::size_t t = 0; t < n_periods; ++t) {
            b.utility.push_back(whole(rng, 0, max_price));
            b.max_quantity.push_back(on_grid(rng, max_quantity, step));
        }
        spec.loads.push_back(std::move(b));
    }
    for (std::size_t g = 0; g < n_generators; ++g) {
        GeneratorBid b;
        b.id = "G" + std::to_string(g + 1);
        for (std::size_t t = 0; t < n_periods; ++t) {
            b.cost.push_back(whole(rng, 0, max_price));
            b.max_quantity.push_back(on_grid(rng, max_quantity, step));
        }
        spec.generators.push_back(std::move(b));
    }
    return spec;
}

ValueLedger random_ledger(Rng& rng, std::size_t n_buckets, double capacity, double step, int max_price)
{
    ValueLedger ledger;
    double room = capacity;
    for (std::size_t v = 0; v < n_buckets && room >= step; ++v) {
        const double q = step * whole(rng, 1, static_cast<int>(room / step + 1e-9));
        ledger.buckets.push_back({static_cast<double>(whole(rng, 1, max_price)), q, 0});
        room -= q;
    }
    return ledger;
}

Scenario random_scenario(Rng& rng, std::size_t n_intervals, std::size_t max_periods, Mode mode)
{
    Scenario s;
    s.mode = mode;
    s.storage.capacity = 0.5 * whole(rng, 1, 6);
    s.storage.initial_energy = 0.0;
    const auto n_loads = static_cast<std::size_t>(whole(rng, 1, 2));
    const auto n_gens = static_cast<std::size_t>(whole(rng, 1, 2));
    for (std::size_t k = 0; k < n_intervals; ++k) {
        auto spec = random_interval(rng, static_cast<std::size_t>(whole(rng, 1, static_cast<int>(max_periods))),
                                    n_loads, n_gens);
        spec.end_level = k + 1 == n_intervals ? 0.0 : on_grid(rng, s.storage.capacity, 0.5);
        spec.penalty_price = whole(rng, 0, 10);
        s.intervals.push_back(std::move(spec));
    }
    return s;
}

}  // namespace vlb::testing
