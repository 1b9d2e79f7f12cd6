#include "vlb/storage_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vlb {

namespace {

double snap(double x)
{
    return std::abs(x) < 1e-12 ? 0.0 : x;
}

const VlbStorage& vlb_part(const ClearingResult& result, std::string_view caller)
{
    if (!result.vlb) {
        throw std::invalid_argument(std::string(caller) + " needs a VLB clearing result");
    }
    return *result.vlb;
}

}  // namespace

ClearingResult remove_simultaneous(const ClearingResult& result)
{
    (void)vlb_part(result, "remove_simultaneous");
    ClearingResult out = result;
    VlbStorage& s = *out.vlb;
    const std::size_t n = out.grid.n_periods;
    const std::size_t nb = s.inter_discharge.size();
    constexpr double eps = kModelEps;

    // Buckets are drained cheapest first when discharge is shifted.
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.ledger.buckets[a].price < s.ledger.buckets[b].price;
    });

    auto inter_total = [&](std::size_t t) {
        double q = 0.0;
        for (std::size_t v = 0; v < nb; ++v) {
            q += s.inter_discharge[v][t];
        }
        return q;
    };
    auto simultaneous = [&](std::size_t t) { return s.intra_charge[t] > eps && inter_total(t) > eps; };

    for (;;) {
        std::size_t tau = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (simultaneous(t)) {
                tau = t;
                break;
            }
        }
        if (tau == n) {
            break;
        }
        double q = inter_total(tau);
        while (q > eps && s.intra_charge[tau] > eps) {
            std::size_t kappa = n;
            for (std::size_t t = 0; t < n; ++t) {
                if (s.intra_charge[t] < -eps) {
                    kappa = t;
                    break;
                }
            }
            if (kappa == n) {
                std::ostringstream msg;
                msg << "period " << tau + 1
                    << " charges the intra-storage while discharging the inter-storage, but no period "
                       "discharges the intra-storage; the clearing solution is not optimal";
                throw InvariantError(msg.str());
            }
            const double shift = std::min(q, -s.intra_charge[kappa]);
            s.intra_charge[tau] = snap(s.intra_charge[tau] - shift);
            s.intra_charge[kappa] = snap(s.intra_charge[kappa] + shift);
            double remaining = shift;
            for (std::size_t v : order) {
                if (remaining <= 0.0) {
                    break;
                }
                const double take = std::min(s.inter_discharge[v][tau], remaining);
                s.inter_discharge[v][tau] = snap(s.inter_discharge[v][tau] - take);
                s.inter_discharge[v][kappa] = snap(s.inter_discharge[v][kappa] + take);
                remaining -= take;
            }
            q -= shift;
        }
    }

    const double dt = out.grid.delta_t;
    double intra = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        intra += dt * s.intra_charge[t];
        s.intra_level[t] = snap(intra);
    }
    for (std::size_t v = 0; v < nb; ++v) {
        double level = s.ledger.buckets[v].quantity;
        for (std::size_t t = 0; t < n; ++t) {
            level -= dt * s.inter_discharge[v][t];
            s.inter_level[v][t] = snap(level);
        }
    }
    return out;
}

ValueLedger apply_net_discharge(const ValueLedger& ledger, const ClearingResult& result)
{
    const VlbStorage& s = vlb_part(result, "apply_net_discharge");
    if (s.inter_discharge.size() != ledger.buckets.size()) {
        throw std::invalid_argument("ledger does not match the buckets the interval was cleared against");
    }
    ValueLedger out;
    for (std::size_t v = 0; v < ledger.buckets.size(); ++v) {
        ValueBucket b = ledger.buckets[v];
        const double discharged =
            result.grid.delta_t * std::accumulate(s.inter_discharge[v].begin(), s.inter_discharge[v].end(), 0.0);
        b.quantity -= discharged;
        if (b.quantity < -kModelEps) {
            std::ostringstream msg;
            msg << "bucket " << v + 1 << " (price " << b.price << ") discharged " << discharged << " MWh but held only "
                << ledger.buckets[v].quantity;
            throw InvariantError(msg.str());
        }
        if (b.quantity > kModelEps) {
            out.buckets.push_back(b);
        }
    }
    return out;
}

ValuationSplit assign_charge_values(const ClearingResult& result, const lp::Solver* solver)
{
    const VlbStorage& s = vlb_part(result, "assign_charge_values");
    const std::size_t n = result.grid.n_periods;
    const double dt = result.grid.delta_t;
    const double net = dt * std::accumulate(s.intra_charge.begin(), s.intra_charge.end(), 0.0);
    if (net <= kModelEps) {
        throw std::invalid_argument("charge valuation needs a net intra-storage charge");
    }

    using lp::Comparator;
    lp::LinearProgram lp(lp::Sense::minimize);
    std::vector<std::size_t> local, moved;
    std::vector<lp::Term> balance, profit;
    for (std::size_t t = 0; t < n; ++t) {
        const double charge = s.intra_charge[t];
        const auto suffix = "_" + std::to_string(t + 1);
        if (charge <= 0.0) {
            local.push_back(lp.add_variable("loc" + suffix, charge, charge));
            moved.push_back(lp.add_variable("mov" + suffix, 0.0, 0.0));
        }
        else {
            local.push_back(lp.add_variable("loc" + suffix, 0.0, lp::kInf));
            moved.push_back(lp.add_variable("mov" + suffix, 0.0, lp::kInf));
        }
        lp.set_objective(local[t], -dt * result.price[t]);
        lp.add_constraint("total" + suffix, {{local[t], 1.0}, {moved[t], 1.0}}, Comparator::equal, charge);
        balance.push_back({local[t], 1.0});
        profit.push_back({local[t], -result.price[t]});
    }
    lp.add_constraint("local_balance", std::move(balance), Comparator::equal, 0.0);
    lp.add_constraint("local_profit", std::move(profit), Comparator::greater_equal, 0.0);

    const lp::SimplexSolver fallback;
    const lp::LpSolution sol = (solver != nullptr ? *solver : static_cast<const lp::Solver&>(fallback)).solve(lp);
    if (sol.status != lp::Status::optimal) {
        throw InfeasibleError("no split of the intra-storage charge leaves a non-negative local profit",
                              "local_profit");
    }

    ValuationSplit split;
    for (std::size_t t = 0; t < n; ++t) {
        split.local.push_back(snap(sol.primal[local[t]]));
        split.moved.push_back(snap(sol.primal[moved[t]]));
    }
    split.local_profit = snap(sol.objective);
    return split;
}

ValueLedger update_ledger(const ValueLedger& ledger, const ClearingResult& result, std::size_t interval_index,
                          const lp::Solver* solver)
{
    const VlbStorage& s = vlb_part(result, "update_ledger");
    ValueLedger out = apply_net_discharge(ledger, result);
    const double net_charge = s.intra_level.empty() ? 0.0 : s.intra_level.back();
    if (net_charge <= kModelEps) {
        return normalize_ledger(std::move(out));
    }
    const ValuationSplit split = assign_charge_values(result, solver);
    for (std::size_t t = 0; t < split.moved.size(); ++t) {
        const double quantity = result.grid.delta_t * split.moved[t];
        if (quantity <= kModelEps) {
            continue;
        }
        if (result.price[t] <= kModelEps) {
            std::ostringstream msg;
            msg << "energy moved to the inter-storage in period " << t + 1 << " would be valued at a non-positive price "
                << result.price[t];
            throw InvariantError(msg.str());
        }
        out.buckets.push_back({result.price[t], quantity, interval_index});
    }
    return normalize_ledger(std::move(out));
}

ValueLedger apply_discount(const ValueLedger& ledger, double rate, std::size_t current_interval)
{
    if (rate < 0.0 || rate >= 1.0) {
        throw std::invalid_argument("discount rate must lie in [0, 1)");
    }
    ValueLedger out = ledger;
    if (rate == 0.0) {
        return out;
    }
    for (auto& b : out.buckets) {
        if (b.birth_interval < current_interval) {
            b.price *= 1.0 - rate;
        }
    }
    return normalize_ledger(std::move(out));
}

ValueLedger normalize_ledger(ValueLedger ledger)
{
    auto& b = ledger.buckets;
    std::stable_sort(b.begin(), b.end(), [](const ValueBucket& x, const ValueBucket& y) {
        if (x.price != y.price) {
            return x.price < y.price;
        }
        return x.birth_interval < y.birth_interval;
    });
    std::vector<ValueBucket> merged;
    for (const auto& bucket : b) {
        if (!merged.empty() && merged.back().birth_interval == bucket.birth_interval &&
            std::abs(merged.back().price - bucket.price) <= kModelEps * std::max(1.0, std::abs(bucket.price))) {
            merged.back().quantity += bucket.quantity;
        }
        else {
            merged.push_back(bucket);
        }
    }
    b = std::move(merged);
    return ledger;
}

}  // namespace vlb
