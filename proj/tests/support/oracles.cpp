#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace vlb::testing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> grid_values(double max, double step)
{
    std::vector<double> out;
    for (int i = 0; i * step <= max + 1e-9; ++i) {
        out.push_back(i * step);
    }
    return out;
}

// Every (net injection, welfare) pair a period's bids can produce on the grid.
struct PeriodOption {
    double injection;  // generation minus load, MW
    double welfare;    // utility minus cost, per hour
};

std::vector<PeriodOption> period_options(const IntervalSpec& spec, std::size_t t, double step)
{
    std::vector<PeriodOption> out{{0.0, 0.0}};
    auto extend = [&](double max, double price, double sign) {
        std::vector<PeriodOption> next;
        for (const auto& o : out) {
            for (double q : grid_values(max, step)) {
                next.push_back({o.injection + sign * q, o.welfare - sign * price * q});
            }
        }
        out = std::move(next);
    };
    for (const auto& l : spec.loads) {
        extend(l.max_quantity[t], l.utility[t], -1.0);
    }
    for (const auto& g : spec.generators) {
        extend(g.max_quantity[t], g.cost[t], 1.0);
    }
    return out;
}

bool near(double a, double b, double eps)
{
    return std::abs(a - b) <= eps * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

Series& prices(LoadBid& b) { return b.utility; }
Series& prices(GeneratorBid& b) { return b.cost; }
const Series& prices(const LoadBid& b) { return b.utility; }
const Series& prices(const GeneratorBid& b) { return b.cost; }

// Concatenates one interval's bids onto a horizon; participants absent
// from an interval bid nothing there.
template <class Bid>
void append_bids(std::vector<Bid>& into, const std::vector<Bid>& from, std::size_t before, std::size_t n)
{
    for (const auto& bid : from) {
        auto it = std::find_if(into.begin(), into.end(), [&](const Bid& b) { return b.id == bid.id; });
        if (it == into.end()) {
            Bid fresh;
            fresh.id = bid.id;
            fresh.max_quantity.assign(before, 0.0);
            prices(fresh).assign(before, 0.0);
            into.push_back(std::move(fresh));
            it = into.end() - 1;
        }
        it->max_quantity.insert(it->max_quantity.end(), bid.max_quantity.begin(), bid.max_quantity.end());
        prices(*it).insert(prices(*it).end(), prices(bid).begin(), prices(bid).end());
    }
    for (auto& b : into) {
        b.max_quantity.resize(before + n, 0.0);
        prices(b).resize(before + n, 0.0);
    }
}

}  // namespace

double brute_force_split(const IntervalSpec& interval, const StorageSpec& storage, double initial_energy,
                         double step)
{
    const std::size_t n = interval.grid.n_periods;
    const double dt = interval.grid.delta_t;
    std::vector<std::vector<PeriodOption>> options;
    for (std::size_t t = 0; t < n; ++t) {
        options.push_back(period_options(interval, t, step));
    }
    double best = kNegInf;
    std::function<void(std::size_t, double, double)> walk = [&](std::size_t t, double level, double welfare) {
        if (t == n) {
            if (std::abs(level - interval.end_level) <= 1e-9) {
                best = std::max(best, welfare);
            }
            return;
        }
        for (const auto& o : options[t]) {
            // The storage absorbs whatever the bids inject.
            const double next = level + dt * o.injection;
            if (next < -1e-9 || next > storage.capacity + 1e-9) {
                continue;
            }
            walk(t + 1, next, welfare + dt * o.welfare);
        }
    };
    walk(0, initial_energy, 0.0);
    return best;
}

double brute_force_ideal(const StorageSpec& storage, const std::vector<IntervalSpec>& intervals, double step)
{
    IntervalSpec joined;
    joined.grid.delta_t = intervals.front().grid.delta_t;
    joined.end_level = intervals.back().end_level;
    for (const auto& spec : intervals) {
        const std::size_t before = joined.grid.n_periods;
        append_bids(joined.loads, spec.loads, before, spec.grid.n_periods);
        append_bids(joined.generators, spec.generators, before, spec.grid.n_periods);
        joined.grid.n_periods += spec.grid.n_periods;
    }
    return brute_force_split(joined, storage, storage.initial_energy, step);
}

double brute_force_vlb(const IntervalSpec& interval, const StorageSpec& storage, const ValueLedger& ledger,
                       double step)
{
    const std::size_t n = interval.grid.n_periods;
    const double dt = interval.grid.delta_t;
    const double stored = ledger.total_quantity();

    std::vector<ValueBucket> cheapest = ledger.buckets;
    std::sort(cheapest.begin(), cheapest.end(),
              [](const ValueBucket& a, const ValueBucket& b) { return a.price < b.price; });
    // Cheapest buckets go first, whatever the timing.
    auto bid_payment = [&](double energy) {
        double paid = 0.0;
        for (const auto& b : cheapest) {
            const double take = std::min(b.quantity, energy);
            paid += take * b.price;
            energy -= take;
        }
        return energy > 1e-9 ? std::numeric_limits<double>::infinity() : paid;
    };

    std::vector<std::vector<PeriodOption>> options;
    for (std::size_t t = 0; t < n; ++t) {
        options.push_back(period_options(interval, t, step));
    }
    const auto discharges = grid_values(stored / dt, step);

    double best = kNegInf;
    std::function<void(std::size_t, double, double, double)> walk = [&](std::size_t t, double intra, double drawn,
                                                                        double welfare) {
        if (t == n) {
            const double total = intra + stored - drawn;
            if (intra >= -1e-9 && total >= interval.end_level - 1e-9) {
                best = std::max(best, welfare - bid_payment(drawn));
            }
            return;
        }
        for (const auto& o : options[t]) {
            for (double q : discharges) {
                const double next_drawn = drawn + dt * q;
                if (next_drawn > stored + 1e-9) {
                    break;
                }
                const double next_intra = intra + dt * (o.injection + q);
                const double total = next_intra + stored - next_drawn;
                if (total < -1e-9 || total > storage.capacity + 1e-9) {
                    continue;
                }
                walk(t + 1, next_intra, next_drawn, welfare + dt * o.welfare);
            }
        }
    };
    walk(0, 0.0, 0.0, 0.0);
    return best;
}

namespace {

// Gaussian elimination with partial pivoting; false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (std::abs(a[piv][c]) < 1e-10) {
            return false;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = b[i] / a[i][i];
    }
    return true;
}

}  // namespace

VertexOptimum enumerate_vertices(const lp::LinearProgram& lp)
{
    const std::size_t n = lp.num_variables();
    // Candidate hyperplanes: every row, every bound.
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
        planes.push_back(lp.dense_row(i));
        rhs.push_back(lp.constraints()[i].rhs);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        planes.push_back(e);
        rhs.push_back(lp.variables()[j].lower);
        planes.push_back(e);
        rhs.push_back(lp.variables()[j].upper);
    }
    auto feasible = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j] < lp.variables()[j].lower - 1e-7 || x[j] > lp.variables()[j].upper + 1e-7) {
                return false;
            }
        }
        for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
            const double act = lp.row_activity(i, x);
            const auto& c = lp.constraints()[i];
            if ((c.comparator != lp::Comparator::greater_equal && act > c.rhs + 1e-7) ||
                (c.comparator != lp::Comparator::less_equal && act < c.rhs - 1e-7)) {
                return false;
            }
        }
        return true;
    };

    VertexOptimum best;
    const double sign = lp.sense() == lp::Sense::maximize ? 1.0 : -1.0;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t depth, std::size_t from) {
        if (depth == n) {
            std::vector<std::vector<double>> a;
            std::vector<double> b;
            for (auto p : pick) {
                a.push_back(planes[p]);
                b.push_back(rhs[p]);
            }
            std::vector<double> x;
            if (!solve_square(a, b, x) || !feasible(x)) {
                return;
            }
            const double z = lp.objective_value(x);
            if (best.status != lp::Status::optimal || sign * z > sign * best.objective) {
                best = {lp::Status::optimal, z};
            }
            return;
        }
        for (std::size_t p = from; p < planes.size(); ++p) {
            pick[depth] = p;
            choose(depth + 1, p + 1);
        }
    };
    choose(0, 0);
    return best;
}

double welfare_by_id(const ClearingResult& result, const IntervalSpec& bids)
{
    auto row = [](const std::vector<std::string>& ids, const std::string& id) {
        return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
    };
    double sw = 0.0;
    for (const auto& l : bids.loads) {
        const auto& q = result.load_dispatch.at(row(result.load_ids, l.id));
        for (std::size_t t = 0; t < q.size(); ++t) {
            sw += l.utility[t] * q[t];
        }
    }
    for (const auto& g : bids.generators) {
        const auto& q = result.generator_dispatch.at(row(result.generator_ids, g.id));
        for (std::size_t t = 0; t < q.size(); ++t) {
            sw -= g.cost[t] * q[t];
        }
    }
    return result.grid.delta_t * sw;
}

double vlb_objective(const ClearingResult& result, const IntervalSpec& bids)
{
    double obj = welfare_by_id(result, bids);
    const auto& s = result.vlb.value();
    for (std::size_t v = 0; v < s.inter_discharge.size(); ++v) {
        for (double q : s.inter_discharge[v]) {
            obj -= result.grid.delta_t * s.ledger.buckets[v].price * q;
        }
    }
    return obj;
}

std::vector<std::string> market_violations(const ClearingResult& result, const IntervalSpec& bids,
                                           const StorageSpec& storage, double eps)
{
    std::vector<std::string> out;
    auto fail = [&](std::size_t t, const std::string& what, double value) {
        std::ostringstream msg;
        msg << "period " << t + 1 << ": " << what << " (" << value << ")";
        out.push_back(msg.str());
    };
    const double dt = result.grid.delta_t;
    double level = result.initial_level;
    for (std::size_t t = 0; t < result.grid.n_periods; ++t) {
        double injection = 0.0;
        for (std::size_t l = 0; l < bids.loads.size(); ++l) {
            const double d = result.load_dispatch[l][t];
            if (d < -eps || d > bids.loads[l].max_quantity[t] + eps) {
                fail(t, "load outside its bid", d);
            }
            injection -= d;
        }
        for (std::size_t g = 0; g < bids.generators.size(); ++g) {
            const double p = result.generator_dispatch[g][t];
            if (p < -eps || p > bids.generators[g].max_quantity[t] + eps) {
                fail(t, "generator outside its offer", p);
            }
            injection += p;
        }
        if (std::abs(injection - result.storage_charge[t]) > eps) {
            fail(t, "balance", injection - result.storage_charge[t]);
        }
        level += dt * result.storage_charge[t];
        if (std::abs(level - result.storage_level[t]) > eps) {
            fail(t, "level recursion", level - result.storage_level[t]);
        }
        if (level < -eps || level > storage.capacity + eps) {
            fail(t, "level outside capacity", level);
        }
    }
    return out;
}

std::vector<std::string> vlb_violations(const ClearingResult& result, const IntervalSpec& bids,
                                        const StorageSpec& storage, double eps)
{
    auto out = market_violations(result, bids, storage, eps);
    if (!result.vlb) {
        out.push_back("no intra/inter decomposition");
        return out;
    }
    const auto& s = *result.vlb;
    const double dt = result.grid.delta_t;
    const std::size_t n = result.grid.n_periods;
    double intra = 0.0;
    std::vector<double> inter;
    for (const auto& b : s.ledger.buckets) {
        inter.push_back(b.quantity);
    }
    for (std::size_t t = 0; t < n; ++t) {
        double discharge = 0.0;
        double total = 0.0;
        for (std::size_t v = 0; v < inter.size(); ++v) {
            if (s.inter_discharge[v][t] < -eps) {
                out.push_back("negative inter discharge in period " + std::to_string(t + 1));
            }
            inter[v] -= dt * s.inter_discharge[v][t];
            if (inter[v] < -eps || std::abs(inter[v] - s.inter_level[v][t]) > eps) {
                out.push_back("inter level of bucket " + std::to_string(v + 1) + " in period " + std::to_string(t + 1));
            }
            discharge += s.inter_discharge[v][t];
            total += inter[v];
        }
        intra += dt * s.intra_charge[t];
        if (std::abs(intra - s.intra_level[t]) > eps) {
            out.push_back("intra level recursion in period " + std::to_string(t + 1));
        }
        if (std::abs(s.intra_charge[t] - discharge - result.storage_charge[t]) > eps) {
            out.push_back("intra/inter split does not add up in period " + std::to_string(t + 1));
        }
        total += intra;
        if (!near(total, result.storage_level[t], eps)) {
            out.push_back("total level mismatch in period " + std::to_string(t + 1));
        }
    }
    if (n > 0 && s.intra_level.back() < -eps) {
        out.push_back("intra-storage ends below zero");
    }
    if (n > 0 && result.storage_level.back() < bids.end_level - eps) {
        out.push_back("end level not reached");
    }
    return out;
}

}  // namespace vlb::testing
