#include "vlb/clearing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "vlb/storage_ledger.hpp"

namespace vlb {

namespace {

using lp::Comparator;
using lp::Term;

std::string label(std::string_view stem, std::size_t t)
{
    return std::string(stem) + "_" + std::to_string(t + 1);
}

std::string label(std::string_view stem, std::size_t v, std::size_t t)
{
    return std::string(stem) + "_" + std::to_string(v + 1) + "_" + std::to_string(t + 1);
}

// Clears round-off left by the pivots: tiny values and near-multiples of 1e-9.
double snap(double x)
{
    if (std::abs(x) < 1e-11) {
        return 0.0;
    }
    const double r = std::round(x * 1e9) / 1e9;
    return std::isfinite(r) && std::abs(r - x) < 1e-11 * std::max(1.0, std::abs(x)) ? r : x;
}

// Loads and generators of one or more intervals laid out on a single
// period axis. Participants are matched across intervals by id.
struct Horizon {
    double delta_t = 1.0;
    std::size_t n_periods = 0;
    std::vector<std::string> load_ids;
    std::vector<std::string> generator_ids;
    SeriesMatrix utility, load_max, cost, gen_max;  // zero where a participant is absent

    explicit Horizon(const std::vector<const IntervalSpec*>& intervals)
    {
        delta_t = intervals.front()->grid.delta_t;
        std::map<std::string, std::size_t> load_pos, gen_pos;
        for (const auto* spec : intervals) {
            for (const auto& l : spec->loads) {
                if (load_pos.emplace(l.id, load_ids.size()).second) {
                    load_ids.push_back(l.id);
                }
            }
            for (const auto& g : spec->generators) {
                if (gen_pos.emplace(g.id, generator_ids.size()).second) {
                    generator_ids.push_back(g.id);
                }
            }
            n_periods += spec->grid.n_periods;
        }
        utility.assign(load_ids.size(), Series(n_periods, 0.0));
        load_max = utility;
        cost.assign(generator_ids.size(), Series(n_periods, 0.0));
        gen_max = cost;

        std::size_t offset = 0;
        for (const auto* spec : intervals) {
            for (const auto& l : spec->loads) {
                const auto i = load_pos.at(l.id);
                for (std::size_t t = 0; t < spec->grid.n_periods; ++t) {
                    utility[i][offset + t] = l.utility.at(t);
                    load_max[i][offset + t] = l.max_quantity.at(t);
                }
            }
            for (const auto& g : spec->generators) {
                const auto i = gen_pos.at(g.id);
                for (std::size_t t = 0; t < spec->grid.n_periods; ++t) {
                    cost[i][offset + t] = g.cost.at(t);
                    gen_max[i][offset + t] = g.max_quantity.at(t);
                }
            }
            offset += spec->grid.n_periods;
        }
    }
};

// Variables and balance rows shared by every formulation.
struct MarketBlock {
    std::vector<std::vector<std::size_t>> d, p;  // [participant][period]
    std::vector<std::vector<Term>> balance_terms;  // per period, completed by the storage model
};

MarketBlock add_market(lp::LinearProgram& lp, const Horizon& h)
{
    MarketBlock m;
    m.balance_terms.resize(h.n_periods);
    for (std::size_t l = 0; l < h.load_ids.size(); ++l) {
        m.d.emplace_back();
        for (std::size_t t = 0; t < h.n_periods; ++t) {
            const auto v = lp.add_variable(label("d_" + h.load_ids[l], t), 0.0, h.load_max[l][t],
                                           h.delta_t * h.utility[l][t]);
            m.d.back().push_back(v);
            m.balance_terms[t].push_back({v, 1.0});
        }
    }
    for (std::size_t g = 0; g < h.generator_ids.size(); ++g) {
        m.p.emplace_back();
        for (std::size_t t = 0; t < h.n_periods; ++t) {
            const auto v = lp.add_variable(label("p_" + h.generator_ids[g], t), 0.0, h.gen_max[g][t],
                                           -h.delta_t * h.cost[g][t]);
            m.p.back().push_back(v);
            m.balance_terms[t].push_back({v, -1.0});
        }
    }
    return m;
}

void add_balance_rows(lp::LinearProgram& lp, MarketBlock& m)
{
    for (std::size_t t = 0; t < m.balance_terms.size(); ++t) {
        lp.add_constraint(label("balance", t), std::move(m.balance_terms[t]), Comparator::equal, 0.0);
    }
}

lp::LpSolution solve_clearing(const lp::LinearProgram& lp, const ClearingOptions& options, const std::string& what,
                              double end_level)
{
    if (options.lp_observer) {
        options.lp_observer(options.tag + what, lp);
    }
    const lp::SimplexSolver fallback;
    const lp::Solver& solver = options.solver != nullptr ? *options.solver : fallback;
    lp::LpSolution sol = solver.solve(lp);
    if (sol.status == lp::Status::infeasible) {
        std::ostringstream msg;
        msg << what << " is infeasible: end-level requirement E^end = " << end_level << " MWh cannot be met";
        throw InfeasibleError(msg.str(), "end_level");
    }
    if (sol.status == lp::Status::unbounded) {
        throw NumericalError(what + " LP reported unbounded; storage and bids are bounded so this is a solver fault");
    }
    return sol;
}

void fill_market(ClearingResult& r, const Horizon& h, const MarketBlock& m, const lp::LinearProgram& lp,
                 const lp::LpSolution& sol, const ClearingOptions& options)
{
    r.grid = {h.n_periods, h.delta_t};
    r.load_ids = h.load_ids;
    r.generator_ids = h.generator_ids;
    for (const auto& row : m.d) {
        r.load_dispatch.emplace_back();
        for (auto v : row) {
            r.load_dispatch.back().push_back(snap(sol.primal[v]));
        }
    }
    for (const auto& row : m.p) {
        r.generator_dispatch.emplace_back();
        for (auto v : row) {
            r.generator_dispatch.back().push_back(snap(sol.primal[v]));
        }
    }
    const lp::SimplexSolver fallback;
    const lp::Solver& solver = options.solver != nullptr ? *options.solver : fallback;
    // Published prices: the highest jointly valid price vector, so that a
    // degenerate optimum does not leave the price to the pivoting order.
    std::vector<std::string> balance;
    for (std::size_t t = 0; t < h.n_periods; ++t) {
        balance.push_back(label("balance", t));
    }
    const auto highest = lp::highest_duals(lp, sol, balance, solver);
    for (std::size_t t = 0; t < h.n_periods; ++t) {
        const auto& name = balance[t];
        r.price.push_back(snap((highest ? (*highest)[t] : sol.dual(lp, name)) / h.delta_t));
        if (options.price_ranges) {
            const auto range = lp::dual_range(lp, sol, name, solver);
            r.price_range.push_back({snap(range.lower / h.delta_t), snap(range.upper / h.delta_t)});
        }
    }
    r.objective = sol.objective;
}

enum class EndRule { equality, penalty };

// Model with a single storage level: ideal (several intervals) or split.
ClearingResult clear_single_level(const std::vector<const IntervalSpec*>& intervals, const StorageSpec& storage,
                                  double initial_energy, EndRule rule, double end_level, double penalty,
                                  Mode mode, const ClearingOptions& options)
{
    const Horizon h(intervals);
    lp::LinearProgram lp(lp::Sense::maximize);
    MarketBlock m = add_market(lp, h);

    std::vector<std::size_t> charge, level;
    for (std::size_t t = 0; t < h.n_periods; ++t) {
        charge.push_back(lp.add_variable(label("pC", t), -lp::kInf, lp::kInf));
        level.push_back(lp.add_variable(label("e", t), 0.0, storage.capacity));
        m.balance_terms[t].push_back({charge[t], 1.0});
    }
    add_balance_rows(lp, m);
    for (std::size_t t = 0; t < h.n_periods; ++t) {
        std::vector<Term> terms{{level[t], 1.0}, {charge[t], -h.delta_t}};
        if (t > 0) {
            terms.push_back({level[t - 1], -1.0});
        }
        lp.add_constraint(label("level", t), std::move(terms), Comparator::equal, t == 0 ? initial_energy : 0.0);
    }
    if (rule == EndRule::equality) {
        lp.add_constraint("end_level", {{level.back(), 1.0}}, Comparator::equal, end_level);
    }
    else {
        lp.set_objective(level.back(), -penalty);
    }

    const auto what = std::string(to_string(mode)) + " clearing";
    const auto sol = solve_clearing(lp, options, what, end_level);

    ClearingResult r;
    r.mode = mode;
    fill_market(r, h, m, lp, sol, options);
    r.initial_level = initial_energy;
    for (std::size_t t = 0; t < h.n_periods; ++t) {
        r.storage_charge.push_back(snap(sol.primal[charge[t]]));
        r.storage_level.push_back(snap(sol.primal[level[t]]));
    }
    return r;
}

}  // namespace

ClearingResult clear_ideal(const StorageSpec& storage, const std::vector<IntervalSpec>& intervals,
                           const ClearingOptions& options)
{
    if (intervals.empty()) {
        throw std::invalid_argument("ideal clearing needs at least one interval");
    }
    std::vector<const IntervalSpec*> ptrs;
    for (const auto& spec : intervals) {
        if (spec.grid.delta_t != intervals.front().grid.delta_t) {
            throw std::invalid_argument("ideal clearing needs one shared delta_t across intervals");
        }
        ptrs.push_back(&spec);
    }
    return clear_single_level(ptrs, storage, storage.initial_energy, EndRule::equality, intervals.back().end_level,
                              0.0, Mode::ideal, options);
}

ClearingResult clear_split(const IntervalSpec& interval, const StorageSpec& storage, double initial_energy,
                           const ClearingOptions& options)
{
    return clear_single_level({&interval}, storage, initial_energy, EndRule::equality, interval.end_level, 0.0,
                              Mode::split_end_level, options);
}

ClearingResult clear_split_penalty(const IntervalSpec& interval, const StorageSpec& storage,
                                   double initial_energy, const ClearingOptions& options)
{
    if (!interval.penalty_price) {
        throw std::invalid_argument("penalty clearing needs a penalty price");
    }
    return clear_single_level({&interval}, storage, initial_energy, EndRule::penalty, interval.end_level,
                              *interval.penalty_price, Mode::split_penalty, options);
}

ClearingResult clear_vlb(const IntervalSpec& interval, const StorageSpec& storage, const ValueLedger& ledger,
                         const ClearingOptions& options)
{
    const Horizon h({&interval});
    const std::size_t n = h.n_periods;
    const std::size_t nb = ledger.buckets.size();
    lp::LinearProgram lp(lp::Sense::maximize);
    MarketBlock m = add_market(lp, h);

    std::vector<std::size_t> intra_charge, intra_level;
    std::vector<std::vector<std::size_t>> inter_discharge(nb), inter_level(nb);
    for (std::size_t t = 0; t < n; ++t) {
        intra_charge.push_back(lp.add_variable(label("pCa", t), -lp::kInf, lp::kInf));
        intra_level.push_back(lp.add_variable(label("ea", t), -lp::kInf, lp::kInf));
        m.balance_terms[t].push_back({intra_charge[t], 1.0});
    }
    for (std::size_t v = 0; v < nb; ++v) {
        const double bid = ledger.buckets[v].price;
        for (std::size_t t = 0; t < n; ++t) {
            inter_discharge[v].push_back(lp.add_variable(label("pDe", v, t), 0.0, lp::kInf, -h.delta_t * bid));
            inter_level[v].push_back(lp.add_variable(label("ee", v, t), 0.0, lp::kInf));
            m.balance_terms[t].push_back({inter_discharge[v][t], -1.0});
        }
    }
    add_balance_rows(lp, m);

    for (std::size_t t = 0; t < n; ++t) {
        std::vector<Term> terms{{intra_level[t], 1.0}, {intra_charge[t], -h.delta_t}};
        if (t > 0) {
            terms.push_back({intra_level[t - 1], -1.0});
        }
        lp.add_constraint(label("intra", t), std::move(terms), Comparator::equal, 0.0);
    }
    lp.add_constraint("intra_end", {{intra_level.back(), 1.0}}, Comparator::greater_equal, 0.0);
    for (std::size_t v = 0; v < nb; ++v) {
        for (std::size_t t = 0; t < n; ++t) {
            std::vector<Term> terms{{inter_level[v][t], 1.0}, {inter_discharge[v][t], h.delta_t}};
            if (t > 0) {
                terms.push_back({inter_level[v][t - 1], -1.0});
            }
            lp.add_constraint(label("inter", v, t), std::move(terms), Comparator::equal,
                              t == 0 ? ledger.buckets[v].quantity : 0.0);
        }
    }
    auto total_level_terms = [&](std::size_t t) {
        std::vector<Term> terms{{intra_level[t], 1.0}};
        for (std::size_t v = 0; v < nb; ++v) {
            terms.push_back({inter_level[v][t], 1.0});
        }
        return terms;
    };
    for (std::size_t t = 0; t < n; ++t) {
        lp.add_constraint(label("cap_lo", t), total_level_terms(t), Comparator::greater_equal, 0.0);
        lp.add_constraint(label("cap_hi", t), total_level_terms(t), Comparator::less_equal, storage.capacity);
    }
    lp.add_constraint("end_level", total_level_terms(n - 1), Comparator::greater_equal, interval.end_level);

    const auto sol = solve_clearing(lp, options, "vlb clearing", interval.end_level);

    ClearingResult r;
    r.mode = Mode::vlb;
    fill_market(r, h, m, lp, sol, options);
    r.initial_level = ledger.total_quantity();

    VlbStorage s;
    s.ledger = ledger;
    s.inter_discharge.assign(nb, Series(n, 0.0));
    s.inter_level.assign(nb, Series(n, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        s.intra_charge.push_back(snap(sol.primal[intra_charge[t]]));
        s.intra_level.push_back(snap(sol.primal[intra_level[t]]));
        double discharge = 0.0;
        double level = s.intra_level[t];
        for (std::size_t v = 0; v < nb; ++v) {
            s.inter_discharge[v][t] = snap(sol.primal[inter_discharge[v][t]]);
            s.inter_level[v][t] = snap(sol.primal[inter_level[v][t]]);
            discharge += s.inter_discharge[v][t];
            level += s.inter_level[v][t];
        }
        r.storage_charge.push_back(snap(s.intra_charge[t] - discharge));
        r.storage_level.push_back(snap(level));
    }
    r.vlb = std::move(s);

    if (options.remove_simultaneous) {
        return remove_simultaneous(r);
    }
    return r;
}

std::vector<ClearingResult> slice_by_interval(const ClearingResult& ideal, const std::vector<IntervalSpec>& intervals)
{
    std::vector<ClearingResult> out;
    std::size_t offset = 0;
    for (const auto& spec : intervals) {
        const std::size_t n = spec.grid.n_periods;
        if (offset + n > ideal.grid.n_periods) {
            throw std::invalid_argument("intervals do not match the ideal result's horizon");
        }
        auto cut = [&](const Series& s) { return Series(s.begin() + offset, s.begin() + offset + n); };
        auto row_of = [](const std::vector<std::string>& ids, const std::string& id) {
            return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
        };

        ClearingResult r;
        r.mode = ideal.mode;
        r.grid = spec.grid;
        for (const auto& l : spec.loads) {
            r.load_ids.push_back(l.id);
            r.load_dispatch.push_back(cut(ideal.load_dispatch.at(row_of(ideal.load_ids, l.id))));
        }
        for (const auto& g : spec.generators) {
            r.generator_ids.push_back(g.id);
            r.generator_dispatch.push_back(cut(ideal.generator_dispatch.at(row_of(ideal.generator_ids, g.id))));
        }
        r.storage_charge = cut(ideal.storage_charge);
        r.storage_level = cut(ideal.storage_level);
        r.initial_level = offset == 0 ? ideal.initial_level : ideal.storage_level[offset - 1];
        r.price = cut(ideal.price);
        if (!ideal.price_range.empty()) {
            r.price_range.assign(ideal.price_range.begin() + offset, ideal.price_range.begin() + offset + n);
        }
        r.objective = social_welfare(r, spec);
        out.push_back(std::move(r));
        offset += n;
    }
    return out;
}

double social_welfare(const ClearingResult& result, const IntervalSpec& bids)
{
    double sw = 0.0;
    for (std::size_t t = 0; t < result.grid.n_periods; ++t) {
        for (std::size_t l = 0; l < bids.loads.size(); ++l) {
            sw += bids.loads[l].utility[t] * result.load_dispatch[l][t];
        }
        for (std::size_t g = 0; g < bids.generators.size(); ++g) {
            sw -= bids.generators[g].cost[t] * result.generator_dispatch[g][t];
        }
    }
    return result.grid.delta_t * sw;
}

}  // namespace vlb
