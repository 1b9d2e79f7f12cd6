#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "vlb/errors.hpp"
#include "vlb/lp.hpp"

namespace vlb::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhaseOneTol = 1e-8;

// Public variable j is recovered as offset + sum(sign * x[col]) over its
// standard-form columns.
struct ColumnMap {
    double offset = 0.0;
    std::size_t plus = 0;
    double plus_sign = 1.0;
    std::optional<std::size_t> minus;
};

enum class ColumnKind { structural, slack, artificial };

// min c'x  s.t.  T x = b,  x >= 0,  b >= 0, kept as a dense tableau whose
// last column is the right-hand side.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc, std::vector<double>& reduced)
    {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) {
            at(pr, c) /= p;
        }
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) {
                continue;
            }
            const double f = at(r, pc);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c <= cols_; ++c) {
                at(r, c) -= f * at(pr, c);
            }
            at(r, pc) = 0.0;
        }
        const double f = reduced[pc];
        if (f != 0.0) {
            for (std::size_t c = 0; c <= cols_; ++c) {
                reduced[c] -= f * at(pr, c);
            }
            reduced[pc] = 0.0;
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

struct StandardRow {
    std::vector<std::pair<std::size_t, double>> terms;  // structural columns
    Comparator comparator;
    double rhs;
};

class SimplexRun {
public:
    explicit SimplexRun(const LinearProgram& lp) : lp_(lp) {}

    LpSolution run()
    {
        LpSolution sol;
        if (!build()) {
            sol.status = Status::infeasible;
            return sol;
        }
        iteration_cap_ = 50 * (tab_->cols() + tab_->rows());

        // Phase 1: minimise the sum of artificials.
        std::vector<double> cost(tab_->cols(), 0.0);
        for (std::size_t c = 0; c < kind_.size(); ++c) {
            if (kind_[c] == ColumnKind::artificial) {
                cost[c] = 1.0;
            }
        }
        price_out(cost);
        if (!iterate()) {
            throw NumericalError("phase 1 reported unbounded, which cannot happen");
        }
        if (-reduced_.back() > kPhaseOneTol * (1.0 + rhs_scale_)) {
            sol.status = Status::infeasible;
            sol.iterations = iterations_;
            return sol;
        }
        drive_out_artificials();

        // Phase 2.
        price_out(std_cost_);
        if (!iterate()) {
            sol.status = Status::unbounded;
            sol.iterations = iterations_;
            return sol;
        }

        std::vector<double> x_std(tab_->cols(), 0.0);
        for (std::size_t r = 0; r < tab_->rows(); ++r) {
            x_std[basis_[r]] = tab_->rhs(r);
        }
        sol.primal.resize(lp_.num_variables());
        for (std::size_t j = 0; j < lp_.num_variables(); ++j) {
            const auto& m = maps_[j];
            double v = m.offset + m.plus_sign * x_std[m.plus];
            if (m.minus) {
                v -= x_std[*m.minus];
            }
            sol.primal[j] = v;
        }

        // Row duals of the minimisation: y_r = c_k - reduced_k for the column
        // that formed the initial identity in row r (cost 0 in phase 2).
        const double sense_sign = lp_.sense() == Sense::maximize ? -1.0 : 1.0;
        sol.duals.resize(lp_.num_constraints());
        for (std::size_t i = 0; i < lp_.num_constraints(); ++i) {
            double y = -reduced_[identity_col_[i]];
            if (flipped_[i]) {
                y = -y;
            }
            sol.duals[i] = sense_sign * y + 0.0;
        }
        sol.objective = lp_.objective_value(sol.primal);
        sol.status = Status::optimal;
        sol.iterations = iterations_;
        return sol;
    }

private:
    // Returns false when the bounds alone are contradictory.
    bool build()
    {
        const auto& vars = lp_.variables();
        const double sense_sign = lp_.sense() == Sense::maximize ? -1.0 : 1.0;

        std::size_t n_struct = 0;
        std::vector<double> struct_cost;
        std::vector<StandardRow> bound_rows;
        maps_.resize(vars.size());
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const auto& v = vars[j];
            const double c = sense_sign * v.objective;
            auto& m = maps_[j];
            if (v.lower > v.upper) {
                return false;
            }
            if (std::isfinite(v.lower)) {
                m.offset = v.lower;
                m.plus = n_struct++;
                struct_cost.push_back(c);
                if (std::isfinite(v.upper)) {
                    bound_rows.push_back({{{m.plus, 1.0}}, Comparator::less_equal, v.upper - v.lower});
                }
            }
            else if (std::isfinite(v.upper)) {
                m.offset = v.upper;
                m.plus = n_struct++;
                m.plus_sign = -1.0;
                struct_cost.push_back(-c);
            }
            else {
                m.plus = n_struct++;
                m.minus = n_struct++;
                struct_cost.push_back(c);
                struct_cost.push_back(-c);
            }
        }

        std::vector<StandardRow> rows;
        rows.reserve(lp_.num_constraints() + bound_rows.size());
        for (const auto& con : lp_.constraints()) {
            StandardRow row{{}, con.comparator, con.rhs};
            for (const auto& t : con.terms) {
                const auto& m = maps_[t.variable];
                row.rhs -= t.coefficient * m.offset;
                row.terms.emplace_back(m.plus, t.coefficient * m.plus_sign);
                if (m.minus) {
                    row.terms.emplace_back(*m.minus, -t.coefficient);
                }
            }
            rows.push_back(std::move(row));
        }
        for (auto& r : bound_rows) {
            rows.push_back(std::move(r));
        }

        const std::size_t m = rows.size();
        std::size_t n_slack = 0;
        for (const auto& r : rows) {
            n_slack += r.comparator != Comparator::equal ? 1 : 0;
        }

        // Decide which rows need an artificial once signs are normalised.
        flipped_.assign(m, false);
        std::vector<double> slack_sign(m, 0.0);
        std::size_t n_art = 0;
        for (std::size_t r = 0; r < m; ++r) {
            slack_sign[r] = rows[r].comparator == Comparator::less_equal      ? 1.0
                            : rows[r].comparator == Comparator::greater_equal ? -1.0
                                                                              : 0.0;
            if (rows[r].rhs < 0.0) {
                flipped_[r] = true;
                slack_sign[r] = -slack_sign[r];
            }
            if (slack_sign[r] != 1.0) {
                ++n_art;
            }
        }

        const std::size_t n_cols = n_struct + n_slack + n_art;
        tab_.emplace(m, n_cols);
        kind_.assign(n_cols, ColumnKind::structural);
        std_cost_.assign(n_cols, 0.0);
        std::copy(struct_cost.begin(), struct_cost.end(), std_cost_.begin());
        basis_.assign(m, 0);
        identity_col_.assign(m, 0);

        std::size_t next_slack = n_struct;
        std::size_t next_art = n_struct + n_slack;
        rhs_scale_ = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double f = flipped_[r] ? -1.0 : 1.0;
            for (const auto& [c, a] : rows[r].terms) {
                tab_->at(r, c) += f * a;
            }
            tab_->rhs(r) = f * rows[r].rhs;
            rhs_scale_ = std::max(rhs_scale_, std::abs(rows[r].rhs));
            if (slack_sign[r] != 0.0) {
                const std::size_t s = next_slack++;
                kind_[s] = ColumnKind::slack;
                tab_->at(r, s) = slack_sign[r];
                if (slack_sign[r] == 1.0) {
                    basis_[r] = s;
                    identity_col_[r] = s;
                }
            }
            if (slack_sign[r] != 1.0) {
                const std::size_t a = next_art++;
                kind_[a] = ColumnKind::artificial;
                tab_->at(r, a) = 1.0;
                basis_[r] = a;
                identity_col_[r] = a;
            }
        }
        return true;
    }

    void price_out(const std::vector<double>& cost)
    {
        reduced_.assign(tab_->cols() + 1, 0.0);
        std::copy(cost.begin(), cost.end(), reduced_.begin());
        for (std::size_t r = 0; r < tab_->rows(); ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c <= tab_->cols(); ++c) {
                reduced_[c] -= cb * tab_->at(r, c);
            }
        }
    }

    // Bland's rule: lowest-index improving column, lowest-index leaving
    // basic variable among tied ratios. Returns false on unboundedness.
    bool iterate()
    {
        for (;;) {
            std::optional<std::size_t> entering;
            for (std::size_t c = 0; c < tab_->cols(); ++c) {
                if (kind_[c] != ColumnKind::artificial && reduced_[c] < -kCostTol) {
                    entering = c;
                    break;
                }
            }
            if (!entering) {
                return true;
            }
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < tab_->rows(); ++r) {
                const double a = tab_->at(r, *entering);
                if (a > kPivotTol) {
                    best = std::min(best, std::max(tab_->rhs(r), 0.0) / a);
                }
            }
            if (!std::isfinite(best)) {
                return false;
            }
            const double tie = 1e-12 * (1.0 + best);
            std::optional<std::size_t> leaving;
            for (std::size_t r = 0; r < tab_->rows(); ++r) {
                const double a = tab_->at(r, *entering);
                if (a > kPivotTol && std::max(tab_->rhs(r), 0.0) / a <= best + tie &&
                    (!leaving || basis_[r] < basis_[*leaving])) {
                    leaving = r;
                }
            }
            if (++iterations_ > iteration_cap_) {
                throw NumericalError("simplex exceeded its iteration cap of " + std::to_string(iteration_cap_) +
                                     " pivots");
            }
            tab_->pivot(*leaving, *entering, reduced_);
            basis_[*leaving] = *entering;
        }
    }

    // Basic artificials left at zero after phase 1 are swapped for any
    // non-artificial column with a usable entry; rows with none are
    // redundant and keep their artificial (fixed at zero, never re-enters).
    void drive_out_artificials()
    {
        for (std::size_t r = 0; r < tab_->rows(); ++r) {
            if (kind_[basis_[r]] != ColumnKind::artificial) {
                continue;
            }
            for (std::size_t c = 0; c < tab_->cols(); ++c) {
                if (kind_[c] != ColumnKind::artificial && std::abs(tab_->at(r, c)) > kPivotTol) {
                    tab_->pivot(r, c, reduced_);
                    basis_[r] = c;
                    break;
                }
            }
        }
    }

    const LinearProgram& lp_;
    std::vector<ColumnMap> maps_;
    std::optional<Tableau> tab_;
    std::vector<ColumnKind> kind_;
    std::vector<double> std_cost_;
    std::vector<double> reduced_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> identity_col_;
    std::vector<bool> flipped_;
    double rhs_scale_ = 0.0;
    std::size_t iterations_ = 0;
    std::size_t iteration_cap_ = 0;
};

}  // namespace

LpSolution SimplexSolver::solve(const LinearProgram& lp) const
{
    return SimplexRun(lp).run();
}

LpSolution solve(const LinearProgram& lp)
{
    return SimplexSolver{}.solve(lp);
}

}  // namespace vlb::lp
