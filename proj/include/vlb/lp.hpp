#pragma once

#include <atomic>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vlb::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance for feasibility, duality, and complementary-slackness checks.
inline constexpr double kCertificateEps = 1e-7;

enum class Sense { maximize, minimize };
enum class Comparator { less_equal, equal, greater_equal };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
};

struct Term {
    std::size_t variable;
    double coefficient;
};

struct Constraint {
    std::string label;
    std::vector<Term> terms;
    Comparator comparator = Comparator::equal;
    double rhs = 0.0;
};

/// A linear program with bounded variables and labeled rows. Rows are stored
/// sparsely; `dense_row` expands one to the width of the variable vector.
class LinearProgram {
public:
    explicit LinearProgram(Sense sense = Sense::maximize) : sense_(sense) {}

    std::size_t add_variable(std::string name, double lower, double upper, double objective = 0.0);

    /// Throws std::invalid_argument on a duplicate label or an unknown variable.
    std::size_t add_constraint(std::string label, std::vector<Term> terms, Comparator comparator, double rhs);

    void set_objective(std::size_t variable, double coefficient);

    Sense sense() const noexcept { return sense_; }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    std::size_t num_variables() const noexcept { return variables_.size(); }
    std::size_t num_constraints() const noexcept { return constraints_.size(); }

    /// Index of the row labeled `label`; throws std::out_of_range when absent.
    std::size_t constraint_index(std::string_view label) const;
    bool has_constraint(std::string_view label) const;

    std::vector<double> dense_row(std::size_t row) const;
    double row_activity(std::size_t row, const std::vector<double>& x) const;
    double objective_value(const std::vector<double>& x) const;

private:
    Sense sense_;
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, std::size_t> label_index_;
};

enum class Status { optimal, infeasible, unbounded };

std::string_view to_string(Status status);

/// Dual values are sensitivities of the optimal objective to each row's
/// right-hand side, in the LP's own sense (a binding `<=` row of a
/// maximization has a non-negative dual).
struct LpSolution {
    Status status = Status::infeasible;
    std::vector<double> primal;
    std::vector<double> duals;
    double objective = 0.0;
    std::size_t iterations = 0;

    double dual(const LinearProgram& lp, std::string_view label) const { return duals.at(lp.constraint_index(label)); }
};

class Solver {
public:
    virtual ~Solver() = default;
    virtual LpSolution solve(const LinearProgram& lp) const = 0;
};

/// Dense two-phase tableau simplex with Bland's rule. Deterministic and
/// capped at 50 * (columns + rows) pivots of the standard-form tableau.
class SimplexSolver final : public Solver {
public:
    LpSolution solve(const LinearProgram& lp) const override;
};

/// Solves with the embedded simplex.
LpSolution solve(const LinearProgram& lp);

/// Worst residuals of the optimality conditions for a claimed optimum.
struct Certificate {
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double duality_gap = 0.0;
    double complementary_slackness = 0.0;
    double dual_objective = 0.0;

    /// Relative to 1 + |objective| for the gap, absolute otherwise.
    bool holds(double objective, double eps = kCertificateEps) const;
};

/// Recovers bound multipliers from the row duals and measures every
/// optimality condition. Requires `sol.status == optimal`.
Certificate check_certificate(const LinearProgram& lp, const LpSolution& sol);

/// Wraps another solver and verifies the certificate of every optimal
/// answer; a failing certificate raises NumericalError. Counters are
/// thread-safe.
class CertifyingSolver final : public Solver {
public:
    explicit CertifyingSolver(const Solver& inner, double eps = kCertificateEps) : inner_(inner), eps_(eps) {}

    LpSolution solve(const LinearProgram& lp) const override;

    std::size_t solves() const noexcept { return solves_.load(); }
    std::size_t optimal() const noexcept { return optimal_.load(); }
    std::size_t certified() const noexcept { return certified_.load(); }
    double worst_residual() const noexcept { return worst_.load(); }

private:
    const Solver& inner_;
    double eps_;
    mutable std::atomic<std::size_t> solves_{0};
    mutable std::atomic<std::size_t> optimal_{0};
    mutable std::atomic<std::size_t> certified_{0};
    mutable std::atomic<double> worst_{0.0};
};

/// Closed interval; endpoints may be infinite.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double value, double eps = 0.0) const { return value >= lower - eps && value <= upper + eps; }
    bool operator==(const Interval&) const = default;
};

/// Smallest and largest value the dual of `label` takes over the set of
/// optimal dual solutions. Each endpoint comes from one auxiliary LP over
/// dual feasibility plus "dual objective equals the primal optimum".
Interval dual_range(const LinearProgram& lp, const LpSolution& sol, std::string_view label,
                    const Solver& solver);
Interval dual_range(const LinearProgram& lp, const LpSolution& sol, std::string_view label);

/// Optimal dual solution maximizing the summed duals of `labels`, returned
/// for those rows only. Unlike the solver's own duals it does not depend on
/// the pivoting path. nullopt when the sum is unbounded on the optimal face.
std::optional<std::vector<double>> highest_duals(const LinearProgram& lp, const LpSolution& sol,
                                                 const std::vector<std::string>& labels, const Solver& solver);

/// Writes `lp` in CPLEX LP text form.
void write_lp_text(const LinearProgram& lp, std::ostream& out);

}  // namespace vlb::lp
