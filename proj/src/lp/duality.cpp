#include <algorithm>
#include <cmath>

#include "vlb/errors.hpp"
#include "vlb/lp.hpp"

namespace vlb::lp {

bool Certificate::holds(double objective, double eps) const
{
    return primal_infeasibility <= eps && dual_infeasibility <= eps && complementary_slackness <= eps &&
           duality_gap <= eps * (1.0 + std::abs(objective));
}

Certificate check_certificate(const LinearProgram& lp, const LpSolution& sol)
{
    if (sol.status != Status::optimal) {
        throw std::invalid_argument("certificate requested for a non-optimal solution");
    }
    const auto& vars = lp.variables();
    const auto& rows = lp.constraints();
    const auto& x = sol.primal;

    // Work in maximisation form: max s*c'x with row duals s*y.
    const double s = lp.sense() == Sense::maximize ? 1.0 : -1.0;
    Certificate cert;

    std::vector<double> reduced(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        reduced[j] = s * vars[j].objective;
    }

    double dual_obj = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double y = s * sol.duals.at(i);
        const double activity = lp.row_activity(i, x);
        const double slack = row.rhs - activity;  // >= 0 for a satisfied <= row

        switch (row.comparator) {
        case Comparator::less_equal:
            cert.primal_infeasibility = std::max(cert.primal_infeasibility, -slack);
            cert.dual_infeasibility = std::max(cert.dual_infeasibility, -y);
            break;
        case Comparator::greater_equal:
            cert.primal_infeasibility = std::max(cert.primal_infeasibility, slack);
            cert.dual_infeasibility = std::max(cert.dual_infeasibility, y);
            break;
        case Comparator::equal:
            cert.primal_infeasibility = std::max(cert.primal_infeasibility, std::abs(slack));
            break;
        }
        cert.complementary_slackness = std::max(cert.complementary_slackness, std::abs(y * slack));
        dual_obj += row.rhs * y;
        for (const auto& t : row.terms) {
            reduced[t.variable] -= t.coefficient * y;
        }
    }

    // Bound multipliers absorb the reduced costs: positive reduced cost is
    // carried by the upper bound, negative by the lower bound.
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& v = vars[j];
        const double d = reduced[j];
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, v.lower - x[j]);
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, x[j] - v.upper);
        if (d > 0.0) {
            if (std::isfinite(v.upper)) {
                dual_obj += d * v.upper;
                cert.complementary_slackness = std::max(cert.complementary_slackness, d * (v.upper - x[j]));
            }
            else {
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, d);
            }
        }
        else if (d < 0.0) {
            if (std::isfinite(v.lower)) {
                dual_obj += d * v.lower;
                cert.complementary_slackness = std::max(cert.complementary_slackness, -d * (x[j] - v.lower));
            }
            else {
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, -d);
            }
        }
    }
    cert.dual_objective = s * dual_obj;
    cert.duality_gap = std::abs(s * sol.objective - dual_obj);
    return cert;
}

LpSolution CertifyingSolver::solve(const LinearProgram& lp) const
{
    LpSolution sol = inner_.solve(lp);
    ++solves_;
    if (sol.status != Status::optimal) {
        return sol;
    }
    ++optimal_;
    const Certificate cert = check_certificate(lp, sol);
    const double worst = std::max({cert.primal_infeasibility, cert.dual_infeasibility,
                                   cert.complementary_slackness,
                                   cert.duality_gap / (1.0 + std::abs(sol.objective))});
    double prev = worst_.load();
    while (worst > prev && !worst_.compare_exchange_weak(prev, worst)) {
    }
    if (!cert.holds(sol.objective, eps_)) {
        throw NumericalError("optimality certificate failed (worst residual " + std::to_string(worst) + ")");
    }
    ++certified_;
    return sol;
}

namespace {

// Dual of max c'x s.t. rows, l <= x <= u:
//   min b'y + u'w - l'v  s.t.  A'y + w - v = c,  sign(y) per row,  w, v >= 0,
// restricted to the optimal face by  b'y + u'w - l'v = z*.
struct DualFace {
    LinearProgram aux;
    std::vector<std::size_t> row_var;
};

DualFace build_dual_face(const LinearProgram& lp, double optimum, double s)
{
    DualFace face{LinearProgram(Sense::minimize), {}};
    auto& aux = face.aux;
    const auto& rows = lp.constraints();
    const auto& vars = lp.variables();

    std::vector<Term> objective_terms;
    std::vector<std::vector<Term>> column_terms(vars.size());

    for (std::size_t i = 0; i < rows.size(); ++i) {
        double lo = -kInf;
        double hi = kInf;
        if (rows[i].comparator == Comparator::less_equal) {
            lo = 0.0;
        }
        else if (rows[i].comparator == Comparator::greater_equal) {
            hi = 0.0;
        }
        const auto y = aux.add_variable("y_" + std::to_string(i), lo, hi);
        face.row_var.push_back(y);
        if (rows[i].rhs != 0.0) {
            objective_terms.push_back({y, rows[i].rhs});
        }
        for (const auto& t : rows[i].terms) {
            column_terms[t.variable].push_back({y, t.coefficient});
        }
    }
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (std::isfinite(vars[j].upper)) {
            const auto w = aux.add_variable("w_" + std::to_string(j), 0.0, kInf);
            column_terms[j].push_back({w, 1.0});
            if (vars[j].upper != 0.0) {
                objective_terms.push_back({w, vars[j].upper});
            }
        }
        if (std::isfinite(vars[j].lower)) {
            const auto v = aux.add_variable("v_" + std::to_string(j), 0.0, kInf);
            column_terms[j].push_back({v, -1.0});
            if (vars[j].lower != 0.0) {
                objective_terms.push_back({v, -vars[j].lower});
            }
        }
        aux.add_constraint("col_" + std::to_string(j), std::move(column_terms[j]), Comparator::equal,
                           s * vars[j].objective);
    }
    const double z = s * optimum;
    aux.add_constraint("optimal_face", std::move(objective_terms), Comparator::equal, z);
    return face;
}

}  // namespace

Interval dual_range(const LinearProgram& lp, const LpSolution& sol, std::string_view label, const Solver& solver)
{
    if (sol.status != Status::optimal) {
        throw std::invalid_argument("dual range requested for a non-optimal solution");
    }
    const std::size_t row = lp.constraint_index(label);
    const double s = lp.sense() == Sense::maximize ? 1.0 : -1.0;
    DualFace face = build_dual_face(lp, sol.objective, s);
    const std::size_t y = face.row_var[row];

    auto extreme = [&](double direction) {
        face.aux.set_objective(y, direction);
        const LpSolution r = solver.solve(face.aux);
        if (r.status == Status::unbounded) {
            return -direction * kInf;
        }
        if (r.status != Status::optimal) {
            throw NumericalError("optimal dual face of '" + std::string(label) + "' is empty");
        }
        return r.primal[y];
    };
    const double lo = extreme(1.0);
    const double hi = extreme(-1.0);
    // Back to the LP's own sign convention.
    Interval out = s > 0 ? Interval{lo, hi} : Interval{-hi, -lo};
    // Absorb round-off around the published point dual.
    const double point = sol.duals[row];
    const double snap = 1e-9 * (1.0 + std::abs(point));
    if (std::abs(out.lower - point) <= snap || (point < out.lower && out.lower - point <= kCertificateEps)) {
        out.lower = point;
    }
    if (std::abs(out.upper - point) <= snap || (point > out.upper && point - out.upper <= kCertificateEps)) {
        out.upper = point;
    }
    return out;
}

std::optional<std::vector<double>> highest_duals(const LinearProgram& lp, const LpSolution& sol,
                                                 const std::vector<std::string>& labels, const Solver& solver)
{
    if (sol.status != Status::optimal) {
        throw std::invalid_argument("dual selection requested for a non-optimal solution");
    }
    const double s = lp.sense() == Sense::maximize ? 1.0 : -1.0;
    DualFace face = build_dual_face(lp, sol.objective, s);
    for (const auto& label : labels) {
        face.aux.set_objective(face.row_var[lp.constraint_index(label)], -s);
    }
    const LpSolution r = solver.solve(face.aux);
    if (r.status == Status::unbounded) {
        return std::nullopt;
    }
    if (r.status != Status::optimal) {
        throw NumericalError("optimal dual face is empty");
    }
    std::vector<double> out;
    for (const auto& label : labels) {
        const std::size_t row = lp.constraint_index(label);
        double y = s * r.primal[face.row_var[row]];
        if (std::abs(y - sol.duals[row]) <= 1e-9 * (1.0 + std::abs(y))) {
            y = sol.duals[row];
        }
        out.push_back(y);
    }
    return out;
}

Interval dual_range(const LinearProgram& lp, const LpSolution& sol, std::string_view label)
{
    return dual_range(lp, sol, label, SimplexSolver{});
}

}  // namespace vlb::lp
