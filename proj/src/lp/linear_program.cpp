#include "vlb/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace vlb::lp {

std::string_view to_string(Status status)
{
    switch (status) {
    case Status::optimal:
        return "optimal";
    case Status::infeasible:
        return "infeasible";
    case Status::unbounded:
        return "unbounded";
    }
    return "unknown";
}

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper, double objective)
{
    variables_.push_back({std::move(name), lower, upper, objective});
    return variables_.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::string label, std::vector<Term> terms, Comparator comparator,
                                          double rhs)
{
    for (const auto& t : terms) {
        if (t.variable >= variables_.size()) {
            throw std::invalid_argument("constraint '" + label + "' references unknown variable");
        }
    }
    if (label_index_.contains(label)) {
        throw std::invalid_argument("duplicate constraint label '" + label + "'");
    }
    label_index_.emplace(label, constraints_.size());
    constraints_.push_back({std::move(label), std::move(terms), comparator, rhs});
    return constraints_.size() - 1;
}

void LinearProgram::set_objective(std::size_t variable, double coefficient)
{
    variables_.at(variable).objective = coefficient;
}

std::size_t LinearProgram::constraint_index(std::string_view label) const
{
    auto it = label_index_.find(std::string(label));
    if (it == label_index_.end()) {
        throw std::out_of_range("no constraint labeled '" + std::string(label) + "'");
    }
    return it->second;
}

bool LinearProgram::has_constraint(std::string_view label) const
{
    return label_index_.contains(std::string(label));
}

std::vector<double> LinearProgram::dense_row(std::size_t row) const
{
    std::vector<double> out(variables_.size(), 0.0);
    for (const auto& t : constraints_.at(row).terms) {
        out[t.variable] += t.coefficient;
    }
    return out;
}

double LinearProgram::row_activity(std::size_t row, const std::vector<double>& x) const
{
    double acc = 0.0;
    for (const auto& t : constraints_.at(row).terms) {
        acc += t.coefficient * x.at(t.variable);
    }
    return acc;
}

double LinearProgram::objective_value(const std::vector<double>& x) const
{
    double acc = 0.0;
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        if (variables_[j].objective != 0.0) {
            acc += variables_[j].objective * x.at(j);
        }
    }
    return acc;
}

}  // namespace vlb::lp
