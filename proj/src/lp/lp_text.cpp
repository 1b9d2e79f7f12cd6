#include <cmath>
#include <cstdio>
#include <ostream>

#include "vlb/lp.hpp"

namespace vlb::lp {

namespace {

std::string sanitize(const std::string& name)
{
    std::string out;
    out.reserve(name.size());
    for (char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '.';
        out.push_back(ok ? ch : '_');
    }
    if (out.empty() || (out[0] >= '0' && out[0] <= '9') || out[0] == '.') {
        out.insert(out.begin(), 'x');
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_terms(std::ostream& out, const LinearProgram& lp, const std::vector<Term>& terms)
{
    bool first = true;
    for (const auto& t : terms) {
        if (t.coefficient == 0.0) {
            continue;
        }
        out << (t.coefficient < 0.0 ? " - " : (first ? " " : " + ")) << num(std::abs(t.coefficient)) << ' '
            << sanitize(lp.variables()[t.variable].name);
        first = false;
    }
    if (first) {
        out << " 0 " << sanitize(lp.variables().empty() ? "x" : lp.variables()[0].name);
    }
}

}  // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& out)
{
    out << (lp.sense() == Sense::maximize ? "Maximize\n" : "Minimize\n") << " obj:";
    std::vector<Term> objective;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        if (lp.variables()[j].objective != 0.0) {
            objective.push_back({j, lp.variables()[j].objective});
        }
    }
    write_terms(out, lp, objective);
    out << "\nSubject To\n";
    for (const auto& c : lp.constraints()) {
        out << ' ' << sanitize(c.label) << ':';
        write_terms(out, lp, c.terms);
        switch (c.comparator) {
        case Comparator::less_equal:
            out << " <= ";
            break;
        case Comparator::equal:
            out << " = ";
            break;
        case Comparator::greater_equal:
            out << " >= ";
            break;
        }
        out << num(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : lp.variables()) {
        const auto name = sanitize(v.name);
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out << ' ' << name << " free\n";
        }
        else {
            out << ' ' << (std::isfinite(v.lower) ? num(v.lower) : "-inf") << " <= " << name << " <= "
                << (std::isfinite(v.upper) ? num(v.upper) : "+inf") << '\n';
        }
    }
    out << "End\n";
}

}  // namespace vlb::lp
