#include "vlb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vlb/errors.hpp"

namespace vlb {

namespace {

using Json = nlohmann::ordered_json;

// ---- table ----

std::string num(double x)
{
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (std::abs(x) < 5e-7) {
        x = 0.0;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string price_cell(const ClearingResult& r, std::size_t t)
{
    if (r.price_range.empty()) {
        return num(r.price[t]);
    }
    const auto& range = r.price_range[t];
    if (std::abs(range.upper - range.lower) <= 1e-9) {
        return num(range.lower);
    }
    return "[" + num(range.lower) + "," + num(range.upper) + "]";
}

class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : rows_{std::move(header)} {}

    void add(std::vector<std::string> row)
    {
        row.resize(rows_.front().size());
        rows_.push_back(std::move(row));
    }

    void render(std::ostream& out) const
    {
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                width[c] = std::max(width[c], row[c].size());
            }
        }
        for (const auto& row : rows_) {
            std::string line;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c > 0) {
                    line += "  ";
                }
                line += std::string(width[c] - row[c].size(), ' ') + row[c];
            }
            out << line << "\n";
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

// Participant ids in order of first appearance across intervals.
std::vector<std::string> union_ids(const ModeReport& m, bool loads)
{
    std::vector<std::string> ids;
    for (const auto& i : m.intervals) {
        for (const auto& id : loads ? i.result.load_ids : i.result.generator_ids) {
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
                ids.push_back(id);
            }
        }
    }
    return ids;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count)
{
    if (count == 1) {
        return {prefix};
    }
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= count; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

std::string dispatch_cell(const std::vector<std::string>& ids, const SeriesMatrix& q, const std::string& id,
                          std::size_t t)
{
    const auto it = std::find(ids.begin(), ids.end(), id);
    return it == ids.end() ? "" : num(q[it - ids.begin()][t]);
}

void render_mode(const ModeReport& m, std::ostream& out)
{
    out << "== " << to_string(m.mode) << " ==\n";
    if (m.failure) {
        out << "error (exit " << m.failure->exit_code << "): " << m.failure->message << "\n\n";
        return;
    }
    const bool vlb = m.mode == Mode::vlb;
    const auto loads = union_ids(m, true);
    const auto gens = union_ids(m, false);

    std::vector<std::string> header{"MI", "t"};
    if (!vlb) {
        header.push_back("e");
    }
    for (auto& h : numbered("d", std::max<std::size_t>(loads.size(), 1))) {
        header.push_back(h);
    }
    for (auto& h : numbered("p", std::max<std::size_t>(gens.size(), 1))) {
        header.push_back(h);
    }
    header.push_back("p^C");
    if (vlb) {
        for (const char* h : {"p^{D,e}", "e^a", "e^e"}) {
            header.push_back(h);
        }
    }
    header.push_back("λ");
    header.push_back("λ*");

    TextTable table(header);
    for (const auto& i : m.intervals) {
        const auto& r = i.result;
        for (std::size_t t = 0; t < r.grid.n_periods; ++t) {
            std::vector<std::string> row{t == 0 ? std::to_string(i.interval) : "", std::to_string(t + 1)};
            if (!vlb) {
                row.push_back(num(r.storage_level[t]));
            }
            for (const auto& id : loads) {
                row.push_back(dispatch_cell(r.load_ids, r.load_dispatch, id, t));
            }
            if (loads.empty()) {
                row.push_back("");
            }
            for (const auto& id : gens) {
                row.push_back(dispatch_cell(r.generator_ids, r.generator_dispatch, id, t));
            }
            if (gens.empty()) {
                row.push_back("");
            }
            if (vlb && r.vlb) {
                const auto& s = *r.vlb;
                double discharge = 0.0, inter = 0.0;
                for (std::size_t v = 0; v < s.inter_discharge.size(); ++v) {
                    discharge += s.inter_discharge[v][t];
                    inter += s.inter_level[v][t];
                }
                row.push_back(num(s.intra_charge[t]));
                row.push_back(num(discharge));
                row.push_back(num(s.intra_level[t]));
                row.push_back(num(inter));
            }
            else {
                row.push_back(num(r.storage_charge[t]));
            }
            row.push_back(price_cell(r, t));
            row.push_back(num(r.price[t]));
            table.add(std::move(row));
        }
    }
    table.render(out);

    if (loads.size() > 1 || gens.size() > 1) {
        out << "columns:";
        const auto ln = numbered("d", loads.size());
        for (std::size_t i = 0; i < loads.size(); ++i) {
            out << " " << ln[i] << "=" << loads[i];
        }
        const auto gn = numbered("p", gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i) {
            out << " " << gn[i] << "=" << gens[i];
        }
        out << "\n";
    }

    for (const auto& snap : m.ledger_snapshots) {
        out << "ledger after MI " << snap.interval << ":";
        if (snap.after.empty()) {
            out << " empty";
        }
        for (const auto& b : snap.after.buckets) {
            out << " (" << num(b.price) << ", " << num(b.quantity) << ", " << b.birth_interval << ")";
        }
        out << "\n";
    }

    if (!m.cycles.empty()) {
        out << "\n";
        TextTable cycles({"cycle", "storage surplus", "cost recovery", "SW"});
        for (const auto& c : m.cycles) {
            cycles.add({std::to_string(c.cycle.first) + "-" + std::to_string(c.cycle.last) +
                            (c.cycle.closed ? "" : " (open)"),
                        num(c.storage_surplus), std::string(to_string(c.verdict)), num(c.social_welfare)});
        }
        cycles.render(out);
    }
    out << "\n";
}

std::string render_table(const RunReport& report)
{
    std::ostringstream out;
    out << "price selection: " << to_string(report.selection) << "\n\n";
    bool any = false;
    for (const auto& m : report.modes) {
        render_mode(m, out);
        any = any || !m.intervals.empty() || m.failure;
    }
    if (any) {
        TextTable totals({"mode", "SW", "objective", "load surplus", "generator surplus", "storage surplus", "status"});
        for (const auto& m : report.modes) {
            if (m.failure) {
                totals.add({std::string(to_string(m.mode)), "", "", "", "", "",
                            "exit " + std::to_string(m.failure->exit_code)});
                continue;
            }
            const auto& t = m.totals;
            totals.add({std::string(to_string(m.mode)), num(t.social_welfare), num(t.objective), num(t.load_surplus),
                        num(t.generator_surplus), num(t.storage_surplus), "ok"});
        }
        totals.render(out);
    }
    return out.str();
}

// ---- structured ----

Json number(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

double number_from(const Json& j, double if_null)
{
    return j.is_null() ? if_null : j.get<double>();
}

Json ledger_json(const ValueLedger& ledger)
{
    Json out = Json::array();
    for (const auto& b : ledger.buckets) {
        out.push_back({{"price", b.price}, {"quantity", b.quantity}, {"birth_interval", b.birth_interval}});
    }
    return out;
}

ValueLedger ledger_from(const Json& j)
{
    ValueLedger out;
    for (const auto& b : j) {
        out.buckets.push_back(
            {b.at("price").get<double>(), b.at("quantity").get<double>(), b.at("birth_interval").get<std::size_t>()});
    }
    return out;
}

Json interval_json(Mode mode, const IntervalReport& i)
{
    const auto& r = i.result;
    Json j;
    j["mode"] = to_string(mode);
    j["interval"] = i.interval;
    j["n_periods"] = r.grid.n_periods;
    j["delta_t"] = r.grid.delta_t;
    j["initial_level"] = r.initial_level;
    j["objective"] = r.objective;
    j["social_welfare"] = i.social_welfare;
    Json loads = Json::array();
    for (std::size_t l = 0; l < r.load_ids.size(); ++l) {
        loads.push_back({{"id", r.load_ids[l]}, {"dispatch", r.load_dispatch[l]}});
    }
    j["loads"] = std::move(loads);
    Json gens = Json::array();
    for (std::size_t g = 0; g < r.generator_ids.size(); ++g) {
        gens.push_back({{"id", r.generator_ids[g]}, {"dispatch", r.generator_dispatch[g]}});
    }
    j["generators"] = std::move(gens);
    j["storage_charge"] = r.storage_charge;
    j["storage_level"] = r.storage_level;
    j["price"] = r.price;
    Json ranges = Json::array();
    for (const auto& range : r.price_range) {
        ranges.push_back(Json::array({number(range.lower), number(range.upper)}));
    }
    j["price_range"] = std::move(ranges);
    if (r.vlb) {
        const auto& s = *r.vlb;
        j["vlb"] = {{"ledger", ledger_json(s.ledger)},
                    {"intra_charge", s.intra_charge},
                    {"inter_discharge", s.inter_discharge},
                    {"intra_level", s.intra_level},
                    {"inter_level", s.inter_level}};
    }
    return j;
}

IntervalReport interval_from(const Json& j)
{
    IntervalReport i;
    i.interval = j.at("interval").get<std::size_t>();
    i.social_welfare = j.at("social_welfare").get<double>();
    auto& r = i.result;
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.grid.n_periods = j.at("n_periods").get<std::size_t>();
    r.grid.delta_t = j.at("delta_t").get<double>();
    r.initial_level = j.at("initial_level").get<double>();
    r.objective = j.at("objective").get<double>();
    for (const auto& l : j.at("loads")) {
        r.load_ids.push_back(l.at("id").get<std::string>());
        r.load_dispatch.push_back(l.at("dispatch").get<Series>());
    }
    for (const auto& g : j.at("generators")) {
        r.generator_ids.push_back(g.at("id").get<std::string>());
        r.generator_dispatch.push_back(g.at("dispatch").get<Series>());
    }
    r.storage_charge = j.at("storage_charge").get<Series>();
    r.storage_level = j.at("storage_level").get<Series>();
    r.price = j.at("price").get<Series>();
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& range : j.at("price_range")) {
        r.price_range.push_back({number_from(range.at(0), -inf), number_from(range.at(1), inf)});
    }
    if (j.contains("vlb")) {
        const auto& v = j.at("vlb");
        VlbStorage s;
        s.ledger = ledger_from(v.at("ledger"));
        s.intra_charge = v.at("intra_charge").get<Series>();
        s.inter_discharge = v.at("inter_discharge").get<SeriesMatrix>();
        s.intra_level = v.at("intra_level").get<Series>();
        s.inter_level = v.at("inter_level").get<SeriesMatrix>();
        r.vlb = std::move(s);
    }
    return i;
}

ParticipantKind kind_from(const std::string& name)
{
    for (auto k : {ParticipantKind::load, ParticipantKind::generator, ParticipantKind::storage}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown participant kind '" + name + "'");
}

Verdict verdict_from(const std::string& name)
{
    for (auto v : {Verdict::pass, Verdict::fail, Verdict::indeterminate}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    throw std::invalid_argument("unknown verdict '" + name + "'");
}

std::string render_structured(const RunReport& report)
{
    Json doc;
    doc["price_selection"] = to_string(report.selection);
    Json modes = Json::array();
    Json intervals = Json::array();
    Json snapshots = Json::array();
    Json surpluses = Json::array();
    Json cycles = Json::array();
    Json totals = Json::object();
    for (const auto& m : report.modes) {
        const auto mode = std::string(to_string(m.mode));
        modes.push_back(mode);
        for (const auto& i : m.intervals) {
            intervals.push_back(interval_json(m.mode, i));
        }
        for (const auto& s : m.ledger_snapshots) {
            snapshots.push_back(
                {{"mode", mode}, {"interval", s.interval}, {"before", ledger_json(s.before)}, {"after", ledger_json(s.after)}});
        }
        for (const auto& s : m.surpluses) {
            surpluses.push_back({{"mode", mode},
                                 {"kind", to_string(s.kind)},
                                 {"participant", s.participant},
                                 {"interval", s.interval},
                                 {"surplus", s.surplus}});
        }
        for (const auto& c : m.cycles) {
            cycles.push_back({{"mode", mode},
                              {"first", c.cycle.first},
                              {"last", c.cycle.last},
                              {"closed", c.cycle.closed},
                              {"storage_surplus", c.storage_surplus},
                              {"verdict", to_string(c.verdict)},
                              {"social_welfare", c.social_welfare}});
        }
        Json t;
        if (m.failure) {
            t["status"] = "error";
            t["exit_code"] = m.failure->exit_code;
            t["error"] = m.failure->message;
        }
        else {
            t["status"] = "ok";
            t["social_welfare"] = m.totals.social_welfare;
            t["objective"] = m.totals.objective;
            t["load_surplus"] = m.totals.load_surplus;
            t["generator_surplus"] = m.totals.generator_surplus;
            t["storage_surplus"] = m.totals.storage_surplus;
        }
        totals[mode] = std::move(t);
    }
    doc["modes"] = std::move(modes);
    doc["intervals"] = std::move(intervals);
    doc["ledger_snapshots"] = std::move(snapshots);
    doc["surpluses"] = std::move(surpluses);
    doc["cycles"] = std::move(cycles);
    doc["totals"] = std::move(totals);
    return doc.dump(2) + "\n";
}

}  // namespace

ReportFormat report_format_from_string(std::string_view name)
{
    if (name == "table") {
        return ReportFormat::table;
    }
    if (name == "structured") {
        return ReportFormat::structured;
    }
    throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

std::string emit(const RunReport& report, ReportFormat format)
{
    return format == ReportFormat::table ? render_table(report) : render_structured(report);
}

RunReport parse_report(std::string_view structured)
{
    Json doc;
    try {
        doc = Json::parse(structured);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    try {
        RunReport report;
        report.selection = price_selection_from_string(doc.at("price_selection").get<std::string>());
        std::map<std::string, std::size_t> index;
        for (const auto& name : doc.at("modes")) {
            ModeReport m;
            m.mode = mode_from_string(name.get<std::string>());
            index[name.get<std::string>()] = report.modes.size();
            report.modes.push_back(std::move(m));
        }
        auto mode_of = [&](const Json& j) -> ModeReport& {
            return report.modes.at(index.at(j.at("mode").get<std::string>()));
        };
        for (const auto& j : doc.at("intervals")) {
            mode_of(j).intervals.push_back(interval_from(j));
        }
        for (const auto& j : doc.at("ledger_snapshots")) {
            mode_of(j).ledger_snapshots.push_back(
                {j.at("interval").get<std::size_t>(), ledger_from(j.at("before")), ledger_from(j.at("after"))});
        }
        for (const auto& j : doc.at("surpluses")) {
            mode_of(j).surpluses.push_back({kind_from(j.at("kind").get<std::string>()),
                                            j.at("participant").get<std::string>(), j.at("interval").get<std::size_t>(),
                                            j.at("surplus").get<double>()});
        }
        for (const auto& j : doc.at("cycles")) {
            CycleReport c;
            c.cycle = {j.at("first").get<std::size_t>(), j.at("last").get<std::size_t>(), j.at("closed").get<bool>()};
            c.storage_surplus = j.at("storage_surplus").get<double>();
            c.verdict = verdict_from(j.at("verdict").get<std::string>());
            c.social_welfare = j.at("social_welfare").get<double>();
            mode_of(j).cycles.push_back(c);
        }
        for (auto& m : report.modes) {
            const auto& t = doc.at("totals").at(std::string(to_string(m.mode)));
            if (t.at("status").get<std::string>() == "error") {
                m.failure = RunFailure{t.at("exit_code").get<int>(), t.at("error").get<std::string>()};
                continue;
            }
            m.totals = {t.at("social_welfare").get<double>(), t.at("objective").get<double>(),
                        t.at("load_surplus").get<double>(), t.at("generator_surplus").get<double>(),
                        t.at("storage_surplus").get<double>()};
        }
        return report;
    }
    catch (const std::exception& e) {
        throw ValidationError(std::vector<Diagnostic>{{"report", e.what()}});
    }
}

}  // namespace vlb
