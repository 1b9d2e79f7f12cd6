#include "vlb/model.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

namespace vlb {

using nlohmann::json;

double ValueLedger::total_quantity() const
{
    return std::accumulate(buckets.begin(), buckets.end(), 0.0,
                           [](double acc, const ValueBucket& b) { return acc + b.quantity; });
}

std::string_view to_string(Mode mode)
{
    switch (mode) {
    case Mode::ideal:
        return "ideal";
    case Mode::split_end_level:
        return "split_end_level";
    case Mode::split_penalty:
        return "split_penalty";
    case Mode::vlb:
        return "vlb";
    }
    return "unknown";
}

Mode mode_from_string(std::string_view name)
{
    for (Mode m : {Mode::ideal, Mode::split_end_level, Mode::split_penalty, Mode::vlb}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class DiagnosticSink {
public:
    void add(std::string path, std::string message) { out_.push_back({std::move(path), std::move(message)}); }
    std::vector<Diagnostic> take() { return std::move(out_); }

private:
    std::vector<Diagnostic> out_;
};

std::string index_path(const std::string& base, std::string_view key, std::size_t i)
{
    return base + "." + std::string(key) + "[" + std::to_string(i) + "]";
}

void check_series(DiagnosticSink& sink, const std::string& path, const std::vector<double>& values,
                  std::size_t n_periods, bool non_negative)
{
    if (values.size() != n_periods) {
        sink.add(path, "array length " + std::to_string(values.size()) + " does not match n_periods " +
                           std::to_string(n_periods));
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!std::isfinite(values[t])) {
            sink.add(path + "[" + std::to_string(t) + "]", "value must be finite");
        }
        else if (non_negative && values[t] < 0.0) {
            sink.add(path + "[" + std::to_string(t) + "]", "maximum quantity must be non-negative");
        }
    }
}

void check_interval(DiagnosticSink& sink, const std::string& path, const IntervalSpec& interval,
                    const StorageSpec& storage, Mode mode)
{
    const auto n = interval.grid.n_periods;
    if (n < 1) {
        sink.add(path + ".n_periods", "n_periods must be at least 1");
    }
    if (!std::isfinite(interval.grid.delta_t) || interval.grid.delta_t <= 0.0) {
        sink.add(path + ".delta_t", "delta_t must be strictly positive");
    }

    std::set<std::string> ids;
    auto check_id = [&](const std::string& p, const std::string& id) {
        if (id.empty()) {
            sink.add(p + ".id", "participant id must not be empty");
        }
        else if (!ids.insert(id).second) {
            sink.add(p + ".id", "duplicate participant id '" + id + "'");
        }
    };
    for (std::size_t i = 0; i < interval.loads.size(); ++i) {
        const auto p = index_path(path, "loads", i);
        check_id(p, interval.loads[i].id);
        check_series(sink, p + ".utility", interval.loads[i].utility, n, false);
        check_series(sink, p + ".max", interval.loads[i].max_quantity, n, true);
    }
    for (std::size_t g = 0; g < interval.generators.size(); ++g) {
        const auto p = index_path(path, "generators", g);
        check_id(p, interval.generators[g].id);
        check_series(sink, p + ".cost", interval.generators[g].cost, n, false);
        check_series(sink, p + ".max", interval.generators[g].max_quantity, n, true);
    }

    if (!std::isfinite(interval.end_level) || interval.end_level < -kModelEps) {
        sink.add(path + ".end_level", "end level must be non-negative");
    }
    else if (interval.end_level > storage.capacity + kModelEps) {
        sink.add(path + ".end_level", "end level exceeds storage capacity");
    }

    if (interval.penalty_price && !std::isfinite(*interval.penalty_price)) {
        sink.add(path + ".penalty_price", "penalty price must be finite");
    }
    if (mode == Mode::split_penalty && !interval.penalty_price) {
        sink.add(path + ".penalty_price", "penalty price is required in split_penalty mode");
    }
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s)
{
    return validate_scenario(s, s.mode);
}

std::vector<Diagnostic> validate_scenario(const Scenario& s, Mode mode)
{
    DiagnosticSink sink;

    const auto& st = s.storage;
    if (!std::isfinite(st.capacity) || st.capacity < 0.0) {
        sink.add("storage.capacity", "negative or non-finite capacity");
    }
    if (!std::isfinite(st.initial_energy) || st.initial_energy < -kModelEps) {
        sink.add("storage.initial_energy", "initial energy must be non-negative");
    }
    else if (st.initial_energy > st.capacity + kModelEps) {
        sink.add("storage.initial_energy", "initial energy exceeds capacity");
    }

    if (!std::isfinite(s.discount_rate) || s.discount_rate < 0.0 || s.discount_rate >= 1.0) {
        sink.add("discount_rate", "discount rate must lie in [0, 1)");
    }

    for (std::size_t v = 0; v < s.initial_ledger.buckets.size(); ++v) {
        const auto& b = s.initial_ledger.buckets[v];
        const auto p = "initial_ledger[" + std::to_string(v) + "]";
        if (!std::isfinite(b.price) || b.price <= kModelEps) {
            sink.add(p + ".price", "stored-energy value must be strictly positive");
        }
        if (!std::isfinite(b.quantity) || b.quantity <= kModelEps) {
            sink.add(p + ".quantity", "bucket quantity must be strictly positive");
        }
    }
    if (s.initial_ledger.total_quantity() > st.capacity + kModelEps) {
        sink.add("initial_ledger", "ledger total exceeds storage capacity");
    }

    for (std::size_t k = 0; k < s.intervals.size(); ++k) {
        check_interval(sink, "intervals[" + std::to_string(k) + "]", s.intervals[k], st, mode);
    }

    if (mode == Mode::ideal) {
        for (std::size_t k = 1; k < s.intervals.size(); ++k) {
            if (s.intervals[k].grid.delta_t != s.intervals[0].grid.delta_t) {
                sink.add("intervals[" + std::to_string(k) + "].delta_t",
                         "ideal clearing requires every interval to share one delta_t");
            }
        }
    }
    return sink.take();
}

// ---------------------------------------------------------------------------
// Document format
// ---------------------------------------------------------------------------

namespace {

class Reader {
public:
    explicit Reader(DiagnosticSink& sink) : sink_(sink) {}

    const json* member(const json& obj, const std::string& path, const char* key, bool required)
    {
        if (!obj.is_object()) {
            sink_.add(path, "expected an object");
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) {
                sink_.add(join(path, key), "missing required field");
            }
            return nullptr;
        }
        return &*it;
    }

    double number(const json& obj, const std::string& path, const char* key, double fallback, bool required = true)
    {
        const json* v = member(obj, path, key, required);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_number()) {
            sink_.add(join(path, key), "expected a number");
            return fallback;
        }
        return v->get<double>();
    }

    std::vector<double> numbers(const json& obj, const std::string& path, const char* key)
    {
        std::vector<double> out;
        const json* v = member(obj, path, key, true);
        if (v == nullptr) {
            return out;
        }
        if (!v->is_array()) {
            sink_.add(join(path, key), "expected an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            if (!e.is_number()) {
                sink_.add(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(0.0);
            }
            else {
                out.push_back(e.get<double>());
            }
        }
        return out;
    }

    std::string text(const json& obj, const std::string& path, const char* key)
    {
        const json* v = member(obj, path, key, true);
        if (v == nullptr) {
            return {};
        }
        if (!v->is_string()) {
            sink_.add(join(path, key), "expected a string");
            return {};
        }
        return v->get<std::string>();
    }

    std::size_t count(const json& obj, const std::string& path, const char* key, std::size_t fallback,
                      bool required = true)
    {
        const json* v = member(obj, path, key, required);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_number_integer() || v->get<long long>() < 0) {
            sink_.add(join(path, key), "expected a non-negative integer");
            return fallback;
        }
        return v->get<std::size_t>();
    }

    const json* array(const json& obj, const std::string& path, const char* key, bool required)
    {
        const json* v = member(obj, path, key, required);
        if (v != nullptr && !v->is_array()) {
            sink_.add(join(path, key), "expected an array");
            return nullptr;
        }
        return v;
    }

    static std::string join(const std::string& path, const char* key)
    {
        return path.empty() ? std::string(key) : path + "." + key;
    }

private:
    DiagnosticSink& sink_;
};

template <class Bid>
std::vector<Bid> read_bids(Reader& r, const json& interval, const std::string& path, const char* key,
                           const char* price_key)
{
    std::vector<Bid> bids;
    const json* arr = r.array(interval, path, key, true);
    if (arr == nullptr) {
        return bids;
    }
    for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto p = Reader::join(path, key) + "[" + std::to_string(i) + "]";
        const auto& obj = (*arr)[i];
        Bid b;
        b.id = r.text(obj, p, "id");
        if constexpr (std::is_same_v<Bid, LoadBid>) {
            b.utility = r.numbers(obj, p, price_key);
        }
        else {
            b.cost = r.numbers(obj, p, price_key);
        }
        b.max_quantity = r.numbers(obj, p, "max");
        bids.push_back(std::move(b));
    }
    return bids;
}

template <class Bid>
json write_bids(const std::vector<Bid>& bids)
{
    json arr = json::array();
    for (const auto& b : bids) {
        json obj;
        obj["id"] = b.id;
        if constexpr (std::is_same_v<Bid, LoadBid>) {
            obj["utility"] = b.utility;
        }
        else {
            obj["cost"] = b.cost;
        }
        obj["max"] = b.max_quantity;
        arr.push_back(std::move(obj));
    }
    return arr;
}

}  // namespace

Scenario parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }

    DiagnosticSink sink;
    Reader r(sink);
    Scenario s;

    if (!doc.is_object()) {
        throw ValidationError(std::vector<Diagnostic>{{"", "scenario document must be an object"}});
    }

    if (const json* st = r.member(doc, "", "storage", true)) {
        s.storage.capacity = r.number(*st, "storage", "capacity", 0.0);
        s.storage.initial_energy = r.number(*st, "storage", "initial_energy", 0.0, false);
    }

    const auto mode_name = r.text(doc, "", "mode");
    if (!mode_name.empty()) {
        try {
            s.mode = mode_from_string(mode_name);
        }
        catch (const std::invalid_argument& e) {
            sink.add("mode", e.what());
        }
    }

    s.discount_rate = r.number(doc, "", "discount_rate", 0.0, false);

    if (const json* ledger = r.array(doc, "", "initial_ledger", false)) {
        for (std::size_t v = 0; v < ledger->size(); ++v) {
            const auto p = "initial_ledger[" + std::to_string(v) + "]";
            const auto& obj = (*ledger)[v];
            ValueBucket b;
            b.price = r.number(obj, p, "price", 0.0);
            b.quantity = r.number(obj, p, "quantity", 0.0);
            b.birth_interval = r.count(obj, p, "birth_interval", 0, false);
            s.initial_ledger.buckets.push_back(b);
        }
    }

    if (const json* intervals = r.array(doc, "", "intervals", true)) {
        for (std::size_t k = 0; k < intervals->size(); ++k) {
            const auto p = "intervals[" + std::to_string(k) + "]";
            const auto& obj = (*intervals)[k];
            IntervalSpec spec;
            spec.grid.delta_t = r.number(obj, p, "delta_t", 1.0);
            spec.grid.n_periods = r.count(obj, p, "n_periods", 1);
            spec.loads = read_bids<LoadBid>(r, obj, p, "loads", "utility");
            spec.generators = read_bids<GeneratorBid>(r, obj, p, "generators", "cost");
            spec.end_level = r.number(obj, p, "end_level", 0.0);
            if (r.member(obj, p, "penalty_price", false) != nullptr) {
                spec.penalty_price = r.number(obj, p, "penalty_price", 0.0);
            }
            s.intervals.push_back(std::move(spec));
        }
    }

    auto structural = sink.take();
    if (!structural.empty()) {
        throw ValidationError(std::move(structural));
    }
    auto semantic = validate_scenario(s);
    if (!semantic.empty()) {
        throw ValidationError(std::move(semantic));
    }
    return s;
}

std::string serialize_scenario(const Scenario& s)
{
    json doc;
    doc["storage"] = {{"capacity", s.storage.capacity}, {"initial_energy", s.storage.initial_energy}};
    doc["mode"] = std::string(to_string(s.mode));
    doc["discount_rate"] = s.discount_rate;

    json ledger = json::array();
    for (const auto& b : s.initial_ledger.buckets) {
        ledger.push_back({{"price", b.price}, {"quantity", b.quantity}, {"birth_interval", b.birth_interval}});
    }
    doc["initial_ledger"] = std::move(ledger);

    json intervals = json::array();
    for (const auto& spec : s.intervals) {
        json obj;
        obj["delta_t"] = spec.grid.delta_t;
        obj["n_periods"] = spec.grid.n_periods;
        obj["loads"] = write_bids(spec.loads);
        obj["generators"] = write_bids(spec.generators);
        obj["end_level"] = spec.end_level;
        if (spec.penalty_price) {
            obj["penalty_price"] = *spec.penalty_price;
        }
        intervals.push_back(std::move(obj));
    }
    doc["intervals"] = std::move(intervals);
    return doc.dump(2) + "\n";
}

}  // namespace vlb
