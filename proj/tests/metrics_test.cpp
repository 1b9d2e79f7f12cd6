#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "vlb/clearing.hpp"
#include "vlb/metrics.hpp"
#include "vlb/runner.hpp"

using namespace vlb;
using doctest::Approx;

namespace {

std::vector<ClearingResult> cleared(const ModeReport& m)
{
    std::vector<ClearingResult> out;
    for (const auto& i : m.intervals) {
        out.push_back(i.result);
    }
    return out;
}

ModeReport run_fixture(const char* name, Mode mode)
{
    return run(testing::load_fixture(name, mode)).modes.at(0);
}

double storage_surplus(const std::vector<SurplusLine>& lines, std::size_t interval)
{
    for (const auto& l : lines) {
        if (l.kind == ParticipantKind::storage && l.interval == interval) {
            return l.surplus;
        }
    }
    return 0.0;
}

}  // namespace

TEST_CASE("split storage pays 5 then earns 2 at the bottom of the range")
{
    const auto s = testing::load_fixture("table1.json", Mode::split_end_level);
    const auto m = run(s).modes.at(0);
    const auto lines = participant_surpluses(cleared(m), s.intervals, PriceSelection::range_min);
    CHECK(storage_surplus(lines, 1) == Approx(-5.0));
    CHECK(storage_surplus(lines, 2) == Approx(2.0));
    const auto audit = cost_recovery_audit(cleared(m), s.intervals, PriceSelection::range_min);
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].cycle == Cycle{1, 2, true});
    CHECK(audit[0].storage_surplus == Approx(-3.0));
    CHECK(audit[0].verdict == Verdict::fail);
}

TEST_CASE("VLB storage recovers its cost even at the bottom of the range")
{
    const auto s = testing::load_fixture("table1.json", Mode::vlb);
    const auto m = run(s).modes.at(0);
    const auto audit = cost_recovery_audit(cleared(m), s.intervals, PriceSelection::range_min);
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].storage_surplus == Approx(0.0));
    CHECK(audit[0].verdict == Verdict::pass);
}

TEST_CASE("zero dispatch gives zero surpluses and trivial cycles")
{
    IntervalSpec spec;
    spec.loads.push_back({"L1", {3}, {0}});
    spec.generators.push_back({"G1", {1}, {0}});
    const std::vector<IntervalSpec> bids{spec, spec};
    const std::vector<ClearingResult> results{clear_split(spec, {1.0, 0.0}, 0.0), clear_split(spec, {1.0, 0.0}, 0.0)};
    for (const auto& line : participant_surpluses(results, bids)) {
        CHECK(line.surplus == 0.0);
    }
    const auto cycles = detect_cycles(results);
    CHECK(cycles == std::vector<Cycle>{{1, 1, true}, {2, 2, true}});
    for (const auto& c : cost_recovery_audit(results, bids)) {
        CHECK(c.verdict == Verdict::pass);
        CHECK(c.storage_surplus == 0.0);
        CHECK(c.social_welfare == 0.0);
    }
}

TEST_CASE("cycle detection on the paper's sequences")
{
    CHECK(detect_cycles(cleared(run_fixture("table1.json", Mode::vlb))) == std::vector<Cycle>{{1, 2, true}});
    CHECK(detect_cycles(cleared(run_fixture("table5.json", Mode::vlb))) == std::vector<Cycle>{{1, 6, true}});
    const auto open = detect_cycles(cleared(run_fixture("table6.json", Mode::vlb)));
    CHECK(open == std::vector<Cycle>{{1, 2, false}});
}

TEST_CASE("open cycles are indeterminate")
{
    const auto s = testing::load_fixture("table6.json", Mode::split_end_level);
    const auto m = run(s).modes.at(0);
    const auto audit = cost_recovery_audit(cleared(m), s.intervals);
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].verdict == Verdict::indeterminate);
}

TEST_CASE("welfare over cycles of the first welfare example")
{
    const auto s = testing::load_fixture("table4.json", Mode::vlb);
    const Cycle all{1, 3, true};
    CHECK(social_welfare(cleared(run_fixture("table4.json", Mode::ideal)), s.intervals, all) == Approx(21.0));
    CHECK(social_welfare(cleared(run_fixture("table4.json", Mode::split_end_level)), s.intervals, all) ==
          Approx(-1.0));
    CHECK(social_welfare(cleared(run_fixture("table4.json", Mode::vlb)), s.intervals, all) == Approx(16.0));
}

TEST_CASE("welfare over the second welfare example")
{
    const auto s = testing::load_fixture("table5.json", Mode::vlb);
    const Cycle all{1, 6, true};
    CHECK(social_welfare(cleared(run_fixture("table5.json", Mode::ideal)), s.intervals, all) == Approx(855.0));
    CHECK(social_welfare(cleared(run_fixture("table5.json", Mode::split_end_level)), s.intervals, all) ==
          Approx(842.5));
    CHECK(social_welfare(cleared(run_fixture("table5.json", Mode::vlb)), s.intervals, all) == Approx(772.5));
    CHECK(social_welfare(cleared(run_fixture("table5_discount.json", Mode::vlb)), s.intervals, all) ==
          Approx(807.5));
}

TEST_CASE("welfare equals the sum of all surpluses under any price selection")
{
    testing::Rng rng(555);
    for (int k = 0; k < 60; ++k) {
        for (Mode mode : {Mode::ideal, Mode::split_end_level, Mode::vlb}) {
            const auto s = testing::random_scenario(rng, 2 + k % 2, 2, mode);
            RunReport report;
            try {
                report = run(s);
            }
            catch (const InfeasibleError&) {
                continue;
            }
            const auto results = cleared(report.modes[0]);
            const Cycle all{1, results.size(), true};
            const double sw = social_welfare(results, s.intervals, all);
            for (auto sel : {PriceSelection::point, PriceSelection::range_min, PriceSelection::range_max}) {
                // an unbounded price range has no settlement value
                bool finite = true;
                for (const auto& r : results) {
                    for (double p : settlement_prices(r, sel)) {
                        finite = finite && std::isfinite(p);
                    }
                }
                if (!finite) {
                    continue;
                }
                double total = 0.0;
                for (const auto& line : participant_surpluses(results, s.intervals, sel)) {
                    total += line.surplus;
                }
                CHECK(total == Approx(sw).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("price selection names round-trip")
{
    for (auto sel : {PriceSelection::point, PriceSelection::range_min, PriceSelection::range_max}) {
        CHECK(price_selection_from_string(to_string(sel)) == sel);
    }
    CHECK_THROWS_AS(price_selection_from_string("median"), std::invalid_argument);
}

TEST_CASE("cycle bounds are checked")
{
    CHECK_THROWS_AS(social_welfare(std::vector<ClearingResult>{}, {}, Cycle{1, 1, true}), std::invalid_argument);
}
