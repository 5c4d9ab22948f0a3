#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "painstates/ingest.hpp"

using namespace painstates;
using testing::tiny_registry;

namespace {

std::vector<RawDailyRecord> parse(const std::string& csv, const QuestionRegistry& registry) {
    std::istringstream in(csv);
    return parse_daily_records(in, registry);
}

const std::string kHeader = "participant_id,date,question_id,value\n";

}  // namespace

TEST_CASE("parse: header-only stream gives an empty list") {
    CHECK(parse(kHeader, tiny_registry()).empty());
}

TEST_CASE("parse: single row") {
    const auto records = parse(kHeader + "p1,2020-01-01,pain_overall,5\n", tiny_registry());
    REQUIRE(records.size() == 1);
    CHECK(records[0].participant_id == "p1");
    CHECK(records[0].date == Date(2020, 1, 1));
    REQUIRE(records[0].responses.count("pain_overall"));
    CHECK(records[0].responses.at("pain_overall") == std::vector<double>{5.0});
}

TEST_CASE("parse: same participant-day-question keeps the multi-values") {
    // Hand-constructed fixture; values checked line by line below.
    const std::string body = "p1,2020-01-01,pain_overall,2\n"
                             "p1,2020-01-01,pain_overall,4\n"
                             "p1,2020-01-01,pain_overall,6\n";
    const auto records = parse(kHeader + body, tiny_registry());
    REQUIRE(records.size() == 1);
    CHECK(records[0].responses.at("pain_overall") == std::vector<double>{2.0, 4.0, 6.0});
}

TEST_CASE("parse errors carry line numbers and reasons") {
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-01-01,pain_overall\n", tiny_registry()), ParseError);
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-13-01,pain_overall,5\n", tiny_registry()),
                    ParseError);
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-01-01,unknown_q,5\n", tiny_registry()), SchemaError);
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-01-01,pain_overall,11\n", tiny_registry()),
                    RangeError);
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-01-01,pain_overall,-1\n", tiny_registry()),
                    RangeError);
    CHECK_THROWS_AS(parse(kHeader + "p1,2020-01-01,pain_overall,abc\n", tiny_registry()),
                    ParseError);
    try {
        parse(kHeader + "p1,2020-01-01,pain_overall,5\np2,bad-date,mood,3\n", tiny_registry());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("aggregate: same-day values average") {
    const auto records = parse(kHeader + "p1,2020-01-01,pain_overall,2\n"
                                         "p1,2020-01-01,pain_overall,4\n"
                                         "p1,2020-01-01,pain_overall,6\n",
                               tiny_registry());
    const auto daily = aggregate_daily(records);
    REQUIRE(daily.size() == 1);
    CHECK(daily[0].responses.at("pain_overall") == doctest::Approx(4.0));
}

TEST_CASE("aggregate: single value passes through") {
    const auto daily =
        aggregate_daily(parse(kHeader + "p1,2020-01-01,pain_overall,7\n", tiny_registry()));
    CHECK(daily[0].responses.at("pain_overall") == doctest::Approx(7.0));
}

TEST_CASE("aggregate: independent questions same day") {
    const auto daily = aggregate_daily(parse(kHeader + "p1,2020-01-01,pain_overall,1\n"
                                                       "p1,2020-01-01,pain_overall,2\n"
                                                       "p1,2020-01-01,mood,10\n",
                                             tiny_registry()));
    REQUIRE(daily.size() == 1);
    CHECK(daily[0].responses.at("pain_overall") == doctest::Approx(1.5));
    CHECK(daily[0].responses.at("mood") == doctest::Approx(10.0));
}

TEST_CASE("aggregation and parsing are independent of row order") {
    const std::string rows[] = {"p1,2020-01-01,pain_overall,2", "p1,2020-01-01,pain_overall,4",
                                "p2,2020-01-02,mood,3",         "p1,2020-01-02,pain_overall,6",
                                "p1,2020-01-02,mood,1",         "p2,2020-01-02,pain_overall,9"};
    std::vector<std::string> perm(std::begin(rows), std::end(rows));
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        for (std::size_t i = perm.size() - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_index(i + 1)]);
        std::string csv = kHeader;
        for (const auto& r : perm) csv += r + "\n";
        const auto a = aggregate_daily(parse(csv, tiny_registry()));
        std::string base = kHeader;
        for (const auto& r : rows) base += r + "\n";
        const auto b = aggregate_daily(parse(base, tiny_registry()));
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].participant_id == b[i].participant_id);
            CHECK(a[i].date == b[i].date);
            CHECK(a[i].responses == b[i].responses);
        }
    }
}

namespace {

// pid answers both questions on `complete` days and only one question on
// `partial` days.
std::vector<DailyRecord> make_days(const std::string& pid, int complete, int partial) {
    std::vector<DailyRecord> out;
    const Date start(2020, 1, 1);
    for (int d = 0; d < complete; ++d) {
        DailyRecord rec{pid, start.plus_days(d), {{"pain_overall", 5.0}, {"mood", 5.0}}};
        out.push_back(rec);
    }
    for (int d = 0; d < partial; ++d) {
        DailyRecord rec{pid, start.plus_days(complete + d), {{"pain_overall", 5.0}}};
        out.push_back(rec);
    }
    return out;
}

}  // namespace

TEST_CASE("filter: 9 complete days are excluded, 10 are included") {
    auto nine = make_days("p9", 9, 0);
    auto ten = make_days("p10", 10, 0);
    std::vector<DailyRecord> all = nine;
    all.insert(all.end(), ten.begin(), ten.end());
    const auto table = filter_complete(all, tiny_registry(), {});
    CHECK(table.participants == std::set<std::string>{"p10"});
    CHECK(table.records.size() == 10);
}

TEST_CASE("filter: incomplete days drop before the day count") {
    // 10 days on record, but one lost to a missing question: exclusion.
    auto days = make_days("p1", 9, 1);
    const auto table = filter_complete(days, tiny_registry(), {});
    CHECK(table.participants.empty());
    CHECK(table.records.empty());
}

TEST_CASE("filter: watch coverage rule") {
    auto days = make_days("p1", 12, 0);
    FilterOptions options;
    options.require_watch = true;
    std::map<std::string, int> watch{{"p1", 9}};
    CHECK(filter_complete(days, tiny_registry(), options, &watch).participants.empty());
    watch["p1"] = 10;
    CHECK(filter_complete(days, tiny_registry(), options, &watch).participants ==
          std::set<std::string>{"p1"});

    // No coverage info at all counts as zero days.
    std::map<std::string, int> empty;
    CHECK(filter_complete(days, tiny_registry(), options, &empty).participants.empty());
}

TEST_CASE("filter is idempotent and leaves no missing questions") {
    auto days = make_days("pa", 11, 3);
    auto more = make_days("pb", 25, 0);
    days.insert(days.end(), more.begin(), more.end());
    const auto once = filter_complete(days, tiny_registry(), {});
    once.check_complete();
    const auto twice = filter_complete(once.records, tiny_registry(), {});
    CHECK(once.participants == twice.participants);
    REQUIRE(once.records.size() == twice.records.size());
    for (std::size_t i = 0; i < once.records.size(); ++i)
        CHECK(once.records[i].responses == twice.records[i].responses);
}

TEST_CASE("filter: empty outcome is not an error") {
    const auto table = filter_complete({}, tiny_registry(), {});
    CHECK(table.records.empty());
    CHECK_NOTHROW(table.check_complete());
}

TEST_CASE("response rates count raw responses per active day") {
    const auto raw = parse(kHeader + "p1,2020-01-01,pain_overall,2\n"
                                     "p1,2020-01-01,pain_overall,4\n"
                                     "p1,2020-01-01,mood,3\n"
                                     "p1,2020-01-02,pain_overall,5\n",
                           tiny_registry());
    const auto rates = response_rates(raw);
    CHECK(rates.at("p1") == doctest::Approx(2.0));  // (3 + 1) / 2 days
}

TEST_CASE("question registry parses and validates") {
    std::istringstream in("question_id,category,scale_min,scale_max,polarity\n"
                          "pain_overall,pain,0,10,higher_is_worse\n"
                          "mood,mood,0,10,higher_is_better\n");
    const auto registry = parse_question_registry(in);
    CHECK(registry.size() == 2);
    CHECK(registry.at("mood").category == Category::mood);

    std::istringstream bad("question_id,category,scale_min,scale_max,polarity\n"
                           "q,pain,5,5,higher_is_worse\n");
    CHECK_THROWS_AS(parse_question_registry(bad), SchemaError);
}

TEST_CASE("demographics parse and 0/1 sex coding") {
    std::istringstream in("participant_id,age,sex\np1,61,1\np2,55.5,0\n");
    const auto demo = parse_demographics(in);
    CHECK(demo.age.at("p2") == doctest::Approx(55.5));
    std::istringstream bad("participant_id,age,sex\np1,61,2\n");
    CHECK_THROWS_AS(parse_demographics(bad), RangeError);
}
