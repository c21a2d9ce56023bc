#include <gtest/gtest.h>

#include <ctime>
#include <random>

#include "support.hpp"

using namespace caltrend;
using namespace testing_support;

TEST(CivilCalendar, RoundTripsAgainstLibc) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::int64_t> days(-200000, 200000);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t d = days(gen);
    const CivilDate c = civil_from_days(d);
    EXPECT_EQ(days_from_civil(c), d);
    const std::time_t t = static_cast<std::time_t>(d * 86400);
    std::tm tm{};
    gmtime_r(&t, &tm);
    EXPECT_EQ(c.year, tm.tm_year + 1900);
    EXPECT_EQ(c.month, tm.tm_mon + 1);
    EXPECT_EQ(c.day, tm.tm_mday);
    EXPECT_EQ(weekday_from_days(d), tm.tm_wday);
  }
}

TEST(CivilCalendar, LeapYears) {
  EXPECT_EQ(days_in_month(2024, 2), 29);
  EXPECT_EQ(days_in_month(2023, 2), 28);
  EXPECT_EQ(days_in_month(1900, 2), 28);
  EXPECT_EQ(days_in_month(2000, 2), 29);
}

TEST(Iso8601, ParsesOffsetsAndFractions) {
  auto a = parse_iso8601("2024-03-05T10:30:00+09:00");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->offset_minutes, 540);
  EXPECT_EQ(a->utc_seconds, days_from_civil(2024, 3, 5) * 86400 + 1 * 3600 + 30 * 60);
  auto b = parse_iso8601("2024-03-05T01:30:00.123Z");
  ASSERT_TRUE(b);
  EXPECT_EQ(b->utc_seconds, a->utc_seconds);
  EXPECT_EQ(b->offset_minutes, 0);
  auto c = parse_iso8601("2024-03-04T20:00:00-0530");
  ASSERT_TRUE(c);
  EXPECT_EQ(c->offset_minutes, -330);
}

TEST(Iso8601, RejectsMalformed) {
  for (const char* s : {"", "2024-03-05", "2024-13-01T00:00:00Z", "2024-02-30T00:00:00Z", "2024-03-05T24:00:00Z",
                        "2024-03-05T10:30:00", "2024-03-05T10:30:00+9", "2024-03-05T10:30:00Zjunk",
                        "2024-03-05T10:30:00.Z", "2024-03-05X10:30:00Z"}) {
    EXPECT_FALSE(parse_iso8601(s)) << s;
  }
}

TEST(Iso8601, FormatRoundTrip) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::int64_t> secs(-2'000'000'000LL, 4'000'000'000LL);
  std::uniform_int_distribution<int> offs(-12 * 4, 14 * 4);
  for (int i = 0; i < 2000; ++i) {
    Timestamp t{secs(gen), offs(gen) * 15};
    auto back = parse_iso8601(format_iso8601(t));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, t);
  }
  EXPECT_EQ(format_iso8601({0, 0}), "1970-01-01T00:00:00Z");
}

TEST(Clock, FormatsEndOfDay) {
  EXPECT_EQ(format_clock(0), "00:00:00");
  EXPECT_EQ(format_clock(86400), "24:00:00");
  EXPECT_EQ(format_clock(3661), "01:01:01");
}

TEST(LabelSet, Operations) {
  LabelSet s;
  EXPECT_TRUE(s.empty());
  s.insert(LifeMode::kHome);
  EXPECT_TRUE(s.contains(LifeMode::kHome));
  EXPECT_FALSE(s.contains(LifeMode::kWork));
  s.insert(LifeMode::kWork);
  EXPECT_EQ(s.size(), 2);
  s.erase(LifeMode::kHome);
  EXPECT_EQ(s, LabelSet{LifeMode::kWork});
  EXPECT_EQ(kLifeModes.size(), 2u);
}

TEST(EventInvariants, DetectsViolations) {
  auto e = make_event("a", 0, "2024-01-02T09:00:00Z");
  EXPECT_EQ(check_invariants(e), "");
  auto bad = e;
  bad.end.utc_seconds = bad.start.utc_seconds - 1;
  EXPECT_NE(check_invariants(bad), "");
  bad = e;
  bad.updated.utc_seconds = bad.created.utc_seconds - 1;
  EXPECT_NE(check_invariants(bad), "");
  bad = e;
  bad.attendee_count = -1;
  EXPECT_NE(check_invariants(bad), "");
}

TEST(BuildStore, PartitionsByUser) {
  std::vector<ScheduleEvent> ev;
  for (int i = 0; i < 3; ++i) ev.push_back(make_event("a" + std::to_string(i), 7, "2024-01-0" + std::to_string(i + 1) + "T09:00:00Z"));
  for (int i = 0; i < 2; ++i) ev.push_back(make_event("b" + std::to_string(i), 9, "2024-01-0" + std::to_string(i + 1) + "T09:00:00Z"));
  const auto store = build_store(ev);
  ASSERT_EQ(store.size(), 2u);
  EXPECT_EQ(store.at(7).events.size(), 3u);
  EXPECT_EQ(store.at(9).events.size(), 2u);
}

TEST(BuildStore, EmptyInput) { EXPECT_TRUE(build_store({}).empty()); }

TEST(BuildStore, ActiveMonthsCountsDistinctMonths) {
  const auto store = build_store({make_event("a", 0, "2024-01-10T09:00:00Z"), make_event("b", 0, "2024-03-10T09:00:00Z"),
                                  make_event("c", 0, "2024-03-20T09:00:00Z")});
  EXPECT_EQ(store.at(0).active_months, 2);
}

TEST(BuildStore, ActiveMonthsUseLocalTime) {
  // 2024-01-31T20:00Z is already February in Seoul.
  const auto store = build_store({make_event("a", 0, "2024-02-01T05:00:00+09:00"), make_event("b", 0, "2024-01-15T09:00:00Z")});
  EXPECT_EQ(store.at(0).active_months, 2);
}

TEST(BuildStore, DuplicateIdNamesOffender) {
  try {
    build_store({make_event("dup", 0, "2024-01-10T09:00:00Z"), make_event("dup", 1, "2024-01-11T09:00:00Z")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateEvent);
    EXPECT_EQ(e.detail(), "dup");
  }
}

TEST(BuildStore, SortedConservedDeterministic) {
  auto corpus = small_corpus(5);
  auto shuffled = corpus.events;
  std::mt19937 gen(5);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto a = build_store(corpus.events);
  const auto b = build_store(shuffled);
  EXPECT_EQ(total_events(a), corpus.events.size());
  for (const auto& [id, rec] : a) {
    EXPECT_EQ(rec.events, b.at(id).events);
    EXPECT_EQ(rec.active_months, b.at(id).active_months);
    EXPECT_GE(rec.active_months, 1);
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
      EXPECT_EQ(rec.events[i].user_id, id);
      if (i > 0) {
        EXPECT_LE(rec.events[i - 1].start.utc_seconds, rec.events[i].start.utc_seconds);
      }
    }
  }
  std::ostringstream sa, sb;
  write_log(sa, a);
  write_log(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Errors, MessageCarriesCode) {
  Error e(ErrorCode::kEmptyCorpus, "no lines");
  EXPECT_STREQ(e.what(), "empty corpus: no lines");
}
