#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "support.hpp"

using namespace caltrend;
using namespace testing_support;

namespace {

std::string serialized(const SynthCorpus& c) {
  std::ostringstream out;
  write_log(out, c.events);
  write_truth(out, c);
  return out.str();
}

FeatureMatrix pipeline_features(const SynthCorpus& c) {
  return build_feature_matrix(label_store(build_store(c.events), ConceptLexicon::defaults()));
}

}  // namespace

TEST(Synth, NoWeekendProbabilityMeansNoWeekendEvents) {
  auto p = office_persona();
  p.weekend_event_probability = 0.0;
  const auto c = generate({{p, 20}}, {});
  const auto m = pipeline_features(c);
  ASSERT_EQ(m.rows.size(), 20u);
  for (const auto& r : m.rows) EXPECT_EQ(r[kWeekendRatio], 0.0);
  for (const auto& e : c.events) {
    const int wd = oracle::local_tm(e).tm_wday;
    EXPECT_TRUE(wd >= 1 && wd <= 5);
  }
}

TEST(Synth, SameSeedByteIdentical) {
  EXPECT_EQ(serialized(small_corpus(5, 42)), serialized(small_corpus(5, 42)));
  EXPECT_NE(serialized(small_corpus(5, 42)), serialized(small_corpus(5, 43)));
  EXPECT_EQ(serialized(small_corpus(3, 1, 50)), serialized(small_corpus(3, 1, 50)));
}

TEST(Synth, OfficeDaytimeMassAfterExtraction) {
  const auto m = pipeline_features(generate({{office_persona(), 100}}, {}));
  double mean = 0.0;
  for (const auto& r : m.rows) mean += r[kMorning] + r[kAfternoon];
  mean /= static_cast<double>(m.rows.size());
  EXPECT_GE(mean, 0.7);
}

TEST(Synth, PassesIngestionWithoutRejects) {
  const auto c = small_corpus(10, 5, 200);
  std::stringstream buf;
  write_log(buf, c.events);
  const auto parsed = parse_log(buf);
  EXPECT_EQ(parsed.report.rejected, 0u);
  EXPECT_EQ(parsed.report.parsed, c.events.size());
  for (std::size_t i = 0; i < c.events.size(); ++i) {
    EXPECT_EQ(serialize_event(parsed.events[i]), serialize_event(c.events[i]));
  }
}

TEST(Synth, TruthSidecarCoversEveryUser) {
  const auto c = small_corpus(4, 2);
  ASSERT_EQ(c.truth.size(), 12u);
  std::set<UserId> users;
  for (const auto& e : c.events) users.insert(e.user_id);
  EXPECT_EQ(users.size(), 12u);
  std::map<std::string, int> per;
  for (const auto& [uid, name] : c.truth) {
    EXPECT_TRUE(users.count(uid));
    ++per[name];
  }
  EXPECT_EQ(per, (std::map<std::string, int>{{"family", 4}, {"night_owl", 4}, {"office", 4}}));
  std::ostringstream out;
  write_truth(out, c);
  EXPECT_EQ(out.str().rfind("0\toffice\n", 0), 0u);
}

TEST(Synth, PersonaSeparability) {
  const auto c = small_corpus(30, 11);
  const auto m = standardize(pipeline_features(c));
  std::map<UserId, std::string> truth(c.truth.begin(), c.truth.end());
  std::map<std::string, std::vector<FeatureVector>> groups;
  for (std::size_t i = 0; i < m.rows.size(); ++i) groups[truth.at(m.user_ids[i])].push_back(m.rows[i]);
  ASSERT_EQ(groups.size(), 3u);
  std::map<std::string, FeatureVector> centroid;
  double spread = 0.0;
  for (const auto& [name, rows] : groups) {
    FeatureVector ctr{};
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) ctr[j] += r[j] / static_cast<double>(rows.size());
    }
    centroid[name] = ctr;
    double ss = 0.0;
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) ss += (r[j] - ctr[j]) * (r[j] - ctr[j]);
    }
    spread = std::max(spread, std::sqrt(ss / static_cast<double>(rows.size())));
  }
  for (const auto& [a, ca] : centroid) {
    for (const auto& [b, cb] : centroid) {
      if (a >= b) continue;
      double d = 0.0;
      for (std::size_t j = 0; j < kFeatureCount; ++j) d += (ca[j] - cb[j]) * (ca[j] - cb[j]);
      EXPECT_GT(std::sqrt(d), spread) << a << " vs " << b;
    }
  }
}

TEST(Synth, EventsSatisfyModelInvariants) {
  const auto c = small_corpus(3, 9);
  std::set<std::string> ids;
  for (const auto& e : c.events) {
    EXPECT_LE(e.start.utc_seconds, e.end.utc_seconds);
    EXPECT_LE(e.created.utc_seconds, e.updated.utc_seconds);
    EXPECT_FALSE(e.event_id.empty());
    EXPECT_TRUE(ids.insert(e.event_id).second);
    EXPECT_TRUE(e.labels.empty());
  }
}

TEST(Synth, PlantsAreCounted) {
  const auto c = small_corpus(2, 3, 40);
  EXPECT_EQ(c.planted, 40);
  EXPECT_FALSE(c.names.empty());
}

TEST(Synth, ValidationNamesTheField) {
  auto check = [](PersonaSpec p, const std::string& field) {
    try {
      generate({{p, 1}}, {});
      ADD_FAILURE() << "expected validation error for " << field;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kValidation);
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  auto p = office_persona();
  p.weekend_event_probability = 1.5;
  check(p, "weekend_event_probability");
  p = office_persona();
  p.band_weights = {0.5, 0.5, 0.5, 0.0, 0.0};
  check(p, "band_weights");
  p = office_persona();
  p.band_weights = {0.2, 0.2, 0.2, 0.2, 0.2 + 1e-8};
  check(p, "band_weights");
  p = office_persona();
  p.modification_probability = -0.1;
  check(p, "modification_probability");
  p = office_persona();
  p.months_active = 0;
  check(p, "months_active");
  p = office_persona();
  p.name.clear();
  check(p, "name");
  p = office_persona();
  p.work_templates.clear();
  check(p, "work_templates");
  EXPECT_CALTREND_ERROR(generate({{office_persona(), 0}}, {}), ErrorCode::kValidation);
  EXPECT_CALTREND_ERROR(generate({}, {}), ErrorCode::kValidation);
}

TEST(Synth, BandWeightToleranceAccepted) {
  auto p = office_persona();
  p.band_weights = {0.2, 0.2, 0.2, 0.2, 0.2 + 1e-12};
  EXPECT_NO_THROW(p.validate());
}

TEST(Synth, FullScaleShape) {
  const auto groups = full_scale_personas();
  int users = 0;
  for (const auto& g : groups) {
    users += g.user_count;
    EXPECT_NO_THROW(g.persona.validate());
  }
  EXPECT_EQ(users, 1025);
}
