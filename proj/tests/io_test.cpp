#include <gtest/gtest.h>

#include <sstream>

#include "mir/instance.hpp"
#include "mir/report.hpp"
#include "mir/verify.hpp"

using namespace mir;

namespace {

TEST(InstanceIo, RoundTripsEveryBidderKind) {
  Instance inst;
  inst.name = "mixed";
  inst.seed = 5;
  inst.profile.m = 4;
  inst.profile.denominator = 64;
  inst.profile.bidders = {
      Valuation::additive(4, {1, 2, 3, 4}),
      Valuation::coverage(4, {2, 3}, {1, 2, 3, 0}),
      Valuation::xos(4, {{1, 0, 0, 2}, {0, 1, 1, 0}}),
      Valuation::mild_desires(4, 2, {make_set({0, 1})}),
      Valuation::almost_single_minded(4, make_set({2})),
      Valuation::induced_single_minded(4, make_set({1, 3})),
      Valuation::explicit_table(4, {0, 1, 1, 2, 1, 2, 2, 3, 0, 1, 1, 2, 1, 2, 2, 3}),
  };

  std::ostringstream os;
  write_instance(os, inst);
  std::istringstream is(os.str());
  Instance back = read_instance(is);

  EXPECT_EQ(back.name, inst.name);
  EXPECT_EQ(back.seed, inst.seed);
  EXPECT_EQ(back.profile.m, 4);
  EXPECT_EQ(back.profile.denominator, 64);
  ASSERT_EQ(back.profile.n(), inst.profile.n());
  for (std::uint64_t s = 0; s < 16; ++s)
    for (int i = 0; i < inst.profile.n(); ++i)
      EXPECT_EQ(back.profile.bidders[i].value(ItemSet(s)),
                inst.profile.bidders[i].value(ItemSet(s)));

  std::ostringstream os2;
  write_instance(os2, back);
  EXPECT_EQ(os.str(), os2.str());
}

TEST(InstanceIo, GenIsByteIdenticalAcrossRuns) {
  for (const char* kind : {"additive", "coverage", "mild_desires", "single_minded",
                           "explicit"}) {
    Instance a = gen_instance(kind, 6, 3, 42u);
    Instance b = gen_instance(kind, 6, 3, 42u);
    std::ostringstream osa, osb;
    write_instance(osa, a);
    write_instance(osb, b);
    EXPECT_EQ(osa.str(), osb.str()) << kind;

    Instance c = gen_instance(kind, 6, 3, 43u);
    std::ostringstream osc;
    write_instance(osc, c);
    EXPECT_NE(osa.str(), osc.str()) << kind;
  }
}

TEST(InstanceIo, SingleMindedFamilyHasOptEqualN) {
  Instance inst = gen_instance("single_minded", 8, 4, 13u);
  EXPECT_EQ(brute_force_opt(inst.profile).welfare, 4);
}

ReportRecord sample_record() {
  ReportRecord r;
  r.mechanism = "chunking";
  r.instance = "explicit_m8_n3_s7";
  r.seed = 7;
  r.k = 2;
  r.welfare = 41;
  r.has_opt = true;
  r.opt = 52;
  r.payments = {3, 0, 11};
  r.queries = {129, 129, 129};
  r.z = 17;
  return r;
}

TEST(ReportIo, CsvRoundTrip) {
  std::vector<ReportRecord> records = {sample_record()};
  ReportRecord no_opt = sample_record();
  no_opt.has_opt = false;
  no_opt.opt = 0;
  records.push_back(no_opt);

  std::ostringstream os;
  write_report_csv(os, records);
  std::istringstream is(os.str());
  auto back = read_report_csv(is);
  ASSERT_EQ(back.size(), records.size());
  EXPECT_EQ(back[0], records[0]);
  EXPECT_EQ(back[1], records[1]);
}

TEST(ReportIo, JsonlRoundTrip) {
  std::vector<ReportRecord> records = {sample_record()};
  std::ostringstream os;
  write_report_jsonl(os, records);
  std::istringstream is(os.str());
  auto back = read_report_jsonl(is);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], records[0]);
}

TEST(ReportIo, EmptyRecordsGiveHeaderOnlyCsv) {
  std::ostringstream os;
  write_report_csv(os, {});
  EXPECT_EQ(os.str(), std::string(report_csv_header()) + "\n");
}

TEST(ReportIo, RatioIsRecomputableFromColumns) {
  auto r = sample_record();
  std::ostringstream os;
  write_report_csv(os, {r});
  // opt / welfare = 52/41 = 1.268293 at 6 digits.
  EXPECT_NE(os.str().find("1.268293"), std::string::npos);
  EXPECT_EQ(detail::ratio_string(0, 0), "1.000000");
}

}  // namespace
