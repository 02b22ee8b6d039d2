#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "report_fixture.hpp"
#include "test_util.hpp"
#include "wepadim/results_csv.hpp"

namespace wepadim {
namespace {

bool same_record(const SweepRecord& a, const SweepRecord& b) {
  const auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.class_name == b.class_name && a.backbone == b.backbone && a.config == b.config &&
         eq(a.image_auc, b.image_auc) && eq(a.pixel_auc, b.pixel_auc) && a.fit_seconds == b.fit_seconds &&
         a.score_seconds == b.score_seconds && a.status == b.status;
}

TEST(ResultsCsv, FormatsOneLine) {
  SweepRecord r = test::fixture_record("bottle", "resnet18", "db2", "LL,LH", 2, 0.01, 0.5, 0.1);
  r.fit_seconds = 1.25;
  EXPECT_EQ(format_record(r), "bottle,resnet18,db2,1,LH_LL,2,0.01,0.5,0.10000000000000001,1.25,0,ok");
  EXPECT_EQ(record_key(r), "bottle|resnet18|db2|1|LH_LL|2|0.01");
}

TEST(ResultsCsv, RoundTripIsExact) {
  auto records = test::report_fixture_records();
  records[0].image_auc = 1.0 / 3.0;
  records[0].fit_seconds = 0.123456789012345678;
  std::stringstream ss;
  write_results(records, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kResultsHeader);
  const auto back = read_results(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_TRUE(same_record(back[i], records[i])) << i;
  EXPECT_EQ(back[3].status, "failed:numerical error: not positive definite");
}

TEST(ResultsCsv, IgnoresInterruptedLastLine) {
  const auto records = test::report_fixture_records();
  std::stringstream full;
  write_results(records, full);
  std::string text = full.str();
  text += "cable,resnet18,haar,1,LL,2,0.";
  std::stringstream partial(text);
  EXPECT_EQ(read_results(partial).size(), records.size());
}

TEST(ResultsCsv, FileRoundTripAndErrors) {
  test::TempDir dir("csv");
  write_results(test::report_fixture_records(), dir / "r.csv");
  EXPECT_EQ(read_results(dir / "r.csv").size(), 10u);

  std::stringstream bad_header("class,backbone\n");
  EXPECT_EQ(test::error_kind([&] { read_results(bad_header); }), ErrorKind::format);
  std::stringstream short_row(std::string(kResultsHeader) + "\na,b,c\n");
  EXPECT_EQ(test::error_kind([&] { read_results(short_row); }), ErrorKind::format);
  EXPECT_EQ(test::error_kind([&] { read_results(dir / "missing.csv"); }), ErrorKind::io);
}

}  // namespace
}  // namespace wepadim
