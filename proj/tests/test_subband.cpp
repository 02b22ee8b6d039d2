#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"
#include "wepadim/subband.hpp"

namespace wepadim {
namespace {

TEST(SubbandSet, ParsesEverySpelling) {
  const SubbandSet expected({Subband::LL, Subband::LH, Subband::HL});
  EXPECT_EQ(SubbandSet::parse("LL,LH,HL"), expected);
  EXPECT_EQ(SubbandSet::parse("HL_LH_LL"), expected);
  EXPECT_EQ(SubbandSet::parse("HL+LL+LH"), expected);
  EXPECT_EQ(SubbandSet::parse("all").size(), 4u);
  EXPECT_EQ(SubbandSet::parse("HH").members(), (std::vector<Subband>{Subband::HH}));
}

TEST(SubbandSet, KeyIsAlphabetical) {
  EXPECT_EQ(SubbandSet::parse("LL,LH,HL").key(), "HL_LH_LL");
  EXPECT_EQ(SubbandSet::parse("all").key(), "HH_HL_LH_LL");
  EXPECT_EQ(SubbandSet::parse("LL").key(), "LL");
}

TEST(SubbandSet, MembersInCanonicalOrder) {
  EXPECT_EQ(SubbandSet::parse("HH,LL,HL").members(),
            (std::vector<Subband>{Subband::LL, Subband::HL, Subband::HH}));
}

TEST(SubbandSet, FifteenDistinctCombinations) {
  const auto all = SubbandSet::all_nonempty();
  ASSERT_EQ(all.size(), 15u);
  std::set<std::string> keys;
  std::size_t with_ll = 0;
  for (const auto& s : all) {
    keys.insert(s.key());
    with_ll += s.contains(Subband::LL);
  }
  EXPECT_EQ(keys.size(), 15u);
  EXPECT_EQ(with_ll, 8u);
  for (const auto& s : all) EXPECT_EQ(SubbandSet::parse(s.key()), s);
}

TEST(SubbandSet, RejectsBadInput) {
  EXPECT_EQ(test::error_kind([] { SubbandSet::parse(""); }), ErrorKind::config);
  EXPECT_EQ(test::error_kind([] { SubbandSet::parse("LL,LL"); }), ErrorKind::config);
  EXPECT_EQ(test::error_kind([] { SubbandSet::parse("LL,XY"); }), ErrorKind::config);
  EXPECT_EQ(test::error_kind([] { SubbandSet(std::vector<Subband>{}); }), ErrorKind::config);
}

}  // namespace
}  // namespace wepadim
