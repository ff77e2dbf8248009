#include <gtest/gtest.h>

#include "replan/error.h"
#include "replan/timetable_io.h"

#include "support/random_instance.h"
#include "support/toy.h"

using namespace replan;
using namespace replan::test;

namespace {

void expect_same(timetable const& a, timetable const& b) {
  ASSERT_EQ(a.n_stops(), b.n_stops());
  ASSERT_EQ(a.n_trips(), b.n_trips());
  ASSERT_EQ(a.n_connections(), b.n_connections());
  for (auto i = 0U; i != a.n_connections(); ++i) {
    EXPECT_EQ(a.connections()[i], b.connections()[i]);
  }
  ASSERT_EQ(a.footpaths().size(), b.footpaths().size());
  for (auto i = 0U; i != a.footpaths().size(); ++i) {
    EXPECT_EQ(a.footpaths()[i], b.footpaths()[i]);
  }
  for (auto i = 0U; i != a.n_stops(); ++i) {
    EXPECT_EQ(a.stops()[i].id_, b.stops()[i].id_);
  }
}

}  // namespace

TEST(timetable_io, roundtrip_toy_and_random) {
  auto const toy = make_toy();
  auto const bytes = serialize(toy);
  expect_same(toy, deserialize_timetable(bytes));
  EXPECT_EQ(serialize(deserialize_timetable(bytes)), bytes);

  std::mt19937_64 rng{1};
  auto const tt = random_timetable(rng);
  expect_same(tt, deserialize_timetable(serialize(tt)));
  EXPECT_EQ(fingerprint(tt), fingerprint(deserialize_timetable(serialize(tt))));
}

TEST(timetable_io, fingerprint_distinguishes) {
  EXPECT_NE(fingerprint(make_toy(300)), fingerprint(make_toy(0)));
}

TEST(timetable_io, corruption_is_detected) {
  auto bytes = serialize(make_toy());
  auto flipped = bytes;
  flipped.back() ^= 0xFFU;
  try {
    deserialize_timetable(flipped);
    FAIL();
  } catch (error const& e) {
    EXPECT_EQ(e.kind(), error_kind::fingerprint);
  }
  bytes.resize(bytes.size() / 2U);
  EXPECT_THROW(deserialize_timetable(bytes), error);
  auto bad_magic = serialize(make_toy());
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_timetable(bad_magic), error);
}

TEST(timetable_io, file_roundtrip) {
  auto const path = std::filesystem::temp_directory_path() / "replan_io_test" / "toy.rptt";
  write_timetable(path, make_toy());
  expect_same(make_toy(), read_timetable(path));
  std::filesystem::remove_all(path.parent_path());
  EXPECT_THROW(read_timetable(path), error);
}
