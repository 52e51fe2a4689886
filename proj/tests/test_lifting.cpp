#include <cstdlib>

#include "doctest.h"
#include "quatlink/lifting.hpp"

using namespace quatlink;

namespace {
std::string fixture_path(const std::string& name) {
  const char* dir = std::getenv("QUATLINK_FIXTURES");
  REQUIRE(dir != nullptr);
  return std::string(dir) + "/" + name;
}
}  // namespace

TEST_CASE("twist block basics") {
  for (int n = 1; n <= 5; ++n) {
    auto tw = lift::TwistBlock::full_twist(n);
    CHECK(tw.crossing_count() == n * (n - 1));
    auto perm = tw.permutation();
    for (int i = 1; i <= n; ++i) CHECK(perm[i] == i);
  }
  // closure of the full twist on 2 strands is the positive Hopf link
  auto tw2 = lift::TwistBlock::full_twist(2);
  auto pd2 = lift::braid_closure(2, tw2.word);
  CHECK(pd::components(pd2).count == 2);
  auto lk = pd::linking_matrix(pd2);
  CHECK(lk[0][1] == 1);
  CHECK(pd::writhe(pd2) == 2);
  // full twist writhe is +n(n-1)
  for (int n = 2; n <= 4; ++n) {
    auto tw = lift::TwistBlock::full_twist(n);
    auto cl = lift::braid_closure(n, tw.word);
    CHECK(pd::writhe(cl) == n * (n - 1));
  }
}

TEST_CASE("empty diagram lifts to the empty disk diagram") {
  auto d = sqd::parse("SQD 1\ncounts 0 0 0\n");
  auto disk = lift::lift_to_disk(d);
  CHECK(disk.n == 0);
  CHECK(disk.strands.empty());
  CHECK(lens::validate_disk(disk).ok());
  auto sd = lens::standardize(disk);
  auto s3 = lift::lift_to_s3(sd);
  CHECK(pd::components(s3).count == 0);
}

TEST_CASE("closed circle lifts to two circles in the disk, eight in S3") {
  std::string text =
      "SQD 1\ncounts 0 0 0\nstrands\n"
      "S closed  0.62 0.47  0.72 0.47  0.72 0.57  0.62 0.57  0.62 0.47\n";
  auto d = sqd::parse(text);
  REQUIRE(sqd::validate(d).ok());
  auto disk = lift::lift_to_disk(d);
  auto rep = lens::validate_disk(disk);
  INFO(rep.to_string());
  CHECK(rep.ok());
  auto comps = lens::trace_disk_components(disk);
  CHECK(comps.size() == 2);  // class [1]: two components in the double cover
  auto s3 = lift::lift_to_s3(lens::standardize(disk));
  CHECK(pd::components(s3).count == 8);
}

TEST_CASE("hopf_seed lifts to a 2-component disk diagram") {
  auto d = sqd::parse_file(fixture_path("hopf_seed.sqd"));
  auto disk = lift::lift_to_disk(d);
  auto rep = lens::validate_disk(disk);
  INFO(rep.to_string());
  CHECK(rep.ok());
  auto comps = lens::trace_disk_components(disk);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].cls == 1);
  CHECK(comps[1].cls == 1);
  auto counts = lens::lens_lift_counts(disk);
  CHECK(counts.s3 == 2);
}

TEST_CASE("hopf_seed pipeline consistency") {
  auto d = sqd::parse_file(fixture_path("hopf_seed.sqd"));
  auto rep = lift::predict_and_check(d);
  INFO(rep.to_string());
  CHECK(rep.ok());
}

TEST_CASE("hopf_seed S3 lift is the Hopf link") {
  auto d = sqd::parse_file(fixture_path("hopf_seed.sqd"));
  auto disk = lift::lift_to_disk(d);
  auto sd = lens::standardize(disk);
  auto s3 = pd::simplify(lift::lift_to_s3(sd));
  auto comps = pd::components(s3);
  REQUIRE(comps.count == 2);
  auto lk = pd::linking_matrix(s3);
  INFO("lk01=", lk[0][1], " lk00=", lk[0][0], " lk11=", lk[1][1]);
  CHECK(std::abs(lk[0][1]) == 1);
  // the paper's value with coherent orientations
  CHECK(lk[0][1] == 1);
  // jones matches the 2-crossing positive Hopf oracle value
  auto v = pd::jones(s3);
  LaurentPoly hopf_plus =
      LaurentPoly::monomial(-1, -2) + LaurentPoly::monomial(-1, -10);
  INFO("jones: ", v.to_string("A"));
  CHECK(v == hopf_plus);
}
