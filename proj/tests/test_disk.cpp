#include <cmath>
#include <sstream>

#include "doctest.h"
#include "quatlink/disk_diagram.hpp"

using namespace quatlink;
using lens::DiskDiagram;

namespace {

std::string two_chord_text() {
  // boundary order from angle 0: (+1, -1, +2, -2); one inversion
  std::ostringstream os;
  os.precision(17);
  os << "DKD 1\ncount 2\npoints\n";
  auto pt = [&](int id, const char* lab, double turns) {
    os << "B " << id << " " << lab << " " << turns << "\n";
  };
  pt(1, "+1", 0.05);
  pt(2, "-1", 0.30);
  pt(3, "+2", 0.55);
  pt(4, "-2", 0.80);
  os << "crossings\nstrands\n";
  auto chord = [&](int ida, double ta, int idb, double tb) {
    double tau = 6.283185307179586;
    double ax = std::cos(tau * ta), ay = std::sin(tau * ta);
    double bx = std::cos(tau * tb), by = std::sin(tau * tb);
    os << "S P" << ida << " P" << idb << "  " << ax << " " << ay << "  "
       << 0.8 * ax << " " << 0.8 * ay << "  " << 0.8 * bx << " " << 0.8 * by
       << "  " << bx << " " << by << "\n";
  };
  chord(1, 0.05, 2, 0.30);
  chord(3, 0.55, 4, 0.80);
  return os.str();
}

}  // namespace

TEST_CASE("disk parse, validate, trace") {
  auto d = lens::parse_disk(two_chord_text());
  CHECK(d.n == 2);
  auto rep = lens::validate_disk(d);
  INFO(rep.to_string());
  CHECK(rep.ok());
  auto comps = lens::trace_disk_components(d);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].cls == 1);
  CHECK(comps[1].cls == 1);
  auto counts = lens::lens_lift_counts(d);
  CHECK(counts.s3 == 2);
  CHECK(counts.rp3 == 2);
  // round trip
  auto d2 = lens::parse_disk(lens::serialize(d));
  CHECK(lens::serialize(d2) == lens::serialize(d));
  // duplicate label rejected at validation
  auto bad = d;
  bad.boundary_points[1].label = 1;
  CHECK(!lens::validate_disk(bad).ok());
}

TEST_CASE("empty disk diagram is valid") {
  auto d = lens::parse_disk("DKD 1\ncount 0\n");
  CHECK(lens::validate_disk(d).ok());
  CHECK(lens::trace_disk_components(d).empty());
}

TEST_CASE("class arithmetic for lens lifts") {
  CHECK(lens::s3_count_for_class(0) == 4);
  CHECK(lens::s3_count_for_class(1) == 1);
  CHECK(lens::s3_count_for_class(2) == 2);
  CHECK(lens::rp3_count_for_class(0) == 2);
  CHECK(lens::rp3_count_for_class(1) == 1);
  CHECK(lens::rp3_count_for_class(2) == 2);
}

TEST_CASE("closed circle in the disk has class 0") {
  std::string text =
      "DKD 1\ncount 0\nstrands\n"
      "S closed  0.3 0  0 0.3  -0.3 0  0 -0.3  0.3 0\n";
  auto d = lens::parse_disk(text);
  CHECK(lens::validate_disk(d).ok());
  auto comps = lens::trace_disk_components(d);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].cls == 0);
  CHECK(lens::lens_lift_counts(d).s3 == 4);
}

TEST_CASE("standardize sorts boundary labels with one transposition") {
  auto d = lens::parse_disk(two_chord_text());
  auto std_d = lens::standardize(d);
  CHECK(std_d.swap_count == 1);
  auto rep = lens::validate_disk(std_d.diagram);
  INFO(rep.to_string());
  CHECK(rep.ok());
  // exactly one new crossing
  CHECK(std_d.diagram.crossings.size() == 1);
  // boundary order is now (+1, +2, -1, -2) counterclockwise from 0
  auto pts = std_d.diagram.boundary_points;
  std::sort(pts.begin(), pts.end(),
            [](auto& a, auto& b) { return a.angle < b.angle; });
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].label == 1);
  CHECK(pts[1].label == 2);
  CHECK(pts[2].label == -1);
  CHECK(pts[3].label == -2);
  // adapted layout: -t a quarter turn counterclockwise of +t
  for (auto& p : std_d.diagram.boundary_points) {
    if (p.label > 0) {
      auto* q = std_d.diagram.find_label(-p.label);
      double dd = q->angle - p.angle - 0.25;
      dd -= std::round(dd);
      CHECK(std::abs(dd) < 1e-12);
    }
  }
  // component count and classes preserved
  auto comps = lens::trace_disk_components(std_d.diagram);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].cls == 1);
  CHECK(comps[1].cls == 1);

  // standardizing again needs no transpositions
  auto again = lens::standardize(std_d.diagram);
  CHECK(again.swap_count == 0);
  CHECK(lens::validate_disk(again.diagram).ok());
}

TEST_CASE("mirror_invert is an involution on the canonical code") {
  auto d0 = lens::parse_disk(two_chord_text());
  auto d = lens::standardize(d0).diagram;  // has one crossing
  auto m = lens::mirror_invert(d);
  auto rep = lens::validate_disk(m);
  INFO(rep.to_string());
  CHECK(rep.ok());
  auto mm = lens::mirror_invert(m);
  CHECK(lens::validate_disk(mm).ok());
  CHECK(lens::canonical_disk_code(mm) == lens::canonical_disk_code(d));
}

TEST_CASE("restrict_component keeps one component") {
  auto d = lens::parse_disk(two_chord_text());
  auto r0 = lens::restrict_component(d, 0);
  CHECK(lens::validate_disk(r0).ok());
  CHECK(r0.n == 1);
  auto comps = lens::trace_disk_components(r0);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].cls == 1);
}
