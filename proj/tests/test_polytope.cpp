#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "bcfb/polytope.hpp"
#include "bcfb/rng.hpp"
#include "doctest.h"

using namespace bcfb;

namespace {

LinIneqSystem nonneg_system(std::vector<std::string> vars) {
  LinIneqSystem sys;
  sys.vars = std::move(vars);
  for (std::size_t i = 0; i < sys.vars.size(); ++i) {
    std::vector<double> a(sys.vars.size(), 0.0);
    a[i] = -1.0;
    sys.add(std::move(a), 0.0);
  }
  return sys;
}

// random feasible system: positive orthant corner plus random cut rows
LinIneqSystem random_system(RngStream& rng, int nvars, int extra_rows) {
  std::vector<std::string> vars;
  for (int i = 0; i < nvars; ++i) vars.push_back("v" + std::to_string(i));
  LinIneqSystem sys = nonneg_system(std::move(vars));
  for (int r = 0; r < extra_rows; ++r) {
    std::vector<double> a(nvars);
    for (auto& v : a) v = 2.0 * rng.next_double() - 1.0;
    sys.add(std::move(a), 0.2 + 1.3 * rng.next_double());
  }
  return sys;
}

}  // namespace

TEST_CASE("lp on a simplex") {
  LinIneqSystem sys = nonneg_system({"x", "y"});
  sys.add({1.0, 1.0}, 1.0);
  LpResult r = lp_maximize(sys, {1.0, 1.0});
  REQUIRE(r.status == LpResult::kOptimal);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

  r = lp_maximize(sys, {1.0, -1.0});
  REQUIRE(r.status == LpResult::kOptimal);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lp detects unbounded and infeasible problems") {
  LinIneqSystem open;
  open.vars = {"x"};
  open.add({-1.0}, 0.0);
  CHECK(lp_maximize(open, {1.0}).status == LpResult::kUnbounded);

  LinIneqSystem bad;
  bad.vars = {"x"};
  bad.add({1.0}, -1.0);
  bad.add({-1.0}, 0.0);
  CHECK(lp_maximize(bad, {1.0}).status == LpResult::kInfeasible);

  // negative rhs but feasible: x >= 1 (written -x <= -1), x <= 3
  LinIneqSystem shifted;
  shifted.vars = {"x"};
  shifted.add({-1.0}, -1.0);
  shifted.add({1.0}, 3.0);
  LpResult r = lp_maximize(shifted, {-1.0});
  REQUIRE(r.status == LpResult::kOptimal);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("fm elimination on a hand example") {
  LinIneqSystem sys = nonneg_system({"x", "y"});
  sys.add({1.0, 1.0}, 2.0);
  LinIneqSystem got = fm_eliminate(sys, "y");
  REQUIRE(got.vars == std::vector<std::string>{"x"});
  // expect exactly x <= 2 and -x <= 0
  bool upper = false, lower = false;
  for (const auto& r : got.rows) {
    if (r.a[0] > 0.5) upper = std::fabs(r.b - 2.0) < 1e-12;
    if (r.a[0] < -0.5) lower = std::fabs(r.b) < 1e-12;
  }
  CHECK(upper);
  CHECK(lower);
  CHECK(got.rows.size() == 2);
}

TEST_CASE("fm projection matches the one variable interval oracle") {
  RngStream rng(424242);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    RngStream r = rng.child(trial);
    LinIneqSystem sys = random_system(r, 4, 8);
    LinIneqSystem proj = fm_eliminate(sys, "v0");
    int vi = sys.var("v0");
    for (int s = 0; s < 200; ++s) {
      std::vector<double> x(3);
      for (auto& v : x) v = -0.5 + 2.5 * r.next_double();
      // membership in the projection
      bool proj_ok = true;
      double proj_margin = std::numeric_limits<double>::infinity();
      for (const auto& row : proj.rows) {
        double lhs = 0.0;
        for (int k = 0; k < 3; ++k) lhs += row.a[k] * x[k];
        proj_margin = std::min(proj_margin, std::fabs(row.b - lhs));
        if (lhs > row.b) proj_ok = false;
      }
      // direct certificate: does some v0 extend x?
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      bool zero_ok = true;
      double orig_margin = std::numeric_limits<double>::infinity();
      for (const auto& row : sys.rows) {
        double rest = 0.0;
        int k2 = 0;
        for (std::size_t k = 0; k < row.a.size(); ++k) {
          if (static_cast<int>(k) == vi) continue;
          rest += row.a[k] * x[k2++];
        }
        double c = row.a[vi];
        if (std::fabs(c) < 1e-12) {
          orig_margin = std::min(orig_margin, std::fabs(row.b - rest));
          if (rest > row.b) zero_ok = false;
        } else if (c > 0) {
          hi = std::min(hi, (row.b - rest) / c);
        } else {
          lo = std::max(lo, (row.b - rest) / c);
        }
      }
      bool orig_ok = zero_ok && lo <= hi + 1e-9;
      orig_margin = std::min(orig_margin, std::fabs(hi - lo));
      // skip knife-edge points where tolerances may disagree
      if (proj_margin < 1e-6 || orig_margin < 1e-6) continue;
      CHECK(proj_ok == orig_ok);
      ++checked;
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("redundant rows are removed and needed rows kept") {
  LinIneqSystem sys = nonneg_system({"x", "y"});
  sys.add({1.0, 0.0}, 1.0);
  sys.add({0.0, 1.0}, 1.0);
  sys.add({1.0, 1.0}, 3.0);   // implied by the two caps
  sys.add({1.0, 1.0}, 1.5);   // binding corner cut
  sys.add({0.5, 0.5}, 0.75);  // duplicate of the cut after scaling
  LinIneqSystem got = remove_redundant(sys);
  CHECK(got.rows.size() == 5);  // 2 sign rows + 2 caps + 1 cut
  LpResult r = lp_maximize(got, {1.0, 1.0});
  REQUIRE(r.status == LpResult::kOptimal);
  CHECK(r.value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("elimination order does not change the projected region") {
  RngStream rng(515151);
  for (int trial = 0; trial < 12; ++trial) {
    RngStream r = rng.child(trial);
    std::vector<std::string> vars = {"R0", "R1", "R2", "u", "w"};
    LinIneqSystem sys = nonneg_system(vars);
    for (int row = 0; row < 9; ++row) {
      std::vector<double> a(5);
      for (auto& v : a) v = 2.0 * r.next_double() - 1.0;
      sys.add(std::move(a), 0.2 + 1.3 * r.next_double());
    }
    RateRegion3 uw = region_from_system(fm_eliminate(fm_eliminate(sys, "u"), "w"));
    RateRegion3 wu = region_from_system(fm_eliminate(fm_eliminate(sys, "w"), "u"));
    CHECK(region_equal(uw, wu, 1e-7));
  }
}

TEST_CASE("vertices of the unit simplex") {
  RateRegion3 simplex = make_region({{{1.0, 1.0, 1.0}, 1.0}});
  auto v = vertices(simplex);
  REQUIRE(v.size() == 4);
  CHECK(v[0][0] == doctest::Approx(0.0));
  CHECK(v[3][0] == doctest::Approx(1.0));
  CHECK(contains_point(simplex, {0.2, 0.3, 0.2}, 1e-9));
  CHECK(!contains_point(simplex, {0.5, 0.4, 0.2}, 1e-9));
}

TEST_CASE("region equality is sensitive at the stated tolerance") {
  RateRegion3 a = make_region({{{1.0, 0.0, 0.0}, 1.0},
                               {{0.0, 1.0, 0.0}, 1.0},
                               {{0.0, 0.0, 1.0}, 1.0}});
  RateRegion3 same = make_region({{{1.0, 0.0, 0.0}, 1.0},
                                  {{0.0, 1.0, 0.0}, 1.0},
                                  {{0.0, 0.0, 1.0}, 1.0},
                                  {{1.0, 1.0, 1.0}, 3.0}});
  RateRegion3 shifted = make_region({{{1.0, 0.0, 0.0}, 1.0 + 1e-5},
                                     {{0.0, 1.0, 0.0}, 1.0},
                                     {{0.0, 0.0, 1.0}, 1.0}});
  CHECK(region_equal(a, same, 1e-9));
  CHECK(!region_equal(a, shifted, 1e-9));
  CHECK(region_equal(a, shifted, 1e-3));
}

TEST_CASE("sum rate on the zero common-rate slice") {
  RateRegion3 region = make_region({{{1.0, 0.0, 0.0}, 1.0},
                                    {{0.0, 1.0, 0.0}, 2.0},
                                    {{0.0, 1.0, 1.0}, 1.5}});
  SumRate s = sum_rate_max(region);
  CHECK(s.feasible);
  CHECK(s.value == doctest::Approx(1.5).epsilon(1e-9));

  // forcing R0 >= 0.5 empties the slice
  RateRegion3 off = make_region({{{-1.0, 0.0, 0.0}, -0.5},
                                 {{1.0, 1.0, 1.0}, 2.0}});
  SumRate s2 = sum_rate_max(off);
  CHECK(!s2.feasible);
  CHECK(s2.value == 0.0);
}

TEST_CASE("hull of nested boxes is the big box") {
  RateRegion3 small = make_region({{{1.0, 0.0, 0.0}, 1.0},
                                   {{0.0, 1.0, 0.0}, 1.0},
                                   {{0.0, 0.0, 1.0}, 1.0}});
  RateRegion3 big = make_region({{{1.0, 0.0, 0.0}, 2.0},
                                 {{0.0, 1.0, 0.0}, 1.0},
                                 {{0.0, 0.0, 1.0}, 1.0}});
  RateRegion3 hull = convex_hull_union(small, big);
  CHECK(region_equal(hull, big, 1e-7));
  CHECK(region_equal(convex_hull_union(small, small), small, 1e-7));
}

TEST_CASE("hull handles flat regions pinned to the zero slice") {
  RateRegion3 a = make_region({{{1.0, 0.0, 0.0}, 0.0},
                               {{0.0, 1.0, 0.0}, 1.0},
                               {{0.0, 0.0, 1.0}, 2.0}});
  RateRegion3 b = make_region({{{1.0, 0.0, 0.0}, 0.0},
                               {{0.0, 1.0, 0.0}, 2.0},
                               {{0.0, 0.0, 1.0}, 1.0}});
  RateRegion3 hull = convex_hull_union(a, b);
  CHECK(contains_point(hull, {0.0, 1.5, 1.5}, 1e-7));
  CHECK(contains_point(hull, {0.0, 2.0, 1.0}, 1e-7));
  CHECK(!contains_point(hull, {0.0, 1.9, 1.9}, 1e-7));
  CHECK(!contains_point(hull, {0.5, 0.5, 0.5}, 1e-7));
  SumRate s = sum_rate_max(hull);
  CHECK(s.feasible);
  CHECK(s.value == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("time sharing: midpoints of cross vertices stay inside the hull") {
  RngStream rng(778899);
  for (int trial = 0; trial < 8; ++trial) {
    RngStream r = rng.child(trial);
    auto rand_region = [&]() {
      std::vector<LinIneq> rows;
      for (int i = 0; i < 5; ++i) {
        LinIneq q;
        q.a = {r.next_double(), r.next_double(), r.next_double()};
        q.b = 0.3 + r.next_double();
        rows.push_back(q);
      }
      return make_region(std::move(rows));
    };
    RateRegion3 a = rand_region(), b = rand_region();
    RateRegion3 hull = convex_hull_union(a, b);
    auto va = vertices(a), vb = vertices(b);
    for (std::size_t i = 0; i < va.size(); i += 3) {
      for (std::size_t j = 0; j < vb.size(); j += 3) {
        std::array<double, 3> mid = {(va[i][0] + vb[j][0]) / 2,
                                     (va[i][1] + vb[j][1]) / 2,
                                     (va[i][2] + vb[j][2]) / 2};
        CHECK(contains_point(hull, mid, 1e-6));
      }
    }
  }
}

TEST_CASE("empty regions behave") {
  RateRegion3 empty = make_region({{{0.0, 0.0, 0.0}, -1.0}});
  CHECK(vertices(empty).empty());
  CHECK(region_equal(empty, empty, 1e-9));
  RateRegion3 simplex = make_region({{{1.0, 1.0, 1.0}, 1.0}});
  CHECK(!region_equal(empty, simplex, 1e-9));
  CHECK(!sum_rate_max(empty).feasible);
}

TEST_CASE("region json round trip") {
  RateRegion3 region = make_region({{{1.0, 0.5, 0.0}, 1.25}}, true);
  nlohmann::json j = region;
  RateRegion3 back = j.get<RateRegion3>();
  CHECK(back.up_set);
  REQUIRE(back.halfspaces.size() == 1);
  CHECK(back.halfspaces[0].a[1] == doctest::Approx(0.5));
  CHECK(back.halfspaces[0].b == doctest::Approx(1.25));
}

TEST_CASE("convexity: vertex midpoints lie inside their own region") {
  RngStream rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    RngStream r = rng.child(trial);
    LinIneqSystem sys = random_system(r, 5, 9);
    sys.vars = {"R0", "R1", "R2", "u", "w"};
    RateRegion3 region =
        region_from_system(fm_eliminate(fm_eliminate(sys, "u"), "w"));
    auto v = vertices(region);
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
      std::array<double, 3> mid = {(v[i][0] + v[i + 1][0]) / 2,
                                   (v[i][1] + v[i + 1][1]) / 2,
                                   (v[i][2] + v[i + 1][2]) / 2};
      CHECK(contains_point(region, mid, 1e-6));
    }
  }
}
