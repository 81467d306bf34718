#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_checks.hpp"
#include "panomix/layout_geom.hpp"
#include "panomix/synth_oracle.hpp"

using namespace panomix;

namespace {

Layout flat_layout(std::vector<double> columns, double ceil, double floor) {
  Layout l;
  for (double c : columns) l.corners.push_back({c, ceil, floor});
  return l;
}

}  // namespace

TEST_SUITE("layout_geom") {

TEST_CASE("layout_to_plan recovers distance and ceiling height") {
  // Floor row 383.5 at H = 512 lies at latitude -pi/4.
  const double ceil_row = lat_to_row(std::atan(1.5), 512);
  CHECK(ceil_row == doctest::Approx(95.33).epsilon(1e-4));
  const Layout l = flat_layout({127.5, 383.5, 639.5, 895.5}, ceil_row, 383.5);
  const PlanModel plan = layout_to_plan(l, 512, 1024);
  REQUIRE(plan.wall_count() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::hypot(plan.corners[i].x, plan.corners[i].z) == doctest::Approx(1.0));
    CHECK(plan.azimuths[i] == doctest::Approx(-3 * kPi / 4 + i * kPi / 2));
  }
  CHECK(plan.ceiling_height == doctest::Approx(1.5));

  const PlanModel rounded = layout_to_plan(
      flat_layout({127.5, 383.5, 639.5, 895.5}, 95.33, 383.5), 512, 1024);
  CHECK(rounded.ceiling_height == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("layout_to_plan rejects bad layouts") {
  CHECK_THROWS_AS(layout_to_plan(flat_layout({10, 20}, 10, 50), 64, 128), Error);
  // Two corners more than pi apart leave a wall facing away from the camera.
  CHECK_THROWS_AS(layout_to_plan(flat_layout({5, 10, 100}, 10, 50), 64, 128), Error);
  Layout uneven = flat_layout({15.5, 47.5, 79.5, 111.5}, 16, 48);
  uneven.corners[2].ceil_row = 4;
  CHECK_THROWS_AS(layout_to_plan(uneven, 64, 128), Error);
}

TEST_CASE("plan_to_boundaries") {
  const double ceil_row = lat_to_row(std::atan(1.5), 512);
  const Layout l = flat_layout({127.5, 383.5, 639.5, 895.5}, ceil_row, 383.5);
  const PlanModel plan = layout_to_plan(l, 512, 1024);
  const BoundaryMap b = plan_to_boundaries(plan, 512, 1024);

  SUBCASE("mid-wall floor row of a square room") {
    // Wall distance 1/sqrt(2) at the wall center, so v = -atan(sqrt(2)).
    const double expect = lat_to_row(-std::atan(std::sqrt(2.0)), 512);
    CHECK(expect == doctest::Approx(411.19).epsilon(1e-4));
    const BoundaryRows mid = boundary_at(plan, 0.0, 512);
    CHECK(mid.floor_row == doctest::Approx(expect).epsilon(1e-12));
    CHECK(b.floor_rows[511] == doctest::Approx(411.2).epsilon(1e-3));
  }
  SUBCASE("corner columns reproduce the corner rows") {
    for (const Corner& c : l.corners) {
      const int col = static_cast<int>(std::floor(c.column));
      CHECK(std::abs(b.ceil_rows[col] - c.ceil_row) < 0.51);
      CHECK(std::abs(b.floor_rows[col] - c.floor_row) < 0.51);
    }
  }
  SUBCASE("curves straddle the horizon") {
    for (int c = 0; c < 1024; ++c) {
      CHECK(b.ceil_rows[c] < 255.5);
      CHECK(b.floor_rows[c] > 255.5);
    }
  }
}

TEST_CASE("boundaries round trip through a rendered layout") {
  SceneSpec spec;
  spec.half_x = 3.1;
  spec.half_z = 1.9;
  spec.camera_x = 0.7;
  spec.camera_z = -0.4;
  spec.ceiling_height = 1.7;
  const Layout l = scene_layout(spec, 256, 512);
  const BoundaryMap b = plan_to_boundaries(layout_to_plan(l, 256, 512), 256, 512);
  double worst = 0.0;
  for (const Corner& c : l.corners) {
    const double lon = col_to_lon(c.column, 512);
    const BoundaryRows at = boundary_at(layout_to_plan(l, 256, 512), lon, 256);
    worst = std::max({worst, std::abs(at.ceil_row - c.ceil_row),
                      std::abs(at.floor_row - c.floor_row)});
  }
  CHECK(worst < 0.51);
  CHECK(b.ceil_rows.size() == 512);
}

TEST_CASE("boundaries agree with ray-cast region transitions") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SceneParams params;
    params.boxes_max = 0;
    const Sample s = render_scene(random_scene(seed, params), 128, 256);
    const auto agree = testing::boundary_agreement(s.mask, s.layout);
    CHECK(agree.hidden == 0);
    CHECK(agree.fraction() >= 0.99);
  }
}

TEST_CASE("project_corner") {
  SUBCASE("forward horizon point") {
    const PixelCoord p = project_corner({0.0, 1.0}, 0.0, 512, 1024);
    CHECK(p.col == doctest::Approx(511.5));
    CHECK(p.row == doctest::Approx(255.5));
  }
  SUBCASE("diagonal floor point") {
    const PixelCoord p = project_corner({1.0, 1.0}, -1.0, 512, 1024);
    CHECK(col_to_lon(p.col, 1024) == doctest::Approx(kPi / 4));
    CHECK(row_to_lat(p.row, 512) == doctest::Approx(-0.61548).epsilon(1e-5));
  }
  SUBCASE("project then lift returns the point") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-kPi, kPi), d(0.5, 4.0);
    for (int i = 0; i < 100; ++i) {
      // Quadrilateral room around the camera with jittered corners.
      std::vector<PlanPoint> pts;
      for (int k = 0; k < 4; ++k) {
        const double az = -3 * kPi / 4 + k * kPi / 2 + 0.3 * std::sin(u(rng));
        const double dist = d(rng);
        pts.push_back({dist * std::sin(az), dist * std::cos(az)});
      }
      Layout l;
      for (const PlanPoint& p : pts) {
        const PixelCoord top = project_corner(p, 1.3, 256, 512);
        const PixelCoord bottom = project_corner(p, -1.0, 256, 512);
        CHECK(top.col == doctest::Approx(bottom.col).epsilon(1e-12));
        l.corners.push_back({bottom.col, top.row, bottom.row});
      }
      l = sorted_layout(l.corners);
      const PlanModel plan = layout_to_plan(l, 256, 512);
      CHECK(plan.ceiling_height == doctest::Approx(1.3).epsilon(1e-9));
      for (const PlanPoint& p : plan.corners) {
        double best = 1e9;
        for (const PlanPoint& q : pts) best = std::min(best, std::hypot(p.x - q.x, p.z - q.z));
        CHECK(best < 1e-9);
      }
    }
  }
  SUBCASE("the camera position is rejected") {
    CHECK_THROWS_AS(project_corner({0.0, 0.0}, -1.0, 64, 128), Error);
  }
}

TEST_CASE("split_column_groups") {
  Sample s{Panorama(512, 1024), SemanticMask(512, 1024, {"ceiling", "floor", "wall"}), {}};
  for (int c = 0; c < 1024; ++c) s.image.at(0, c) = {c / 1024.0, 0.0, 0.0};

  SUBCASE("corners on group boundaries") {
    s.layout = flat_layout({0, 256, 512, 768}, 100, 400);
    const ColumnGrouping g = split_column_groups(s);
    CHECK(g.roll == 0);
    REQUIRE(g.groups.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(g.groups[i].wall_index == i);
      CHECK(g.groups[i].col_start == 256 * i);
      CHECK(g.groups[i].col_end == 256 * (i + 1));
    }
  }
  SUBCASE("offset corners are rolled to column 0 first") {
    s.layout = flat_layout({100, 356, 612, 868}, 100, 400);
    const ColumnGrouping g = split_column_groups(s);
    CHECK(g.roll == -100);
    REQUIRE(g.groups.size() == 4);
    int total = 0;
    for (int i = 0; i < 4; ++i) {
      CHECK(g.groups[i].col_start == 256 * i);
      CHECK(g.groups[i].col_end == 256 * (i + 1));
      total += g.groups[i].width();
    }
    CHECK(total == 1024);
    CHECK(g.rolled.image.at(0, 0) == s.image.at(0, 100));
    const Sample back = roll_columns(g.rolled, -g.roll);
    CHECK(back.image == s.image);
  }
  SUBCASE("uneven walls still partition the width") {
    s.layout = flat_layout({37.2, 301.6, 455.5, 902.9}, 100, 400);
    const ColumnGrouping g = split_column_groups(s);
    int total = 0;
    int expect_start = 0;
    for (const ColumnGroup& grp : g.groups) {
      CHECK(grp.col_start == expect_start);
      expect_start = grp.col_end;
      total += grp.width();
    }
    CHECK(total == 1024);
  }
  SUBCASE("coincident rounded corners are a degenerate wall") {
    s.layout = flat_layout({100.2, 100.4, 612, 868}, 100, 400);
    CHECK_THROWS_AS(split_column_groups(s), Error);
  }
}

TEST_CASE("wall_of_columns follows the rounded corners") {
  const Layout l = flat_layout({10.4, 40.5, 70, 100}, 20, 44);
  const std::vector<int> walls = wall_of_columns(l, 128);
  CHECK(walls[9] == 3);
  CHECK(walls[10] == 0);
  CHECK(walls[40] == 0);
  CHECK(walls[41] == 1);
  CHECK(walls[127] == 3);
}

TEST_CASE("panostretch_dir") {
  SUBCASE("unit factors leave directions unchanged") {
    const SphericalDir d = panostretch_dir(0.7, -0.3, 1.0, 1.0);
    CHECK(std::abs(d.lon - 0.7) < 1e-12);
    CHECK(std::abs(d.lat + 0.3) < 1e-12);
  }
  SUBCASE("hand-evaluated values") {
    const SphericalDir a = panostretch_dir(kPi / 2, kPi / 4, 2.0, 1.0);
    CHECK(a.lon == doctest::Approx(kPi / 2));
    CHECK(a.lat == doctest::Approx(0.463648).epsilon(1e-6));
    const SphericalDir b = panostretch_dir(0.0, kPi / 4, 1.0, 3.0);
    CHECK(b.lon == doctest::Approx(0.0));
    CHECK(b.lat == doctest::Approx(0.321751).epsilon(1e-6));
  }
  SUBCASE("inverse factors undo a stretch") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-kPi + 1e-6, kPi), v(-1.5, 1.5), k(0.25, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double lon = u(rng), lat = v(rng), kx = k(rng), kz = k(rng);
      const SphericalDir f = panostretch_dir(lon, lat, kx, kz);
      const SphericalDir g = panostretch_dir(f.lon, f.lat, 1.0 / kx, 1.0 / kz);
      worst = std::max({worst, std::abs(std::remainder(g.lon - lon, 2 * kPi)),
                        std::abs(g.lat - lat)});
    }
    CHECK(worst < 1e-9);
  }
  SUBCASE("uniform scaling keeps azimuth and scales tan(v) by 1/k") {
    const SphericalDir d = panostretch_dir(1.1, 0.6, 2.5, 2.5);
    CHECK(d.lon == doctest::Approx(1.1));
    CHECK(std::tan(d.lat) == doctest::Approx(std::tan(0.6) / 2.5));
  }
  SUBCASE("non-positive factors are rejected") {
    CHECK_THROWS_AS(panostretch_dir(0.0, 0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(panostretch_dir(0.0, 0.0, 1.0, -2.0), Error);
  }
}

TEST_CASE("panostretch_image") {
  const Sample s = render_scene(testing::square_room(1.8), 128, 256);

  SUBCASE("unit factors leave the sample unchanged") {
    const Sample t = panostretch_image(s, 1.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.image.pixels().size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(t.image.pixels()[i][k] - s.image.pixels()[i][k]));
      }
    }
    CHECK(worst <= 1e-6);
    CHECK(t.mask == s.mask);
    for (std::size_t i = 0; i < s.layout.size(); ++i) {
      CHECK(std::abs(t.layout.corners[i].column - s.layout.corners[i].column) < 1e-9);
    }
  }
  SUBCASE("a stretch and its inverse restore the corners") {
    const Layout there = panostretch_layout(s.layout, 128, 256, 2.0, 0.5);
    const Layout back = panostretch_layout(there, 128, 256, 0.5, 2.0);
    for (std::size_t i = 0; i < s.layout.size(); ++i) {
      CHECK(std::abs(back.corners[i].column - s.layout.corners[i].column) < 1e-6);
      CHECK(std::abs(back.corners[i].ceil_row - s.layout.corners[i].ceil_row) < 1e-6);
      CHECK(std::abs(back.corners[i].floor_row - s.layout.corners[i].floor_row) < 1e-6);
    }
  }
  SUBCASE("the stretched layout matches the scaled room re-rendered") {
    SceneSpec scaled = testing::square_room(1.8);
    scaled.half_x *= 2.0;
    const Sample t = panostretch_image(s, 2.0, 1.0);
    const Layout expect = scene_layout(scaled, 128, 256);
    REQUIRE(t.layout.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
      CHECK(std::abs(t.layout.corners[i].column - expect.corners[i].column) <= 0.6);
      CHECK(std::abs(t.layout.corners[i].ceil_row - expect.corners[i].ceil_row) <= 0.6);
      CHECK(std::abs(t.layout.corners[i].floor_row - expect.corners[i].floor_row) <= 0.6);
    }
    CHECK(validate_sample(t).empty());
    const Sample rerender = render_scene(scaled, 128, 256);
    std::size_t same = 0;
    for (std::size_t i = 0; i < t.mask.labels().size(); ++i) {
      same += t.mask.labels()[i] == rerender.mask.labels()[i];
    }
    CHECK(same >= t.mask.labels().size() * 98 / 100);
  }
}

}  // TEST_SUITE
