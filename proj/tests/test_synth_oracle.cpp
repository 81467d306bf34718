#include <doctest.h>

#include <cmath>

#include "oracle_checks.hpp"
#include "panomix/layout_geom.hpp"
#include "panomix/synth_oracle.hpp"

using namespace panomix;

TEST_SUITE("synth_oracle") {

TEST_CASE("centered square room corners") {
  const Layout l = scene_layout(testing::square_room(), 512, 1024);
  REQUIRE(l.size() == 4);
  const double expect[4] = {127.5, 383.5, 639.5, 895.5};
  for (int i = 0; i < 4; ++i) CHECK(l.corners[i].column == doctest::Approx(expect[i]));
}

TEST_CASE("the image center sees the +z wall") {
  const SceneSpec spec = testing::square_room();
  const Sample s = render_scene(spec, 64, 128);
  CHECK(s.image.at(31, 63) == std::get<FlatTexture>(spec.walls[2]).color);
  CHECK(s.image.at(32, 64) == std::get<FlatTexture>(spec.walls[2]).color);
  CHECK(s.image.at(0, 10) == std::get<FlatTexture>(spec.ceiling).color);
  CHECK(s.image.at(63, 10) == std::get<FlatTexture>(spec.floor).color);
  CHECK(s.image.at(32, 0) == std::get<FlatTexture>(spec.walls[3]).color);
  CHECK(s.image.at(32, 96) == std::get<FlatTexture>(spec.walls[0]).color);
}

TEST_CASE("lifting the rendered layout recovers the room") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneSpec spec = random_scene(seed);
    const Sample s = render_scene(spec, 256, 512);
    CHECK(validate_sample(s).empty());
    const PlanModel plan = layout_to_plan(s.layout, 256, 512);
    CHECK(std::abs(plan.ceiling_height - spec.ceiling_height) < 1e-3);
    for (const PlanPoint& p : plan.corners) {
      const double x = p.x + spec.camera_x;
      const double z = p.z + spec.camera_z;
      CHECK(std::abs(std::abs(x) - spec.half_x) < 1e-3);
      CHECK(std::abs(std::abs(z) - spec.half_z) < 1e-3);
    }
  }
}

TEST_CASE("random_scene") {
  CHECK(random_scene(42) == random_scene(42));

  int differing = 0;
  for (std::uint64_t i = 0; i < 100; ++i) differing += !(random_scene(2 * i) == random_scene(2 * i + 1));
  CHECK(differing >= 99);

  SceneParams none;
  none.boxes_max = 0;
  const SceneSpec bare = random_scene(5, none);
  CHECK(bare.boxes.empty());
  for (Label l : render_scene(bare, 64, 128).mask.present_labels()) CHECK(l <= 2);

  SceneParams bad;
  bad.half_extent_min = 3.0;
  bad.half_extent_max = 2.0;
  CHECK_THROWS_AS(random_scene(1, bad), Error);
  SceneParams crowded;
  crowded.boxes_min = 6;
  crowded.boxes_max = 6;
  crowded.half_extent_max = 1.5;
  crowded.box_size_min = 1.0;
  CHECK_THROWS_AS(random_scene(1, crowded), Error);
  SceneParams tall;
  tall.box_top_max = 2.5;
  CHECK_THROWS_AS(random_scene(1, tall), Error);
}

TEST_CASE("rendered colors come from the palette") {
  SceneParams params;
  params.boxes_min = 3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SceneSpec spec = random_scene(seed, params);
    const auto palette = scene_palette(spec);
    const Sample s = render_scene(spec, 64, 128);
    for (const Color& c : s.image.pixels()) CHECK(testing::contains_color(palette, c));
  }
}

TEST_CASE("rendered mask boundaries agree with the analytic layout") {
  SceneParams params;
  params.boxes_max = 0;
  params.textured_probability = 1.0;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const Sample s = render_scene(random_scene(seed, params), 256, 512);
    CHECK(testing::boundary_agreement(s.mask, s.layout).fraction() >= 0.99);
  }
}

TEST_CASE("rendering is deterministic") {
  const SceneSpec spec = random_scene(77);
  const Sample a = render_scene(spec, 64, 128);
  const Sample b = render_scene(spec, 64, 128);
  CHECK(a.image == b.image);
  CHECK(a.mask == b.mask);
}

TEST_CASE("invalid scenes are rejected") {
  SceneSpec spec = testing::square_room();
  spec.camera_x = 2.5;
  CHECK_FALSE(validate_scene(spec).empty());
  CHECK_THROWS_AS(render_scene(spec, 64, 128), Error);

  spec = testing::square_room();
  spec.classes = default_scene_classes();
  spec.boxes.push_back({-0.5, 0.5, -0.5, 0.5, 0.0, 1.2, {1, 0, 0}, "bed"});
  CHECK_FALSE(validate_scene(spec).empty());  // contains the camera

  spec.boxes.back() = {0.5, 1.0, 0.5, 1.0, 0.0, 1.2, {1, 0, 0}, "lamp"};
  CHECK_FALSE(validate_scene(spec).empty());  // unknown class

  spec.boxes.back() = {0.5, 1.0, 0.5, 1.0, 0.0, 1.2, {1, 0, 0}, "bed"};
  spec.boxes.push_back({0.8, 1.2, 0.8, 1.2, 0.0, 1.0, {0, 1, 0}, "sofa"});
  CHECK_FALSE(validate_scene(spec).empty());  // overlap
}

}  // TEST_SUITE
