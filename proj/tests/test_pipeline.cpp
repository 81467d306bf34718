#include <doctest.h>

#include <map>
#include <mutex>
#include <set>

#include "oracle_checks.hpp"
#include "panomix/pipeline.hpp"
#include "panomix/synth_oracle.hpp"

using namespace panomix;

namespace {

class MemorySink final : public SampleSink {
 public:
  void write(const std::string& id, const Sample& sample, const TripleSpec&) override {
    std::lock_guard lock(mutex_);
    if (fail_on_ && id == *fail_on_) throw Error(ErrorCode::io, "disk full");
    samples.insert_or_assign(id, sample);
  }
  std::optional<std::string> fail_on_;
  std::map<std::string, Sample> samples;

 private:
  std::mutex mutex_;
};

InMemoryDataset small_dataset(int n, int h = 64) {
  InMemoryDataset ds;
  for (int i = 0; i < n; ++i) {
    ds.add("s" + std::to_string(i), render_scene(random_scene(100 + i), h, 2 * h));
  }
  return ds;
}

Sample triangle_sample(int h) {
  // Three corners 120 degrees apart; content is irrelevant for the tests.
  const int w = 2 * h;
  Sample s{Panorama(h, w, {0.5, 0.5, 0.5}), SemanticMask(h, w, default_scene_classes(), 2), {}};
  const double floor_row = lat_to_row(-std::atan(2.0), h);
  const double ceil_row = lat_to_row(std::atan(1.0), h);
  for (int k = 0; k < 3; ++k) s.layout.corners.push_back({w * (k / 3.0 + 0.1), ceil_row, floor_row});
  return s;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("identity triple") {
  const Sample s = render_scene(random_scene(3), 128, 256);
  const Sample out = panomixswap(s, s, s, {});
  CHECK(out.layout == s.layout);
  CHECK(out.mask == s.mask);
  CHECK(testing::mean_abs_diff(out.image, s.image) <= 1.0 / 255);
}

TEST_CASE("three-scene triple") {
  SceneParams params;
  params.boxes_min = 2;
  const SceneSpec a = random_scene(21, params), b = random_scene(22, params),
                  c = random_scene(23, params);
  const Sample sa = render_scene(a, 128, 256), sb = render_scene(b, 128, 256),
               sc = render_scene(c, 128, 256);
  const Sample out = panomixswap(sa, sb, sc, {});

  CHECK(out.layout == sa.layout);
  CHECK(testing::labels_subset(out.mask, sc.mask));
  CHECK(testing::boundary_agreement(out.mask, sa.layout).fraction() >= 0.99);

  const auto fg = class_set(out.mask.class_names(),
                            default_foreground_classes(out.mask.class_names()));
  const auto palette = furniture_palette(c);
  for (int r = 0; r < 128; ++r) {
    for (int col = 0; col < 256; ++col) {
      if (fg[out.mask.at(r, col)] && testing::interior(out.mask, r, col)) {
        CHECK(testing::contains_color(palette, out.image.at(r, col)));
      }
    }
  }
}

TEST_CASE("errors name the failing stage") {
  const Sample s = render_scene(random_scene(5), 64, 128);
  const Sample t = triangle_sample(64);
  try {
    panomixswap(s, s, t, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::incompatible_samples);
    CHECK(std::string(e.what()).rfind("input:", 0) == 0);
  }

  Sample covered = s;
  for (Label& l : covered.mask.labels()) {
    if (l == 0) l = 3;
  }
  try {
    panomixswap(s, covered, s, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_style_region);
    CHECK(std::string(e.what()).rfind("style_fuse:", 0) == 0);
  }

  AugmentConfig bad;
  bad.foreground_classes = std::vector<std::string>{"lamp"};
  CHECK_THROWS_AS(panomixswap(s, s, s, bad), Error);
}

TEST_CASE("extra roll and flip") {
  const Sample a = render_scene(random_scene(8), 64, 128);
  const Sample b = render_scene(random_scene(9), 64, 128);
  AugmentConfig cfg;
  cfg.extra = {true, true};
  cfg.seed = 4;
  const Sample out = panomixswap(a, b, a, cfg);
  CHECK(validate_sample(out).empty());
  const Sample again = panomixswap(a, b, a, cfg);
  CHECK(out.image == again.image);
  CHECK(out.layout == again.layout);

  cfg.extra = {};
  const Sample plain = panomixswap(a, b, a, cfg);
  bool matched = false;
  for (int k = 0; k < 128 && !matched; ++k) {
    const Sample rolled = roll_columns(plain, k);
    matched = rolled.mask == out.mask || flip_columns(rolled).mask == out.mask;
  }
  CHECK(matched);
}

TEST_CASE("relabel_background redraws structure labels from the layout") {
  const Sample a = render_scene(random_scene(31), 64, 128);
  const Sample c = render_scene(random_scene(32), 64, 128);
  AugmentConfig cfg;
  cfg.relabel_background = true;
  const Sample out = panomixswap(a, a, c, cfg);
  const RegionMask regions = build_structure_mask(a.layout, 64, 128);
  const auto fg = class_set(out.mask.class_names(),
                            default_foreground_classes(out.mask.class_names()));
  for (int r = 0; r < 64; ++r) {
    for (int col = 0; col < 128; ++col) {
      const Label l = out.mask.at(r, col);
      if (fg[l]) continue;
      const std::uint16_t reg = regions.at(r, col);
      CHECK(l == (reg == RegionMask::kCeiling ? 0 : reg == RegionMask::kFloor ? 1 : 2));
    }
  }
}

TEST_CASE("select_triples") {
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  CHECK(select_triples(ids, 0, 1).empty());
  CHECK(select_triples(ids, 50, 7) == select_triples(ids, 50, 7));
  CHECK_FALSE(select_triples(ids, 50, 7) == select_triples(ids, 50, 8));
  CHECK_THROWS_AS(select_triples({}, 3, 1), Error);

  SUBCASE("roles are uniform") {
    const auto triples = select_triples(ids, 10000, 12345);
    std::map<std::string, int> structure, style, furniture;
    for (const TripleSpec& t : triples) {
      ++structure[t.structure_id];
      ++style[t.style_id];
      ++furniture[t.furniture_id];
    }
    for (const std::string& id : ids) {
      CHECK(std::abs(structure[id] - 2500) <= 200);
      CHECK(std::abs(style[id] - 2500) <= 200);
      CHECK(std::abs(furniture[id] - 2500) <= 200);
    }
  }
  SUBCASE("groups keep triples compatible") {
    const std::vector<std::string> mixed = {"a", "b", "c", "d", "e"};
    const std::vector<int> walls = {4, 6, 4, 6, 4};
    std::map<std::string, int> group;
    for (std::size_t i = 0; i < mixed.size(); ++i) group[mixed[i]] = walls[i];
    for (const TripleSpec& t : select_triples(mixed, 500, 3, walls)) {
      CHECK(group[t.style_id] == group[t.structure_id]);
      CHECK(group[t.furniture_id] == group[t.structure_id]);
    }
  }
}

TEST_CASE("batch_augment") {
  InMemoryDataset ds = small_dataset(4);
  const auto ids = ds.ids();
  AugmentConfig cfg;
  cfg.seed = 99;

  SUBCASE("empty spec list") {
    MemorySink sink;
    const BatchManifest m = batch_augment(ds, {}, cfg, sink);
    CHECK(m.records.empty());
    CHECK_FALSE(m.aborted);
    CHECK(m.config_hash == config_hash(cfg));
  }
  SUBCASE("one bad triple is isolated") {
    ds.add("tri", triangle_sample(64));
    auto specs = select_triples(ids, 6, 1);
    specs.insert(specs.begin() + 2, TripleSpec{ids[0], ids[1], "tri"});
    MemorySink sink;
    const BatchManifest m = batch_augment(ds, specs, cfg, sink, 3);
    CHECK(m.records.size() == 7);
    CHECK(m.failures() == 1);
    CHECK_FALSE(m.records[2].ok);
    CHECK(m.records[2].sources.furniture_id == "tri");
    CHECK(sink.samples.size() == 6);
    CHECK(m.seed == 99);
    for (const BatchRecord& r : m.records) {
      if (r.ok) CHECK(validate_sample(sink.samples.at(r.output_id)).empty());
    }
  }
  SUBCASE("worker count does not change results") {
    const auto specs = select_triples(ids, 8, 2);
    MemorySink one, many;
    batch_augment(ds, specs, cfg, one, 1);
    batch_augment(ds, specs, cfg, many, 8);
    REQUIRE(one.samples.size() == 8);
    for (const auto& [id, s] : one.samples) {
      const Sample& t = many.samples.at(id);
      CHECK(s.image == t.image);
      CHECK(s.mask == t.mask);
      CHECK(s.layout == t.layout);
    }
  }
  SUBCASE("streaming matches the batch") {
    const auto specs = select_triples(ids, 3, 5);
    MemorySink sink;
    batch_augment(ds, specs, cfg, sink);
    const Sample s = augment_spec(ds, specs[1], cfg, 1);
    CHECK(s.image == sink.samples.at(output_id_for(1)).image);
  }
  SUBCASE("a sink failure aborts with a partial manifest") {
    const auto specs = select_triples(ids, 6, 5);
    MemorySink sink;
    sink.fail_on_ = output_id_for(2);
    const BatchManifest m = batch_augment(ds, specs, cfg, sink, 1);
    CHECK(m.aborted);
    CHECK(m.abort_reason.find("disk full") != std::string::npos);
    CHECK(m.records.size() == 3);
    CHECK(sink.samples.size() == 2);
  }
}

TEST_CASE("config serialization") {
  AugmentConfig cfg;
  cfg.style.strategy = StyleStrategy::flat_stat;
  cfg.style.color_space = ColorSpace::decorrelated_luma_chroma;
  cfg.style.noise_seed = 12;
  cfg.style.wall_permutation = {1, 0, 3, 2};
  cfg.vertical = {VerticalPolicy::Mode::fixed, 0.8, 1.25};
  cfg.foreground_classes = std::vector<std::string>{"bed", "sofa"};
  cfg.horizontal = HorizontalMode::linear;
  cfg.extra = {true, false};
  cfg.seed = 77;

  const AugmentConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);

  AugmentConfig reseeded = cfg;
  reseeded.seed = 78;
  CHECK(config_hash(reseeded) == config_hash(cfg));
  reseeded.vertical.beta = 1.3;
  CHECK(config_hash(reseeded) != config_hash(cfg));

  CHECK_NOTHROW(config_from_json("{}"));
  CHECK_THROWS_WITH_AS(config_from_json(R"({"style": {"strategey": "flat_stat"}})"),
                       doctest::Contains("style.strategey"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"horizontal": "cubic"})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"vertical": {"alpha": -1}})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"vertical": {"out_of_range": "wrap"}})"), Error);
  CHECK_THROWS_AS(config_from_json("{"), Error);
}

TEST_CASE("half_batch_schedule") {
  const std::vector<std::string> orig = {"o1", "o2", "o3", "o4", "o5"};
  const std::vector<std::string> aug = {"a1", "a2", "a3"};
  const auto batches = half_batch_schedule(orig, aug, 4, 1);
  REQUIRE(batches.size() == 3);
  std::multiset<std::string> originals;
  for (const auto& b : batches) {
    int n_aug = 0;
    for (const auto& id : b) {
      if (id[0] == 'a') ++n_aug;
      else originals.insert(id);
    }
    CHECK(n_aug == 2);
  }
  CHECK(originals.size() == 5);
  CHECK(std::set<std::string>(originals.begin(), originals.end()).size() == 5);
  CHECK_THROWS_AS(half_batch_schedule(orig, aug, 3, 1), Error);
}

}  // TEST_SUITE
