#include "panomix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "panomix/seed.hpp"

namespace panomix {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

void require_triple(const Sample& structure, const Sample& style,
                    const Sample& furniture) {
  for (const Sample* s : {&style, &furniture}) {
    if (s->height() != structure.height() || s->width() != structure.width()) {
      throw Error(ErrorCode::incompatible_samples,
                  "input: samples differ in image size");
    }
    if (s->layout.size() != structure.layout.size()) {
      throw Error(ErrorCode::incompatible_samples,
                  "input: samples differ in wall count (" +
                      std::to_string(structure.layout.size()) + " vs " +
                      std::to_string(s->layout.size()) + ")");
    }
  }
}

void relabel_background(Sample& out, const std::vector<std::string>& foreground) {
  const auto& vocab = out.mask.class_names();
  const int ceiling = out.mask.find_class("ceiling");
  const int floor = out.mask.find_class("floor");
  const int wall = out.mask.find_class("wall");
  if (ceiling < 0 || floor < 0 || wall < 0) {
    throw Error(ErrorCode::config,
                "relabel_background needs ceiling, floor and wall classes");
  }
  const std::vector<bool> fg = class_set(vocab, foreground);
  const RegionMask regions =
      build_structure_mask(out.layout, out.height(), out.width());
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (fg[out.mask.at(r, c)]) continue;
      const std::uint16_t region = regions.at(r, c);
      out.mask.at(r, c) = static_cast<Label>(
          region == RegionMask::kCeiling ? ceiling
          : region == RegionMask::kFloor ? floor
                                         : wall);
    }
  }
}

}  // namespace

std::vector<std::string> foreground_classes_for(
    const AugmentConfig& config, const std::vector<std::string>& vocabulary) {
  return config.foreground_classes ? *config.foreground_classes
                                   : default_foreground_classes(vocabulary);
}

Sample panomixswap(const Sample& structure, const Sample& style,
                   const Sample& furniture, const AugmentConfig& config) {
  require_triple(structure, style, furniture);

  AlignOptions align;
  align.vertical = config.vertical;
  align.horizontal = config.horizontal;

  StyleFuserConfig style_cfg = config.style;
  style_cfg.noise_seed = mix_seed(config.seed, config.style.noise_seed);
  const std::vector<std::string> others =
      foreground_classes_for(config, style.mask.class_names());
  const Panorama styled = run_stage("style_fuse", [&] {
    return fuse_style(style, structure.layout, style_cfg, others, align);
  });

  const AlignedSample aligned = run_stage("furniture_align", [&] {
    return align_sample(furniture, structure.layout, align);
  });

  const std::vector<std::string> foreground =
      foreground_classes_for(config, furniture.mask.class_names());
  Sample out = run_stage("composite", [&] {
    Sample s = composite(aligned.image, aligned.mask, styled, structure.layout,
                         foreground);
    if (config.relabel_background) relabel_background(s, foreground);
    return s;
  });

  if (config.extra.roll || config.extra.flip) {
    std::mt19937_64 rng(mix_seed(config.seed, 0x5eed));
    if (config.extra.roll) {
      out = roll_columns(
          out, std::uniform_int_distribution<int>(0, out.width() - 1)(rng));
    }
    if (config.extra.flip && std::bernoulli_distribution(0.5)(rng)) {
      out = flip_columns(out);
    }
  }

  if (const auto issues = validate_sample(out); !issues.empty()) {
    throw Error(ErrorCode::geometry, "validate: " + issues.front());
  }
  return out;
}

std::vector<TripleSpec> select_triples(std::span<const std::string> ids,
                                       std::size_t count, std::uint64_t seed,
                                       std::span<const int> groups) {
  if (ids.empty()) {
    throw Error(ErrorCode::empty_dataset, "no samples to draw triples from");
  }
  if (!groups.empty() && groups.size() != ids.size()) {
    throw Error(ErrorCode::invalid_argument, "one group per id required");
  }
  std::mt19937_64 rng(seed);
  std::vector<TripleSpec> out;
  out.reserve(count);
  std::vector<std::size_t> pool;
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t s =
        std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng);
    pool.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (groups.empty() || groups[i] == groups[s]) pool.push_back(i);
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::size_t style = pool[pick(rng)];
    const std::size_t furniture = pool[pick(rng)];
    out.push_back({ids[s], ids[style], ids[furniture]});
  }
  return out;
}

void InMemoryDataset::add(std::string id, Sample sample) {
  samples_.insert_or_assign(std::move(id), std::move(sample));
}

Sample InMemoryDataset::load(const std::string& id) const {
  const auto it = samples_.find(id);
  if (it == samples_.end()) {
    throw Error(ErrorCode::load, "unknown sample id '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> InMemoryDataset::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, sample] : samples_) out.push_back(id);
  return out;
}

std::size_t BatchManifest::failures() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const BatchRecord& r) { return !r.ok; }));
}

std::string output_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "aug_%06zu", index);
  return buf;
}

AugmentConfig config_for_spec(const AugmentConfig& config, std::size_t index) {
  AugmentConfig out = config;
  out.seed = mix_seed(config.seed, index);
  return out;
}

Sample augment_spec(const SampleSource& source, const TripleSpec& spec,
                    const AugmentConfig& config, std::size_t index) {
  const Sample structure = source.load(spec.structure_id);
  const Sample style = source.load(spec.style_id);
  const Sample furniture = source.load(spec.furniture_id);
  return panomixswap(structure, style, furniture, config_for_spec(config, index));
}

BatchManifest batch_augment(const SampleSource& source,
                            std::span<const TripleSpec> specs,
                            const AugmentConfig& config, SampleSink& sink,
                            int workers) {
  BatchManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.seed = config.seed;

  std::vector<BatchRecord> records(specs.size());
  std::vector<char> done(specs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex abort_mutex;

  auto work = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      BatchRecord& rec = records[i];
      rec.index = i;
      rec.sources = specs[i];
      rec.output_id = output_id_for(i);

      Sample sample;
      try {
        sample = augment_spec(source, specs[i], config, i);
      } catch (const std::exception& e) {
        rec.error = e.what();
        done[i] = 1;
        continue;
      }
      try {
        sink.write(rec.output_id, sample, specs[i]);
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.error = std::string("sink: ") + e.what();
        std::lock_guard lock(abort_mutex);
        if (!abort.exchange(true)) manifest.abort_reason = rec.error;
      }
      done[i] = 1;
    }
  };

  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  manifest.aborted = abort.load();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (done[i]) manifest.records.push_back(std::move(records[i]));
  }
  return manifest;
}

std::vector<std::vector<std::string>> half_batch_schedule(
    std::span<const std::string> original, std::span<const std::string> augmented,
    std::size_t batch_size, std::uint64_t seed) {
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw Error(ErrorCode::config, "half-batch mixing needs an even batch size");
  }
  if (original.empty() || augmented.empty()) {
    throw Error(ErrorCode::empty_dataset, "half-batch mixing needs both sets");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::string> orig(original.begin(), original.end());
  std::vector<std::string> aug(augmented.begin(), augmented.end());
  std::shuffle(orig.begin(), orig.end(), rng);
  std::shuffle(aug.begin(), aug.end(), rng);

  const std::size_t half = batch_size / 2;
  const std::size_t batches = (orig.size() + half - 1) / half;
  std::vector<std::vector<std::string>> out(batches);
  std::size_t ai = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < half && b * half + k < orig.size(); ++k) {
      out[b].push_back(orig[b * half + k]);
    }
    for (std::size_t k = 0; k < half; ++k) {
      if (ai == aug.size()) {
        std::shuffle(aug.begin(), aug.end(), rng);
        ai = 0;
      }
      out[b].push_back(aug[ai++]);
    }
  }
  return out;
}

}  // namespace panomix
