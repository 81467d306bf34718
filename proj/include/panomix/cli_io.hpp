#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "panomix/pano_core.hpp"
#include "panomix/pipeline.hpp"

namespace panomix {

namespace fs = std::filesystem;

struct ManifestSample {
  std::string id;
  std::string image;  // relative to the manifest's directory
  std::string mask;
  Layout layout;
  std::optional<TripleSpec> sources;  // augmented samples only

  bool operator==(const ManifestSample&) const = default;
};

struct FailureRecord {
  std::size_t index = 0;
  TripleSpec sources;
  std::string error;

  bool operator==(const FailureRecord&) const = default;
};

struct ManifestProvenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<FailureRecord> failures;
  bool aborted = false;

  bool operator==(const ManifestProvenance&) const = default;
};

/// Canonical dataset description:
///
///   {"width": W, "height": H, "classes": [...], "unlabeled_class": "...",
///    "samples": [{"id", "image", "mask", "layout": [[col, ceil, floor], ...],
///                 "sources": {"structure", "style", "furniture"}}],
///    "provenance": {"config_hash", "seed", "failures": [...], "aborted"}}
///
/// `unlabeled_class`, `sources` and `provenance` are optional.
struct DatasetManifest {
  int width = 0;
  int height = 0;
  std::vector<std::string> classes;
  std::optional<std::string> unlabeled_class;
  std::vector<ManifestSample> samples;
  std::optional<ManifestProvenance> provenance;
  fs::path base_dir;  // not serialized

  const ManifestSample& find(const std::string& id) const;

  bool operator==(const DatasetManifest& o) const {
    return width == o.width && height == o.height && classes == o.classes &&
           unlabeled_class == o.unlabeled_class && samples == o.samples &&
           provenance == o.provenance;
  }
};

/// Mask PNG value reserved for unlabeled pixels.
inline constexpr int kUnlabeledValue = 255;

DatasetManifest parse_manifest(const std::string& text, fs::path base_dir = {});
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest read_manifest(const fs::path& path);
void write_manifest(const DatasetManifest& manifest, const fs::path& path);

/// Image: 8-bit RGB PNG, value / 255. Mask: 8-bit gray PNG, value = class.
Sample load_sample(const DatasetManifest& manifest, const std::string& id);

/// Writes images/<id>.png and masks/<id>.png under `dir`.
ManifestSample store_sample(const Sample& sample, const fs::path& dir,
                            const std::string& id);

/// Reads a corner text file of 2T "x y" lines, ceiling and floor of each
/// corner interleaved.
ManifestSample adapt_corner_txt(const fs::path& txt, const std::string& image,
                                const std::string& mask, std::string id);
Layout parse_corner_txt(const std::string& text);
std::string corner_txt(const Layout& layout);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

class ManifestSource final : public SampleSource {
 public:
  explicit ManifestSource(DatasetManifest manifest)
      : manifest_(std::move(manifest)) {}
  Sample load(const std::string& id) const override {
    return load_sample(manifest_, id);
  }

 private:
  DatasetManifest manifest_;
};

/// Stores each sample under `dir` and remembers its manifest entry.
class DirectorySink final : public SampleSink {
 public:
  explicit DirectorySink(fs::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& id, const Sample& sample,
             const TripleSpec& sources) override;
  std::optional<ManifestSample> entry(const std::string& id) const;

 private:
  fs::path dir_;
  mutable std::mutex mutex_;
  std::vector<ManifestSample> entries_;
};

/// Manifest for a finished batch: successful samples in spec order plus the
/// provenance block.
DatasetManifest batch_output_manifest(const BatchManifest& batch,
                                      const DirectorySink& sink, int width,
                                      int height,
                                      std::vector<std::string> classes);

/// Original samples followed by augmented ones, paths rebased onto
/// `out_dir`. The concatenation recipe for segmentation training.
DatasetManifest concat_manifests(const DatasetManifest& original,
                                 const DatasetManifest& augmented,
                                 const fs::path& out_dir);

}  // namespace panomix
