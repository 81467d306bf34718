#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "panomix/furniture_fuser.hpp"
#include "panomix/pano_core.hpp"
#include "panomix/style_fuser.hpp"

namespace panomix {

struct ExtraAugment {
  bool roll = false;  // random horizontal rotation of the output
  bool flip = false;  // random horizontal mirror, p = 0.5
};

struct AugmentConfig {
  StyleFuserConfig style;
  VerticalPolicy vertical;
  /// Defaults to every class except ceiling, floor and wall.
  std::optional<std::vector<std::string>> foreground_classes;
  HorizontalMode horizontal = HorizontalMode::plan_fraction;
  ExtraAugment extra;
  /// Re-derive background labels from the structure layout instead of
  /// keeping the warped ones.
  bool relabel_background = false;
  std::uint64_t seed = 0;
};

struct TripleSpec {
  std::string structure_id;
  std::string style_id;
  std::string furniture_id;

  bool operator==(const TripleSpec&) const = default;
};

std::vector<std::string> foreground_classes_for(
    const AugmentConfig& config, const std::vector<std::string>& vocabulary);

/// Styled structure image from (style, structure layout), then the
/// furniture aligned to the structure layout and composited on top.
/// Errors are re-thrown with the failing stage prefixed.
Sample panomixswap(const Sample& structure, const Sample& style,
                   const Sample& furniture, const AugmentConfig& config);

/// `count` triples drawn with a seeded generator. The structure role is
/// uniform over `ids`; style and furniture are uniform over ids whose
/// `group` equals the structure's. With no groups every role is uniform
/// and independent.
std::vector<TripleSpec> select_triples(std::span<const std::string> ids,
                                       std::size_t count, std::uint64_t seed,
                                       std::span<const int> groups = {});

/// Read-only sample store. load() must be safe to call concurrently.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual Sample load(const std::string& id) const = 0;
};

class InMemoryDataset final : public SampleSource {
 public:
  void add(std::string id, Sample sample);
  Sample load(const std::string& id) const override;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Sample> samples_;
};

/// Receives one augmented sample per successful spec. Calls for distinct
/// ids may arrive concurrently.
class SampleSink {
 public:
  virtual ~SampleSink() = default;
  virtual void write(const std::string& id, const Sample& sample,
                     const TripleSpec& sources) = 0;
};

struct BatchRecord {
  std::size_t index = 0;
  TripleSpec sources;
  std::string output_id;
  bool ok = false;
  std::string error;
};

struct BatchManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<BatchRecord> records;  // ordered by spec index
  bool aborted = false;
  std::string abort_reason;

  std::size_t failures() const;
};

std::string output_id_for(std::size_t index);

/// Per-spec configuration: the sample's RNG stream is derived from the
/// global seed and the spec index only.
AugmentConfig config_for_spec(const AugmentConfig& config, std::size_t index);

/// Streaming form: one augmented sample for spec `index`.
Sample augment_spec(const SampleSource& source, const TripleSpec& spec,
                    const AugmentConfig& config, std::size_t index);

/// Offline generation. Per-spec failures are recorded and skipped; a sink
/// failure stops the batch and returns the records written so far with
/// `aborted` set. Results do not depend on `workers`.
BatchManifest batch_augment(const SampleSource& source,
                            std::span<const TripleSpec> specs,
                            const AugmentConfig& config, SampleSink& sink,
                            int workers = 1);

/// Half-and-half batches of original and augmented ids, the mixing recipe
/// for layout-estimation training. Each batch holds batch_size/2 ids from
/// each list, drawn without replacement per epoch.
std::vector<std::vector<std::string>> half_batch_schedule(
    std::span<const std::string> original, std::span<const std::string> augmented,
    std::size_t batch_size, std::uint64_t seed);

// JSON form of the config (the pipeline config file).
std::string config_to_json(const AugmentConfig& config);
AugmentConfig config_from_json(const std::string& text);
/// FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const AugmentConfig& config);

}  // namespace panomix
