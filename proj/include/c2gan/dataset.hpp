#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "c2gan/heatmap.hpp"
#include "c2gan/keypoints.hpp"

namespace c2gan {

/// Contents of `dataset.json`: how keypoints of this dataset are rendered and
/// flipped. Optional on disk; the defaults describe a plain person-mode set
/// without an oracle.
struct DatasetDescriptor {
  HeatmapMode mode = HeatmapMode::person;
  int radius = kDefaultPersonRadius;
  int num_keypoints = 0;
  Frame frame;
  SwapTable swap;
  std::vector<std::pair<int, int>> adjacency;
  /// True when the stored keypoints are exact ground truth of the renderer
  /// that drew the images (usable as a warm-up keypoint oracle).
  bool ground_truth_oracle = false;

  nlohmann::json to_json() const;
  static DatasetDescriptor from_json(const nlohmann::json& j);
};

DatasetDescriptor read_descriptor(const std::filesystem::path& dir);

/// x, y: [3,H,W] in [-1,1].
struct TrainingPair {
  torch::Tensor x;
  torch::Tensor y;
  KeypointSet lx;
  KeypointSet ly;
  int64_t identity_id = 0;
};

struct GenerateOptions {
  int n_identities = 10;
  int poses_per_identity = 3;
  Frame canvas{64, 64};
  uint64_t seed = 0;
  /// Identity ids are first_identity .. first_identity + n_identities - 1;
  /// held-out sets use a disjoint range.
  int64_t first_identity = 0;
  bool noise_texture = true;
  HeatmapMode mode = HeatmapMode::person;
  int radius = kDefaultPersonRadius;
};

/// Write images/{identity}_{pose}.png, keypoints/{identity}_{pose}.jsonl,
/// pairs.csv (every ordered same-identity pose pair) and dataset.json.
/// Returns the number of pairs written.
std::size_t generate_dataset(const std::filesystem::path& dir, const GenerateOptions& options);

/// One row of pairs.csv, paths resolved against the dataset directory.
struct PairRecord {
  std::filesystem::path x_path, y_path, lx_path, ly_path;
  int64_t identity_id = 0;
};

std::vector<PairRecord> read_pair_index(const std::filesystem::path& dir);

/// Immutable in-memory dataset. Every file is decoded once at load.
class PairDataset {
 public:
  static std::shared_ptr<const PairDataset> load(const std::filesystem::path& dir);

  std::size_t size() const { return records_.size(); }
  const DatasetDescriptor& descriptor() const { return descriptor_; }
  const std::filesystem::path& directory() const { return dir_; }
  const PairRecord& record(std::size_t i) const { return records_.at(i); }

  /// Pair i, optionally mirrored: both images flip, both keypoint sets go
  /// through hflip with the descriptor's swap table.
  TrainingPair get(std::size_t i, bool flip = false) const;

 private:
  std::filesystem::path dir_;
  DatasetDescriptor descriptor_;
  std::vector<PairRecord> records_;
  std::vector<torch::Tensor> images_;
  std::vector<KeypointSet> keypoints_;
  std::vector<std::array<std::size_t, 4>> slots_;  // x, y, lx, ly
};

/// Endless, reproducible pass over a dataset: reshuffled every epoch when
/// `shuffle`, each pair flipped with probability 0.5 when `augment`.
class PairStream {
 public:
  PairStream(std::shared_ptr<const PairDataset> data, bool augment, bool shuffle, uint64_t seed);

  TrainingPair next();
  std::vector<TrainingPair> next_batch(std::size_t n);

  /// Forces every subsequent pair to be flipped (true) or not (false)
  /// regardless of the coin; `std::nullopt` restores the coin.
  void force_flip(std::optional<bool> flip) { forced_flip_ = flip; }

  int64_t epoch() const { return epoch_; }
  const PairDataset& dataset() const { return *data_; }

  /// Serialized cursor + RNG, for exact training resume.
  std::string save_state() const;
  void load_state(const std::string& state);

 private:
  void reshuffle();

  std::shared_ptr<const PairDataset> data_;
  bool augment_;
  bool shuffle_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  int64_t epoch_ = 0;
  std::optional<bool> forced_flip_;
};

/// Load `dir` and stream it.
PairStream load_pairs(const std::filesystem::path& dir, bool augment, uint64_t seed, bool shuffle = true);

/// Batched sources / targets: [B,3,H,W].
torch::Tensor stack_x(const std::vector<TrainingPair>& batch);
torch::Tensor stack_y(const std::vector<TrainingPair>& batch);

}  // namespace c2gan
