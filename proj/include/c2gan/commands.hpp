#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "c2gan/dataset.hpp"
#include "c2gan/metrics.hpp"
#include "c2gan/networks.hpp"
#include "c2gan/objectives.hpp"
#include "c2gan/run_config.hpp"
#include "c2gan/trainer.hpp"

namespace c2gan {

/// Model configuration for a dataset, resolving the automatic (0) sizes.
ModelConfig model_config_from(const RunConfig& cfg, const DatasetDescriptor& data);
TrainConfig train_config_from(const RunConfig& cfg);

/// Writes `out/train` and `out/test` with disjoint identity ranges.
/// Returns the number of training pairs.
std::size_t cmd_generate_data(const RunConfig& cfg, const std::filesystem::path& out);

struct TrainSummary {
  int64_t steps = 0;
  std::filesystem::path checkpoint;
  LossReport last;
};

/// Run directory layout: config.txt, losses.csv, checkpoints/latest.pt,
/// samples/iter_NNNNNN.png. An INCOMPLETE marker exists while training.
TrainSummary cmd_train(const RunConfig& cfg, const std::filesystem::path& out);

/// Scores `test_dir` with `checkpoint`; writes out/eval.json and out/eval.csv.
EvalReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& out);

/// Translates `input_image` to the first pose of `keypoints`. Returns the
/// path written (`out` when not empty, else the `output` key).
std::filesystem::path cmd_translate(const RunConfig& cfg, const std::filesystem::path& out);

/// Named ablation variants: overrides applied on top of the base config.
using Overrides = std::vector<std::pair<std::string, std::string>>;
const std::vector<std::pair<std::string, Overrides>>& ablation_variants();

/// Trains and evaluates every variant under out/<name>; writes
/// out/ablation.json and out/ablation.csv.
nlohmann::json cmd_ablate(const RunConfig& cfg, const std::filesystem::path& out);

/// Rows of (source | target keypoints | target | generated), [3,R*H,4*W].
torch::Tensor sample_grid(const ModelSet& models, const std::vector<TrainingPair>& pairs,
                          const KeypointRendering& rendering);

/// Keypoints drawn as an image in [-1,1]: dark marks on white.
torch::Tensor keypoint_picture(const KeypointSet& keypoints, const KeypointRendering& rendering);

}  // namespace c2gan
