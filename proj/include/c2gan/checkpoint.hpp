#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>

#include <torch/torch.h>

#include "c2gan/networks.hpp"

namespace c2gan {

inline constexpr int kCheckpointFormat = 1;

/// JSON metadata stored next to the named tensors.
struct CheckpointMeta {
  int format = kCheckpointFormat;
  ModelConfig model;
  int64_t iteration = 0;
  uint64_t seed = 0;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static CheckpointMeta from_json(const nlohmann::json& j);
};

/// Archive with every tensor of `named_tensors(models)` plus the metadata
/// under "meta". `more` may add further entries. Written to a temporary file
/// and renamed into place.
void write_checkpoint(const std::filesystem::path& path, const ModelSet& models, const CheckpointMeta& meta,
                      const std::function<void(torch::serialize::OutputArchive&)>& more = {});

/// Restores tensors into `models` (which must already be built) after
/// checking format and model configuration; throws ConfigError with the
/// differing fields otherwise.
CheckpointMeta read_checkpoint(const std::filesystem::path& path, ModelSet& models,
                               const std::function<void(torch::serialize::InputArchive&)>& more = {});

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path);

/// Builds the models described by a checkpoint and loads its tensors.
ModelSet load_models(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

}  // namespace c2gan
