#include "c2gan/checkpoint.hpp"

#include "c2gan/errors.hpp"

namespace fs = std::filesystem;

namespace c2gan {

nlohmann::json CheckpointMeta::to_json() const {
  return {{"format", format},
          {"config", model.to_json()},
          {"iteration", iteration},
          {"seed", seed},
          {"sharing", std::string(to_string(model.sharing))},
          {"extra", extra}};
}

CheckpointMeta CheckpointMeta::from_json(const nlohmann::json& j) {
  CheckpointMeta m;
  m.format = j.at("format").get<int>();
  m.model = ModelConfig::from_json(j.at("config"));
  m.iteration = j.at("iteration").get<int64_t>();
  m.seed = j.at("seed").get<uint64_t>();
  m.extra = j.value("extra", nlohmann::json::object());
  return m;
}

void write_checkpoint(const fs::path& path, const ModelSet& models, const CheckpointMeta& meta,
                      const std::function<void(torch::serialize::OutputArchive&)>& more) {
  torch::serialize::OutputArchive archive;
  archive.write("meta", c10::IValue(meta.to_json().dump()));
  for (const auto& [key, tensor] : named_tensors(models)) archive.write(key, tensor.detach(), /*is_buffer=*/true);
  if (more) more(archive);
  auto tmp = path;
  tmp += ".tmp";
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    archive.save_to(tmp.string());
    fs::rename(tmp, path);
  } catch (const std::exception& e) {
    throw IoError("cannot write checkpoint " + path.string() + ": " + e.what());
  }
}

namespace {

torch::serialize::InputArchive open_archive(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("checkpoint " + path.string() + " does not exist");
  torch::serialize::InputArchive archive;
  try {
    archive.load_from(path.string());
  } catch (const std::exception& e) {
    throw IoError("cannot read checkpoint " + path.string() + ": " + e.what());
  }
  return archive;
}

CheckpointMeta meta_of(torch::serialize::InputArchive& archive, const fs::path& path) {
  c10::IValue raw;
  if (!archive.try_read("meta", raw) || !raw.isString()) {
    throw ConfigError("checkpoint " + path.string() + " carries no metadata");
  }
  CheckpointMeta meta;
  try {
    meta = CheckpointMeta::from_json(nlohmann::json::parse(raw.toStringRef()));
  } catch (const std::exception& e) {
    throw ConfigError("checkpoint " + path.string() + " has malformed metadata: " + e.what());
  }
  if (meta.format != kCheckpointFormat) {
    throw ConfigError("checkpoint " + path.string() + " has format " + std::to_string(meta.format) + ", expected " +
                      std::to_string(kCheckpointFormat));
  }
  return meta;
}

std::string config_difference(const ModelConfig& want, const ModelConfig& have) {
  const auto a = want.to_json();
  const auto b = have.to_json();
  std::string diff;
  for (const auto& [key, value] : a.items()) {
    if (b.contains(key) && b[key] != value) {
      diff += (diff.empty() ? "" : ", ") + key + ": checkpoint " + b[key].dump() + " vs configured " + value.dump();
    }
  }
  return diff;
}

}  // namespace

CheckpointMeta read_checkpoint(const fs::path& path, ModelSet& models,
                               const std::function<void(torch::serialize::InputArchive&)>& more) {
  auto archive = open_archive(path);
  auto meta = meta_of(archive, path);
  if (!(meta.model == models.config)) {
    throw ConfigError("checkpoint " + path.string() + " does not match the model configuration (" +
                      config_difference(models.config, meta.model) + ")");
  }
  torch::NoGradGuard no_grad;
  for (auto& [key, tensor] : named_tensors(models)) {
    torch::Tensor stored;
    if (!archive.try_read(key, stored, /*is_buffer=*/true)) {
      throw ConfigError("checkpoint " + path.string() + " lacks tensor " + key);
    }
    if (!stored.sizes().equals(tensor.sizes())) {
      throw ConfigError("checkpoint tensor " + key + " has shape " + c10::str(stored.sizes()) + ", expected " +
                        c10::str(tensor.sizes()));
    }
    tensor.copy_(stored);
  }
  if (more) more(archive);
  return meta;
}

CheckpointMeta read_checkpoint_meta(const fs::path& path) {
  auto archive = open_archive(path);
  return meta_of(archive, path);
}

ModelSet load_models(const fs::path& path, CheckpointMeta* meta) {
  const auto header = read_checkpoint_meta(path);
  auto models = ModelSet::build(header.model, header.seed);
  auto full = read_checkpoint(path, models);
  if (meta) *meta = full;
  return models;
}

}  // namespace c2gan
