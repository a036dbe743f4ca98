#include "c2gan/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "c2gan/errors.hpp"

namespace c2gan {

const std::vector<RunConfig::Key>& RunConfig::keys() {
  static const std::vector<Key> table = {
      {"seed", "0", "seed for data generation, initialization, shuffling and augmentation"},
      // data
      {"data_dir", "data/train", "training dataset directory (pairs.csv layout)"},
      {"test_dir", "data/test", "held-out dataset directory used by evaluate and ablate"},
      {"image_size", "64", "square canvas side in pixels; must be divisible by 2^g_depth"},
      {"n_identities", "100", "generate-data: identities in the training set"},
      {"poses_per_identity", "4", "generate-data: poses per identity (>= 2)"},
      {"test_identities", "20", "generate-data: identities in the held-out set (disjoint ids)"},
      {"keypoint_mode", "person", "face (black-on-white landmark image) or person (one disc channel per joint)"},
      {"heatmap_radius", "4", "person-mode disc radius in pixels (a convention; not fixed by the method)"},
      {"noise_texture", "true", "generate-data: add deterministic per-identity background texture"},
      // networks
      {"g_base_filters", "0", "generator filters at the first level; 0 = 64 at >= 256 px, else 32"},
      {"g_depth", "0", "generator stride-2 levels; 0 = down to 1x1 (log2 image_size)"},
      {"d_base_filters", "0", "discriminator filters at the first layer; 0 = same rule as g_base_filters"},
      {"d_layers", "0", "discriminator stride-2 layers; 0 = 3 (70x70 patches) when it fits, else fewer"},
      {"norm", "batch", "batch or instance normalization"},
      {"sharing", "shared", "shared or non_shared generator parameters across the two uses"},
      {"discriminator_mode", "cross_modal", "cross_modal (images + keypoints) or single_modal (one modality)"},
      {"separate_reconstruction_discriminator", "false", "use a second D_I for reconstruction triplets"},
      // training
      {"epochs", "200", "training epochs (ignored when max_steps > 0)"},
      {"max_steps", "0", "stop after this many steps when > 0"},
      {"batch_size", "16", "pairs per step"},
      {"learning_rate", "0.0002", "Adam learning rate (constant)"},
      {"adam_beta1", "0.5", "Adam beta1"},
      {"adam_beta2", "0.999", "Adam beta2"},
      {"lambda_image_gan", "1", "weight of the image adversarial term"},
      {"lambda_image_cycle", "10", "weight of the image cycle-consistency term"},
      {"lambda_image_pixel", "10", "weight of the pixel term"},
      {"lambda_keypoint_gan", "1", "weight of the keypoint adversarial term"},
      {"lambda_keypoint_cycle", "10", "weight of the keypoint cycle-consistency term"},
      {"cycles", "i2i2i,k2g2k,k2r2k", "enabled cycles; i2i2i is mandatory"},
      {"buffer_size", "50", "history buffer capacity for D_I fakes (0 disables)"},
      {"warmup_iters", "500", "steps during which keypoint targets come from the oracle"},
      {"mask_loss", "false", "weight foreground pixels twice in the pixel term (person mode)"},
      {"mask_dilation", "0", "foreground-mask dilation in pixels; 0 = 10 px scaled from 256"},
      {"keypoint_adversarial_into_image_generator", "false", "let the keypoint adversarial term update G_I"},
      {"augment", "true", "random left-right flips of whole pairs"},
      {"real_label", "1", "discriminator target for real inputs"},
      {"fake_label", "0", "discriminator target for generated inputs"},
      {"sample_every", "200", "write a sample grid every N steps (0 = only at the end)"},
      {"checkpoint_every", "1000", "write checkpoints/latest.pt every N steps (0 = only at the end)"},
      {"resume", "", "train: checkpoint to resume from"},
      // inference
      {"checkpoint", "", "evaluate/translate: model checkpoint"},
      {"input_image", "", "translate: source PNG"},
      {"keypoints", "", "translate: target keypoint .jsonl (first line used)"},
      {"output", "translated.png", "translate: output PNG"},
      {"ablate_steps", "0", "ablate: steps per configuration; 0 = use max_steps/epochs"},
  };
  return table;
}

RunConfig::RunConfig() {
  for (const auto& k : keys()) values_.emplace(std::string(k.name), std::string(k.default_value));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::from_text(std::string_view text, std::string_view origin) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path.string());
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(value);
  explicit_[std::string(key)] = true;
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::merge(const RunConfig& other) {
  for (const auto& [key, flag] : other.explicit_) set(key, other.get(key));
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

int64_t RunConfig::get_int(std::string_view key) const {
  const auto& v = get(key);
  int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) + "' expects an integer, got '" + v + "'");
  }
  return out;
}

double RunConfig::get_double(std::string_view key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + std::string(key) + "' expects a number, got '" + v + "'");
}

bool RunConfig::get_bool(std::string_view key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "' expects true or false, got '" + v + "'");
}

bool RunConfig::is_set(std::string_view key) const { return explicit_.find(key) != explicit_.end(); }

std::string RunConfig::echo() const {
  std::ostringstream out;
  for (const auto& k : keys()) out << k.name << " = " << get(k.name) << '\n';
  return out.str();
}

std::string RunConfig::documented_defaults() {
  std::ostringstream out;
  for (const auto& k : keys()) out << "# " << k.doc << '\n' << k.name << " = " << k.default_value << '\n';
  return out.str();
}

}  // namespace c2gan
