#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "c2gan/heatmap.hpp"

namespace c2gan {

enum class NormKind { batch, instance };
NormKind parse_norm(std::string_view name);

/// Shape of one network. For generators `depth` is the number of stride-2
/// levels; for patch discriminators it is the number of stride-2 layers
/// (3 gives the 70x70 PatchGAN).
struct NetConfig {
  int in_channels = 6;
  int out_channels = 3;
  int base_filters = 32;
  int depth = 6;
  int image_size = 64;
  NormKind norm = NormKind::batch;
};

/// U-Net generator. Encoder levels are Conv(4,2,1) -> Norm -> LeakyReLU(0.2);
/// decoder levels are ConvTranspose(4,2,1) -> Norm -> ReLU followed by
/// concatenation with the mirrored encoder output; the last layer maps to
/// out_channels and applies Tanh. The innermost level has no normalization.
class UNetImpl : public torch::nn::Module {
 public:
  explicit UNetImpl(const NetConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);
  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  torch::nn::ModuleList down_{nullptr};
  torch::nn::ModuleList up_{nullptr};
};
TORCH_MODULE(UNet);

/// PatchGAN discriminator: a stride-2 stack of Conv -> Norm -> LeakyReLU(0.2)
/// (the first layer unnormalized), one stride-1 layer, then a 1-channel
/// convolution and Sigmoid. Output is a [B,1,h,w] grid in (0,1).
class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(const NetConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);
  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  torch::nn::Sequential body_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

/// Throws ConfigError for an illegal generator shape.
UNet build_unet(const NetConfig& cfg);
/// Throws ConfigError when image_size is smaller than the receptive field.
PatchDiscriminator build_patch_discriminator(const NetConfig& cfg);

/// Receptive field of a PatchGAN with `layers` stride-2 convolutions.
int patch_receptive_field(int layers);
/// Patch grid side for a square input.
int patch_grid_size(int image_size, int layers);
/// Deepest standard stack (at most 3) whose receptive field fits the image.
int default_discriminator_layers(int image_size);

/// Convolution weights ~ N(0, 0.02); normalization scale ~ N(1, 0.02) and
/// shift 0; convolution biases 0. Deterministic in `seed`.
void init_weights(torch::nn::Module& module, uint64_t seed);

/// FNV-1a over the raw bytes of every parameter and buffer, in
/// registration order.
uint64_t parameter_checksum(const torch::nn::Module& module);

enum class Sharing { shared, non_shared };
enum class DiscriminatorMode { cross_modal, single_modal };
Sharing parse_sharing(std::string_view name);
DiscriminatorMode parse_discriminator_mode(std::string_view name);
std::string_view to_string(Sharing s);
std::string_view to_string(DiscriminatorMode m);

struct ModelConfig {
  HeatmapMode mode = HeatmapMode::person;
  int num_keypoints = 8;
  int image_size = 64;
  int g_base_filters = 32;
  int g_depth = 6;
  int d_base_filters = 32;
  int d_layers = 2;
  NormKind norm = NormKind::batch;
  Sharing sharing = Sharing::shared;
  DiscriminatorMode discriminator_mode = DiscriminatorMode::cross_modal;
  /// Use a second image discriminator for the reconstruction triplets.
  bool separate_reconstruction_discriminator = false;

  int keypoint_channels() const { return heatmap_channels(mode, static_cast<std::size_t>(num_keypoints)); }
  NetConfig image_generator() const;
  NetConfig keypoint_generator() const;
  NetConfig image_discriminator() const;
  NetConfig keypoint_discriminator() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// The four networks. In shared mode `image_rec` is the same module object as
/// `image_gen` (likewise `keypoint_rec` / `keypoint_gen`); in non-shared mode
/// they are distinct parameter sets. `image_disc_rec` aliases `image_disc`
/// unless the config asks for a separate one.
struct ModelSet {
  ModelConfig config;
  UNet image_gen{nullptr};
  UNet image_rec{nullptr};
  UNet keypoint_gen{nullptr};
  UNet keypoint_rec{nullptr};
  PatchDiscriminator image_disc{nullptr};
  PatchDiscriminator image_disc_rec{nullptr};
  PatchDiscriminator keypoint_disc{nullptr};

  /// Builds and initializes every network from `seed`. Each network draws
  /// from its own seed stream, so generator weights do not depend on the
  /// discriminator configuration.
  static ModelSet build(const ModelConfig& config, uint64_t seed);

  /// Distinct networks with their checkpoint names ("G_I", "G_I_rec", "G_K",
  /// "G_K_rec", "D_I", "D_I_rec", "D_K").
  std::vector<std::pair<std::string, std::shared_ptr<torch::nn::Module>>> networks() const;

  std::vector<torch::Tensor> image_generator_parameters() const;
  std::vector<torch::Tensor> keypoint_generator_parameters() const;
  std::vector<torch::Tensor> image_discriminator_parameters() const;
  std::vector<torch::Tensor> keypoint_discriminator_parameters() const;

  void train(bool on = true);
  void eval() { train(false); }
};

/// Every parameter and buffer keyed "<network>/<layer>/<tensor>".
std::vector<std::pair<std::string, torch::Tensor>> named_tensors(const ModelSet& models);

}  // namespace c2gan
