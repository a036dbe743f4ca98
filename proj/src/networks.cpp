#include "c2gan/networks.hpp"

#include <set>

#include "c2gan/errors.hpp"

namespace nn = torch::nn;

namespace c2gan {

NormKind parse_norm(std::string_view name) {
  if (name == "batch") return NormKind::batch;
  if (name == "instance") return NormKind::instance;
  throw ArgumentError("unknown normalization '" + std::string(name) + "' (expected batch or instance)");
}

Sharing parse_sharing(std::string_view name) {
  if (name == "shared") return Sharing::shared;
  if (name == "non_shared") return Sharing::non_shared;
  throw ArgumentError("unknown sharing mode '" + std::string(name) + "' (expected shared or non_shared)");
}

DiscriminatorMode parse_discriminator_mode(std::string_view name) {
  if (name == "cross_modal") return DiscriminatorMode::cross_modal;
  if (name == "single_modal") return DiscriminatorMode::single_modal;
  throw ArgumentError("unknown discriminator mode '" + std::string(name) +
                      "' (expected cross_modal or single_modal)");
}

std::string_view to_string(Sharing s) { return s == Sharing::shared ? "shared" : "non_shared"; }
std::string_view to_string(DiscriminatorMode m) {
  return m == DiscriminatorMode::cross_modal ? "cross_modal" : "single_modal";
}

namespace {

int level_channels(int base, int level) { return base * std::min(1 << level, 8); }

void push_norm(nn::Sequential& seq, NormKind kind, int channels) {
  if (kind == NormKind::batch) {
    seq->push_back(nn::BatchNorm2d(nn::BatchNorm2dOptions(channels)));
  } else {
    seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(channels).affine(true)));
  }
}

nn::Conv2d conv(int in, int out, int stride, bool bias) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(stride).padding(1).bias(bias));
}

nn::ConvTranspose2d up_conv(int in, int out, bool bias) {
  return nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1).bias(bias));
}

void check_generator(const NetConfig& cfg) {
  if (cfg.depth < 1) throw ConfigError("generator depth must be >= 1");
  if (cfg.in_channels < 1 || cfg.out_channels < 1 || cfg.base_filters < 1) {
    throw ConfigError("generator channel counts must be positive");
  }
  if (cfg.depth > 30 || cfg.image_size <= 0 || cfg.image_size % (1 << cfg.depth) != 0) {
    throw ConfigError("image size " + std::to_string(cfg.image_size) + " is not divisible by 2^" +
                      std::to_string(cfg.depth));
  }
}

void check_input(const torch::Tensor& x, const NetConfig& cfg, int min_size, const char* what) {
  if (x.dim() != 4 || x.size(1) != cfg.in_channels) {
    throw ArgumentError(std::string(what) + " expects [B," + std::to_string(cfg.in_channels) + ",H,W] input, got " +
                        c10::str(x.sizes()));
  }
  if (x.size(2) < min_size || x.size(3) < min_size) {
    throw ArgumentError(std::string(what) + " input " + c10::str(x.sizes()) + " is smaller than " +
                        std::to_string(min_size));
  }
}

}  // namespace

UNetImpl::UNetImpl(const NetConfig& cfg) : cfg_(cfg) {
  check_generator(cfg);
  down_ = register_module("down", nn::ModuleList());
  up_ = register_module("up", nn::ModuleList());
  const int d = cfg.depth;
  for (int i = 0; i < d; ++i) {
    const int in = i == 0 ? cfg.in_channels : level_channels(cfg.base_filters, i - 1);
    const int out = level_channels(cfg.base_filters, i);
    const bool normed = i != d - 1;
    nn::Sequential block(conv(in, out, 2, !normed));
    if (normed) push_norm(block, cfg.norm, out);
    block->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    down_->push_back(block);
  }
  // up_[k] produces the decoder output at encoder level d-2-k.
  for (int i = d - 1; i >= 1; --i) {
    const int in = i == d - 1 ? level_channels(cfg.base_filters, i) : 2 * level_channels(cfg.base_filters, i);
    const int out = level_channels(cfg.base_filters, i - 1);
    nn::Sequential block(up_conv(in, out, false));
    push_norm(block, cfg.norm, out);
    block->push_back(nn::ReLU());
    up_->push_back(block);
  }
  const int last_in = d == 1 ? level_channels(cfg.base_filters, 0) : 2 * level_channels(cfg.base_filters, 0);
  nn::Sequential last(up_conv(last_in, cfg.out_channels, true));
  last->push_back(nn::Tanh());
  up_->push_back(last);
}

torch::Tensor UNetImpl::forward(const torch::Tensor& x) {
  check_input(x, cfg_, 1, "U-Net");
  const int64_t unit = int64_t{1} << cfg_.depth;
  if (x.size(2) % unit != 0 || x.size(3) % unit != 0) {
    throw ArgumentError("U-Net input " + c10::str(x.sizes()) + " is not divisible by " + std::to_string(unit));
  }
  std::vector<torch::Tensor> skips;
  auto h = x;
  for (const auto& block : *down_) {
    h = block->as<nn::Sequential>()->forward(h);
    skips.push_back(h);
  }
  const auto n_up = static_cast<int>(up_->size());
  for (int k = 0; k < n_up; ++k) {
    h = (*up_)[k]->as<nn::Sequential>()->forward(h);
    if (k + 1 < n_up) h = torch::cat({h, skips[static_cast<std::size_t>(cfg_.depth - 2 - k)]}, 1);
  }
  return h;
}

int patch_receptive_field(int layers) {
  int field = 4;                // final 1-channel conv
  field = (field - 1) + 4;      // stride-1 conv
  for (int i = 0; i < layers; ++i) field = (field - 1) * 2 + 4;
  return field;
}

int patch_grid_size(int image_size, int layers) {
  int s = image_size;
  for (int i = 0; i < layers; ++i) s /= 2;
  return s - 2;
}

int default_discriminator_layers(int image_size) {
  int layers = 3;
  while (layers > 1 && patch_receptive_field(layers) > image_size) --layers;
  return layers;
}

PatchDiscriminatorImpl::PatchDiscriminatorImpl(const NetConfig& cfg) : cfg_(cfg) {
  if (cfg.depth < 1) throw ConfigError("discriminator needs at least one stride-2 layer");
  if (cfg.in_channels < 1 || cfg.base_filters < 1) throw ConfigError("discriminator channel counts must be positive");
  const int field = patch_receptive_field(cfg.depth);
  if (cfg.image_size < field) {
    throw ConfigError("image size " + std::to_string(cfg.image_size) + " is smaller than the " +
                      std::to_string(field) + "x" + std::to_string(field) + " discriminator receptive field");
  }
  body_ = register_module("body", nn::Sequential());
  const auto lrelu = nn::LeakyReLUOptions().negative_slope(0.2);
  body_->push_back(conv(cfg.in_channels, cfg.base_filters, 2, true));
  body_->push_back(nn::LeakyReLU(lrelu));
  int prev = cfg.base_filters;
  for (int n = 1; n <= cfg.depth; ++n) {
    const int out = level_channels(cfg.base_filters, n);
    body_->push_back(conv(prev, out, n < cfg.depth ? 2 : 1, false));
    push_norm(body_, cfg.norm, out);
    body_->push_back(nn::LeakyReLU(lrelu));
    prev = out;
  }
  body_->push_back(conv(prev, 1, 1, true));
  body_->push_back(nn::Sigmoid());
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& x) {
  check_input(x, cfg_, patch_receptive_field(cfg_.depth), "discriminator");
  return body_->forward(x);
}

UNet build_unet(const NetConfig& cfg) { return UNet(cfg); }
PatchDiscriminator build_patch_discriminator(const NetConfig& cfg) { return PatchDiscriminator(cfg); }

void init_weights(nn::Module& module, uint64_t seed) {
  torch::NoGradGuard no_grad;
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  for (auto& m : module.modules(/*include_self=*/true)) {
    auto init_conv = [&](torch::Tensor& w, torch::Tensor& b) {
      w.normal_(0.0, 0.02, gen);
      if (b.defined()) b.zero_();
    };
    if (auto* c = m->as<nn::Conv2d>()) {
      init_conv(c->weight, c->bias);
    } else if (auto* t = m->as<nn::ConvTranspose2d>()) {
      init_conv(t->weight, t->bias);
    } else if (auto* bn = m->as<nn::BatchNorm2d>()) {
      bn->weight.normal_(1.0, 0.02, gen);
      bn->bias.zero_();
    } else if (auto* in = m->as<nn::InstanceNorm2d>()) {
      if (in->weight.defined()) in->weight.normal_(1.0, 0.02, gen);
      if (in->bias.defined()) in->bias.zero_();
    }
  }
}

uint64_t parameter_checksum(const nn::Module& module) {
  uint64_t h = 1469598103934665603ULL;
  auto absorb = [&h](const torch::Tensor& t) {
    const auto c = t.detach().contiguous().cpu();
    const auto* bytes = static_cast<const uint8_t*>(c.data_ptr());
    const auto n = static_cast<std::size_t>(c.numel()) * c.element_size();
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& p : module.parameters()) absorb(p);
  for (const auto& b : module.buffers()) absorb(b);
  return h;
}

NetConfig ModelConfig::image_generator() const {
  return {3 + keypoint_channels(), 3, g_base_filters, g_depth, image_size, norm};
}

NetConfig ModelConfig::keypoint_generator() const {
  return {3, keypoint_channels(), g_base_filters, g_depth, image_size, norm};
}

NetConfig ModelConfig::image_discriminator() const {
  const int in = discriminator_mode == DiscriminatorMode::cross_modal ? 3 + keypoint_channels() + 3 : 3 + 3;
  return {in, 1, d_base_filters, d_layers, image_size, norm};
}

NetConfig ModelConfig::keypoint_discriminator() const {
  const int in = discriminator_mode == DiscriminatorMode::cross_modal ? 3 + keypoint_channels() : keypoint_channels();
  return {in, 1, d_base_filters, d_layers, image_size, norm};
}

nlohmann::json ModelConfig::to_json() const {
  return {{"mode", std::string(to_string(mode))},
          {"num_keypoints", num_keypoints},
          {"image_size", image_size},
          {"g_base_filters", g_base_filters},
          {"g_depth", g_depth},
          {"d_base_filters", d_base_filters},
          {"d_layers", d_layers},
          {"norm", norm == NormKind::batch ? "batch" : "instance"},
          {"sharing", std::string(to_string(sharing))},
          {"discriminator_mode", std::string(to_string(discriminator_mode))},
          {"separate_reconstruction_discriminator", separate_reconstruction_discriminator}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.mode = parse_heatmap_mode(j.at("mode").get<std::string>());
  c.num_keypoints = j.at("num_keypoints").get<int>();
  c.image_size = j.at("image_size").get<int>();
  c.g_base_filters = j.at("g_base_filters").get<int>();
  c.g_depth = j.at("g_depth").get<int>();
  c.d_base_filters = j.at("d_base_filters").get<int>();
  c.d_layers = j.at("d_layers").get<int>();
  c.norm = parse_norm(j.at("norm").get<std::string>());
  c.sharing = parse_sharing(j.at("sharing").get<std::string>());
  c.discriminator_mode = parse_discriminator_mode(j.at("discriminator_mode").get<std::string>());
  c.separate_reconstruction_discriminator = j.at("separate_reconstruction_discriminator").get<bool>();
  return c;
}

namespace {

uint64_t stream_seed(uint64_t seed, std::string_view name) {
  uint64_t h = seed ^ 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

template <class Net>
Net make(const NetConfig& cfg, uint64_t seed, std::string_view name) {
  Net net(cfg);
  init_weights(*net, stream_seed(seed, name));
  return net;
}

}  // namespace

ModelSet ModelSet::build(const ModelConfig& config, uint64_t seed) {
  ModelSet m;
  m.config = config;
  m.image_gen = make<UNet>(config.image_generator(), seed, "G_I");
  m.keypoint_gen = make<UNet>(config.keypoint_generator(), seed, "G_K");
  if (config.sharing == Sharing::shared) {
    m.image_rec = m.image_gen;
    m.keypoint_rec = m.keypoint_gen;
  } else {
    m.image_rec = make<UNet>(config.image_generator(), seed, "G_I_rec");
    m.keypoint_rec = make<UNet>(config.keypoint_generator(), seed, "G_K_rec");
  }
  m.image_disc = make<PatchDiscriminator>(config.image_discriminator(), seed, "D_I");
  m.image_disc_rec = config.separate_reconstruction_discriminator
                         ? make<PatchDiscriminator>(config.image_discriminator(), seed, "D_I_rec")
                         : m.image_disc;
  m.keypoint_disc = make<PatchDiscriminator>(config.keypoint_discriminator(), seed, "D_K");
  return m;
}

std::vector<std::pair<std::string, std::shared_ptr<nn::Module>>> ModelSet::networks() const {
  std::vector<std::pair<std::string, std::shared_ptr<nn::Module>>> out;
  out.emplace_back("G_I", image_gen.ptr());
  if (image_rec.ptr() != image_gen.ptr()) out.emplace_back("G_I_rec", image_rec.ptr());
  out.emplace_back("G_K", keypoint_gen.ptr());
  if (keypoint_rec.ptr() != keypoint_gen.ptr()) out.emplace_back("G_K_rec", keypoint_rec.ptr());
  out.emplace_back("D_I", image_disc.ptr());
  if (image_disc_rec.ptr() != image_disc.ptr()) out.emplace_back("D_I_rec", image_disc_rec.ptr());
  out.emplace_back("D_K", keypoint_disc.ptr());
  return out;
}

namespace {

template <class A, class B>
std::vector<torch::Tensor> union_parameters(const A& a, const B& b) {
  auto params = a->parameters();
  if (a.ptr() != b.ptr()) {
    auto more = b->parameters();
    params.insert(params.end(), more.begin(), more.end());
  }
  return params;
}

}  // namespace

std::vector<torch::Tensor> ModelSet::image_generator_parameters() const { return union_parameters(image_gen, image_rec); }
std::vector<torch::Tensor> ModelSet::keypoint_generator_parameters() const {
  return union_parameters(keypoint_gen, keypoint_rec);
}
std::vector<torch::Tensor> ModelSet::image_discriminator_parameters() const {
  return union_parameters(image_disc, image_disc_rec);
}
std::vector<torch::Tensor> ModelSet::keypoint_discriminator_parameters() const { return keypoint_disc->parameters(); }

void ModelSet::train(bool on) {
  for (auto& [name, net] : networks()) net->train(on);
}

std::vector<std::pair<std::string, torch::Tensor>> named_tensors(const ModelSet& models) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  auto key = [](const std::string& network, const std::string& dotted) {
    const auto cut = dotted.rfind('.');
    return network + "/" + dotted.substr(0, cut) + "/" + dotted.substr(cut + 1);
  };
  for (const auto& [name, net] : models.networks()) {
    for (const auto& item : net->named_parameters()) out.emplace_back(key(name, item.key()), item.value());
    for (const auto& item : net->named_buffers()) out.emplace_back(key(name, item.key()), item.value());
  }
  return out;
}

}  // namespace c2gan
