#include "c2gan/trainer.hpp"

#include <cmath>
#include <sstream>

#include "c2gan/checkpoint.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/metrics.hpp"

namespace c2gan {

CycleSet CycleSet::parse(std::string_view list) {
  CycleSet set{false, false};
  bool image = false;
  std::string item;
  std::stringstream ss{std::string(list)};
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item == "i2i2i") image = true;
    else if (item == "k2g2k") set.k2g2k = true;
    else if (item == "k2r2k") set.k2r2k = true;
    else throw ArgumentError("unknown cycle '" + item + "' (expected i2i2i, k2g2k, k2r2k)");
  }
  if (!image) throw ArgumentError("the i2i2i cycle cannot be disabled");
  return set;
}

std::string CycleSet::to_string() const {
  std::string s = "i2i2i";
  if (k2g2k) s += ",k2g2k";
  if (k2r2k) s += ",k2r2k";
  return s;
}

KeypointRendering KeypointRendering::from(const DatasetDescriptor& d, double mask_dilation) {
  return {d.mode, d.radius, d.adjacency, mask_dilation};
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 0 || max_steps < 0) throw ConfigError("epochs and max_steps must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (buffer_size < 0 || warmup_iters < 0) throw ConfigError("buffer_size and warmup_iters must be >= 0");
  weights.validate();
}

torch::Tensor render_batch(const std::vector<KeypointSet>& keypoints, const KeypointRendering& rendering) {
  std::vector<torch::Tensor> maps;
  maps.reserve(keypoints.size());
  for (const auto& k : keypoints) maps.push_back(render(k, rendering.mode, rendering.radius).data);
  return to_network_range(torch::stack(maps));
}

CycleInputs make_cycle_inputs(const std::vector<TrainingPair>& batch, const KeypointRendering& rendering) {
  if (batch.empty()) throw ArgumentError("empty batch");
  std::vector<KeypointSet> lx, ly;
  for (const auto& p : batch) {
    lx.push_back(p.lx);
    ly.push_back(p.ly);
  }
  return {stack_x(batch), stack_y(batch), render_batch(lx, rendering), render_batch(ly, rendering)};
}

CycleGenerators generators_of(const ModelSet& models) {
  auto wrap = [](UNet net) -> GeneratorFn { return [net](const torch::Tensor& t) mutable { return net->forward(t); }; };
  return {wrap(models.image_gen), wrap(models.image_rec), wrap(models.keypoint_gen), wrap(models.keypoint_rec)};
}

CycleBundle forward_cycles(const CycleInputs& in, const CycleGenerators& gens, const CycleSet& cycles) {
  CycleBundle b;
  b.y_star = gens.image_gen(torch::cat({in.x, in.ly}, 1));
  b.x_star = gens.image_rec(torch::cat({b.y_star, in.lx}, 1));
  if (cycles.k2g2k) b.ly_star = gens.keypoint_gen(b.y_star);
  if (cycles.k2r2k) b.lx_star = gens.keypoint_rec(b.x_star);
  return b;
}

CycleBundle forward_cycles(const CycleInputs& in, const ModelSet& models, const CycleSet& cycles) {
  const int expected = models.config.keypoint_channels();
  if (in.lx.size(1) != expected || in.ly.size(1) != expected) {
    throw ConfigError("keypoint heatmaps have " + std::to_string(in.ly.size(1)) + " channels but the models expect " +
                      std::to_string(expected) + " (" + std::string(to_string(models.config.mode)) + " mode)");
  }
  if (in.x.size(2) != models.config.image_size || in.x.size(3) != models.config.image_size) {
    throw ConfigError("images are " + std::to_string(in.x.size(2)) + "x" + std::to_string(in.x.size(3)) +
                      " but the models were built for " + std::to_string(models.config.image_size));
  }
  return forward_cycles(in, generators_of(models), cycles);
}

KeypointTargets warmup_keypoints(int64_t iteration, int64_t warmup_iters, const CycleBundle& bundle,
                                 const std::vector<TrainingPair>& batch, const CycleInputs& inputs,
                                 const KeypointOracle* oracle, const KeypointRendering& rendering) {
  if (iteration >= warmup_iters) return {inputs.ly, inputs.lx, TargetSource::ground_truth, true};
  if (!oracle) {
    throw ConfigError("keypoint warm-up needs an oracle but this dataset provides none; set warmup_iters=0");
  }
  std::vector<KeypointSet> ly, lx;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto idx = static_cast<int64_t>(i);
    ly.push_back(oracle->extract(bundle.y_star[idx].detach(), batch[i].ly));
    lx.push_back(oracle->extract(bundle.x_star[idx].detach(), batch[i].lx));
  }
  return {render_batch(ly, rendering), render_batch(lx, rendering), TargetSource::oracle, false};
}

struct Trainer::Optimizers {
  torch::optim::Adam image_gen;
  torch::optim::Adam image_disc;
  torch::optim::Adam keypoint_gen;
  torch::optim::Adam keypoint_disc;
};

namespace {

torch::optim::AdamOptions adam_options(const TrainConfig& c) {
  return torch::optim::AdamOptions(c.learning_rate).betas({c.adam_beta1, c.adam_beta2});
}

double checked(const torch::Tensor& t, const char* term) {
  const double v = t.item<double>();
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "loss term " << term << " is not finite (" << v << ")";
    throw NonFiniteLossError(msg.str());
  }
  return v;
}

void apply_gradients(torch::optim::Optimizer& opt, const std::vector<torch::Tensor>& params,
                     const std::vector<torch::Tensor>& grads) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    p.mutable_grad() = grads[i].defined() ? grads[i] : torch::zeros_like(p);
  }
  opt.step();
  opt.zero_grad();
}

void descend(torch::optim::Optimizer& opt, const torch::Tensor& loss, const std::vector<torch::Tensor>& params,
             bool retain_graph = false) {
  auto grads = torch::autograd::grad({loss}, params, {}, retain_graph, false, /*allow_unused=*/true);
  apply_gradients(opt, params, grads);
}

}  // namespace

Trainer::Trainer(ModelSet models, TrainConfig config, KeypointRendering rendering,
                 std::shared_ptr<const KeypointOracle> oracle)
    : models_(std::move(models)),
      config_(std::move(config)),
      rendering_(std::move(rendering)),
      oracle_(std::move(oracle)),
      buffer_gen_(static_cast<std::size_t>(std::max(0, config_.buffer_size)), config_.seed ^ 0x5bd1e995ULL),
      buffer_rec_(static_cast<std::size_t>(std::max(0, config_.buffer_size)), config_.seed ^ 0x27d4eb2fULL) {
  config_.validate();
  if (rendering_.mode != models_.config.mode) throw ConfigError("keypoint mode of data and models differ");
  const auto opts = adam_options(config_);
  optim_ = std::make_shared<Optimizers>(Optimizers{
      torch::optim::Adam(models_.image_generator_parameters(), opts),
      torch::optim::Adam(models_.image_discriminator_parameters(), opts),
      torch::optim::Adam(models_.keypoint_generator_parameters(), opts),
      torch::optim::Adam(models_.keypoint_discriminator_parameters(), opts)});
}

LossReport Trainer::train_step(const std::vector<TrainingPair>& batch) {
  const auto& w = config_.weights;
  const auto& cycles = config_.cycles;
  const bool cross = models_.config.discriminator_mode == DiscriminatorMode::cross_modal;
  const bool image_gan = w.image_gan > 0.0;
  const bool keypoint_cycle = cycles.any_keypoint() && w.keypoint_cycle > 0.0;
  const bool keypoint_gan = cycles.any_keypoint() && w.keypoint_gan > 0.0;

  models_.train();
  const auto in = make_cycle_inputs(batch, rendering_);
  const auto bundle = forward_cycles(in, models_, cycles);

  auto image_input = [&](const torch::Tensor& cond, const torch::Tensor& kp, const torch::Tensor& img) {
    return cross ? torch::cat({cond, kp, img}, 1) : torch::cat({cond, img}, 1);
  };
  auto keypoint_input = [&](const torch::Tensor& img, const torch::Tensor& kp) {
    return cross ? torch::cat({img, kp}, 1) : kp;
  };

  LossReport report;
  StepDetail detail;
  const auto zero = torch::zeros({});

  // Generator-side terms, all from one forward pass.
  auto l_image_gan = zero;
  if (image_gan) {
    l_image_gan = adversarial_loss_g(models_.image_disc->forward(image_input(in.x, in.ly, bundle.y_star))) +
                  adversarial_loss_g(models_.image_disc_rec->forward(image_input(in.y, in.lx, bundle.x_star)));
  }
  const auto l_image_cycle = image_cycle_loss(bundle.x_star, in.x);
  torch::Tensor l_pixel;
  if (config_.mask_loss) {
    std::vector<torch::Tensor> masks;
    for (const auto& p : batch) {
      masks.push_back(pose_mask(p.ly, p.ly.frame.height, p.ly.frame.width, rendering_.mask_dilation,
                                rendering_.adjacency));
    }
    l_pixel = mask_loss(bundle.y_star, in.y, torch::stack(masks));
  } else {
    l_pixel = pixel_loss(bundle.y_star, in.y);
  }

  auto l_keypoint_cycle = zero;
  auto l_keypoint_gan = zero;
  bool keypoints_drive_image = true;
  if (cycles.any_keypoint() && (keypoint_cycle || keypoint_gan)) {
    const auto targets = warmup_keypoints(iteration_, config_.warmup_iters, bundle, batch, in, oracle_.get(), rendering_);
    detail.target_source = targets.source;
    keypoints_drive_image = targets.drives_image_generator;
    if (keypoint_cycle) {
      if (bundle.ly_star) l_keypoint_cycle = l_keypoint_cycle + l1_distance(*bundle.ly_star, targets.ly);
      if (bundle.lx_star) l_keypoint_cycle = l_keypoint_cycle + l1_distance(*bundle.lx_star, targets.lx);
    }
    if (keypoint_gan) {
      if (bundle.ly_star) {
        l_keypoint_gan = l_keypoint_gan +
                         adversarial_loss_g(models_.keypoint_disc->forward(keypoint_input(bundle.y_star, *bundle.ly_star)));
      }
      if (bundle.lx_star) {
        l_keypoint_gan = l_keypoint_gan +
                         adversarial_loss_g(models_.keypoint_disc->forward(keypoint_input(bundle.x_star, *bundle.lx_star)));
      }
    }
  }

  report.image_gan_g = checked(l_image_gan, "L_I_gan_G");
  report.image_cycle = checked(l_image_cycle, "L_I_cyc");
  report.image_pixel = checked(l_pixel, "L_I_pixel");
  report.keypoint_gan_g = checked(l_keypoint_gan, "L_K_gan_G");
  report.keypoint_cycle = checked(l_keypoint_cycle, "L_K_cyc");

  // G_I minimizes its slice of the objective. Which keypoint terms reach it
  // is decided here rather than by detaching: gradients are taken with
  // respect to G_I's parameters only.
  auto image_gen_loss = w.image_gan * l_image_gan + w.image_cycle * l_image_cycle + w.image_pixel * l_pixel;
  if (keypoint_cycle && keypoints_drive_image) image_gen_loss = image_gen_loss + w.keypoint_cycle * l_keypoint_cycle;
  if (keypoint_gan && config_.keypoint_adversarial_into_image_generator) {
    image_gen_loss = image_gen_loss + w.keypoint_gan * l_keypoint_gan;
  }
  const auto gi_params = models_.image_generator_parameters();
  const bool keypoint_update = keypoint_cycle || keypoint_gan;
  auto gi_grads = torch::autograd::grad({image_gen_loss}, gi_params, {}, /*retain_graph=*/keypoint_update, false, true);

  std::vector<torch::Tensor> gk_params, gk_grads;
  if (keypoint_update) {
    gk_params = models_.keypoint_generator_parameters();
    const auto keypoint_gen_loss = w.keypoint_gan * l_keypoint_gan + w.keypoint_cycle * l_keypoint_cycle;
    gk_grads = torch::autograd::grad({keypoint_gen_loss}, gk_params, {}, false, false, true);
  }

  // 1. G_I
  apply_gradients(optim_->image_gen, gi_params, gi_grads);

  // 2. D_I on real triplets and history-buffered fake triplets.
  if (image_gan) {
    const auto fake_gen = buffer_gen_.query_batch(image_input(in.x, in.ly, bundle.y_star).detach());
    const auto fake_rec = buffer_rec_.query_batch(image_input(in.y, in.lx, bundle.x_star).detach());
    const auto unhalved =
        adversarial_loss_d(models_.image_disc->forward(image_input(in.x, in.ly, in.y)),
                           models_.image_disc->forward(fake_gen), config_.real_label, config_.fake_label) +
        adversarial_loss_d(models_.image_disc_rec->forward(image_input(in.y, in.lx, in.x)),
                           models_.image_disc_rec->forward(fake_rec), config_.real_label, config_.fake_label);
    const auto halved = 0.5 * unhalved;
    detail.image_gan_d_unhalved = checked(unhalved, "L_I_gan_D");
    report.image_gan_d = halved.item<double>();
    descend(optim_->image_disc, w.image_gan * halved, models_.image_discriminator_parameters());
  }

  // 3. G_K
  if (keypoint_update) apply_gradients(optim_->keypoint_gen, gk_params, gk_grads);

  // 4. D_K on [image, keypoints] pairs: ground truth vs generated keypoints.
  if (keypoint_gan) {
    auto unhalved = zero;
    auto term = [&](const torch::Tensor& image, const torch::Tensor& truth, const torch::Tensor& generated) {
      const auto img = image.detach();
      return adversarial_loss_d(models_.keypoint_disc->forward(keypoint_input(img, truth)),
                                models_.keypoint_disc->forward(keypoint_input(img, generated.detach())),
                                config_.real_label, config_.fake_label);
    };
    if (bundle.ly_star) unhalved = unhalved + term(bundle.y_star, in.ly, *bundle.ly_star);
    if (bundle.lx_star) unhalved = unhalved + term(bundle.x_star, in.lx, *bundle.lx_star);
    const auto halved = 0.5 * unhalved;
    detail.keypoint_gan_d_unhalved = checked(unhalved, "L_K_gan_D");
    report.keypoint_gan_d = halved.item<double>();
    descend(optim_->keypoint_disc, w.keypoint_gan * halved, models_.keypoint_discriminator_parameters());
  }

  report.total_g = total_objective({{"image_gan", report.image_gan_g},
                                    {"image_cycle", report.image_cycle},
                                    {"image_pixel", report.image_pixel},
                                    {"keypoint_gan", report.keypoint_gan_g},
                                    {"keypoint_cycle", report.keypoint_cycle}},
                                   w);
  detail_ = detail;
  ++iteration_;
  return report;
}

void Trainer::save(const std::filesystem::path& path, const nlohmann::json& extra) const {
  CheckpointMeta meta;
  meta.model = models_.config;
  meta.iteration = iteration_;
  meta.seed = config_.seed;
  meta.extra = extra;
  write_checkpoint(path, models_, meta, [&](torch::serialize::OutputArchive& archive) {
    auto put_optimizer = [&](const char* key, const torch::optim::Optimizer& opt) {
      torch::serialize::OutputArchive sub;
      opt.save(sub);
      archive.write(key, sub);
    };
    put_optimizer("optim/G_I", optim_->image_gen);
    put_optimizer("optim/D_I", optim_->image_disc);
    put_optimizer("optim/G_K", optim_->keypoint_gen);
    put_optimizer("optim/D_K", optim_->keypoint_disc);
    auto put_buffer = [&](const std::string& key, const HistoryBuffer& buffer) {
      archive.write(key + "/state", c10::IValue(buffer.rng_state()));
      archive.write(key + "/count", c10::IValue(static_cast<int64_t>(buffer.size())));
      if (buffer.size() > 0) archive.write(key + "/samples", torch::stack(buffer.stored()), /*is_buffer=*/true);
    };
    put_buffer("history/gen", buffer_gen_);
    put_buffer("history/rec", buffer_rec_);
  });
}

nlohmann::json Trainer::load(const std::filesystem::path& path) {
  const auto meta = read_checkpoint(path, models_, [&](torch::serialize::InputArchive& archive) {
    auto get_optimizer = [&](const char* key, torch::optim::Optimizer& opt) {
      torch::serialize::InputArchive sub;
      if (!archive.try_read(key, sub)) throw ConfigError("checkpoint " + path.string() + " has no optimizer state");
      opt.load(sub);
    };
    get_optimizer("optim/G_I", optim_->image_gen);
    get_optimizer("optim/D_I", optim_->image_disc);
    get_optimizer("optim/G_K", optim_->keypoint_gen);
    get_optimizer("optim/D_K", optim_->keypoint_disc);
    auto get_buffer = [&](const std::string& key, HistoryBuffer& buffer) {
      c10::IValue state, count;
      if (!archive.try_read(key + "/state", state) || !archive.try_read(key + "/count", count)) {
        throw ConfigError("checkpoint " + path.string() + " has no history buffer state");
      }
      std::vector<torch::Tensor> samples;
      if (count.toInt() > 0) {
        torch::Tensor stacked;
        archive.read(key + "/samples", stacked, /*is_buffer=*/true);
        for (int64_t i = 0; i < stacked.size(0); ++i) samples.push_back(stacked[i].clone());
      }
      buffer.restore(state.toStringRef(), std::move(samples));
    };
    get_buffer("history/gen", buffer_gen_);
    get_buffer("history/rec", buffer_rec_);
  });
  iteration_ = meta.iteration;
  return meta.extra;
}

namespace {

// Puts every network of `models` into eval mode for the guard's lifetime.
class EvalGuard {
 public:
  explicit EvalGuard(const ModelSet& models) {
    for (auto& [name, net] : models.networks()) {
      saved_.emplace_back(net, net->is_training());
      net->eval();
    }
  }
  ~EvalGuard() {
    for (auto& [net, training] : saved_) net->train(training);
  }
  EvalGuard(const EvalGuard&) = delete;
  EvalGuard& operator=(const EvalGuard&) = delete;

 private:
  std::vector<std::pair<std::shared_ptr<torch::nn::Module>, bool>> saved_;
  torch::NoGradGuard no_grad_;
};

}  // namespace

torch::Tensor translate(const ModelSet& models, const torch::Tensor& x, const KeypointSet& ly,
                        const KeypointRendering& rendering) {
  const bool single = x.dim() == 3;
  const auto batch = single ? x.unsqueeze(0) : x;
  if (batch.dim() != 4 || batch.size(1) != 3) throw ArgumentError("translate expects a [3,H,W] or [B,3,H,W] image");
  if (ly.frame.height != batch.size(2) || ly.frame.width != batch.size(3)) {
    throw ArgumentError("target keypoints are framed " + std::to_string(ly.frame.height) + "x" +
                        std::to_string(ly.frame.width) + " but the image is " + std::to_string(batch.size(2)) + "x" +
                        std::to_string(batch.size(3)));
  }
  EvalGuard guard(models);
  auto heat = render_batch({ly}, rendering).expand({batch.size(0), -1, -1, -1});
  auto gen = models.image_gen;
  auto y = gen->forward(torch::cat({batch, heat}, 1));
  return single ? y.squeeze(0) : y;
}

Extraction extract(const ModelSet& models, const torch::Tensor& x, const KeypointRendering& rendering) {
  if (x.dim() != 3 || x.size(0) != 3) throw ArgumentError("extract expects a [3,H,W] image");
  EvalGuard guard(models);
  Extraction out;
  auto kgen = models.keypoint_gen;
  out.heatmap = from_network_range(kgen->forward(x.unsqueeze(0)).squeeze(0)).clamp(0.0, 1.0);
  if (rendering.mode == HeatmapMode::person) {
    out.keypoints = decode({out.heatmap, HeatmapMode::person, rendering.radius});
  }
  return out;
}

}  // namespace c2gan
