#include "c2gan/commands.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "c2gan/checkpoint.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/figure.hpp"
#include "c2gan/heatmap.hpp"
#include "c2gan/image_io.hpp"
#include "c2gan/keypoints.hpp"

namespace fs = std::filesystem;

namespace c2gan {

namespace {

int positive(const RunConfig& cfg, std::string_view key) {
  const auto v = cfg.get_int(key);
  if (v <= 0) throw ConfigError("config key '" + std::string(key) + "' must be positive");
  return static_cast<int>(v);
}

int non_negative(const RunConfig& cfg, std::string_view key) {
  const auto v = cfg.get_int(key);
  if (v < 0) throw ConfigError("config key '" + std::string(key) + "' must not be negative");
  return static_cast<int>(v);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string step_name(int64_t step) {
  std::ostringstream name;
  name << "iter_" << std::setw(6) << std::setfill('0') << step << ".png";
  return name.str();
}

KeypointRendering rendering_for(const RunConfig& cfg, const DatasetDescriptor& desc) {
  double dilation = cfg.get_double("mask_dilation");
  if (dilation <= 0) dilation = default_mask_dilation(desc.frame.width);
  return KeypointRendering::from(desc, dilation);
}

}  // namespace

ModelConfig model_config_from(const RunConfig& cfg, const DatasetDescriptor& data) {
  ModelConfig m;
  m.image_size = positive(cfg, "image_size");
  if (data.frame.width != 0 && (data.frame.width != m.image_size || data.frame.height != m.image_size)) {
    throw ConfigError("dataset frame is " + std::to_string(data.frame.height) + "x" +
                      std::to_string(data.frame.width) + " but image_size is " + std::to_string(m.image_size));
  }
  m.mode = data.num_keypoints > 0 ? data.mode : parse_heatmap_mode(cfg.get("keypoint_mode"));
  if (m.mode != parse_heatmap_mode(cfg.get("keypoint_mode")) && cfg.is_set("keypoint_mode")) {
    throw ConfigError("config key 'keypoint_mode' disagrees with the dataset (" + std::string(to_string(data.mode)) +
                      ")");
  }
  m.num_keypoints = data.num_keypoints > 0 ? data.num_keypoints : skeleton::kNumJoints;
  const int auto_filters = m.image_size >= 256 ? 64 : 32;
  m.g_base_filters = non_negative(cfg, "g_base_filters");
  if (m.g_base_filters == 0) m.g_base_filters = auto_filters;
  m.d_base_filters = non_negative(cfg, "d_base_filters");
  if (m.d_base_filters == 0) m.d_base_filters = auto_filters;
  m.g_depth = non_negative(cfg, "g_depth");
  if (m.g_depth == 0) m.g_depth = std::bit_width(static_cast<unsigned>(m.image_size)) - 1;
  m.d_layers = non_negative(cfg, "d_layers");
  if (m.d_layers == 0) m.d_layers = default_discriminator_layers(m.image_size);
  m.norm = parse_norm(cfg.get("norm"));
  m.sharing = parse_sharing(cfg.get("sharing"));
  m.discriminator_mode = parse_discriminator_mode(cfg.get("discriminator_mode"));
  m.separate_reconstruction_discriminator = cfg.get_bool("separate_reconstruction_discriminator");
  return m;
}

TrainConfig train_config_from(const RunConfig& cfg) {
  TrainConfig t;
  t.epochs = non_negative(cfg, "epochs");
  t.max_steps = cfg.get_int("max_steps");
  t.batch_size = positive(cfg, "batch_size");
  t.learning_rate = cfg.get_double("learning_rate");
  t.adam_beta1 = cfg.get_double("adam_beta1");
  t.adam_beta2 = cfg.get_double("adam_beta2");
  t.weights.image_gan = cfg.get_double("lambda_image_gan");
  t.weights.image_cycle = cfg.get_double("lambda_image_cycle");
  t.weights.image_pixel = cfg.get_double("lambda_image_pixel");
  t.weights.keypoint_gan = cfg.get_double("lambda_keypoint_gan");
  t.weights.keypoint_cycle = cfg.get_double("lambda_keypoint_cycle");
  try {
    t.cycles = CycleSet::parse(cfg.get("cycles"));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config key 'cycles': ") + e.what());
  }
  t.buffer_size = non_negative(cfg, "buffer_size");
  t.warmup_iters = cfg.get_int("warmup_iters");
  t.seed = static_cast<uint64_t>(cfg.get_int("seed"));
  t.mask_loss = cfg.get_bool("mask_loss");
  t.keypoint_adversarial_into_image_generator = cfg.get_bool("keypoint_adversarial_into_image_generator");
  t.real_label = cfg.get_double("real_label");
  t.fake_label = cfg.get_double("fake_label");
  try {
    t.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return t;
}

std::size_t cmd_generate_data(const RunConfig& cfg, const fs::path& out) {
  GenerateOptions opt;
  const int size = positive(cfg, "image_size");
  opt.canvas = Frame{size, size};
  opt.seed = static_cast<uint64_t>(cfg.get_int("seed"));
  opt.poses_per_identity = positive(cfg, "poses_per_identity");
  if (opt.poses_per_identity < 2) throw ConfigError("config key 'poses_per_identity' must be at least 2");
  opt.noise_texture = cfg.get_bool("noise_texture");
  opt.mode = parse_heatmap_mode(cfg.get("keypoint_mode"));
  opt.radius = positive(cfg, "heatmap_radius");
  opt.n_identities = positive(cfg, "n_identities");
  opt.first_identity = 0;
  const auto pairs = generate_dataset(out / "train", opt);
  const int test_ids = non_negative(cfg, "test_identities");
  if (test_ids > 0) {
    GenerateOptions test = opt;
    test.n_identities = test_ids;
    test.first_identity = opt.n_identities;
    generate_dataset(out / "test", test);
  }
  return pairs;
}

torch::Tensor keypoint_picture(const KeypointSet& keypoints, const KeypointRendering& rendering) {
  const auto h = render(keypoints, rendering.mode, rendering.radius).data;
  if (rendering.mode == HeatmapMode::face) return to_network_range(h);
  const auto ink = std::get<0>(h.max(0, /*keepdim=*/true));
  return to_network_range(1.0 - ink).expand({3, h.size(1), h.size(2)});
}

torch::Tensor sample_grid(const ModelSet& models, const std::vector<TrainingPair>& pairs,
                          const KeypointRendering& rendering) {
  std::vector<torch::Tensor> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto generated = translate(models, p.x, p.ly, rendering);
    rows.push_back(torch::cat({p.x, keypoint_picture(p.ly, rendering), p.y, generated.squeeze(0)}, 2));
  }
  return torch::cat(rows, 1);
}

TrainSummary cmd_train(const RunConfig& cfg, const fs::path& out) {
  const auto tcfg = train_config_from(cfg);
  const auto data = PairDataset::load(cfg.get("data_dir"));
  if (data->size() == 0) throw ArgumentError("dataset " + cfg.get("data_dir") + " has no pairs");
  const auto& desc = data->descriptor();
  const auto mcfg = model_config_from(cfg, desc);
  const auto rendering = rendering_for(cfg, desc);

  fs::create_directories(out / "checkpoints");
  fs::create_directories(out / "samples");
  const fs::path marker = out / "INCOMPLETE";
  write_text(marker, "training in progress\n");
  write_text(out / "config.txt", cfg.echo());

  std::shared_ptr<const KeypointOracle> oracle;
  if (desc.ground_truth_oracle) oracle = std::make_shared<GroundTruthOracle>();
  Trainer trainer(ModelSet::build(mcfg, tcfg.seed), tcfg, rendering, oracle);
  PairStream stream(data, cfg.get_bool("augment"), /*shuffle=*/true, tcfg.seed);

  const bool resuming = !cfg.get("resume").empty();
  if (resuming) {
    const auto extra = trainer.load(cfg.get("resume"));
    if (!extra.contains("stream")) throw ConfigError("checkpoint " + cfg.get("resume") + " has no data stream state");
    stream.load_state(extra.at("stream").get<std::string>());
  }

  const auto steps_per_epoch =
      static_cast<int64_t>((data->size() + static_cast<std::size_t>(tcfg.batch_size) - 1) / tcfg.batch_size);
  const int64_t total = tcfg.max_steps > 0 ? tcfg.max_steps : tcfg.epochs * steps_per_epoch;

  const fs::path losses_path = out / "losses.csv";
  const bool append = resuming && fs::exists(losses_path);
  std::ofstream losses(losses_path, append ? std::ios::app : std::ios::trunc);
  if (!losses) throw IoError("cannot write " + losses_path.string());
  if (!append) losses << LossReport::csv_header() << '\n' << std::flush;

  std::vector<TrainingPair> preview;
  for (std::size_t i = 0; i < std::min<std::size_t>(4, data->size()); ++i) preview.push_back(data->get(i));

  const nlohmann::json rendering_json = {{"mode", std::string(to_string(rendering.mode))},
                                         {"radius", rendering.radius}};
  const fs::path latest = out / "checkpoints" / "latest.pt";
  auto checkpoint = [&] {
    trainer.save(latest, {{"stream", stream.save_state()}, {"rendering", rendering_json}});
  };
  if (!resuming) checkpoint();

  const auto sample_every = cfg.get_int("sample_every");
  const auto checkpoint_every = cfg.get_int("checkpoint_every");
  TrainSummary summary;
  while (trainer.iteration() < total) {
    summary.last = trainer.train_step(stream.next_batch(static_cast<std::size_t>(tcfg.batch_size)));
    const auto step = trainer.iteration();
    losses << summary.last.csv_row(step) << '\n' << std::flush;
    if (sample_every > 0 && step % sample_every == 0) {
      write_png(out / "samples" / step_name(step), sample_grid(trainer.models(), preview, rendering));
    }
    if (checkpoint_every > 0 && step % checkpoint_every == 0) checkpoint();
  }
  checkpoint();
  write_png(out / "samples" / step_name(trainer.iteration()), sample_grid(trainer.models(), preview, rendering));
  losses.close();
  fs::remove(marker);
  summary.steps = trainer.iteration();
  summary.checkpoint = latest;
  return summary;
}

EvalReport cmd_evaluate(const RunConfig& cfg, const fs::path& out) {
  if (cfg.get("checkpoint").empty()) throw ConfigError("config key 'checkpoint' is required for evaluate");
  EvalOptions opt;
  opt.mask_dilation = cfg.get_double("mask_dilation");
  auto report = evaluate(cfg.get("test_dir"), cfg.get("checkpoint"), opt);
  fs::create_directories(out);
  report.write(out / "eval.json", out / "eval.csv");
  return report;
}

fs::path cmd_translate(const RunConfig& cfg, const fs::path& out) {
  for (const char* key : {"checkpoint", "input_image", "keypoints"}) {
    if (cfg.get(key).empty()) throw ConfigError(std::string("config key '") + key + "' is required for translate");
  }
  CheckpointMeta meta;
  const auto models = load_models(cfg.get("checkpoint"), &meta);
  KeypointRendering rendering;
  rendering.mode = meta.model.mode;
  rendering.radius = static_cast<int>(cfg.get_int("heatmap_radius"));
  if (meta.extra.contains("rendering")) rendering.radius = meta.extra.at("rendering").at("radius").get<int>();

  const auto x = read_png(cfg.get("input_image"));
  const auto poses = read_keypoints_jsonl(cfg.get("keypoints"));
  if (poses.empty()) throw ArgumentError("no keypoints in " + cfg.get("keypoints"));
  const auto y = translate(models, x, poses.front(), rendering).squeeze(0);
  const fs::path target = out.empty() ? fs::path(cfg.get("output")) : out;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_png(target, y);
  return target;
}

const std::vector<std::pair<std::string, Overrides>>& ablation_variants() {
  static const std::vector<std::pair<std::string, Overrides>> variants = {
      {"i2i2i", {{"cycles", "i2i2i"}}},
      {"i2i2i_k2g2k", {{"cycles", "i2i2i,k2g2k"}}},
      {"i2i2i_k2r2k", {{"cycles", "i2i2i,k2r2k"}}},
      {"full", {{"cycles", "i2i2i,k2g2k,k2r2k"}}},
      {"single_modal_d", {{"cycles", "i2i2i,k2g2k,k2r2k"}, {"discriminator_mode", "single_modal"}}},
      {"non_sharing_g", {{"cycles", "i2i2i,k2g2k,k2r2k"}, {"sharing", "non_shared"}}},
  };
  return variants;
}

nlohmann::json cmd_ablate(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  nlohmann::json results = nlohmann::json::object();
  std::ostringstream csv;
  csv << "variant,steps,mean_ssim,mean_psnr,mean_mask_ssim\n";
  for (const auto& [name, overrides] : ablation_variants()) {
    RunConfig variant = cfg;
    for (const auto& [key, value] : overrides) variant.set(key, value);
    if (cfg.get_int("ablate_steps") > 0) variant.set("max_steps", cfg.get("ablate_steps"));
    const auto dir = out / name;
    const auto summary = cmd_train(variant, dir);
    variant.set("checkpoint", summary.checkpoint.string());
    const auto report = cmd_evaluate(variant, dir);
    results[name] = {{"steps", summary.steps},
                     {"mean_ssim", report.mean_ssim},
                     {"mean_psnr", std::isinf(report.mean_psnr) ? nlohmann::json("Inf") : nlohmann::json(report.mean_psnr)},
                     {"mean_mask_ssim", report.mean_mask_ssim}};
    csv << name << ',' << summary.steps << ',' << report.mean_ssim << ',' << report.mean_psnr << ','
        << report.mean_mask_ssim << '\n';
  }
  write_text(out / "ablation.json", results.dump(2) + "\n");
  write_text(out / "ablation.csv", csv.str());
  return results;
}

}  // namespace c2gan
