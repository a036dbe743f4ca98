// Acceptance checks. Each criterion prints exactly one PASS or FAIL line.
//   acceptance --criterion N [--work DIR]     (N in 1..10, or "all")

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "c2gan/checkpoint.hpp"
#include "c2gan/commands.hpp"
#include "c2gan/dataset.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/heatmap.hpp"
#include "c2gan/history_buffer.hpp"
#include "c2gan/image_io.hpp"
#include "c2gan/metrics.hpp"
#include "c2gan/networks.hpp"
#include "c2gan/objectives.hpp"
#include "c2gan/run_config.hpp"
#include "c2gan/trainer.hpp"
#include "../support.hpp"
#include "../trainer_fixture.hpp"

using namespace c2gan;
using namespace c2gan::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// 1. Analytic loss suite.
Outcome analytic_losses() {
  const auto t0 = Clock::now();
  double worst = 0;
  const auto half = torch::full({4, 1, 30, 30}, 0.5);
  worst = std::max(worst, std::abs(adversarial_loss_d(half, half).item<double>() - 2 * std::log(2.0)));
  worst = std::max(worst, std::abs(adversarial_loss_g(half).item<double>() - std::log(2.0)));
  bool exact = true;
  const auto base = torch::rand({2, 3, 16, 16}, torch::kFloat64);
  for (double c : {0.0, 0.25, 0.5, 1.0}) {
    exact &= l1_distance(base + c, base).item<double>() == c || std::abs(l1_distance(base + c, base).item<double>() - c) < 1e-12;
    exact &= std::abs(image_cycle_loss(base, base - c).item<double>() - c) < 1e-12;
    exact &= std::abs(pixel_loss(base - c, base).item<double>() - c) < 1e-12;
    exact &= std::abs(keypoint_cycle_loss(base + c, base, base, base + 2 * c).item<double>() - 3 * c) < 1e-12;
    exact &= std::abs(mask_loss(base + c, base, torch::zeros({1, 16, 16}, torch::kFloat64)).item<double>() - c) < 1e-12;
  }
  const double total = total_objective({{"image_gan", 1}, {"image_cycle", 1}, {"image_pixel", 1}, {"keypoint_gan", 1},
                                        {"keypoint_cycle", 1}},
                                       LossWeights{1, 10, 10, 1, 10});
  const double elapsed = seconds_since(t0);
  const bool pass = worst <= 1e-6 && exact && total == 32.0 && elapsed < 5.0;
  return {pass, "max |adv - ln2 form| = " + fmt(worst) + ", L1 family exact = " + (exact ? "yes" : "no") +
                    ", total = " + fmt(total) + ", " + fmt(elapsed, 3) + " s (limits 1e-6, 32, 5 s)"};
}

// 2. Metric oracle equivalence.
Outcome metric_oracles() {
  const auto t0 = Clock::now();
  torch::manual_seed(2024);
  double worst_ssim = 0, worst_psnr = 0;
  for (int i = 0; i < 200; ++i) {
    const auto a = torch::rand({3, 16, 16}) * 2 - 1;
    // Mix of near and far pairs so both metrics see their full range.
    const double noise = 0.02 + 0.5 * (i % 10) / 10.0;
    const auto b = (a + noise * torch::randn({3, 16, 16})).clamp(-1, 1);
    worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b) - ref_ssim(a, b)));
    worst_psnr = std::max(worst_psnr, std::abs(psnr(a, b) - ref_psnr(a, b)));
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst_ssim <= 1e-6 && worst_psnr <= 1e-6 && elapsed < 30.0;
  return {pass, "200 pairs: max |SSIM - ref| = " + fmt(worst_ssim) + ", max |PSNR - ref| = " + fmt(worst_psnr) +
                    " dB, " + fmt(elapsed, 3) + " s (limits 1e-6, 30 s)"};
}

// 3. Codec round trip and flip equivariance.
Outcome codec_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  const int r = kDefaultPersonRadius;
  double worst = 0;
  int flip_failures = 0, visibility_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 12;
    const Frame frame{64 + (trial % 3) * 16, 64 + (trial % 5) * 8};
    const auto k = random_keypoints(rng, n, frame, 2.0 * r);
    const auto h = render(k, HeatmapMode::person, r);
    const auto d = decode(h);
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (d.visible[i] != k.visible[i]) ++visibility_failures;
      if (!k.visible[i]) continue;
      worst = std::max({worst, std::abs(d.points[i].x - k.points[i].x), std::abs(d.points[i].y - k.points[i].y)});
    }
    const auto swap = random_swap_table(rng, n);
    auto expected = h.data.flip({2}).clone();
    for (int i = 0; i < n; ++i) expected[swap[static_cast<std::size_t>(i)]] = h.data[i].flip({1});
    if (!torch::equal(render(hflip(k, swap), HeatmapMode::person, r).data, expected)) ++flip_failures;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst <= 1.0 && flip_failures == 0 && visibility_failures == 0 && elapsed < 30.0;
  return {pass, "1000 configurations: max coordinate error " + fmt(worst) + " px, flip mismatches " +
                    std::to_string(flip_failures) + ", visibility mismatches " + std::to_string(visibility_failures) +
                    ", " + fmt(elapsed, 3) + " s (limits 1 px, 0, 30 s)"};
}

// 4. Gradient checks through a tiny U-Net.
Outcome gradient_checks() {
  const auto t0 = Clock::now();
  const NetConfig cfg{6, 3, 4, 2, 8, NormKind::batch};
  auto net = build_unet(cfg);
  init_weights(*net, 5);
  // Same weights in double precision for the finite-difference reference.
  auto net64 = build_unet(cfg);
  {
    torch::NoGradGuard no_grad;
    auto src = net->named_parameters(), dst = net64->named_parameters();
    for (const auto& p : src) dst[p.key()].copy_(p.value());
    auto bsrc = net->named_buffers(), bdst = net64->named_buffers();
    for (const auto& b : bsrc) bdst[b.key()].copy_(b.value());
  }
  net64->to(torch::kFloat64);

  torch::manual_seed(6);
  const auto input = torch::rand({2, 6, 8, 8}, torch::kFloat64) * 2 - 1;
  const auto target = torch::rand({2, 3, 8, 8}, torch::kFloat64) * 2 - 1;
  const auto target2 = torch::rand({2, 3, 8, 8}, torch::kFloat64) * 2 - 1;
  const auto real = torch::rand({2, 3, 8, 8}, torch::kFloat64) * 0.8 + 0.1;
  const auto mask = (torch::rand({2, 1, 8, 8}, torch::kFloat64) > 0.5).to(torch::kFloat64);
  auto prob = [](const torch::Tensor& out) { return (out + 1) * 0.5; };

  using Loss = std::function<torch::Tensor(const torch::Tensor& out)>;
  auto as = [](const torch::Tensor& t, const torch::Tensor& like) { return t.to(like.dtype()); };
  const std::vector<std::pair<std::string, Loss>> losses = {
      {"adversarial_d", [&](const torch::Tensor& o) { return adversarial_loss_d(as(real, o), prob(o)); }},
      {"adversarial_g", [&](const torch::Tensor& o) { return adversarial_loss_g(prob(o)); }},
      {"image_cycle", [&](const torch::Tensor& o) { return image_cycle_loss(o, as(target, o)); }},
      {"pixel", [&](const torch::Tensor& o) { return pixel_loss(o, as(target, o)); }},
      {"keypoint_cycle",
       [&](const torch::Tensor& o) { return keypoint_cycle_loss(o, as(target, o), o * 0.5, as(target2, o)); }},
      {"mask", [&](const torch::Tensor& o) { return mask_loss(o, as(target, o), as(mask, o)); }},
  };

  auto params32 = net->parameters();
  auto params64 = net64->parameters();
  std::vector<int64_t> sizes;
  for (const auto& p : params32) sizes.push_back(p.numel());
  std::discrete_distribution<std::size_t> pick_tensor(sizes.begin(), sizes.end());
  std::mt19937_64 rng(7);

  double worst = 0;
  std::string worst_name;
  int checked_min = 1 << 30;
  const double h = 1e-6;
  for (const auto& [name, loss] : losses) {
    const auto out = net->forward(input.to(torch::kFloat32));
    const auto grads = torch::autograd::grad({loss(out)}, params32);
    int checked = 0, attempts = 0;
    while (checked < 20 && attempts < 2000) {
      ++attempts;
      const auto t = pick_tensor(rng);
      const auto idx = static_cast<int64_t>(rng() % static_cast<uint64_t>(sizes[t]));
      auto flat = params64[t].view(-1);
      const double saved = flat[idx].item<double>();
      auto eval = [&](double v) {
        torch::NoGradGuard no_grad;
        flat[idx] = v;
        return loss(net64->forward(input)).item<double>();
      };
      const double fd = (eval(saved + h) - eval(saved - h)) / (2 * h);
      {
        torch::NoGradGuard no_grad;
        flat[idx] = saved;
      }
      if (std::abs(fd) < 1e-6) continue;  // unused or dead parameter: nothing to compare
      const double an = grads[t].view(-1)[idx].item<double>();
      const double rel = std::abs(an - fd) / std::max(std::abs(an), std::abs(fd));
      if (rel > worst) {
        worst = rel;
        worst_name = name;
      }
      ++checked;
    }
    checked_min = std::min(checked_min, checked);
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst < 1e-3 && checked_min >= 20 && elapsed < 120.0;
  return {pass, std::to_string(losses.size()) + " losses, >= " + std::to_string(checked_min) +
                    " parameters each: max relative error " + fmt(worst) + " (" + worst_name + "), " +
                    fmt(elapsed, 3) + " s (limits 1e-3, 20 params, 120 s)"};
}

// 5. Cycle wiring with recording stubs; identity stub closes the image cycle.
Outcome cycle_wiring() {
  const auto batch = tiny_batch(1);
  const auto in = make_cycle_inputs(batch, tiny_rendering());
  std::vector<std::pair<std::string, torch::Tensor>> calls;
  auto rec_image = [&](const torch::Tensor& t) {
    calls.emplace_back("G_I", t);
    return torch::tanh(t.slice(1, 0, 3) * 0.9 + 0.05 * static_cast<double>(calls.size()));
  };
  auto rec_keypoint = [&](const torch::Tensor& t) {
    calls.emplace_back("G_K", t);
    return t.mean(1, true).expand({-1, kTinyKeypoints, -1, -1}) * 0.3;
  };
  const auto b = forward_cycles(in, {rec_image, rec_image, rec_keypoint, rec_keypoint}, CycleSet{});
  bool ok = calls.size() == 4 && calls[0].first == "G_I" && calls[1].first == "G_I" && calls[2].first == "G_K" &&
            calls[3].first == "G_K";
  ok = ok && torch::equal(calls[0].second, torch::cat({in.x, in.ly}, 1)) &&
       torch::equal(calls[1].second, torch::cat({b.y_star, in.lx}, 1)) && torch::equal(calls[2].second, b.y_star) &&
       torch::equal(calls[3].second, b.x_star);

  auto identity = [](const torch::Tensor& t) { return t.slice(1, 0, 3); };
  auto zero_k = [](const torch::Tensor& t) { return torch::zeros({t.size(0), kTinyKeypoints, t.size(2), t.size(3)}); };
  const auto ib = forward_cycles(in, {identity, identity, zero_k, zero_k}, CycleSet{});
  const double cyc = image_cycle_loss(ib.x_star, in.x).item<double>();
  const bool identity_ok = torch::equal(ib.y_star, in.x) && torch::equal(ib.x_star, in.x) && cyc == 0.0;
  return {ok && identity_ok, std::string("call sequence G_I(x+Ly) -> G_I(y*+Lx) -> G_K(y*) -> G_K(x*) ") +
                                 (ok ? "observed" : "NOT observed") + "; identity-stub image cycle loss = " + fmt(cyc)};
}

// 6. Sharing contract.
Outcome sharing_contract() {
  std::map<Sharing, std::pair<bool, std::string>> result;
  for (auto sharing : {Sharing::shared, Sharing::non_shared}) {
    auto cfg = tiny_model();
    cfg.sharing = sharing;
    auto m = ModelSet::build(cfg, 9);
    bool identical_sets = true;
    if (sharing == Sharing::non_shared) {
      torch::NoGradGuard no_grad;
      auto src = m.image_gen->parameters(), dst = m.image_rec->parameters();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i].copy_(src[i]);
    } else {
      auto a = m.image_gen->parameters(), b = m.image_rec->parameters();
      for (std::size_t i = 0; i < a.size(); ++i) identical_sets &= a[i].is_same(b[i]);
    }
    const auto in = make_cycle_inputs(tiny_batch(15), tiny_rendering());
    torch::optim::Adam opt(m.image_generator_parameters(), torch::optim::AdamOptions(1e-2));
    const auto before = m.image_gen->parameters()[0].clone();
    const auto y_star = m.image_gen->forward(torch::cat({in.x, in.ly}, 1)).detach();
    image_cycle_loss(m.image_rec->forward(torch::cat({y_star, in.lx}, 1)), in.x).backward();
    opt.step();
    const auto gen = m.image_gen->parameters(), rec = m.image_rec->parameters();
    bool all_equal = true;
    for (std::size_t i = 0; i < gen.size(); ++i) all_equal &= torch::equal(gen[i], rec[i]);
    const bool gen_moved = !torch::equal(before, gen[0]);
    if (sharing == Sharing::shared) {
      result[sharing] = {identical_sets && gen_moved && all_equal,
                         std::string("shared: same tensors ") + (identical_sets ? "yes" : "no") + ", moved " +
                             (gen_moved ? "yes" : "no")};
    } else {
      result[sharing] = {!gen_moved && !all_equal,
                         std::string("non-shared: diverged ") + (!all_equal ? "yes" : "no")};
    }
  }
  return {result[Sharing::shared].first && result[Sharing::non_shared].first,
          result[Sharing::shared].second + "; " + result[Sharing::non_shared].second};
}

// 7. History buffer return rate.
Outcome history_statistics() {
  HistoryBuffer buf(50, 7);
  for (int i = 0; i < 50; ++i) buf.query(torch::full({1}, -1.0));
  int stored = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto out = buf.query(torch::full({1}, static_cast<double>(i)));
    stored += out.item<double>() != static_cast<double>(i);
  }
  const double rate = stored / 10000.0;
  return {std::abs(rate - 0.5) <= 0.02, "stored-sample return rate " + fmt(rate) + " over 10000 draws (0.5 +- 0.02)"};
}

struct HeldOut {
  double pixel_l1 = 0;
  std::vector<double> ssim_generated;
  std::vector<double> ssim_copy;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

HeldOut score_held_out(const ModelSet& models, const fs::path& test_dir) {
  const auto data = PairDataset::load(test_dir);
  const auto rendering = KeypointRendering::from(data->descriptor(), 0);
  HeldOut h;
  for (std::size_t i = 0; i < data->size(); ++i) {
    const auto p = data->get(i);
    const auto y_star = translate(models, p.x, p.ly, rendering);
    h.pixel_l1 += (y_star - p.y).abs().mean().item<double>();
    h.ssim_generated.push_back(ssim(y_star, p.y));
    h.ssim_copy.push_back(ssim(p.x, p.y));
  }
  h.pixel_l1 /= static_cast<double>(data->size());
  return h;
}

fs::path ensure_toy_data(const fs::path& work) {
  const auto root = work / "toy_data";
  if (!fs::exists(root / "train/pairs.csv") || !fs::exists(root / "test/pairs.csv")) {
    RunConfig cfg;
    cfg.set("seed", "0");
    cfg.set("n_identities", "100");
    cfg.set("poses_per_identity", "4");
    cfg.set("image_size", "64");
    cmd_generate_data(cfg, root);
  }
  return root;
}

// 8. Toy-scale training.
Outcome toy_training(const fs::path& work) {
  const auto t0 = Clock::now();
  const auto data = ensure_toy_data(work);
  RunConfig cfg;
  cfg.set("seed", "0");
  cfg.set("data_dir", (data / "train").string());
  cfg.set("test_dir", (data / "test").string());
  cfg.set("max_steps", "2000");
  cfg.set("sample_every", "500");
  const auto run = work / "toy_run";
  fs::remove_all(run);
  const auto initial = [&] {
    auto init_cfg = cfg;
    init_cfg.set("epochs", "0");
    init_cfg.set("max_steps", "0");
    cmd_train(init_cfg, work / "toy_init");
    return score_held_out(load_models(work / "toy_init/checkpoints/latest.pt"), data / "test");
  }();
  const auto summary = cmd_train(cfg, run);
  const auto trained = score_held_out(load_models(summary.checkpoint), data / "test");
  const double drop = 1.0 - trained.pixel_l1 / initial.pixel_l1;
  const double med_gen = median(trained.ssim_generated), med_copy = median(trained.ssim_copy);
  const double elapsed = seconds_since(t0);
  const bool pass = drop >= 0.5 && med_gen > med_copy;
  return {pass, "held-out pixel L1 " + fmt(initial.pixel_l1, 4) + " -> " + fmt(trained.pixel_l1, 4) + " (drop " +
                    fmt(100 * drop, 3) + "%, need >= 50%); median SSIM(y*,y) " + fmt(med_gen, 4) +
                    " vs copy baseline " + fmt(med_copy, 4) + "; " + std::to_string(summary.steps) + " steps in " +
                    fmt(elapsed / 60, 3) + " min"};
}

// 9. Ablation trend: full three-cycle model vs image cycle only.
inline constexpr int kAblationSteps = 500;

Outcome ablation_trend(const fs::path& work) {
  const auto t0 = Clock::now();
  const auto data = ensure_toy_data(work);
  std::vector<double> full, image_only;
  std::ostringstream per_seed;
  for (int seed : {0, 1, 2}) {
    for (const char* cycles : {"i2i2i,k2g2k,k2r2k", "i2i2i"}) {
      RunConfig cfg;
      cfg.set("seed", std::to_string(seed));
      cfg.set("data_dir", (data / "train").string());
      cfg.set("test_dir", (data / "test").string());
      cfg.set("max_steps", std::to_string(kAblationSteps));
      // Warm-up keeps its share (a quarter) of the shortened schedule.
      cfg.set("warmup_iters", std::to_string(kAblationSteps / 4));
      cfg.set("sample_every", "0");
      cfg.set("cycles", cycles);
      const auto run = work / ("ablation_s" + std::to_string(seed) + (std::string(cycles) == "i2i2i" ? "_i2i2i" : "_full"));
      fs::remove_all(run);
      const auto summary = cmd_train(cfg, run);
      const auto score = median(score_held_out(load_models(summary.checkpoint), data / "test").ssim_generated);
      (std::string(cycles) == "i2i2i" ? image_only : full).push_back(score);
      per_seed << " s" << seed << (std::string(cycles) == "i2i2i" ? " i2i2i " : " full ") << fmt(score, 4);
    }
  }
  const double m_full = median(full), m_image = median(image_only);
  const double elapsed = seconds_since(t0);
  return {m_full >= m_image - 0.01, "median-over-seeds SSIM full " + fmt(m_full, 4) + " vs i2i2i " + fmt(m_image, 4) +
                                        " (fail only if full < i2i2i - 0.01);" + per_seed.str() + "; " +
                                        std::to_string(kAblationSteps) + " steps per run, " + fmt(elapsed / 60, 3) +
                                        " min"};
}

// 10. End-to-end smoke through the executable.
Outcome end_to_end(const fs::path& work) {
  const auto t0 = Clock::now();
  const auto root = work / "smoke";
  fs::remove_all(root);
  fs::create_directories(root);
  auto sh = [](const std::string& args) {
    const std::string cmd = std::string(C2GAN_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string r = root.string();
  std::vector<std::pair<std::string, int>> codes;
  codes.emplace_back("generate-data", sh("generate-data --seed 0 --out " + r + "/data"));
  codes.emplace_back("train", sh("train --seed 0 --out " + r + "/run --set data_dir=" + r +
                                 "/data/train --set max_steps=50 --set sample_every=25"));
  codes.emplace_back("evaluate", sh("evaluate --out " + r + "/eval --set test_dir=" + r + "/data/test --set checkpoint=" +
                                    r + "/run/checkpoints/latest.pt"));
  codes.emplace_back("translate", sh("translate --out " + r + "/translated.png --set checkpoint=" + r +
                                     "/run/checkpoints/latest.pt --set input_image=" + r +
                                     "/data/test/images/100_0.png --set keypoints=" + r + "/data/test/keypoints/100_1.jsonl"));
  bool ok = true;
  std::string failed;
  for (const auto& [name, code] : codes) {
    if (code != 0) {
      ok = false;
      failed += " " + name + "=" + std::to_string(code);
    }
  }
  int rows = 0;
  bool finite = true;
  if (ok) {
    std::ifstream losses(root / "run/losses.csv");
    std::string line;
    std::getline(losses, line);
    while (std::getline(losses, line)) {
      ++rows;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) finite &= std::isfinite(std::stod(cell));
    }
  }
  bool grid_ok = false;
  std::string grid_shape = "missing";
  if (ok && fs::exists(root / "run/samples/iter_000050.png")) {
    const auto grid = read_png(root / "run/samples/iter_000050.png");
    grid_shape = std::to_string(grid.size(1)) + "x" + std::to_string(grid.size(2));
    grid_ok = grid.size(2) == 4 * 64 && grid.size(1) % 64 == 0 && grid.size(1) >= 64;
  }
  const bool eval_ok = fs::exists(root / "eval/eval.json") && fs::exists(root / "translated.png");
  const double elapsed = seconds_since(t0);
  const bool pass = ok && rows == 50 && finite && grid_ok && eval_ok && elapsed < 180.0;
  return {pass, "exit codes " + std::string(ok ? "all 0" : "nonzero:" + failed) + ", " + std::to_string(rows) +
                    " loss rows (finite " + (finite ? "yes" : "no") + "), sample grid " + grid_shape +
                    " (4 columns of 64), " + fmt(elapsed, 3) + " s (limit 180 s)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string which = "all";
  std::string work = "acceptance_work";
  app.add_option("--criterion", which, "1..10 or all");
  app.add_option("--work", work, "scratch directory for training runs");
  CLI11_PARSE(app, argc, argv);
  torch::set_num_threads(1);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analytic loss suite", analytic_losses},
      {"metric oracle equivalence", metric_oracles},
      {"codec round trip", codec_round_trip},
      {"gradient checks", gradient_checks},
      {"cycle wiring", cycle_wiring},
      {"sharing contract", sharing_contract},
      {"history buffer statistics", history_statistics},
      {"toy-scale training", [&] { return toy_training(work); }},
      {"ablation trend", [&] { return ablation_trend(work); }},
      {"end-to-end smoke", [&] { return end_to_end(work); }},
  };
  fs::create_directories(work);
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (which != "all" && which != std::to_string(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
    all_pass &= o.pass;
  }
  return all_pass ? 0 : 1;
}
