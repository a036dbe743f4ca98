#include "c2gan/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "c2gan/checkpoint.hpp"
#include "c2gan/dataset.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/heatmap.hpp"
#include "c2gan/trainer.hpp"

namespace fs = std::filesystem;

namespace c2gan {

namespace {

torch::Tensor to_8bit_scale(const torch::Tensor& t) { return (t.to(torch::kFloat64) + 1.0) * 127.5; }

void same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (!a.sizes().equals(b.sizes())) {
    throw ArgumentError(std::string(what) + ": shape mismatch " + c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

std::vector<double> gaussian_window(const SsimOptions& opt) {
  std::vector<double> w(static_cast<std::size_t>(opt.window));
  const double center = (opt.window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < opt.window; ++i) {
    const double d = i - center;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * opt.sigma * opt.sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Valid-mode separable filtering of an H x W plane.
std::vector<double> filter_valid(const double* src, int H, int W, const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  const int oh = H - k + 1, ow = W - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(H) * ow);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += w[static_cast<std::size_t>(i)] * src[r * W + c + i];
      rows[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += w[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(r + i) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  return out;
}

// a, b: [C,H,W] float64 on the 8-bit scale.
double ssim_levels(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& opt) {
  const int C = static_cast<int>(a.size(0)), H = static_cast<int>(a.size(1)), W = static_cast<int>(a.size(2));
  if (H < opt.window || W < opt.window) {
    throw ArgumentError("ssim: image " + std::to_string(H) + "x" + std::to_string(W) + " is smaller than the " +
                        std::to_string(opt.window) + "x" + std::to_string(opt.window) + " window");
  }
  const auto w = gaussian_window(opt);
  const double c1 = std::pow(opt.k1 * opt.dynamic_range, 2);
  const double c2 = std::pow(opt.k2 * opt.dynamic_range, 2);
  const auto ac = a.contiguous(), bc = b.contiguous();
  const auto aa = (ac * ac).contiguous(), bb = (bc * bc).contiguous(), ab = (ac * bc).contiguous();
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  double total = 0.0;
  std::size_t windows = 0;
  for (int ch = 0; ch < C; ++ch) {
    const std::size_t off = static_cast<std::size_t>(ch) * plane;
    const auto mu_a = filter_valid(ac.data_ptr<double>() + off, H, W, w);
    const auto mu_b = filter_valid(bc.data_ptr<double>() + off, H, W, w);
    const auto e_aa = filter_valid(aa.data_ptr<double>() + off, H, W, w);
    const auto e_bb = filter_valid(bb.data_ptr<double>() + off, H, W, w);
    const auto e_ab = filter_valid(ab.data_ptr<double>() + off, H, W, w);
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i], mb = mu_b[i];
      const double va = e_aa[i] - ma * ma, vb = e_bb[i] - mb * mb, cov = e_ab[i] - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    windows += mu_a.size();
  }
  return total / static_cast<double>(windows);
}

}  // namespace

double psnr(const torch::Tensor& a, const torch::Tensor& b) {
  same_shape(a, b, "psnr");
  const double mse = (to_8bit_scale(a) - to_8bit_scale(b)).pow(2).mean().item<double>();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& opt) {
  same_shape(a, b, "ssim");
  if (a.dim() != 3) throw ArgumentError("ssim expects [C,H,W] images; use ssim_batch for batches");
  return ssim_levels(to_8bit_scale(a), to_8bit_scale(b), opt);
}

std::vector<double> ssim_batch(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& opt) {
  same_shape(a, b, "ssim_batch");
  if (a.dim() != 4) throw ArgumentError("ssim_batch expects [B,C,H,W] batches");
  std::vector<double> out;
  for (int64_t i = 0; i < a.size(0); ++i) out.push_back(ssim(a[i], b[i], opt));
  return out;
}

torch::Tensor pose_mask(const KeypointSet& keypoints, int height, int width, double dilation,
                        const std::vector<std::pair<int, int>>& adjacency) {
  if (height <= 0 || width <= 0) throw ArgumentError("pose_mask: empty frame");
  if (!(dilation >= 0.0)) throw ArgumentError("pose_mask: dilation must be >= 0");
  keypoints.validate();
  auto mask = torch::zeros({1, height, width}, torch::kFloat32);
  auto acc = mask.accessor<float, 3>();
  const Frame frame{height, width};
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    if (!keypoints.visible[i]) continue;
    for_each_disc_pixel(keypoints.points[i], dilation, frame, [&](int r, int c) { acc[0][r][c] = 1.0f; });
  }
  const double d2 = dilation * dilation;
  for (auto [i, j] : adjacency) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(std::max(i, j)) >= keypoints.size()) {
      throw ArgumentError("pose_mask: adjacency index out of range");
    }
    if (!keypoints.visible[static_cast<std::size_t>(i)] || !keypoints.visible[static_cast<std::size_t>(j)]) continue;
    const Point2 a = keypoints.points[static_cast<std::size_t>(i)];
    const Point2 b = keypoints.points[static_cast<std::size_t>(j)];
    const int r0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y, b.y) - dilation)));
    const int r1 = std::min(height - 1, static_cast<int>(std::floor(std::max(a.y, b.y) + dilation)));
    const int c0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - dilation)));
    const int c1 = std::min(width - 1, static_cast<int>(std::floor(std::max(a.x, b.x) + dilation)));
    const double vx = b.x - a.x, vy = b.y - a.y, len2 = vx * vx + vy * vy;
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double wx = c - a.x, wy = r - a.y;
        const double t = len2 > 0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
        const double dx = wx - t * vx, dy = wy - t * vy;
        if (dx * dx + dy * dy <= d2) acc[0][r][c] = 1.0f;
      }
    }
  }
  return mask;
}

double mask_ssim(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& mask, const SsimOptions& opt) {
  same_shape(a, b, "mask_ssim");
  if (a.dim() != 3 || mask.dim() != 3 || mask.size(0) != 1 || mask.size(1) != a.size(1) || mask.size(2) != a.size(2)) {
    throw ArgumentError("mask_ssim: mask " + c10::str(mask.sizes()) + " does not fit image " + c10::str(a.sizes()));
  }
  const auto m = mask.to(torch::kFloat64);
  return ssim_levels(to_8bit_scale(a) * m, to_8bit_scale(b) * m, opt);
}

double inception_score(const LabelDistributionScorer& scorer, const torch::Tensor& images) {
  const auto p = scorer.predict(images).to(torch::kFloat64).clamp_min(1e-12);
  if (p.dim() != 2 || p.size(0) != images.size(0)) throw ArgumentError("scorer must return [B,K] probabilities");
  const auto marginal = p.mean(0, /*keepdim=*/true);
  const auto kl = (p * (p.log() - marginal.log())).sum(1);
  return std::exp(kl.mean().item<double>());
}

void EvalReport::aggregate() {
  if (pairs.empty()) throw ArgumentError("cannot aggregate an empty evaluation");
  double s = 0, p = 0, m = 0;
  for (const auto& row : pairs) {
    s += row.ssim;
    p += row.psnr;
    m += row.mask_ssim;
  }
  const auto n = static_cast<double>(pairs.size());
  mean_ssim = s / n;
  mean_psnr = p / n;
  mean_mask_ssim = m / n;
}

namespace {

nlohmann::json number(double v) {
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return v;
}

std::string cell(double v) {
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : pairs) {
    rows.push_back({{"x_path", r.x_path},
                    {"y_path", r.y_path},
                    {"ssim", number(r.ssim)},
                    {"psnr", number(r.psnr)},
                    {"mask_ssim", number(r.mask_ssim)}});
  }
  return {{"count", pairs.size()},
          {"mean_ssim", number(mean_ssim)},
          {"mean_psnr", number(mean_psnr)},
          {"mean_mask_ssim", number(mean_mask_ssim)},
          {"config", config},
          {"pairs", rows}};
}

void EvalReport::write(const fs::path& json_path, const fs::path& csv_path) const {
  std::ofstream js(json_path);
  js << to_json().dump(2) << '\n';
  if (!js) throw IoError("cannot write " + json_path.string());
  std::ofstream csv(csv_path);
  csv << "x_path,y_path,ssim,psnr,mask_ssim\n";
  for (const auto& r : pairs) {
    csv << r.x_path << ',' << r.y_path << ',' << cell(r.ssim) << ',' << cell(r.psnr) << ',' << cell(r.mask_ssim)
        << '\n';
  }
  if (!csv) throw IoError("cannot write " + csv_path.string());
}

EvalReport evaluate(const fs::path& dataset_dir, const fs::path& checkpoint, const EvalOptions& options) {
  const auto data = PairDataset::load(dataset_dir);
  if (data->size() == 0) throw ArgumentError("evaluation set " + dataset_dir.string() + " has no pairs");
  const auto& desc = data->descriptor();
  const double dilation = options.mask_dilation > 0 ? options.mask_dilation : default_mask_dilation(desc.frame.width);

  std::optional<ModelSet> models;
  if (!options.ground_truth) {
    models = load_models(checkpoint);
    if (models->config.image_size != desc.frame.height || models->config.image_size != desc.frame.width) {
      throw ConfigError("checkpoint expects " + std::to_string(models->config.image_size) + "x" +
                        std::to_string(models->config.image_size) + " images but " + dataset_dir.string() + " is " +
                        std::to_string(desc.frame.height) + "x" + std::to_string(desc.frame.width));
    }
    if (models->config.mode != desc.mode || models->config.num_keypoints != desc.num_keypoints) {
      throw ConfigError("checkpoint keypoint layout does not match " + dataset_dir.string());
    }
  }
  const auto rendering = KeypointRendering::from(desc, dilation);

  EvalReport report;
  report.config = {{"dataset", dataset_dir.string()},
                   {"checkpoint", options.ground_truth ? std::string("ground_truth") : checkpoint.string()},
                   {"mask_dilation", dilation},
                   {"mode", std::string(to_string(desc.mode))}};
  for (std::size_t i = 0; i < data->size(); ++i) {
    const auto pair = data->get(i);
    const auto generated = options.ground_truth ? pair.y : translate(*models, pair.x, pair.ly, rendering);
    const auto mask = pose_mask(pair.ly, desc.frame.height, desc.frame.width, dilation, desc.adjacency);
    const auto& rec = data->record(i);
    report.pairs.push_back({fs::relative(rec.x_path, dataset_dir).string(), fs::relative(rec.y_path, dataset_dir).string(),
                            ssim(generated, pair.y), psnr(generated, pair.y), mask_ssim(generated, pair.y, mask)});
  }
  report.aggregate();
  return report;
}

}  // namespace c2gan
