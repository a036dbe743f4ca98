#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into the library code it is used to check.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "c2gan/keypoints.hpp"

namespace c2gan::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("c2gan_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Element access for float tensors through double.
inline double at(const torch::Tensor& t, std::initializer_list<int64_t> idx) {
  auto v = t;
  for (auto i : idx) v = v[i];
  return v.item<double>();
}

inline std::vector<double> flat(const torch::Tensor& t) {
  auto c = t.to(torch::kFloat64).contiguous().flatten();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

// --- losses -------------------------------------------------------------

inline double ref_d_loss(const torch::Tensor& real, const torch::Tensor& fake) {
  const auto r = flat(real), f = flat(fake);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += -std::log(r[i]) - std::log(1.0 - f[i]);
  return s / static_cast<double>(r.size());
}

inline double ref_g_loss(const torch::Tensor& fake) {
  const auto f = flat(fake);
  double s = 0.0;
  for (double v : f) s += -std::log(v);
  return s / static_cast<double>(f.size());
}

inline double ref_l1(const torch::Tensor& a, const torch::Tensor& b) {
  const auto x = flat(a), y = flat(b);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

// --- metrics ------------------------------------------------------------

inline double level(double v) { return (v + 1.0) * 127.5; }

inline double ref_psnr(const torch::Tensor& a, const torch::Tensor& b) {
  const auto x = flat(a), y = flat(b);
  double se = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = level(x[i]) - level(y[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(x.size());
  if (mse == 0.0) return INFINITY;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

// Direct sliding-window SSIM: for every window position compute the
// weighted statistics from scratch with a 2-D Gaussian.
inline double ref_ssim(const torch::Tensor& a, const torch::Tensor& b, int win = 11, double sigma = 1.5) {
  const auto A = a.to(torch::kFloat64).contiguous(), B = b.to(torch::kFloat64).contiguous();
  const int64_t C = A.size(0), H = A.size(1), W = A.size(2);
  std::vector<double> g2(static_cast<std::size_t>(win * win));
  double norm = 0.0;
  const double mid = (win - 1) / 2.0;
  for (int u = 0; u < win; ++u) {
    for (int v = 0; v < win; ++v) {
      const double w = std::exp(-((u - mid) * (u - mid) + (v - mid) * (v - mid)) / (2 * sigma * sigma));
      g2[static_cast<std::size_t>(u * win + v)] = w;
      norm += w;
    }
  }
  for (auto& w : g2) w /= norm;
  const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
  const double* pa = A.data_ptr<double>();
  const double* pb = B.data_ptr<double>();
  double total = 0.0;
  int64_t count = 0;
  for (int64_t c = 0; c < C; ++c) {
    for (int64_t i = 0; i + win <= H; ++i) {
      for (int64_t j = 0; j + win <= W; ++j) {
        double ma = 0, mb = 0;
        for (int u = 0; u < win; ++u)
          for (int v = 0; v < win; ++v) {
            const double w = g2[static_cast<std::size_t>(u * win + v)];
            const auto k = (c * H + i + u) * W + j + v;
            ma += w * level(pa[k]);
            mb += w * level(pb[k]);
          }
        double va = 0, vb = 0, cov = 0;
        for (int u = 0; u < win; ++u)
          for (int v = 0; v < win; ++v) {
            const double w = g2[static_cast<std::size_t>(u * win + v)];
            const auto k = (c * H + i + u) * W + j + v;
            const double da = level(pa[k]) - ma, db = level(pb[k]) - mb;
            va += w * da * da;
            vb += w * db * db;
            cov += w * da * db;
          }
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

// --- keypoints ----------------------------------------------------------

// Random keypoints in a frame with every pair of visible points farther
// apart than `min_distance`. Some points are invisible when
// `allow_invisible`.
inline KeypointSet random_keypoints(std::mt19937_64& rng, int n, Frame frame, double min_distance,
                                    bool allow_invisible = true, bool integer = false) {
  std::uniform_real_distribution<double> ux(0.0, frame.width - 1.0), uy(0.0, frame.height - 1.0);
  std::bernoulli_distribution hidden(allow_invisible ? 0.15 : 0.0);
  KeypointSet k;
  k.frame = frame;
  for (int i = 0; i < n; ++i) {
    Point2 p;
    for (int attempt = 0;; ++attempt) {
      p = {ux(rng), uy(rng)};
      if (integer) p = {std::round(p.x), std::round(p.y)};
      bool ok = true;
      for (std::size_t j = 0; j < k.points.size(); ++j) {
        if (k.visible[j] && std::hypot(k.points[j].x - p.x, k.points[j].y - p.y) <= min_distance) ok = false;
      }
      if (ok) break;
      if (attempt > 10000) throw std::runtime_error("random_keypoints: frame too crowded");
    }
    k.points.push_back(p);
    k.visible.push_back(!hidden(rng));
  }
  return k;
}

// A random involutive permutation of [0, n).
inline std::vector<int> random_swap_table(std::mt19937_64& rng, int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<int> swap(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) swap[static_cast<std::size_t>(i)] = i;
  std::bernoulli_distribution pair_up(0.5);
  for (int i = 0; i + 1 < n; i += 2) {
    if (!pair_up(rng)) continue;
    const int a = idx[static_cast<std::size_t>(i)], b = idx[static_cast<std::size_t>(i + 1)];
    swap[static_cast<std::size_t>(a)] = b;
    swap[static_cast<std::size_t>(b)] = a;
  }
  return swap;
}

// Disc raster by definition, independent of the library renderer.
inline torch::Tensor ref_disc(Point2 c, double r, Frame f) {
  auto t = torch::zeros({f.height, f.width});
  auto acc = t.accessor<float, 2>();
  for (int row = 0; row < f.height; ++row)
    for (int col = 0; col < f.width; ++col)
      if ((col - c.x) * (col - c.x) + (row - c.y) * (row - c.y) <= r * r) acc[row][col] = 1.0F;
  return t;
}

}  // namespace c2gan::testing
