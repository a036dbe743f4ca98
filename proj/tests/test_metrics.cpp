#include <gtest/gtest.h>

#include <fstream>

#include "c2gan/dataset.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/heatmap.hpp"
#include "c2gan/image_io.hpp"
#include "c2gan/metrics.hpp"
#include "support.hpp"

using namespace c2gan;
using namespace c2gan::testing;

namespace {

torch::Tensor random_image(int h, int w, int c = 3) { return torch::rand({c, h, w}) * 2 - 1; }

}  // namespace

TEST(Psnr, AnalyticCases) {
  const auto x = random_image(8, 8);
  EXPECT_TRUE(std::isinf(psnr(x, x)));
  const auto levels = torch::randint(1, 255, {3, 8, 8}).to(torch::kFloat64);
  const double one_level = psnr(from_levels(levels), from_levels(levels + 1));
  EXPECT_NEAR(one_level, 10 * std::log10(255.0 * 255.0), 1e-4);
  EXPECT_NEAR(one_level, 48.1308, 1e-4);
}

TEST(Psnr, MatchesPixelLoop) {
  torch::manual_seed(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_image(8, 8), b = random_image(8, 8);
    EXPECT_NEAR(psnr(a, b), ref_psnr(a, b), 1e-6);
    EXPECT_EQ(psnr(a, b), psnr(b, a));
    EXPECT_GE(psnr(a, b), 0.0);
  }
}

TEST(Psnr, DecreasesWithNoiseAmplitude) {
  torch::manual_seed(2);
  const auto x = random_image(16, 16) * 0.5;
  const auto noise = torch::randn({3, 16, 16});
  double previous = INFINITY;
  for (double amp = 0.01; amp < 0.5; amp *= 1.5) {
    const double p = psnr(x, x + amp * noise);
    EXPECT_LT(p, previous);
    previous = p;
  }
}

TEST(Ssim, SelfSimilarityAndBounds) {
  torch::manual_seed(3);
  const auto a = random_image(16, 16), b = random_image(16, 16);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  EXPECT_EQ(ssim(a, b), ssim(b, a));
  EXPECT_GE(ssim(a, -a), -1.0);
  EXPECT_LE(ssim(a, b), 1.0);
  EXPECT_THROW(ssim(random_image(8, 16), random_image(8, 16)), ArgumentError);
}

TEST(Ssim, MatchesSlidingWindowReference) {
  torch::manual_seed(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_image(16, 16), b = (a + 0.3 * torch::randn({3, 16, 16})).clamp(-1, 1);
    EXPECT_NEAR(ssim(a, b), ref_ssim(a, b), 1e-6);
  }
  const auto a = random_image(20, 13, 1), b = random_image(20, 13, 1);
  EXPECT_NEAR(ssim(a, b), ref_ssim(a, b), 1e-6);
}

TEST(Ssim, BatchIsPerImage) {
  torch::manual_seed(5);
  const auto a = torch::rand({3, 3, 16, 16}) * 2 - 1, b = torch::rand({3, 3, 16, 16}) * 2 - 1;
  const auto s = ssim_batch(a, b);
  ASSERT_EQ(s.size(), 3U);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s[static_cast<std::size_t>(i)], ssim(a[i], b[i]));
}

TEST(Mask, NoVisibleKeypointsIsEmpty) {
  KeypointSet k{{{10, 10}}, {false}, {32, 32}};
  EXPECT_EQ(pose_mask(k, 32, 32, 4).sum().item<double>(), 0.0);
}

TEST(Mask, SinglePointIsTheCodecDisc) {
  KeypointSet k{{{12, 20}}, {true}, {32, 32}};
  EXPECT_TRUE(torch::equal(pose_mask(k, 32, 32, 4), render(k, HeatmapMode::person, 4).data));
}

TEST(Mask, SegmentsAreCovered) {
  KeypointSet k{{{5, 16}, {26, 16}}, {true, true}, {32, 32}};
  const auto m = pose_mask(k, 32, 32, 1.0, {{0, 1}});
  for (int col = 5; col <= 26; ++col) EXPECT_EQ(m[0][16][col].item<float>(), 1.0F);
  EXPECT_EQ(m[0][10][16].item<float>(), 0.0F);
}

TEST(MaskSsim, DegenerateMasks) {
  torch::manual_seed(6);
  const auto a = random_image(16, 16), b = random_image(16, 16);
  EXPECT_EQ(mask_ssim(a, b, torch::ones({1, 16, 16})), ssim(a, b));
  EXPECT_NEAR(mask_ssim(a, b, torch::zeros({1, 16, 16})), 1.0, 1e-12);
}

TEST(MaskSsim, DifferencesOutsideMaskIgnored) {
  torch::manual_seed(7);
  const auto a = random_image(24, 24);
  auto mask = torch::zeros({1, 24, 24});
  mask.slice(1, 4, 18).slice(2, 6, 20).fill_(1.0);
  const auto b = torch::where(mask.expand({3, 24, 24}) > 0, a, random_image(24, 24));
  EXPECT_FALSE(torch::equal(a, b));
  EXPECT_NEAR(mask_ssim(a, b, mask), 1.0, 1e-12);
}

namespace {

class Uniform : public LabelDistributionScorer {
 public:
  explicit Uniform(bool peaked) : peaked_(peaked) {}
  torch::Tensor predict(const torch::Tensor& images) const override {
    const auto b = images.size(0);
    if (!peaked_) return torch::full({b, 4}, 0.25);
    return torch::eye(4).index_select(0, torch::arange(b) % 4);
  }

 private:
  bool peaked_;
};

}  // namespace

TEST(InceptionScore, ExtremeDistributions) {
  const auto images = torch::zeros({8, 3, 4, 4});
  EXPECT_NEAR(inception_score(Uniform(false), images), 1.0, 1e-9);
  EXPECT_NEAR(inception_score(Uniform(true), images), 4.0, 1e-6);
}

TEST(Evaluate, GroundTruthAgainstItself) {
  const auto dir = temp_dir("eval_gt");
  GenerateOptions opt;
  opt.n_identities = 2;
  generate_dataset(dir, opt);
  EvalOptions eo;
  eo.ground_truth = true;
  const auto report = evaluate(dir, "", eo);
  EXPECT_EQ(report.count(), 12U);
  for (const auto& row : report.pairs) {
    EXPECT_NEAR(row.ssim, 1.0, 1e-12);
    EXPECT_TRUE(std::isinf(row.psnr));
  }
  EXPECT_NEAR(report.mean_ssim, 1.0, 1e-12);
  const auto j = report.to_json();
  EXPECT_EQ(j["mean_psnr"], "Inf");
  report.write(dir / "r.json", dir / "r.csv");
  std::ifstream csv(dir / "r.csv");
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  EXPECT_EQ(header, "x_path,y_path,ssim,psnr,mask_ssim");
  EXPECT_NE(first.find(",Inf,"), std::string::npos);
}

TEST(Evaluate, EmptySetIsAnError) {
  const auto dir = temp_dir("eval_empty");
  std::ofstream(dir / "pairs.csv") << "x_path,y_path,lx_path,ly_path,identity_id\n";
  EvalOptions eo;
  eo.ground_truth = true;
  EXPECT_THROW(evaluate(dir, "", eo), ArgumentError);
  EvalReport empty;
  EXPECT_THROW(empty.aggregate(), ArgumentError);
}

TEST(Evaluate, AggregatesAreMeans) {
  EvalReport r;
  r.pairs = {{"a", "b", 0.5, 20, 0.25}, {"c", "d", 0.7, 30, 0.75}};
  r.aggregate();
  EXPECT_DOUBLE_EQ(r.mean_ssim, 0.6);
  EXPECT_DOUBLE_EQ(r.mean_psnr, 25);
  EXPECT_DOUBLE_EQ(r.mean_mask_ssim, 0.5);
}
