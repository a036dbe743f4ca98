#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "c2gan/commands.hpp"
#include "c2gan/errors.hpp"
#include "c2gan/run_config.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<int64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const std::string& out_help) {
  cmd->add_option("--config", flags.config, "key = value config file");
  cmd->add_option("--seed", flags.seed, "overrides the seed key");
  cmd->add_option("--out", flags.out, out_help);
  cmd->add_option("--set", flags.sets, "override one key (key=value), repeatable");
}

c2gan::RunConfig resolve(const CommonFlags& flags) {
  c2gan::RunConfig cfg;
  if (!flags.config.empty()) cfg = c2gan::RunConfig::from_file(flags.config);
  for (const auto& s : flags.sets) cfg.set_assignment(s);
  if (flags.seed) cfg.set("seed", std::to_string(*flags.seed));
  return cfg;
}

fs::path out_or(const CommonFlags& flags, const char* fallback) {
  return flags.out.empty() ? fs::path(fallback) : fs::path(flags.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keypoint-guided image generation with cross-modal cycles"};
  app.require_subcommand(0, 1);
  bool show_defaults = false;
  app.add_flag("--print-defaults", show_defaults, "print every config key with its default and exit");

  CommonFlags gen_flags, train_flags, eval_flags, translate_flags, ablate_flags;
  auto* gen = app.add_subcommand("generate-data", "render a synthetic stick-figure dataset (train/ and test/)");
  add_common(gen, gen_flags, "dataset root (default: data)");
  auto* train = app.add_subcommand("train", "train the generators and discriminators");
  add_common(train, train_flags, "run directory (default: runs/train)");
  auto* eval = app.add_subcommand("evaluate", "score a checkpoint on test_dir");
  add_common(eval, eval_flags, "report directory (default: eval)");
  auto* trans = app.add_subcommand("translate", "generate one image for a target pose");
  add_common(trans, translate_flags, "output PNG (default: the output key)");
  auto* ablate = app.add_subcommand("ablate", "train and evaluate the six ablation variants");
  add_common(ablate, ablate_flags, "ablation root (default: runs/ablate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (show_defaults) {
      std::cout << c2gan::RunConfig::documented_defaults();
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }
    if (gen->parsed()) {
      const auto out = out_or(gen_flags, "data");
      const auto pairs = c2gan::cmd_generate_data(resolve(gen_flags), out);
      std::cout << "wrote " << pairs << " training pairs to " << (out / "train").string() << '\n';
    } else if (train->parsed()) {
      const auto summary = c2gan::cmd_train(resolve(train_flags), out_or(train_flags, "runs/train"));
      std::cout << "trained " << summary.steps << " steps; checkpoint " << summary.checkpoint.string() << '\n';
    } else if (eval->parsed()) {
      const auto report = c2gan::cmd_evaluate(resolve(eval_flags), out_or(eval_flags, "eval"));
      std::cout << "pairs " << report.count() << "  SSIM " << report.mean_ssim << "  PSNR " << report.mean_psnr
                << "  mask-SSIM " << report.mean_mask_ssim << '\n';
    } else if (trans->parsed()) {
      const auto path = c2gan::cmd_translate(resolve(translate_flags), translate_flags.out);
      std::cout << "wrote " << path.string() << '\n';
    } else if (ablate->parsed()) {
      const auto results = c2gan::cmd_ablate(resolve(ablate_flags), out_or(ablate_flags, "runs/ablate"));
      std::cout << results.dump(2) << '\n';
    }
  } catch (const c2gan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
