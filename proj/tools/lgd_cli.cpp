// lgd: dataset generation, target precomputation, training, evaluation and
// the ablation matrix behind one binary.
//
// Exit codes: 0 ok, 1 usage, 2 runtime failure, 3 diverged training run.

#include <cmath>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "lgd/checkpoint.hpp"
#include "lgd/config.hpp"
#include "lgd/errors.hpp"
#include "lgd/harness.hpp"
#include "lgd/synth.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kDiverged = 3 };

lgd::synth::NucleiSource parse_source(const std::string& s) {
  if (s == "he") return lgd::synth::NucleiSource::he;
  if (s == "ihc") return lgd::synth::NucleiSource::ihc;
  throw lgd::InvalidArgument("--nuclei-source must be he or ihc");
}

void print_counts(const lgd::DatasetManifest& m) {
  for (auto split : {lgd::Split::train, lgd::Split::test}) {
    const auto c = m.class_counts(split);
    std::cout << lgd::to_string(split) << ": " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  }
}

void print_run(const lgd::harness::RunResult& r) {
  std::cout << "checkpoint: " << r.checkpoint.string() << '\n'
            << lgd::metrics::to_record(r.metrics) << '\n'
            << "seconds: " << std::fixed << std::setprecision(1) << r.seconds << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HER2 scoring from H&E with latent IHC guidance"};
  app.require_subcommand(1);

  int n_train = 0, n_test = 0, size = 32;
  std::uint64_t seed = 42;
  std::string out, manifest, config, ckpt, source = "he";
  double sigma = 2.0;
  int grid = 8;
  bool quiet = false;

  auto* gen = app.add_subcommand("gen-data", "Generate a paired synthetic dataset");
  gen->add_option("--n-train", n_train, "Training pairs")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--n-test", n_test, "Test pairs")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", seed, "Dataset seed")->required();
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--size", size, "Patch side in pixels")->check(CLI::PositiveNumber);
  gen->add_option("--sigma", sigma, "Density smoothing sigma")->check(CLI::PositiveNumber);
  gen->add_option("--grid", grid, "Target cells per side")->check(CLI::PositiveNumber);
  gen->add_option("--nuclei-source", source, "Stain used for nuclei density")->check(CLI::IsMember({"he", "ihc"}));

  auto* pre = app.add_subcommand("precompute", "Recompute density maps and membrane masks");
  pre->add_option("--manifest", manifest, "Dataset manifest")->required();
  pre->add_option("--sigma", sigma, "Density smoothing sigma")->check(CLI::PositiveNumber);
  pre->add_option("--grid", grid, "Target cells per side")->check(CLI::PositiveNumber);
  pre->add_option("--nuclei-source", source, "Stain used for nuclei density")->check(CLI::IsMember({"he", "ihc"}));

  auto* teacher = app.add_subcommand("pretrain-teacher", "Train the IHC teacher encoder");
  auto* train = app.add_subcommand("train", "Train one variant");
  auto* ablate = app.add_subcommand("ablate", "Run the ablation matrix");
  for (auto* sub : {teacher, train, ablate}) {
    sub->add_option("--config", config, "Run config file")->required();
    sub->add_flag("--quiet", quiet, "No per-epoch lines");
  }

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  eval->add_option("--ckpt", ckpt, "Checkpoint")->required();
  eval->add_option("--manifest", manifest, "Dataset manifest")->required();

  auto* inspect = app.add_subcommand("inspect", "List checkpoint parameters");
  inspect->add_option("--ckpt", ckpt, "Checkpoint")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  lgd::harness::RunHooks hooks;
  if (!quiet) hooks.log = &std::cerr;

  try {
    if (gen->parsed()) {
      lgd::synth::BuildOptions opts;
      opts.size = size;
      opts.targets = {sigma, grid, parse_source(source)};
      const auto m = lgd::synth::build_dataset(n_train, n_test, seed, out, opts);
      std::cout << "manifest: " << (std::filesystem::path(out) / "manifest.csv").string() << '\n';
      print_counts(m);
    } else if (pre->parsed()) {
      const lgd::synth::TargetOptions opts{sigma, grid, parse_source(source)};
      const auto m = lgd::read_manifest(manifest);
      lgd::synth::precompute_targets(m, opts);
      std::cout << "targets: " << m.entries.size() << " pairs, " << grid << "x" << grid << '\n';
    } else if (teacher->parsed()) {
      print_run(lgd::harness::pretrain_teacher(lgd::load_config(config), hooks));
    } else if (train->parsed()) {
      print_run(lgd::harness::train(lgd::load_config(config), hooks));
    } else if (eval->parsed()) {
      std::cout << lgd::metrics::to_record(lgd::harness::evaluate(ckpt, manifest, hooks)) << '\n';
    } else if (ablate->parsed()) {
      const auto cfg = lgd::load_config(config);
      const auto rows = lgd::harness::run_ablation_matrix(cfg, hooks);
      std::cout << "results: " << (cfg.out_dir / ("ablation-" + std::to_string(cfg.seed) + ".csv")).string()
                << "\n\n" << lgd::harness::ablation_table(rows);
    } else if (inspect->parsed()) {
      for (const auto& [name, t] : lgd::load_checkpoint(ckpt)) {
        double sq = 0.0;
        for (float v : t.data()) sq += static_cast<double>(v) * v;
        std::cout << name << '\t' << lgd::to_string(t.shape()) << '\t' << std::setprecision(8) << std::sqrt(sq)
                  << '\n';
      }
    }
  } catch (const lgd::Diverged& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
