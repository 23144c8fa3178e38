#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lgd/config.hpp"
#include "lgd/dataset.hpp"
#include "lgd/losses.hpp"
#include "lgd/metrics.hpp"
#include "lgd/model.hpp"

namespace lgd::harness {

struct EpochLog {
  int epoch = 0;  // 1-based
  losses::LossBreakdown loss;  // batch means
  double lr = 0.0;
};

struct RunResult {
  RunConfig config;
  metrics::MetricsReport metrics;
  std::vector<EpochLog> epochs;
  double seconds = 0.0;
  std::filesystem::path checkpoint;       // inference checkpoint
  std::filesystem::path full_checkpoint;  // everything, including teacher and decoders
};

// Per-epoch progress lines go to `log` when it is non-null.
struct RunHooks {
  std::ostream* log = nullptr;
};

// Trains the IHC encoder with its own head on (IHC, label) and saves it to
// `<run_dir>/model.ckpt`. Metrics are the head's test-split accuracy, i.e.
// the IHC-unimodal baseline.
RunResult pretrain_teacher(const RunConfig& cfg, const RunHooks& hooks = {});

// Full training for cfg.variant. Variants that distill from the teacher
// pretrain one first when cfg.teacher_ckpt is unset. Throws Diverged on a
// non-finite loss.
RunResult train(const RunConfig& cfg, const RunHooks& hooks = {});

// Recovers the inference graph from parameter names. C-F share one
// inference graph and come back as F.
Variant infer_variant(const NamedTensors& tensors);

// Test-split metrics of a checkpoint. H&E-only except for the baselines that
// consume real IHC.
metrics::MetricsReport evaluate(const std::filesystem::path& ckpt, const std::filesystem::path& manifest,
                                const RunHooks& hooks = {});
metrics::MetricsReport evaluate(const NamedTensors& tensors, const SplitData& test);

// Logits for `he` (and `ihc` when the variant needs it), computed without a tape.
Tensor infer_logits(const NamedTensors& tensors, const Tensor& he, const Tensor& ihc);

struct AblationRow {
  std::string run;
  Variant variant = Variant::A;
  bool ok = false;
  metrics::MetricsReport metrics;
  std::string error;
};

inline constexpr const char* kResultsHeader = "run,variant,acc,f1,kappa,n";

// Runs A-F, ihc_unimodal and feature_concat under base.seed. A failed run is
// recorded and the matrix continues. Results go to
// `<out_dir>/ablation-<seed>.csv`.
std::vector<AblationRow> run_ablation_matrix(const RunConfig& base, const RunHooks& hooks = {});

std::string results_csv(const std::vector<AblationRow>& rows);

// Aligned text table: variant, Halluc., Attn., Bio-Reg, Acc, F1, kappa.
std::string ablation_table(const std::vector<AblationRow>& rows);

}  // namespace lgd::harness
