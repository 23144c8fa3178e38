#include "lgd/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "lgd/checkpoint.hpp"
#include "lgd/errors.hpp"
#include "lgd/ops.hpp"
#include "lgd/optim.hpp"
#include "lgd/rng.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd::harness {
namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kEvalBatch = 64;

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<int> gather_labels(const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

std::string log_csv(const std::vector<EpochLog>& epochs) {
  std::ostringstream os;
  os << "epoch,cls,dist,nuc,mem,total,lr\n" << std::setprecision(9);
  for (const auto& e : epochs) {
    os << e.epoch << ',' << e.loss.cls << ',' << e.loss.dist << ',' << e.loss.nuc << ',' << e.loss.mem << ','
       << e.loss.total << ',' << e.lr << '\n';
  }
  return os.str();
}

// Shared epoch loop. `step` builds the composite loss for one batch of
// training indices; this function owns backward, the optimizer and logging.
template <typename StepFn>
std::vector<EpochLog> run_epochs(const RunConfig& cfg, std::size_t n_train, std::vector<Parameter> params,
                                 const StepFn& step, const RunHooks& hooks) {
  if (n_train == 0) throw InvalidArgument("training split is empty");
  AdamW opt;
  SplitMix64 shuffle(mix_seed(cfg.seed, fnv1a("shuffle")));
  auto order = iota_indices(n_train);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<EpochLog> epochs;
  for (int e = 0; e < cfg.epochs; ++e) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i)))]);
    }
    const double lr = cosine_lr(e, cfg.epochs, cfg.base_lr);
    losses::LossBreakdown sum;
    for (std::size_t start = 0; start < n_train; start += batch) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, start + batch)));
      const losses::Composite<float> loss = step(idx);
      if (!std::isfinite(loss.breakdown.total)) throw Diverged(e + 1);
      loss.total.backward();
      opt.step(params, lr);
      zero_grad(params);
      const double w = static_cast<double>(idx.size());
      sum.cls += w * loss.breakdown.cls;
      sum.dist += w * loss.breakdown.dist;
      sum.nuc += w * loss.breakdown.nuc;
      sum.mem += w * loss.breakdown.mem;
    }
    EpochLog log{e + 1, {}, lr};
    const double n = static_cast<double>(n_train);
    log.loss.cls = sum.cls / n;
    log.loss.dist = sum.dist / n;
    log.loss.nuc = sum.nuc / n;
    log.loss.mem = sum.mem / n;
    log.loss.total = log.loss.cls + cfg.weights.lambda_d * log.loss.dist + cfg.weights.lambda_n * log.loss.nuc +
                     cfg.weights.lambda_m * log.loss.mem;
    if (!std::isfinite(log.loss.total)) throw Diverged(e + 1);
    if (hooks.log) {
      *hooks.log << to_string(cfg.variant) << "-" << cfg.seed << " epoch " << log.epoch << "/" << cfg.epochs
                 << " total " << std::setprecision(6) << log.loss.total << " cls " << log.loss.cls << " lr " << lr
                 << std::endl;
    }
    epochs.push_back(log);
  }
  return epochs;
}

void warn_missing_classes(const DatasetManifest& manifest, const RunHooks& hooks) {
  const auto counts = manifest.class_counts(Split::test);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0 && hooks.log) *hooks.log << "warning: class " << k << " absent from the test split\n";
  }
}

// The inference graph of one checkpoint, built once.
class Predictor {
 public:
  explicit Predictor(const NamedTensors& tensors) : variant_(infer_variant(tensors)) {
    if (variant_ == Variant::ihc_unimodal) teacher_.emplace(model::TeacherNet::from_checkpoint(tensors));
    else graph_.emplace(model::ModelGraph::from_checkpoint(variant_, tensors));
  }

  Tensor logits(const Tensor& he, const Tensor& ihc) const {
    NoGradGuard no_grad;
    if (teacher_) return teacher_->forward(ihc);
    const bool needs_ihc = variant_ == Variant::image_concat || variant_ == Variant::feature_concat;
    return graph_->forward_infer(he, needs_ihc ? std::optional<Tensor>(ihc) : std::nullopt);
  }

 private:
  Variant variant_;
  std::optional<model::TeacherNet> teacher_;
  std::optional<model::ModelGraph> graph_;
};

metrics::MetricsReport evaluate_with(const Predictor& predictor, const SplitData& test) {
  metrics::ConfusionMatrix cm(model::kClasses);
  for (std::size_t start = 0; start < test.size(); start += kEvalBatch) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(test.size(), start + kEvalBatch); ++i) idx.push_back(i);
    const Tensor logits = predictor.logits(gather_rows(test.he, idx), gather_rows(test.ihc, idx));
    const auto values = logits.data();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      cm.add(test.labels[idx[r]], metrics::argmax(values.subspan(r * model::kClasses, model::kClasses)));
    }
  }
  return metrics::make_report(cm);
}

void save_run(const RunResult& r, const NamedTensors& full, const NamedTensors& inference) {
  const auto dir = r.config.run_dir();
  save_checkpoint(r.full_checkpoint, full);
  save_checkpoint(r.checkpoint, inference);
  io::write_text(dir / "config.cfg", format_config(r.config));
  io::write_text(dir / "log.csv", log_csv(r.epochs));
  io::write_text(dir / "metrics.json", metrics::to_record(r.metrics) + "\n");
}

RunResult start_result(const RunConfig& cfg) {
  cfg.validate();
  RunResult r;
  r.config = cfg;
  std::filesystem::create_directories(cfg.run_dir());
  r.checkpoint = cfg.run_dir() / "model.ckpt";
  r.full_checkpoint = cfg.run_dir() / "full.ckpt";
  return r;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

RunResult pretrain_teacher(const RunConfig& cfg_in, const RunHooks& hooks) {
  RunConfig cfg = cfg_in;
  cfg.variant = Variant::ihc_unimodal;
  cfg.teacher_ckpt.reset();
  RunResult r = start_result(cfg);
  const auto t0 = Clock::now();
  const auto manifest = read_manifest(cfg.dataset);
  const SplitData train_split = load_split(manifest, Split::train);
  const SplitData test_split = load_split(manifest, Split::test);
  warn_missing_classes(manifest, hooks);

  const model::TeacherNet net(cfg.seed);
  auto step = [&](const std::vector<std::size_t>& idx) {
    const auto labels = gather_labels(train_split.labels, idx);
    losses::LossTerms<float> terms{losses::cross_entropy(net.forward(gather_rows(train_split.ihc, idx)), labels),
                                   {}, {}, {}};
    return losses::total_loss(terms, cfg.weights, VariantFlags{});
  };
  r.epochs = run_epochs(cfg, train_split.size(), net.parameters(), step, hooks);
  r.metrics = evaluate_with(Predictor(net.state()), test_split);
  r.seconds = seconds_since(t0);
  save_run(r, net.state(), net.state());
  return r;
}

RunResult train(const RunConfig& cfg_in, const RunHooks& hooks) {
  if (cfg_in.variant == Variant::ihc_unimodal) return pretrain_teacher(cfg_in, hooks);
  RunConfig cfg = cfg_in;
  cfg.validate();
  model::ModelOptions options{cfg.joint_teacher};
  model::ModelGraph graph(cfg.variant, cfg.seed, options);
  if (needs_teacher(cfg.variant) && !cfg.joint_teacher) {
    if (!cfg.teacher_ckpt) cfg.teacher_ckpt = pretrain_teacher(cfg, hooks).checkpoint;
    graph.load_teacher(load_checkpoint(*cfg.teacher_ckpt));
  }

  RunResult r = start_result(cfg);
  const auto t0 = Clock::now();
  const auto manifest = read_manifest(cfg.dataset);
  const SplitData train_split = load_split(manifest, Split::train);
  const SplitData test_split = load_split(manifest, Split::test);
  warn_missing_classes(manifest, hooks);

  const VariantFlags flags = graph.flags();
  auto step = [&](const std::vector<std::size_t>& idx) {
    const auto labels = gather_labels(train_split.labels, idx);
    const auto out = graph.forward_train(gather_rows(train_split.he, idx), gather_rows(train_split.ihc, idx));
    losses::LossTerms<float> terms{losses::cross_entropy(out.logits, labels), {}, {}, {}};
    if (out.teacher_logits) terms.cls = ops::add(terms.cls, losses::cross_entropy(*out.teacher_logits, labels));
    if (flags.hallucination) terms.dist = losses::cosine_distill(*out.z_hat, *out.z_real, cfg.cosine_mode);
    if (flags.nuclei_aux) terms.nuc = losses::nuclei_mse(*out.nuclei, gather_rows(train_split.density, idx));
    if (flags.membrane_aux) terms.mem = losses::membrane_dice(*out.membrane, gather_rows(train_split.mask, idx));
    return losses::total_loss(terms, cfg.weights, flags);
  };
  r.epochs = run_epochs(cfg, train_split.size(), graph.trainable_parameters(), step, hooks);
  const NamedTensors inference = graph.inference_state();
  r.metrics = evaluate_with(Predictor(inference), test_split);
  r.seconds = seconds_since(t0);
  save_run(r, graph.state(), inference);
  return r;
}

Variant infer_variant(const NamedTensors& t) {
  auto has = [&](const char* name) { return t.contains(name); };
  if (!has("student.conv1.weight")) {
    if (has("teacher.head.weight")) return Variant::ihc_unimodal;
    throw IoError("<checkpoint>", "no student or teacher-head parameters");
  }
  if (has("ihc_encoder.conv1.weight")) return Variant::feature_concat;
  if (t.at("student.conv1.weight").dim(1) == 6) return Variant::image_concat;
  if (has("hallucinator.conv1.weight")) return has("fusion.spatial.weight") ? Variant::F : Variant::B;
  return Variant::A;
}

Tensor infer_logits(const NamedTensors& tensors, const Tensor& he, const Tensor& ihc) {
  return Predictor(tensors).logits(he, ihc);
}

metrics::MetricsReport evaluate(const NamedTensors& tensors, const SplitData& test) {
  return evaluate_with(Predictor(tensors), test);
}

metrics::MetricsReport evaluate(const std::filesystem::path& ckpt, const std::filesystem::path& manifest_path,
                                const RunHooks& hooks) {
  const NamedTensors tensors = load_checkpoint(ckpt);
  const auto manifest = read_manifest(manifest_path);
  warn_missing_classes(manifest, hooks);
  return evaluate(tensors, load_split(manifest, Split::test));
}

std::vector<AblationRow> run_ablation_matrix(const RunConfig& base, const RunHooks& hooks) {
  base.validate();
  const std::vector<Variant> order = {Variant::A, Variant::B, Variant::C, Variant::D, Variant::E,
                                      Variant::F, Variant::ihc_unimodal, Variant::feature_concat};
  std::vector<AblationRow> rows(order.size());
  auto run_one = [&](std::size_t i, const RunConfig& cfg) {
    rows[i].variant = order[i];
    rows[i].run = to_string(order[i]) + "-" + std::to_string(base.seed);
    try {
      rows[i].metrics = train(cfg, hooks).metrics;
      rows[i].ok = true;
    } catch (const Error& e) {
      rows[i].error = e.what();
      if (hooks.log) *hooks.log << rows[i].run << " failed: " << e.what() << "\n";
    }
  };

  // The teacher row runs first; its checkpoint feeds every distilling row.
  RunConfig cfg = base;
  const std::size_t teacher_row = 6;
  cfg.variant = Variant::ihc_unimodal;
  run_one(teacher_row, cfg);
  if (!base.teacher_ckpt && rows[teacher_row].ok) {
    cfg.teacher_ckpt = cfg.run_dir() / "model.ckpt";
  } else {
    cfg.teacher_ckpt = base.teacher_ckpt;
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == teacher_row) continue;
    cfg.variant = order[i];
    if (needs_teacher(order[i]) && !cfg.teacher_ckpt && !cfg.joint_teacher) {
      rows[i].variant = order[i];
      rows[i].run = to_string(order[i]) + "-" + std::to_string(base.seed);
      rows[i].error = "teacher pretraining failed";
      continue;
    }
    run_one(i, cfg);
  }
  std::filesystem::create_directories(base.out_dir);
  io::write_text(base.out_dir / ("ablation-" + std::to_string(base.seed) + ".csv"), results_csv(rows));
  return rows;
}

std::string results_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << kResultsHeader << '\n' << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    os << r.run << ',' << to_string(r.variant) << ',';
    if (r.ok) os << r.metrics.accuracy << ',' << r.metrics.macro_f1 << ',' << r.metrics.kappa << ',' << r.metrics.n;
    else os << "failed,failed,failed,0";
    os << '\n';
  }
  return os.str();
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  auto line = [&](const std::string& v, const std::string& h, const std::string& a, const std::string& b,
                  const std::string& acc, const std::string& f1, const std::string& k) {
    os << std::left << std::setw(16) << v << std::setw(9) << h << std::setw(7) << a << std::setw(9) << b
       << std::right << std::setw(8) << acc << std::setw(8) << f1 << std::setw(8) << k << '\n';
  };
  line("Variant", "Halluc.", "Attn.", "Bio-Reg", "Acc", "F1", "Kappa");
  for (const auto& r : rows) {
    const VariantFlags f = flags_of(r.variant);
    std::string bio = f.nuclei_aux && f.membrane_aux ? "K+M" : f.nuclei_aux ? "K" : f.membrane_aux ? "M" : "-";
    auto mark = [](bool on) { return std::string(on ? "yes" : "-"); };
    auto num = [&](double v, int prec) {
      if (!r.ok) return std::string("failed");
      std::ostringstream s;
      s << std::fixed << std::setprecision(prec) << v;
      return s.str();
    };
    line(to_string(r.variant), mark(f.hallucination), mark(f.attention), bio, num(100.0 * r.metrics.accuracy, 2),
         num(r.metrics.macro_f1, 4), num(r.metrics.kappa, 4));
  }
  return os.str();
}

}  // namespace lgd::harness
