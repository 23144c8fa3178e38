// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "lgd/checkpoint.hpp"
#include "lgd/harness.hpp"
#include "lgd/synth.hpp"
#include "lgd/tensor_io.hpp"
#include "suites.hpp"

namespace fs = std::filesystem;
using lgd::Variant;

namespace {

struct Line {
  int id;
  std::string name;
  suites::Result result;
  double seconds;
};

std::string pct(double acc) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * acc;
  return os.str();
}

template <typename Fn>
Line timed(int id, std::string name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  suites::Result r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {id, std::move(name), std::move(r), s};
}

using Matrix = std::map<Variant, lgd::harness::AblationRow>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::string work = "acceptance-work";
  std::vector<std::uint64_t> seeds{42, 43, 44};
  bool quiet = false;
  app.add_option("--work-dir", work, "Scratch directory");
  app.add_option("--seeds", seeds, "Training seeds for the averaged orderings")->expected(1, 16);
  app.add_flag("--quiet", quiet, "Suppress per-epoch lines");
  CLI11_PARSE(app, argc, argv);

  const fs::path root = fs::absolute(work);
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostream* log = quiet ? nullptr : &std::cerr;
  std::vector<Line> lines;
  auto report = [&](Line l) {
    std::cout << (l.result.pass ? "PASS" : "FAIL") << " criterion " << l.id << " (" << l.name << ", "
              << std::fixed << std::setprecision(1) << l.seconds << " s): " << l.result.detail << std::endl;
    lines.push_back(std::move(l));
  };

  report(timed(1, "gradient suite", [] { return suites::gradients(20); }));
  report(timed(2, "oracle suite", [] { return suites::loss_and_metric_oracles(100); }));
  report(timed(3, "stain pipeline", [] { return suites::stain_pipeline(1000); }));
  report(timed(4, "membrane vs analytic ring", [] { return suites::ring_agreement(100, 0.7); }));

  // Default dataset and the ablation matrix for every seed.
  const fs::path data = root / "data";
  lgd::synth::build_dataset(1024, 256, 42, data);
  std::map<std::uint64_t, Matrix> matrices;
  std::string matrix_error;
  const auto t_matrix = std::chrono::steady_clock::now();
  for (auto seed : seeds) {
    lgd::RunConfig cfg;
    cfg.dataset = data / "manifest.csv";
    cfg.out_dir = root / "runs";
    cfg.seed = seed;
    try {
      for (auto& row : lgd::harness::run_ablation_matrix(cfg, {log})) matrices[seed][row.variant] = row;
    } catch (const std::exception& e) {
      matrix_error += "seed " + std::to_string(seed) + ": " + e.what() + "; ";
    }
    std::cout << "  seed " << seed << ":\n" << lgd::harness::ablation_table([&] {
      std::vector<lgd::harness::AblationRow> rows;
      for (auto& [v, r] : matrices[seed]) rows.push_back(r);
      return rows;
    }()) << std::flush;
  }
  const double matrix_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_matrix).count();

  auto acc = [&](std::uint64_t seed, Variant v) -> double {
    const auto& m = matrices[seed];
    const auto it = m.find(v);
    if (it == m.end() || !it->second.ok) throw std::runtime_error(lgd::to_string(v) + " run missing or failed");
    return it->second.metrics.accuracy;
  };
  auto mean_acc = [&](Variant v) {
    double s = 0;
    for (auto seed : seeds) s += acc(seed, v);
    return s / static_cast<double>(seeds.size());
  };
  const std::uint64_t first = seeds.front();

  report(timed(5, "modality orderings", [&] {
    const double ihc = acc(first, Variant::ihc_unimodal), a = acc(first, Variant::A), f = acc(first, Variant::F);
    const bool ok = ihc >= a + 0.05 && f >= a + 0.10;
    return suites::Result{ok, "seed " + std::to_string(first) + ": IHC " + pct(ihc) + ", A " + pct(a) + ", F " +
                                  pct(f) + " (need IHC >= A+5, F >= A+10)"};
  }));

  report(timed(6, "ablation orderings", [&] {
    std::map<Variant, double> m;
    for (auto v : {Variant::A, Variant::B, Variant::C, Variant::D, Variant::E, Variant::F}) m[v] = mean_acc(v);
    const double tol = 0.01;
    const bool b_ok = m[Variant::B] >= m[Variant::A] + 0.05;
    const bool f_ok = m[Variant::F] >= std::max(m[Variant::D], m[Variant::E]) - tol;
    const bool de_ok = m[Variant::D] >= m[Variant::C] - tol && m[Variant::E] >= m[Variant::C] - tol;
    std::string d = "mean over " + std::to_string(seeds.size()) + " seeds:";
    for (auto& [v, x] : m) d += " " + lgd::to_string(v) + "=" + pct(x);
    d += std::string(" [B>=A+5 ") + (b_ok ? "ok" : "no") + ", F>=max(D,E)-1 " + (f_ok ? "ok" : "no") +
         ", D,E>=C-1 " + (de_ok ? "ok" : "no") + "]";
    return suites::Result{b_ok && f_ok && de_ok, d};
  }));

  report(timed(7, "training sanity", [&] {
    std::string failed;
    for (auto& [seed, m] : matrices)
      for (auto& [v, row] : m)
        if (!row.ok) failed += " " + row.run + " (" + row.error + ")";
    if (!matrix_error.empty()) failed += " " + matrix_error;
    const auto log_path = root / "runs" / ("F-" + std::to_string(first)) / "log.csv";
    std::istringstream in(lgd::io::read_text(log_path));
    std::string line;
    std::vector<double> totals;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
      totals.push_back(std::stod(cells.at(5)));
    }
    const bool drop = totals.size() == 50 && totals.back() < 0.5 * totals.front();
    std::ostringstream d;
    d << "F epoch 1 total " << totals.front() << ", epoch " << totals.size() << " total " << totals.back()
      << "; failed runs:" << (failed.empty() ? " none" : failed) << "; matrix time " << std::setprecision(0)
      << std::fixed << matrix_seconds << " s";
    return suites::Result{drop && failed.empty(), d.str()};
  }));

  const fs::path f_dir = root / "runs" / ("F-" + std::to_string(first));
  report(timed(8, "inference independence", [&] {
    const auto full = lgd::load_checkpoint(f_dir / "full.ckpt");
    const auto stripped = lgd::strip_prefixes(full, {"teacher.", "decoder."});
    const auto test = lgd::load_split(lgd::read_manifest(data / "manifest.csv"), lgd::Split::test);
    const auto a = lgd::harness::infer_logits(full, test.he, test.ihc);
    const auto b = lgd::harness::infer_logits(stripped, test.he, test.ihc);
    bool same = a.shape() == b.shape();
    std::size_t diff = 0;
    for (std::size_t i = 0; same && i < a.numel(); ++i) diff += a.data()[i] != b.data()[i];
    same = same && diff == 0;
    return suites::Result{same, std::to_string(full.size() - stripped.size()) + " parameters stripped, " +
                                    std::to_string(diff) + " of " + std::to_string(a.numel()) + " logits differ"};
  }));

  report(timed(9, "determinism", [&] {
    lgd::RunConfig cfg;
    cfg.variant = Variant::F;
    cfg.seed = first;
    cfg.dataset = data / "manifest.csv";
    cfg.out_dir = root / "rerun";
    cfg.teacher_ckpt = root / "runs" / ("ihc_unimodal-" + std::to_string(first)) / "model.ckpt";
    const auto r = lgd::harness::train(cfg, {log});
    const bool ckpt = lgd::io::read_file(r.checkpoint) == lgd::io::read_file(f_dir / "model.ckpt") &&
                      lgd::io::read_file(r.full_checkpoint) == lgd::io::read_file(f_dir / "full.ckpt");
    const bool metrics = lgd::io::read_text(r.config.run_dir() / "metrics.json") == lgd::io::read_text(f_dir / "metrics.json");
    return suites::Result{ckpt && metrics, std::string("checkpoints ") + (ckpt ? "identical" : "differ") +
                                               ", metrics " + (metrics ? "identical" : "differ")};
  }));

  const auto failures = std::count_if(lines.begin(), lines.end(), [](const Line& l) { return !l.result.pass; });
  std::cout << (lines.size() - failures) << "/" << lines.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
