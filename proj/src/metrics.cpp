#include "lgd/metrics.hpp"

#include <sstream>

#include "lgd/errors.hpp"

namespace lgd::metrics {
namespace {

void require_nonempty(const ConfusionMatrix& cm, const char* metric) {
  if (cm.total() <= 0) throw UndefinedMetric(std::string(metric) + " of an empty confusion matrix");
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw InvalidArgument("confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows.size()) throw InvalidShape("confusion matrix rows must be square");
    for (std::size_t p = 0; p < rows.size(); ++p) cm.add(static_cast<int>(t), static_cast<int>(p), rows[t][p]);
  }
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t count) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= classes_ ||
      static_cast<std::size_t>(predicted) >= classes_) {
    throw InvalidLabel("class index outside confusion matrix");
  }
  if (count < 0) throw InvalidArgument("confusion counts must be nonnegative");
  counts_[static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted)] += count;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw InvalidShape("cannot merge confusion matrices of different size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t k = 0; k < classes_; ++k) s += at(k, k);
  return s;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t k) const {
  std::int64_t s = 0;
  for (std::size_t p = 0; p < classes_; ++p) s += at(k, p);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t k) const {
  std::int64_t s = 0;
  for (std::size_t t = 0; t < classes_; ++t) s += at(t, k);
  return s;
}

double accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm, "accuracy");
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

double macro_f1(const ConfusionMatrix& cm) {
  require_nonempty(cm, "macro-F1");
  double sum = 0.0;
  for (std::size_t k = 0; k < cm.classes(); ++k) {
    const double tp = static_cast<double>(cm.at(k, k));
    const double predicted = static_cast<double>(cm.col_sum(k));
    const double actual = static_cast<double>(cm.row_sum(k));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    if (precision + recall > 0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(cm.classes());
}

double cohen_kappa(const ConfusionMatrix& cm) {
  require_nonempty(cm, "kappa");
  const double n = static_cast<double>(cm.total());
  const double p_o = static_cast<double>(cm.trace()) / n;
  double p_e = 0.0;
  for (std::size_t k = 0; k < cm.classes(); ++k) {
    p_e += static_cast<double>(cm.row_sum(k)) * static_cast<double>(cm.col_sum(k));
  }
  p_e /= n * n;
  if (p_e == 1.0) {
    if (p_o == 1.0) return 1.0;
    throw UndefinedMetric("kappa undefined: chance agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

MetricsReport make_report(const ConfusionMatrix& cm) {
  return MetricsReport{accuracy(cm), macro_f1(cm), cohen_kappa(cm), cm, cm.total()};
}

int argmax(std::span<const float> row) {
  if (row.empty()) throw InvalidArgument("argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return static_cast<int>(best);
}

std::string to_record(const MetricsReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << "{\"accuracy\": " << r.accuracy << ", \"macro_f1\": " << r.macro_f1 << ", \"kappa\": " << r.kappa
     << ", \"n\": " << r.n << ", \"confusion\": [";
  for (std::size_t t = 0; t < r.confusion.classes(); ++t) {
    os << (t ? ", [" : "[");
    for (std::size_t p = 0; p < r.confusion.classes(); ++p) os << (p ? ", " : "") << r.confusion.at(t, p);
    os << ']';
  }
  os << "]}";
  return os.str();
}

}  // namespace lgd::metrics
