#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lgd::metrics {

// Square count matrix, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 4);
  static ConfusionMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  void add(int truth, int predicted, std::int64_t count = 1);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  std::size_t classes() const { return classes_; }
  std::int64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_sum(std::size_t k) const;
  std::int64_t col_sum(std::size_t k) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::int64_t> counts_;
};

double accuracy(const ConfusionMatrix& cm);
// Classes with precision + recall = 0 contribute 0 to the mean.
double macro_f1(const ConfusionMatrix& cm);
double cohen_kappa(const ConfusionMatrix& cm);

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double kappa = 0.0;
  ConfusionMatrix confusion;
  std::int64_t n = 0;
};

MetricsReport make_report(const ConfusionMatrix& cm);

// Index of the largest value; ties go to the lower index.
int argmax(std::span<const float> row);

// {"accuracy": ..., ...} on one line.
std::string to_record(const MetricsReport& report);

}  // namespace lgd::metrics
