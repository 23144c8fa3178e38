#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lgd/tensor.hpp"

namespace lgd {

struct Parameter {
  std::string name;
  Tensor tensor;
};

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

// AdamW with decoupled weight decay and bias-corrected moments.
class AdamW {
 public:
  explicit AdamW(AdamWOptions options = {});

  // One update of every parameter in `params`. Throws MissingGrad if any of
  // them has no populated gradient.
  void step(std::vector<Parameter>& params, double lr);

  long step_count() const { return step_count_; }
  const AdamWOptions& options() const { return options_; }

  // Moment buffers for a parameter, empty if it has never been stepped.
  std::pair<const std::vector<double>*, const std::vector<double>*> moments(const std::string& name) const;

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  AdamWOptions options_;
  long step_count_ = 0;
  std::map<std::string, Moments> state_;
};

void zero_grad(std::vector<Parameter>& params);

// base_lr * 0.5 * (1 + cos(pi * epoch / total_epochs)).
double cosine_lr(int epoch, int total_epochs, double base_lr);

}  // namespace lgd
