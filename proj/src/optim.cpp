#include "lgd/optim.hpp"

#include <cmath>
#include <numbers>

#include "lgd/errors.hpp"

namespace lgd {

AdamW::AdamW(AdamWOptions options) : options_(options) {
  if (!(options_.beta1 > 0 && options_.beta1 < 1 && options_.beta2 > 0 && options_.beta2 < 1)) {
    throw InvalidArgument("AdamW betas must lie in (0,1)");
  }
  if (options_.weight_decay < 0) throw InvalidArgument("AdamW weight decay must be nonnegative");
}

void AdamW::step(std::vector<Parameter>& params, double lr) {
  if (lr < 0) throw InvalidArgument("learning rate must be nonnegative");
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) throw MissingGrad("parameter '" + p.name + "' has no gradient");
  }
  ++step_count_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
  for (auto& p : params) {
    auto& st = state_[p.name];
    auto data = p.tensor.data();
    auto grad = p.tensor.grad();
    if (st.m.size() != data.size()) {
      st.m.assign(data.size(), 0.0);
      st.v.assign(data.size(), 0.0);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grad[i];
      double theta = data[i];
      theta -= lr * options_.weight_decay * theta;
      st.m[i] = b1 * st.m[i] + (1.0 - b1) * g;
      st.v[i] = b2 * st.v[i] + (1.0 - b2) * g * g;
      const double m_hat = st.m[i] / bc1;
      const double v_hat = st.v[i] / bc2;
      theta -= lr * m_hat / (std::sqrt(v_hat) + options_.eps);
      data[i] = static_cast<float>(theta);
    }
  }
}

std::pair<const std::vector<double>*, const std::vector<double>*> AdamW::moments(const std::string& name) const {
  auto it = state_.find(name);
  if (it == state_.end()) return {nullptr, nullptr};
  return {&it->second.m, &it->second.v};
}

void zero_grad(std::vector<Parameter>& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

double cosine_lr(int epoch, int total_epochs, double base_lr) {
  if (total_epochs <= 0) throw InvalidArgument("cosine_lr: total_epochs must be positive");
  if (epoch < 0 || epoch > total_epochs) throw InvalidArgument("cosine_lr: epoch outside [0, total_epochs]");
  if (epoch == total_epochs) return 0.0;
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs));
}

}  // namespace lgd
