#include "lgd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lgd/errors.hpp"
#include "lgd/ops.hpp"

namespace lgd::losses {
namespace {

template <typename T>
using Node = detail::Node<T>;

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) throw InvalidShape(std::string(what) + ": shape " + to_string(a) + " vs " + to_string(b));
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {lambda_d, lambda_n, lambda_m}) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("loss weights must be finite and nonnegative");
  }
}

template <typename T>
BasicTensor<T> cross_entropy(const BasicTensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2) throw InvalidShape("cross_entropy expects [N,C] logits, got " + to_string(logits.shape()));
  const std::size_t n = logits.dim(0);
  const std::size_t c = logits.dim(1);
  if (labels.size() != n) throw InvalidShape("cross_entropy: label count does not match batch");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) throw InvalidLabel("label " + std::to_string(y) + " out of range");
  }
  auto x = logits.data();
  auto probs = std::make_shared<std::vector<double>>(n * c);
  const double cap = -std::log(ops::kEps);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = x.data() + r * c;
    const double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - m);
    for (std::size_t j = 0; j < c; ++j) (*probs)[r * c + j] = std::exp(row[j] - m) / z;
    const double nll = std::log(z) + m - row[labels[r]];
    acc += std::min(nll, cap);
  }
  auto ys = std::make_shared<std::vector<int>>(labels.begin(), labels.end());
  return BasicTensor<T>::from_op(Shape{}, {static_cast<T>(acc / n)}, {logits}, [probs, ys, n, c](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = detail::grad_buffer(p);
    const double up = self.grad[0] / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < c; ++j) {
        const double target = static_cast<int>(j) == (*ys)[r] ? 1.0 : 0.0;
        g[r * c + j] += static_cast<T>(up * ((*probs)[r * c + j] - target));
      }
    }
  });
}

template <typename T>
BasicTensor<T> cosine_distill(const BasicTensor<T>& z_hat, const BasicTensor<T>& z_real, CosineMode mode) {
  require_same_shape(z_hat.shape(), z_real.shape(), "cosine_distill");
  if (z_hat.rank() != 2 && z_hat.rank() != 4) throw InvalidShape("cosine_distill expects [N,C] or [N,C,h,w]");
  const std::size_t n = z_hat.dim(0);
  const std::size_t c = z_hat.dim(1);
  const std::size_t hw = z_hat.numel() / (n * c);
  auto a = z_hat.data();
  auto b = z_real.data();

  // Vector groups compared by one cosine each: per sample when pooled, per
  // sample and location when spatial. value(g, ch) reads the compared entry.
  const bool pooled = mode == CosineMode::pooled;
  const std::size_t groups = pooled ? n : n * hw;
  auto grad_a = std::make_shared<std::vector<double>>(a.size(), 0.0);
  double acc = 0.0;
  std::vector<double> va(c), vb(c);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t s = pooled ? g : g / hw;
    const std::size_t q = pooled ? 0 : g % hw;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (s * c + ch) * hw;
      if (pooled) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t k = 0; k < hw; ++k) {
          sa += a[base + k];
          sb += b[base + k];
        }
        va[ch] = sa / hw;
        vb[ch] = sb / hw;
      } else {
        va[ch] = a[base + q];
        vb[ch] = b[base + q];
      }
    }
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (std::size_t ch = 0; ch < c; ++ch) {
      dot += va[ch] * vb[ch];
      na2 += va[ch] * va[ch];
      nb2 += vb[ch] * vb[ch];
    }
    const double na_raw = std::sqrt(na2);
    const double na = std::max(na_raw, ops::kEps);
    const double nb = std::max(std::sqrt(nb2), ops::kEps);
    const double cos = dot / (na * nb);
    acc += 1.0 - cos;
    // d(1 - cos)/d va; the norm term only exists where the clamp is inactive.
    for (std::size_t ch = 0; ch < c; ++ch) {
      double d = -vb[ch] / (na * nb);
      if (na_raw > ops::kEps) d += cos * va[ch] / (na * na);
      d /= static_cast<double>(groups);
      const std::size_t base = (s * c + ch) * hw;
      if (pooled) {
        for (std::size_t k = 0; k < hw; ++k) (*grad_a)[base + k] = d / hw;
      } else {
        (*grad_a)[base + q] = d;
      }
    }
  }
  return BasicTensor<T>::from_op(Shape{}, {static_cast<T>(acc / groups)}, {z_hat}, [grad_a](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = detail::grad_buffer(p);
    const double up = self.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += static_cast<T>(up * (*grad_a)[i]);
  });
}

template <typename T>
BasicTensor<T> nuclei_mse(const BasicTensor<T>& k_hat, const BasicTensor<T>& k_gt) {
  require_same_shape(k_hat.shape(), k_gt.shape(), "nuclei_mse");
  auto a = k_hat.data();
  auto b = k_gt.data();
  const std::size_t n = a.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return BasicTensor<T>::from_op(Shape{}, {static_cast<T>(acc / n)}, {k_hat, k_gt}, [n](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const double up = 2.0 * self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(pa.data[i]) - pb.data[i];
      if (pa.requires_grad) detail::grad_buffer(pa)[i] += static_cast<T>(up * d);
      if (pb.requires_grad) detail::grad_buffer(pb)[i] -= static_cast<T>(up * d);
    }
  });
}

template <typename T>
BasicTensor<T> membrane_dice(const BasicTensor<T>& m_hat, const BasicTensor<T>& m_gt) {
  require_same_shape(m_hat.shape(), m_gt.shape(), "membrane_dice");
  constexpr double kSmooth = 1.0;
  auto a = m_hat.data();
  auto b = m_gt.data();
  double inter = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += static_cast<double>(a[i]) * b[i];
    sa += a[i];
    sb += b[i];
  }
  const double num = 2.0 * inter + kSmooth;
  const double den = sa + sb + kSmooth;
  const double loss = 1.0 - num / den;
  return BasicTensor<T>::from_op(Shape{}, {static_cast<T>(loss)}, {m_hat, m_gt}, [num, den](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const double up = self.grad[0];
    const double den2 = den * den;
    for (std::size_t i = 0; i < pa.data.size(); ++i) {
      if (pa.requires_grad) detail::grad_buffer(pa)[i] += static_cast<T>(-up * (2.0 * pb.data[i] * den - num) / den2);
      if (pb.requires_grad) detail::grad_buffer(pb)[i] += static_cast<T>(-up * (2.0 * pa.data[i] * den - num) / den2);
    }
  });
}

template <typename T>
Composite<T> total_loss(const LossTerms<T>& terms, const LossWeights& weights, const VariantFlags& flags) {
  weights.validate();
  auto check = [](bool on, bool present, const char* name) {
    if (on != present) {
      throw InconsistentVariant(std::string(name) + (on ? " term is enabled but missing" : " term is present but disabled"));
    }
  };
  check(flags.hallucination, terms.dist.has_value(), "distillation");
  check(flags.nuclei_aux, terms.nuc.has_value(), "nuclei");
  check(flags.membrane_aux, terms.mem.has_value(), "membrane");

  LossBreakdown bd;
  bd.cls = terms.cls.item();
  BasicTensor<T> total = terms.cls;
  auto accumulate = [&](const std::optional<BasicTensor<T>>& term, double weight, double& slot) {
    if (!term) return;
    slot = term->item();
    total = ops::add(total, ops::scale(*term, weight));
  };
  accumulate(terms.dist, weights.lambda_d, bd.dist);
  accumulate(terms.nuc, weights.lambda_n, bd.nuc);
  accumulate(terms.mem, weights.lambda_m, bd.mem);
  bd.total = bd.cls + weights.lambda_d * bd.dist + weights.lambda_n * bd.nuc + weights.lambda_m * bd.mem;
  return {total, bd};
}

#define LGD_INSTANTIATE_LOSSES(T)                                                                       \
  template BasicTensor<T> cross_entropy(const BasicTensor<T>&, std::span<const int>);                   \
  template BasicTensor<T> cosine_distill(const BasicTensor<T>&, const BasicTensor<T>&, CosineMode);     \
  template BasicTensor<T> nuclei_mse(const BasicTensor<T>&, const BasicTensor<T>&);                     \
  template BasicTensor<T> membrane_dice(const BasicTensor<T>&, const BasicTensor<T>&);                  \
  template Composite<T> total_loss(const LossTerms<T>&, const LossWeights&, const VariantFlags&);

LGD_INSTANTIATE_LOSSES(float)
LGD_INSTANTIATE_LOSSES(double)

#undef LGD_INSTANTIATE_LOSSES

}  // namespace lgd::losses
