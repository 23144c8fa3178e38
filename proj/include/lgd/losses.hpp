#pragma once

#include <optional>
#include <span>

#include "lgd/tensor.hpp"
#include "lgd/variant.hpp"

namespace lgd::losses {

struct LossWeights {
  double lambda_d = 10.0;
  double lambda_n = 5.0;
  double lambda_m = 5.0;

  // Throws InvalidArgument unless all weights are finite and >= 0.
  void validate() const;
};

struct LossBreakdown {
  double cls = 0.0;
  double dist = 0.0;
  double nuc = 0.0;
  double mem = 0.0;
  double total = 0.0;
};

enum class CosineMode { pooled, spatial };

// Mean over the batch of -log softmax(logits)[label]; the probability is
// clamped at 1e-8 for the value. Throws InvalidLabel for labels outside
// [0, C).
template <typename T>
BasicTensor<T> cross_entropy(const BasicTensor<T>& logits, std::span<const int> labels);

// 1 - cos(z_hat, z_real), averaged over the batch. `pooled` compares
// globally average-pooled channel vectors; `spatial` averages the per-location
// cosine over channels. Gradient flows into z_hat only; norms clamp at 1e-8.
template <typename T>
BasicTensor<T> cosine_distill(const BasicTensor<T>& z_hat, const BasicTensor<T>& z_real,
                              CosineMode mode = CosineMode::pooled);

template <typename T>
BasicTensor<T> nuclei_mse(const BasicTensor<T>& k_hat, const BasicTensor<T>& k_gt);

// Batch-summed soft Dice with additive smoothing 1.
template <typename T>
BasicTensor<T> membrane_dice(const BasicTensor<T>& m_hat, const BasicTensor<T>& m_gt);

template <typename T>
struct LossTerms {
  BasicTensor<T> cls;
  std::optional<BasicTensor<T>> dist;
  std::optional<BasicTensor<T>> nuc;
  std::optional<BasicTensor<T>> mem;
};

template <typename T>
struct Composite {
  BasicTensor<T> total;
  LossBreakdown breakdown;
};

// total = cls + lambda_d dist + lambda_n nuc + lambda_m mem. A term must be
// present exactly when its flag is on, otherwise InconsistentVariant.
template <typename T>
Composite<T> total_loss(const LossTerms<T>& terms, const LossWeights& weights, const VariantFlags& flags);

}  // namespace lgd::losses
