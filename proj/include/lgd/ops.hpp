#pragma once

#include <vector>

#include "lgd/tensor.hpp"

// Differentiable operations over BasicTensor. All are instantiated for float
// and double; reductions and the loss kernels accumulate in double either way.
namespace lgd::ops {

// Clamp floor for log and for divisions inside the loss kernels.
inline constexpr double kEps = 1e-8;

enum class Unary { relu, sigmoid, log, exp, neg };
enum class Reduce { sum, mean, max };

template <typename T>
BasicTensor<T> elementwise(const BasicTensor<T>& x, Unary kind);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) { return elementwise(x, Unary::relu); }
template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x) { return elementwise(x, Unary::sigmoid); }
template <typename T>
BasicTensor<T> log(const BasicTensor<T>& x) { return elementwise(x, Unary::log); }
template <typename T>
BasicTensor<T> exp(const BasicTensor<T>& x) { return elementwise(x, Unary::exp); }
template <typename T>
BasicTensor<T> neg(const BasicTensor<T>& x) { return elementwise(x, Unary::neg); }

// Broadcasting binary ops. Both operands must have equal rank; each axis must
// match or be 1 on one side.
template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& x, double factor);

// Reduces over `axes` (all axes when empty). max breaks ties toward the lowest
// flat index, both for the value and for gradient routing.
template <typename T>
BasicTensor<T> reduce(const BasicTensor<T>& x, Reduce kind, std::vector<std::size_t> axes = {},
                      bool keepdims = false);

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& x, std::vector<std::size_t> axes = {}, bool keepdims = false) {
  return reduce(x, Reduce::sum, std::move(axes), keepdims);
}
template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& x, std::vector<std::size_t> axes = {}, bool keepdims = false) {
  return reduce(x, Reduce::mean, std::move(axes), keepdims);
}
template <typename T>
BasicTensor<T> max(const BasicTensor<T>& x, std::vector<std::size_t> axes = {}, bool keepdims = false) {
  return reduce(x, Reduce::max, std::move(axes), keepdims);
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape);

// Concatenation along `axis`; all other axes must agree.
template <typename T>
BasicTensor<T> concat(const std::vector<BasicTensor<T>>& parts, std::size_t axis);

// Row-wise softmax over [N,C], max-subtracted.
template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& x);

// input [N,C,H,W], weight [K,C,kh,kw], bias [K] -> [N,K,H',W'].
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, std::size_t stride = 1, std::size_t padding = 0);

// input [N,D], weight [D,M], bias [M] -> [N,M].
template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                     const BasicTensor<T>& bias);

// Non-overlapping window max pooling over [N,C,H,W]; H and W must be
// divisible by `window`.
template <typename T>
BasicTensor<T> max_pool2d(const BasicTensor<T>& input, std::size_t window = 2);

// [N,C,H,W] -> [N,C].
template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input) {
  return mean(input, {2, 3});
}

}  // namespace lgd::ops
