#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lgd {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

// One vertex of the eager autodiff tape. `backward` reads `grad` of this node
// and accumulates into the grads of `parents`.
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
};

// Returns the grad buffer of `node`, zero-filling it on first use.
template <typename T>
std::vector<T>& grad_buffer(Node<T>& node) {
  if (node.grad.empty()) node.grad.assign(node.data.size(), T(0));
  return node.grad;
}

}  // namespace detail

// Dense row-major tensor handle. Copies share the underlying storage and
// graph node, the same way framework tensors behave; use clone() for a deep
// copy.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;
  using node_type = detail::Node<T>;

  BasicTensor();
  BasicTensor(Shape shape, std::vector<T> data, bool requires_grad = false);

  static BasicTensor zeros(Shape shape, bool requires_grad = false);
  static BasicTensor full(Shape shape, T value, bool requires_grad = false);
  static BasicTensor scalar(T value, bool requires_grad = false);

  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->data.size(); }

  std::span<const T> data() const { return node_->data; }
  std::span<T> data() { return node_->data; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> grad() { return node_->grad; }
  void zero_grad() { node_->grad.clear(); }

  // Same values, no history, requires_grad off.
  BasicTensor detach() const;
  BasicTensor clone() const;

  // Reverse-mode sweep from this scalar. Leaf grads accumulate across calls;
  // the tape behind this tensor is released afterwards.
  void backward() const;

  bool same_node(const BasicTensor& other) const { return node_ == other.node_; }
  const std::shared_ptr<node_type>& node() const { return node_; }

  // Builds an op result. When no input requires grad the result carries no
  // tape and `backward_fn` is dropped.
  static BasicTensor from_op(Shape shape, std::vector<T> data,
                             std::vector<BasicTensor> inputs,
                             std::function<void(node_type&)> backward_fn);

 private:
  explicit BasicTensor(std::shared_ptr<node_type> node) : node_(std::move(node)) {}
  std::shared_ptr<node_type> node_;
};

// While alive, op results on this thread record no tape (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

// Converts between storage precisions without history.
template <typename To, typename From>
BasicTensor<To> cast(const BasicTensor<From>& t, bool requires_grad = false) {
  std::vector<To> out(t.numel());
  auto src = t.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<To>(src[i]);
  return BasicTensor<To>(t.shape(), std::move(out), requires_grad);
}

}  // namespace lgd
