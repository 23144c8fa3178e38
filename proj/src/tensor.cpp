#include "lgd/tensor.hpp"

#include <sstream>
#include <unordered_set>

#include "lgd/errors.hpp"

namespace lgd {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {
thread_local bool no_grad_active = false;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(no_grad_active) { no_grad_active = true; }
NoGradGuard::~NoGradGuard() { no_grad_active = previous_; }
bool NoGradGuard::active() { return no_grad_active; }

template <typename T>
BasicTensor<T>::BasicTensor() : node_(std::make_shared<node_type>()) {
  node_->shape = {};
  node_->data = {T(0)};
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data, bool requires_grad)
    : node_(std::make_shared<node_type>()) {
  if (lgd::numel(shape) != data.size()) {
    throw InvalidShape("tensor data length " + std::to_string(data.size()) +
                       " does not match shape " + to_string(shape));
  }
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value, bool requires_grad) {
  std::vector<T> data(lgd::numel(shape), value);
  return BasicTensor(std::move(shape), std::move(data), requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::scalar(T value, bool requires_grad) {
  return BasicTensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw InvalidShape("axis " + std::to_string(axis) + " out of range for shape " +
                       to_string(shape()));
  }
  return node_->shape[axis];
}

template <typename T>
T BasicTensor<T>::item() const {
  if (numel() != 1) throw InvalidArgument("item() on tensor of shape " + to_string(shape()));
  return node_->data[0];
}

template <typename T>
BasicTensor<T> BasicTensor<T>::detach() const {
  return BasicTensor(node_->shape, node_->data, false);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::clone() const {
  BasicTensor out(node_->shape, node_->data, node_->requires_grad);
  out.node_->grad = node_->grad;
  return out;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::from_op(Shape shape, std::vector<T> data,
                                       std::vector<BasicTensor> inputs,
                                       std::function<void(node_type&)> backward_fn) {
  BasicTensor out(std::move(shape), std::move(data), false);
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (!any || NoGradGuard::active()) return out;
  out.node_->requires_grad = true;
  out.node_->parents.reserve(inputs.size());
  for (auto& in : inputs) out.node_->parents.push_back(in.node_);
  out.node_->backward = std::move(backward_fn);
  return out;
}

template <typename T>
void BasicTensor<T>::backward() const {
  if (numel() != 1) {
    throw InvalidArgument("backward() requires a scalar, got shape " + to_string(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<node_type*> order;
  std::unordered_set<node_type*> visited;
  std::vector<std::pair<node_type*, std::size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      node_type* p = n->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (node_type* n : order) {
    if (n->requires_grad) detail::grad_buffer(*n);
  }
  node_->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    node_type* n = *it;
    if (n->backward) n->backward(*n);
  }
  for (node_type* n : order) {
    if (n->backward) {
      n->backward = nullptr;
      n->parents.clear();
    }
  }
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace lgd
