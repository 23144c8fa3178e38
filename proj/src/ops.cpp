#include "lgd/ops.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "lgd/errors.hpp"

namespace lgd::ops {
namespace {

template <typename T>
using Node = detail::Node<T>;

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans,
              m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans,
              m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
  return s;
}

// For each flat index of `out`, the flat index into an operand of shape `in`
// broadcast against it.
std::vector<std::size_t> broadcast_map(const Shape& out, const Shape& in) {
  const auto in_strides = strides_of(in);
  std::vector<std::size_t> map(numel(out));
  std::vector<std::size_t> idx(out.size(), 0);
  for (std::size_t flat = 0; flat < map.size(); ++flat) {
    std::size_t off = 0;
    for (std::size_t a = 0; a < out.size(); ++a) {
      if (in[a] != 1) off += idx[a] * in_strides[a];
    }
    map[flat] = off;
    for (std::size_t a = out.size(); a-- > 0;) {
      if (++idx[a] < out[a]) break;
      idx[a] = 0;
    }
  }
  return map;
}

Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  if (a.size() != b.size()) {
    throw InvalidShape(std::string(op) + ": rank mismatch " + to_string(a) + " vs " + to_string(b));
  }
  Shape out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i] || b[i] == 1) {
      out[i] = a[i];
    } else if (a[i] == 1) {
      out[i] = b[i];
    } else {
      throw InvalidShape(std::string(op) + ": cannot broadcast " + to_string(a) + " with " + to_string(b));
    }
  }
  return out;
}

enum class Binary { add, sub, mul };

template <typename T>
BasicTensor<T> binary(const BasicTensor<T>& a, const BasicTensor<T>& b, Binary kind, const char* name) {
  Shape out_shape = broadcast_shape(a.shape(), b.shape(), name);
  auto ia = std::make_shared<std::vector<std::size_t>>(broadcast_map(out_shape, a.shape()));
  auto ib = std::make_shared<std::vector<std::size_t>>(broadcast_map(out_shape, b.shape()));
  auto da = a.data();
  auto db = b.data();
  std::vector<T> out(numel(out_shape));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T x = da[(*ia)[i]];
    const T y = db[(*ib)[i]];
    switch (kind) {
      case Binary::add: out[i] = x + y; break;
      case Binary::sub: out[i] = x - y; break;
      case Binary::mul: out[i] = x * y; break;
    }
  }
  return BasicTensor<T>::from_op(std::move(out_shape), std::move(out), {a, b}, [ia, ib, kind](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const auto& g = self.grad;
    if (pa.requires_grad) {
      auto& ga = detail::grad_buffer(pa);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[(*ia)[i]] += kind == Binary::mul ? g[i] * pb.data[(*ib)[i]] : g[i];
      }
    }
    if (pb.requires_grad) {
      auto& gb = detail::grad_buffer(pb);
      for (std::size_t i = 0; i < g.size(); ++i) {
        switch (kind) {
          case Binary::add: gb[(*ib)[i]] += g[i]; break;
          case Binary::sub: gb[(*ib)[i]] -= g[i]; break;
          case Binary::mul: gb[(*ib)[i]] += g[i] * pa.data[(*ia)[i]]; break;
        }
      }
    }
  });
}

template <typename T>
T stable_sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
BasicTensor<T> elementwise(const BasicTensor<T>& x, Unary kind) {
  auto in = x.data();
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = in[i];
    switch (kind) {
      case Unary::relu: out[i] = v > T(0) ? v : T(0); break;
      case Unary::sigmoid: out[i] = stable_sigmoid(v); break;
      case Unary::log: out[i] = std::log(std::max(v, static_cast<T>(kEps))); break;
      case Unary::exp: out[i] = std::exp(v); break;
      case Unary::neg: out[i] = -v; break;
    }
  }
  return BasicTensor<T>::from_op(x.shape(), std::move(out), {x}, [kind](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const T g = self.grad[i];
      const T v = p.data[i];
      switch (kind) {
        case Unary::relu: gp[i] += v > T(0) ? g : T(0); break;
        case Unary::sigmoid: gp[i] += g * self.data[i] * (T(1) - self.data[i]); break;
        case Unary::log: gp[i] += v > static_cast<T>(kEps) ? g / v : T(0); break;
        case Unary::exp: gp[i] += g * self.data[i]; break;
        case Unary::neg: gp[i] -= g; break;
      }
    }
  });
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return binary(a, b, Binary::add, "add");
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return binary(a, b, Binary::sub, "sub");
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return binary(a, b, Binary::mul, "mul");
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& x, double factor) {
  auto in = x.data();
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<T>(in[i] * factor);
  return BasicTensor<T>::from_op(x.shape(), std::move(out), {x}, [factor](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += static_cast<T>(self.grad[i] * factor);
  });
}

template <typename T>
BasicTensor<T> reduce(const BasicTensor<T>& x, Reduce kind, std::vector<std::size_t> axes, bool keepdims) {
  const Shape& in_shape = x.shape();
  if (axes.empty()) {
    axes.resize(in_shape.size());
    std::iota(axes.begin(), axes.end(), 0);
  }
  std::vector<bool> reduced(in_shape.size(), false);
  for (auto a : axes) {
    if (a >= in_shape.size()) {
      throw InvalidShape("reduce: axis " + std::to_string(a) + " invalid for " + to_string(in_shape));
    }
    reduced[a] = true;
  }
  Shape kept(in_shape.size());
  Shape out_shape;
  for (std::size_t a = 0; a < in_shape.size(); ++a) {
    kept[a] = reduced[a] ? 1 : in_shape[a];
    if (!reduced[a]) {
      out_shape.push_back(in_shape[a]);
    } else if (keepdims) {
      out_shape.push_back(1);
    }
  }
  // map[i]: output slot of input element i. broadcast_map over the input
  // shape is exactly that projection.
  auto map = std::make_shared<std::vector<std::size_t>>(broadcast_map(in_shape, kept));
  const std::size_t n_out = numel(kept);
  const double count = static_cast<double>(x.numel()) / static_cast<double>(n_out);
  auto in = x.data();

  std::vector<T> out(n_out);
  auto argmax = std::make_shared<std::vector<std::size_t>>();
  if (kind == Reduce::max) {
    argmax->assign(n_out, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < in.size(); ++i) {
      auto& slot = (*argmax)[(*map)[i]];
      if (slot == static_cast<std::size_t>(-1) || in[i] > in[slot]) slot = i;
    }
    for (std::size_t o = 0; o < n_out; ++o) out[o] = in[(*argmax)[o]];
  } else {
    std::vector<double> acc(n_out, 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) acc[(*map)[i]] += in[i];
    for (std::size_t o = 0; o < n_out; ++o) {
      out[o] = static_cast<T>(kind == Reduce::mean ? acc[o] / count : acc[o]);
    }
  }

  return BasicTensor<T>::from_op(std::move(out_shape), std::move(out), {x},
                                 [map, argmax, kind, count](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    if (kind == Reduce::max) {
      for (std::size_t o = 0; o < argmax->size(); ++o) gp[(*argmax)[o]] += self.grad[o];
      return;
    }
    const double f = kind == Reduce::mean ? 1.0 / count : 1.0;
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += static_cast<T>(self.grad[(*map)[i]] * f);
  });
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw InvalidShape("reshape " + to_string(x.shape()) + " -> " + to_string(shape));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return BasicTensor<T>::from_op(std::move(shape), std::move(out), {x}, [](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += self.grad[i];
  });
}

template <typename T>
BasicTensor<T> concat(const std::vector<BasicTensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) throw InvalidArgument("concat of zero tensors");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) throw InvalidShape("concat: axis out of range for " + to_string(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t a = 0; ok && a < s.size(); ++a) ok = a == axis || s[a] == first[a];
    if (!ok) throw InvalidShape("concat: " + to_string(s) + " incompatible with " + to_string(first));
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= first[a];
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < first.size(); ++a) inner *= first[a];

  auto widths = std::make_shared<std::vector<std::size_t>>();
  for (const auto& p : parts) widths->push_back(p.shape()[axis] * inner);
  const std::size_t row = out_shape[axis] * inner;

  std::vector<T> out(numel(out_shape));
  std::size_t col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto src = parts[k].data();
    const std::size_t w = (*widths)[k];
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * w, w, out.begin() + o * row + col);
    }
    col += w;
  }
  return BasicTensor<T>::from_op(std::move(out_shape), std::move(out), parts,
                                 [widths, outer, row](Node<T>& self) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      auto& p = *self.parents[k];
      const std::size_t w = (*widths)[k];
      if (p.requires_grad) {
        auto& gp = detail::grad_buffer(p);
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t j = 0; j < w; ++j) gp[o * w + j] += self.grad[o * row + col + j];
        }
      }
      col += w;
    }
  });
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& x) {
  if (x.rank() != 2) throw InvalidShape("softmax expects [N,C], got " + to_string(x.shape()));
  const std::size_t n = x.dim(0);
  const std::size_t c = x.dim(1);
  auto in = x.data();
  std::vector<T> out(in.size());
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = in.data() + r * c;
    const double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - m);
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = static_cast<T>(std::exp(row[j] - m) / z);
  }
  return BasicTensor<T>::from_op(x.shape(), std::move(out), {x}, [n, c](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    for (std::size_t r = 0; r < n; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += self.grad[r * c + j] * self.data[r * c + j];
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t i = r * c + j;
        gp[i] += static_cast<T>(self.data[i] * (self.grad[i] - dot));
      }
    }
  });
}

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight, const BasicTensor<T>& bias,
                      std::size_t stride, std::size_t padding) {
  if (input.rank() != 4 || weight.rank() != 4) {
    throw InvalidShape("conv2d expects 4-D input and weight, got " + to_string(input.shape()) + " and " +
                       to_string(weight.shape()));
  }
  const std::size_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t k = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  if (weight.dim(1) != c) {
    throw InvalidShape("conv2d: input has " + std::to_string(c) + " channels, weight expects " +
                       std::to_string(weight.dim(1)));
  }
  if (bias.numel() != k) throw InvalidShape("conv2d: bias length must equal output channels");
  if (stride < 1) throw InvalidArgument("conv2d: stride must be >= 1");
  if (kh > h + 2 * padding || kw > w + 2 * padding) throw InvalidShape("conv2d: kernel larger than padded input");

  const std::size_t ho = (h + 2 * padding - kh) / stride + 1;
  const std::size_t wo = (w + 2 * padding - kw) / stride + 1;
  const std::size_t ckk = c * kh * kw;
  const std::size_t hw_out = ho * wo;
  const bool pointwise = kh == 1 && kw == 1 && stride == 1 && padding == 0;

  auto in = input.data();
  auto wt = weight.data();
  auto bs = bias.data();

  // Patch matrices [ckk, hw_out] per sample, kept for the weight gradient.
  auto cols = std::make_shared<std::vector<T>>();
  if (!pointwise) {
    cols->assign(n * ckk * hw_out, T(0));
    for (std::size_t s = 0; s < n; ++s) {
      T* col = cols->data() + s * ckk * hw_out;
      const T* img = in.data() + s * c * h * w;
      for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t i = 0; i < kh; ++i) {
          for (std::size_t j = 0; j < kw; ++j) {
            T* dst = col + ((ch * kh + i) * kw + j) * hw_out;
            for (std::size_t oy = 0; oy < ho; ++oy) {
              const long iy = static_cast<long>(oy * stride + i) - static_cast<long>(padding);
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t ox = 0; ox < wo; ++ox) {
                const long ix = static_cast<long>(ox * stride + j) - static_cast<long>(padding);
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                dst[oy * wo + ox] = img[(ch * h + iy) * w + ix];
              }
            }
          }
        }
      }
    }
  }
  auto col_of = [&, cols](std::size_t s) -> const T* {
    return pointwise ? in.data() + s * c * h * w : cols->data() + s * ckk * hw_out;
  };

  std::vector<T> out(n * k * hw_out);
  for (std::size_t s = 0; s < n; ++s) {
    T* dst = out.data() + s * k * hw_out;
    for (std::size_t o = 0; o < k; ++o) std::fill_n(dst + o * hw_out, hw_out, bs[o]);
    gemm(false, false, static_cast<int>(k), static_cast<int>(hw_out), static_cast<int>(ckk), T(1), wt.data(),
         static_cast<int>(ckk), col_of(s), static_cast<int>(hw_out), T(1), dst, static_cast<int>(hw_out));
  }

  return BasicTensor<T>::from_op(
      Shape{n, k, ho, wo}, std::move(out), {input, weight, bias},
      [=](Node<T>& self) {
        auto& pin = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        const T* g = self.grad.data();
        if (pb.requires_grad) {
          auto& gb = detail::grad_buffer(pb);
          for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t o = 0; o < k; ++o) {
              double acc = 0.0;
              const T* go = g + (s * k + o) * hw_out;
              for (std::size_t q = 0; q < hw_out; ++q) acc += go[q];
              gb[o] += static_cast<T>(acc);
            }
          }
        }
        if (pw.requires_grad) {
          auto& gw = detail::grad_buffer(pw);
          for (std::size_t s = 0; s < n; ++s) {
            const T* col = pointwise ? pin.data.data() + s * c * h * w : cols->data() + s * ckk * hw_out;
            gemm(false, true, static_cast<int>(k), static_cast<int>(ckk), static_cast<int>(hw_out), T(1),
                 g + s * k * hw_out, static_cast<int>(hw_out), col, static_cast<int>(hw_out), T(1), gw.data(),
                 static_cast<int>(ckk));
          }
        }
        if (pin.requires_grad) {
          auto& gi = detail::grad_buffer(pin);
          std::vector<T> dcol(ckk * hw_out);
          for (std::size_t s = 0; s < n; ++s) {
            T* gimg = gi.data() + s * c * h * w;
            if (pointwise) {
              gemm(true, false, static_cast<int>(ckk), static_cast<int>(hw_out), static_cast<int>(k), T(1),
                   pw.data.data(), static_cast<int>(ckk), g + s * k * hw_out, static_cast<int>(hw_out), T(1), gimg,
                   static_cast<int>(hw_out));
              continue;
            }
            gemm(true, false, static_cast<int>(ckk), static_cast<int>(hw_out), static_cast<int>(k), T(1),
                 pw.data.data(), static_cast<int>(ckk), g + s * k * hw_out, static_cast<int>(hw_out), T(0),
                 dcol.data(), static_cast<int>(hw_out));
            for (std::size_t ch = 0; ch < c; ++ch) {
              for (std::size_t i = 0; i < kh; ++i) {
                for (std::size_t j = 0; j < kw; ++j) {
                  const T* src = dcol.data() + ((ch * kh + i) * kw + j) * hw_out;
                  for (std::size_t oy = 0; oy < ho; ++oy) {
                    const long iy = static_cast<long>(oy * stride + i) - static_cast<long>(padding);
                    if (iy < 0 || iy >= static_cast<long>(h)) continue;
                    for (std::size_t ox = 0; ox < wo; ++ox) {
                      const long ix = static_cast<long>(ox * stride + j) - static_cast<long>(padding);
                      if (ix < 0 || ix >= static_cast<long>(w)) continue;
                      gimg[(ch * h + iy) * w + ix] += src[oy * wo + ox];
                    }
                  }
                }
              }
            }
          }
        }
      });
}

template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weight, const BasicTensor<T>& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || weight.dim(0) != input.dim(1)) {
    throw InvalidShape("dense: cannot apply weight " + to_string(weight.shape()) + " to input " +
                       to_string(input.shape()));
  }
  const std::size_t n = input.dim(0), d = input.dim(1), m = weight.dim(1);
  if (bias.numel() != m) throw InvalidShape("dense: bias length must equal output width");
  std::vector<T> out(n * m);
  for (std::size_t r = 0; r < n; ++r) std::copy(bias.data().begin(), bias.data().end(), out.begin() + r * m);
  gemm(false, false, static_cast<int>(n), static_cast<int>(m), static_cast<int>(d), T(1), input.data().data(),
       static_cast<int>(d), weight.data().data(), static_cast<int>(m), T(1), out.data(), static_cast<int>(m));
  return BasicTensor<T>::from_op(Shape{n, m}, std::move(out), {input, weight, bias}, [n, d, m](Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    auto& pb = *self.parents[2];
    const T* g = self.grad.data();
    if (px.requires_grad) {
      auto& gx = detail::grad_buffer(px);
      gemm(false, true, static_cast<int>(n), static_cast<int>(d), static_cast<int>(m), T(1), g, static_cast<int>(m),
           pw.data.data(), static_cast<int>(m), T(1), gx.data(), static_cast<int>(d));
    }
    if (pw.requires_grad) {
      auto& gw = detail::grad_buffer(pw);
      gemm(true, false, static_cast<int>(d), static_cast<int>(m), static_cast<int>(n), T(1), px.data.data(),
           static_cast<int>(d), g, static_cast<int>(m), T(1), gw.data(), static_cast<int>(m));
    }
    if (pb.requires_grad) {
      auto& gb = detail::grad_buffer(pb);
      for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += g[r * m + j];
        gb[j] += static_cast<T>(acc);
      }
    }
  });
}

template <typename T>
BasicTensor<T> max_pool2d(const BasicTensor<T>& input, std::size_t window) {
  if (input.rank() != 4) throw InvalidShape("max_pool2d expects [N,C,H,W], got " + to_string(input.shape()));
  const std::size_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (window == 0 || h % window != 0 || w % window != 0) {
    throw InvalidShape("max_pool2d: window " + std::to_string(window) + " does not tile " + to_string(input.shape()));
  }
  const std::size_t ho = h / window, wo = w / window;
  auto in = input.data();
  std::vector<T> out(n * c * ho * wo);
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        std::size_t best = plane * h * w + (oy * window) * w + ox * window;
        for (std::size_t i = 0; i < window; ++i) {
          for (std::size_t j = 0; j < window; ++j) {
            const std::size_t idx = plane * h * w + (oy * window + i) * w + ox * window + j;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (plane * ho + oy) * wo + ox;
        out[o] = in[best];
        (*argmax)[o] = best;
      }
    }
  }
  return BasicTensor<T>::from_op(Shape{n, c, ho, wo}, std::move(out), {input}, [argmax](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = detail::grad_buffer(p);
    for (std::size_t o = 0; o < argmax->size(); ++o) gp[(*argmax)[o]] += self.grad[o];
  });
}

#define LGD_INSTANTIATE_OPS(T)                                                                             \
  template BasicTensor<T> elementwise(const BasicTensor<T>&, Unary);                                       \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                               \
  template BasicTensor<T> sub(const BasicTensor<T>&, const BasicTensor<T>&);                               \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                               \
  template BasicTensor<T> scale(const BasicTensor<T>&, double);                                            \
  template BasicTensor<T> reduce(const BasicTensor<T>&, Reduce, std::vector<std::size_t>, bool);           \
  template BasicTensor<T> reshape(const BasicTensor<T>&, Shape);                                           \
  template BasicTensor<T> concat(const std::vector<BasicTensor<T>>&, std::size_t);                         \
  template BasicTensor<T> softmax(const BasicTensor<T>&);                                                  \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,      \
                                 std::size_t, std::size_t);                                                \
  template BasicTensor<T> dense(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);      \
  template BasicTensor<T> max_pool2d(const BasicTensor<T>&, std::size_t);

LGD_INSTANTIATE_OPS(float)
LGD_INSTANTIATE_OPS(double)

#undef LGD_INSTANTIATE_OPS

}  // namespace lgd::ops
