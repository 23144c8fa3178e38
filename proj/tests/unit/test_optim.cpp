#include <cmath>

#include "doctest.h"
#include "lgd/errors.hpp"
#include "lgd/ops.hpp"
#include "lgd/optim.hpp"
#include "lgd/rng.hpp"

using lgd::AdamW;
using lgd::Parameter;
using lgd::Tensor;

namespace {

Parameter scalar_param(float value, float grad) {
  Tensor t({1}, {value}, true);
  lgd::ops::sum(lgd::ops::scale(t, grad)).backward();
  return {"theta", t};
}

// Hand-traced AdamW recurrences for one scalar.
struct ScalarAdamW {
  double theta, m = 0, v = 0, lr, wd, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  int t = 0;
  void step(double g) {
    ++t;
    theta = theta * (1 - lr * wd);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace

TEST_CASE("zero gradient and zero decay leave parameters unchanged") {
  std::vector<Parameter> ps{scalar_param(0.75f, 0.0f)};
  AdamW opt({0.9, 0.999, 1e-8, 0.0});
  opt.step(ps, 0.1);
  CHECK(ps[0].tensor.data()[0] == 0.75f);
  CHECK(opt.step_count() == 1);
}

TEST_CASE("first step of theta=1, g=1, lr=0.1 matches the scalar trace") {
  std::vector<Parameter> ps{scalar_param(1.0f, 1.0f)};
  AdamW opt({0.9, 0.999, 1e-8, 0.0});
  opt.step(ps, 0.1);
  ScalarAdamW ref{1.0, 0, 0, 0.1, 0.0};
  ref.step(1.0);
  CHECK(ps[0].tensor.data()[0] == doctest::Approx(ref.theta).epsilon(1e-7));
  CHECK(ref.theta == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("multi-step trajectory with varying gradients follows the scalar trace") {
  lgd::SplitMix64 rng(1);
  Tensor t({1}, {0.3f}, true);
  std::vector<Parameter> ps{{"theta", t}};
  AdamW opt;
  ScalarAdamW ref{0.3, 0, 0, 0.01, 1e-4};
  for (int s = 0; s < 25; ++s) {
    const double g = rng.uniform(-2, 2);
    lgd::ops::sum(lgd::ops::scale(t, g)).backward();
    opt.step(ps, 0.01);
    lgd::zero_grad(ps);
    ref.step(static_cast<float>(g));
    ref.theta = static_cast<float>(ref.theta);  // storage is 32-bit
  }
  CHECK(t.data()[0] == doctest::Approx(ref.theta).epsilon(1e-6));
  auto [m, v] = opt.moments("theta");
  REQUIRE(m != nullptr);
  CHECK(m->size() == 1);
  CHECK((*m)[0] == doctest::Approx(ref.m).epsilon(1e-6));
  CHECK((*v)[0] == doctest::Approx(ref.v).epsilon(1e-6));
}

TEST_CASE("decoupled decay shrinks by exactly lr*wd*theta under zero gradient") {
  std::vector<Parameter> ps{scalar_param(2.0f, 0.0f)};
  AdamW opt;  // wd 1e-4
  opt.step(ps, 0.5);
  CHECK(ps[0].tensor.data()[0] == doctest::Approx(2.0 - 0.5 * 1e-4 * 2.0).epsilon(1e-7));
}

TEST_CASE("lr = 0 leaves parameters unchanged regardless of gradients") {
  std::vector<Parameter> ps{scalar_param(-1.25f, 123.0f)};
  AdamW opt;
  opt.step(ps, 0.0);
  CHECK(ps[0].tensor.data()[0] == -1.25f);
}

TEST_CASE("missing gradient is reported") {
  std::vector<Parameter> ps{{"w", Tensor({2}, {1, 2}, true)}};
  AdamW opt;
  CHECK_THROWS_AS(opt.step(ps, 0.1), lgd::MissingGrad);
  CHECK(opt.step_count() == 0);
}

TEST_CASE("moment buffers match parameter shapes and step_count increments by one") {
  Tensor w({2, 3}, std::vector<float>(6, 0.5f), true);
  std::vector<Parameter> ps{{"w", w}};
  AdamW opt;
  for (int s = 1; s <= 3; ++s) {
    lgd::ops::sum(lgd::ops::mul(w, w)).backward();
    opt.step(ps, 1e-3);
    lgd::zero_grad(ps);
    CHECK(opt.step_count() == s);
  }
  CHECK(opt.moments("w").first->size() == 6);
}

TEST_CASE("identical seeds and op sequences replay bit-identically") {
  auto run = [] {
    lgd::SplitMix64 rng(99);
    std::vector<float> init(12);
    for (auto& v : init) v = static_cast<float>(rng.uniform(-1, 1));
    Tensor w({3, 4}, init, true);
    Tensor x({2, 3}, {1, -1, 0.5f, 2, 0, -0.5f});
    std::vector<Parameter> ps{{"w", w}};
    AdamW opt;
    for (int s = 0; s < 10; ++s) {
      lgd::ops::mean(lgd::ops::relu(lgd::ops::dense(x, w, Tensor::zeros({4})))).backward();
      opt.step(ps, 0.05);
      lgd::zero_grad(ps);
    }
    return std::vector<float>(w.data().begin(), w.data().end());
  };
  CHECK(run() == run());
}

TEST_CASE("cosine schedule endpoints, midpoint and monotonicity") {
  CHECK(lgd::cosine_lr(0, 50, 1e-4) == 1e-4);
  CHECK(lgd::cosine_lr(50, 50, 1e-4) == 0.0);
  CHECK(lgd::cosine_lr(25, 50, 1e-4) == doctest::Approx(5e-5).epsilon(1e-12));
  for (int e = 1; e <= 50; ++e) CHECK(lgd::cosine_lr(e, 50, 1e-4) <= lgd::cosine_lr(e - 1, 50, 1e-4));
  CHECK_THROWS_AS(lgd::cosine_lr(0, 0, 1e-4), lgd::InvalidArgument);
  CHECK_THROWS_AS(lgd::cosine_lr(51, 50, 1e-4), lgd::InvalidArgument);
}
