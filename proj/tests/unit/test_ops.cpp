#include <cmath>

#include "doctest.h"
#include "gradcheck.hpp"
#include "lgd/errors.hpp"
#include "lgd/ops.hpp"
#include "oracles.hpp"
#include "suites.hpp"

using lgd::Tensor;
using lgd::Tensor64;
namespace ops = lgd::ops;

namespace {
std::vector<double> as_double(const Tensor& t) { return {t.data().begin(), t.data().end()}; }
}  // namespace

TEST_CASE("conv2d with a unit 1x1 kernel is the identity") {
  std::vector<float> v(16);
  for (int i = 0; i < 16; ++i) v[i] = static_cast<float>(i) - 3.5f;
  Tensor x({1, 1, 4, 4}, v);
  Tensor y = ops::conv2d(x, Tensor::full({1, 1, 1, 1}, 1.0f), Tensor::zeros({1}));
  CHECK(y.shape() == lgd::Shape{1, 1, 4, 4});
  for (int i = 0; i < 16; ++i) CHECK(y.data()[i] == v[i]);
}

TEST_CASE("conv2d of a zero input is the bias per channel") {
  lgd::SplitMix64 rng(3);
  Tensor w = lgd::cast<float>(gradcheck::random({2, 3, 3, 3}, rng));
  Tensor y = ops::conv2d(Tensor::zeros({1, 3, 5, 5}), w, Tensor({2}, {0.25f, -1.5f}), 1, 1);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(y.data()[i] == 0.25f);
    CHECK(y.data()[25 + i] == -1.5f);
  }
}

TEST_CASE("conv2d on a ramp matches the nested-loop oracle") {
  std::vector<float> ramp(16), kernel{1, -2, 0.5f, 3, 0, -1, 0.25f, 2, -0.5f};
  for (int i = 0; i < 16; ++i) ramp[i] = static_cast<float>(i);
  Tensor x({1, 1, 4, 4}, ramp);
  Tensor w({1, 1, 3, 3}, kernel);
  for (std::size_t pad : {0u, 1u}) {
    for (std::size_t stride : {1u, 2u}) {
      Tensor y = ops::conv2d(x, w, Tensor({1}, {0.5f}), stride, pad);
      auto ref = oracle::conv2d(as_double(x), 1, 1, 4, 4, as_double(w), 1, 3, 3, {0.5}, static_cast<int>(stride),
                                static_cast<int>(pad));
      REQUIRE(y.numel() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y.data()[i] == doctest::Approx(ref[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("conv2d matches the oracle on random multi-channel batches") {
  lgd::SplitMix64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2, c = 3, h = 6, w = 5, k = 4;
    Tensor x = lgd::cast<float>(gradcheck::random({n, c, h, w}, rng));
    Tensor wt = lgd::cast<float>(gradcheck::random({k, c, 3, 3}, rng));
    Tensor b = lgd::cast<float>(gradcheck::random({k}, rng));
    Tensor y = ops::conv2d(x, wt, b, 1, 1);
    auto ref = oracle::conv2d(as_double(x), n, c, h, w, as_double(wt), k, 3, 3, as_double(b), 1, 1);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y.data()[i] == doctest::Approx(ref[i]).epsilon(1e-5));
  }
}

TEST_CASE("conv2d output size and shape errors") {
  Tensor y = ops::conv2d(Tensor::zeros({1, 2, 7, 7}), Tensor::zeros({3, 2, 3, 3}), Tensor::zeros({3}), 2, 1);
  CHECK(y.shape() == lgd::Shape{1, 3, 4, 4});
  CHECK_THROWS_AS(ops::conv2d(Tensor::zeros({1, 2, 4, 4}), Tensor::zeros({1, 3, 3, 3}), Tensor::zeros({1})),
                  lgd::InvalidShape);
  CHECK_THROWS_AS(ops::conv2d(Tensor::zeros({1, 1, 2, 2}), Tensor::zeros({1, 1, 3, 3}), Tensor::zeros({1})),
                  lgd::InvalidShape);
}

TEST_CASE("dense: identity weight, zero weight, and the matmul oracle") {
  Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor y = ops::dense(x, eye, Tensor::zeros({3}));
  for (std::size_t i = 0; i < 6; ++i) CHECK(y.data()[i] == x.data()[i]);

  Tensor z = ops::dense(x, Tensor::zeros({3, 2}), Tensor({2}, {7, -1}));
  CHECK(z.data()[0] == 7.0f);
  CHECK(z.data()[1] == -1.0f);
  CHECK(z.data()[2] == 7.0f);
  CHECK(z.data()[3] == -1.0f);

  lgd::SplitMix64 rng(5);
  Tensor a = lgd::cast<float>(gradcheck::random({2, 3}, rng));
  Tensor b = lgd::cast<float>(gradcheck::random({3, 2}, rng));
  Tensor bias = lgd::cast<float>(gradcheck::random({2}, rng));
  auto ref = oracle::matmul(as_double(a), as_double(b), as_double(bias), 2, 3, 2);
  Tensor out = ops::dense(a, b, bias);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out.data()[i] == doctest::Approx(ref[i]).epsilon(1e-6));

  CHECK_THROWS_AS(ops::dense(a, a, bias), lgd::InvalidShape);
}

TEST_CASE("elementwise values") {
  Tensor x({2}, {-1, 2});
  Tensor r = ops::relu(x);
  CHECK(r.data()[0] == 0.0f);
  CHECK(r.data()[1] == 2.0f);
  CHECK(ops::sigmoid(Tensor::scalar(0.0f)).item() == 0.5f);
  CHECK(ops::exp(Tensor::scalar(1.0f)).item() == doctest::Approx(std::exp(1.0)));
  CHECK(ops::neg(Tensor::scalar(2.0f)).item() == -2.0f);
  // log clamps at 1e-8 instead of producing -inf.
  CHECK(std::isfinite(ops::log(Tensor::scalar(0.0f)).item()));
  CHECK(ops::log(Tensor::scalar(0.0f)).item() == doctest::Approx(std::log(1e-8)));
}

TEST_CASE("sigmoid derivative at 0 is 0.25 by central differences") {
  Tensor64 x({1}, {0.0}, true);
  ops::sum(ops::sigmoid(x)).backward();
  const double h = 1e-3;
  const double fd = (1.0 / (1.0 + std::exp(-h)) - 1.0 / (1.0 + std::exp(h))) / (2 * h);
  CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fd == doctest::Approx(x.grad()[0]).epsilon(1e-6));
}

TEST_CASE("reductions") {
  CHECK(ops::sum(Tensor::full({5}, 1.0f), {0}).item() == 5.0f);
  CHECK(ops::mean(Tensor({3}, {1, 2, 3})).item() == 2.0f);
  Tensor m = ops::max(Tensor({2, 3}, {1, 5, 5, 7, 2, 7}), {1});
  CHECK(m.shape() == lgd::Shape{2});
  CHECK(m.data()[0] == 5.0f);
  CHECK(m.data()[1] == 7.0f);
  CHECK(ops::sum(Tensor::full({2, 3, 4}, 1.0f), {0, 2}, true).shape() == lgd::Shape{1, 3, 1});
}

TEST_CASE("max ties route the gradient to the lowest flat index") {
  Tensor x({4}, {3, 1, 3, 3}, true);
  ops::max(x).backward();
  CHECK(x.grad()[0] == 1.0f);
  CHECK(x.grad()[2] == 0.0f);
  CHECK(x.grad()[3] == 0.0f);

  Tensor p({1, 1, 2, 2}, {2, 2, 2, 2}, true);
  ops::sum(ops::max_pool2d(p, 2)).backward();
  CHECK(p.grad()[0] == 1.0f);
  CHECK(p.grad()[1] + p.grad()[2] + p.grad()[3] == 0.0f);
}

TEST_CASE("softmax: uniform, stability, 64-bit reference, shift invariance") {
  Tensor u = ops::softmax(Tensor::zeros({1, 4}));
  for (float v : u.data()) CHECK(v == doctest::Approx(0.25));

  Tensor big = ops::softmax(Tensor({1, 4}, {1000, 0, 0, 0}));
  CHECK(big.data()[0] == doctest::Approx(1.0));
  for (int j = 1; j < 4; ++j) CHECK(big.data()[j] == doctest::Approx(0.0));

  Tensor s = ops::softmax(Tensor({1, 4}, {1, 2, 3, 4}));
  auto ref = oracle::softmax_row({1, 2, 3, 4});
  double total = 0;
  for (int j = 0; j < 4; ++j) {
    CHECK(s.data()[j] == doctest::Approx(ref[j]).epsilon(1e-6));
    total += s.data()[j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  Tensor shifted = ops::softmax(Tensor({1, 4}, {101, 102, 103, 104}));
  for (int j = 0; j < 4; ++j) CHECK(shifted.data()[j] == doctest::Approx(s.data()[j]).epsilon(1e-6));
}

TEST_CASE("broadcasting rejects incompatible shapes") {
  CHECK_THROWS_AS(ops::add(Tensor::zeros({2, 3}), Tensor::zeros({3, 2})), lgd::InvalidShape);
  CHECK_THROWS_AS(ops::add(Tensor::zeros({2, 3}), Tensor::zeros({3})), lgd::InvalidShape);
  CHECK(ops::add(Tensor::zeros({2, 3}), Tensor::zeros({1, 3})).shape() == lgd::Shape{2, 3});
}

TEST_CASE("every differentiable op passes finite-difference checks") {
  const auto r = suites::gradients(20);
  INFO(r.detail);
  CHECK(r.pass);
}
