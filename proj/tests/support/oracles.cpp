#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

std::vector<double> conv2d(const std::vector<double>& x, int n, int c, int h, int w, const std::vector<double>& wt,
                           int k, int kh, int kw, const std::vector<double>& bias, int stride, int pad) {
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (w + 2 * pad - kw) / stride + 1;
  std::vector<double> out(static_cast<std::size_t>(n) * k * oh * ow);
  for (int s = 0; s < n; ++s)
    for (int o = 0; o < k; ++o)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          double acc = bias[o];
          for (int ch = 0; ch < c; ++ch)
            for (int u = 0; u < kh; ++u)
              for (int v = 0; v < kw; ++v) {
                const int y = i * stride + u - pad;
                const int xx = j * stride + v - pad;
                if (y < 0 || y >= h || xx < 0 || xx >= w) continue;
                acc += x[((s * c + ch) * h + y) * w + xx] * wt[((o * c + ch) * kh + u) * kw + v];
              }
          out[((s * k + o) * oh + i) * ow + j] = acc;
        }
  return out;
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& bias,
                           int n, int d, int m) {
  std::vector<double> out(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = bias[j];
      for (int t = 0; t < d; ++t) acc += a[i * d + t] * b[t * m + j];
      out[i * m + j] = acc;
    }
  return out;
}

std::vector<double> softmax_row(const std::vector<double>& logits) {
  // Long double gives the reference a few extra digits.
  long double top = logits[0];
  for (double v : logits) top = std::max<long double>(top, v);
  long double z = 0;
  for (double v : logits) z += std::exp(static_cast<long double>(v) - top);
  std::vector<double> p;
  for (double v : logits) p.push_back(static_cast<double>(std::exp(static_cast<long double>(v) - top) / z));
  return p;
}

double cross_entropy(const std::vector<double>& logits, const std::vector<int>& labels, int classes) {
  double acc = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    std::vector<double> row(logits.begin() + r * classes, logits.begin() + (r + 1) * classes);
    acc += -std::log(std::max(softmax_row(row)[labels[r]], 1e-8));
  }
  return acc / static_cast<double>(labels.size());
}

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b, int n, int c, int hw, bool spatial) {
  auto one = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0, nu = 0, nv = 0;
    for (int i = 0; i < c; ++i) {
      dot += u[i] * v[i];
      nu += u[i] * u[i];
      nv += v[i] * v[i];
    }
    return 1.0 - dot / (std::max(std::sqrt(nu), 1e-8) * std::max(std::sqrt(nv), 1e-8));
  };
  double acc = 0.0;
  int groups = 0;
  for (int s = 0; s < n; ++s) {
    if (spatial) {
      for (int q = 0; q < hw; ++q) {
        std::vector<double> u(c), v(c);
        for (int ch = 0; ch < c; ++ch) {
          u[ch] = a[(s * c + ch) * hw + q];
          v[ch] = b[(s * c + ch) * hw + q];
        }
        acc += one(u, v);
        ++groups;
      }
    } else {
      std::vector<double> u(c, 0.0), v(c, 0.0);
      for (int ch = 0; ch < c; ++ch) {
        for (int q = 0; q < hw; ++q) {
          u[ch] += a[(s * c + ch) * hw + q] / hw;
          v[ch] += b[(s * c + ch) * hw + q] / hw;
        }
      }
      acc += one(u, v);
      ++groups;
    }
  }
  return acc / groups;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double soft_dice_loss(const std::vector<double>& pred, const std::vector<double>& truth) {
  double inter = 0, sp = 0, st = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    inter += pred[i] * truth[i];
    sp += pred[i];
    st += truth[i];
  }
  return 1.0 - (2.0 * inter + 1.0) / (sp + st + 1.0);
}

double accuracy(const std::vector<Sample>& s) {
  int hit = 0;
  for (const auto& x : s) hit += x.truth == x.predicted;
  return static_cast<double>(hit) / static_cast<double>(s.size());
}

double macro_f1(const std::vector<Sample>& s, int classes) {
  double sum = 0.0;
  for (int k = 0; k < classes; ++k) {
    int tp = 0, fp = 0, fn = 0;
    for (const auto& x : s) {
      if (x.predicted == k && x.truth == k) ++tp;
      else if (x.predicted == k) ++fp;
      else if (x.truth == k) ++fn;
    }
    // F1 = 2TP / (2TP + FP + FN), which is 2PR/(P+R) when defined.
    if (tp > 0) sum += 2.0 * tp / (2.0 * tp + fp + fn);
  }
  return sum / classes;
}

double kappa(const std::vector<Sample>& s, int classes) {
  const double n = static_cast<double>(s.size());
  double po = accuracy(s);
  double pe = 0.0;
  for (int k = 0; k < classes; ++k) {
    double t = 0, p = 0;
    for (const auto& x : s) {
      t += x.truth == k;
      p += x.predicted == k;
    }
    pe += (t / n) * (p / n);
  }
  return (po - pe) / (1.0 - pe);
}

namespace {
int mirror(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}
}  // namespace

std::vector<double> gaussian_2d(const std::vector<double>& map, int w, int h, const std::vector<double>& k1) {
  const int r = static_cast<int>(k1.size() / 2);
  std::vector<double> out(map.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) acc += k1[dy + r] * k1[dx + r] * map[mirror(y + dy, h) * w + mirror(x + dx, w)];
      out[y * w + x] = acc;
    }
  return out;
}

int otsu(const std::array<std::uint64_t, 256>& hist) {
  long double total = 0;
  int occupied = 0, only = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    if (hist[i] > 0) {
      ++occupied;
      only = i;
    }
  }
  if (occupied == 1) return only;
  int best_t = 0;
  long double best = -1;
  for (int t = 1; t < 256; ++t) {
    long double n0 = 0, n1 = 0, m0 = 0, m1 = 0;
    for (int i = 0; i < 256; ++i) {
      if (i < t) {
        n0 += hist[i];
        m0 += static_cast<long double>(i) * hist[i];
      } else {
        n1 += hist[i];
        m1 += static_cast<long double>(i) * hist[i];
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const long double w0 = n0 / total, w1 = n1 / total;
    const long double diff = m0 / n0 - m1 / n1;
    const long double score = w0 * w1 * diff * diff;
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace oracle
