#include "bwt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bwt/errors.hpp"
#include "bwt/rng.hpp"

namespace bwt {

Classifier::Classifier(int input_dim, std::uint64_t init_seed)
    : w1(static_cast<std::size_t>(kHidden) * input_dim),
      b1(kHidden, 0.0),
      w2(static_cast<std::size_t>(kClasses) * kHidden),
      b2(kClasses, 0.0),
      input_dim_(input_dim),
      init_seed_(init_seed) {
  Rng rng(init_seed);
  const double lim1 = std::sqrt(6.0 / input_dim);
  for (auto& w : w1) w = (rng.uniform01() * 2.0 - 1.0) * lim1;
  const double lim2 = std::sqrt(6.0 / kHidden);
  for (auto& w : w2) w = (rng.uniform01() * 2.0 - 1.0) * lim2;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

namespace {

void hidden_forward(const std::vector<double>& w1, const std::vector<double>& b1,
                    const double* x, int d, double* h_pre) {
  for (int hh = 0; hh < Classifier::kHidden; ++hh) {
    const double* row = w1.data() + static_cast<std::size_t>(hh) * d;
    double acc = b1[hh];
    for (int i = 0; i < d; ++i) acc += row[i] * x[i];
    h_pre[hh] = acc;
  }
}

}  // namespace

std::vector<double> Classifier::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw DimensionError("classifier input size mismatch");
  double h[kHidden];
  hidden_forward(w1, b1, x.data(), input_dim_, h);
  for (int i = 0; i < kHidden; ++i) h[i] = std::max(h[i], 0.0);
  std::vector<double> logits(kClasses);
  for (int o = 0; o < kClasses; ++o) {
    const double* row = w2.data() + static_cast<std::size_t>(o) * kHidden;
    double acc = b2[o];
    for (int i = 0; i < kHidden; ++i) acc += row[i] * h[i];
    logits[o] = acc;
  }
  return logits;
}

double Classifier::loss(const std::vector<double>& x, int y) const {
  const auto logits = forward(x);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - mx);
  return std::log(sum) + mx - logits[y];
}

int Classifier::predict(const std::vector<double>& x) const {
  const auto logits = forward(x);
  int best = 0;
  for (int i = 1; i < kClasses; ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

double Classifier::loss_and_grads(const std::vector<double>& x, int y,
                                  std::vector<double>* grad_x,
                                  Gradients* grad_theta) const {
  const int d = input_dim_;
  double h_pre[kHidden];
  double h[kHidden];
  hidden_forward(w1, b1, x.data(), d, h_pre);
  for (int i = 0; i < kHidden; ++i) h[i] = std::max(h_pre[i], 0.0);

  std::vector<double> logits(kClasses);
  for (int o = 0; o < kClasses; ++o) {
    const double* row = w2.data() + static_cast<std::size_t>(o) * kHidden;
    double acc = b2[o];
    for (int i = 0; i < kHidden; ++i) acc += row[i] * h[i];
    logits[o] = acc;
  }
  auto p = softmax(logits);
  const double loss_val = -std::log(std::max(p[y], 1e-300));

  // dlogits = p - onehot(y)
  double dlogits[kClasses];
  for (int o = 0; o < kClasses; ++o) dlogits[o] = p[o] - (o == y ? 1.0 : 0.0);

  double dh[kHidden] = {0.0};
  for (int o = 0; o < kClasses; ++o) {
    const double* row = w2.data() + static_cast<std::size_t>(o) * kHidden;
    for (int i = 0; i < kHidden; ++i) dh[i] += row[i] * dlogits[o];
  }
  for (int i = 0; i < kHidden; ++i) {
    if (h_pre[i] <= 0.0) dh[i] = 0.0;
  }

  if (grad_theta != nullptr) {
    grad_theta->w1.assign(w1.size(), 0.0);
    grad_theta->b1.assign(kHidden, 0.0);
    grad_theta->w2.assign(w2.size(), 0.0);
    grad_theta->b2.assign(kClasses, 0.0);
    for (int o = 0; o < kClasses; ++o) {
      double* gw = grad_theta->w2.data() + static_cast<std::size_t>(o) * kHidden;
      for (int i = 0; i < kHidden; ++i) gw[i] = dlogits[o] * h[i];
      grad_theta->b2[o] = dlogits[o];
    }
    for (int hh = 0; hh < kHidden; ++hh) {
      if (dh[hh] == 0.0) continue;
      double* gw = grad_theta->w1.data() + static_cast<std::size_t>(hh) * d;
      const double g = dh[hh];
      for (int i = 0; i < d; ++i) gw[i] = g * x[i];
      grad_theta->b1[hh] = g;
    }
  }
  if (grad_x != nullptr) {
    grad_x->assign(d, 0.0);
    for (int hh = 0; hh < kHidden; ++hh) {
      if (dh[hh] == 0.0) continue;
      const double* row = w1.data() + static_cast<std::size_t>(hh) * d;
      const double g = dh[hh];
      double* gx = grad_x->data();
      for (int i = 0; i < d; ++i) gx[i] += g * row[i];
    }
  }
  return loss_val;
}

std::vector<double> Classifier::train(const std::vector<ImageTensor>& images,
                                      const std::vector<int>& labels,
                                      const TrainConfig& cfg) {
  if (images.empty() || images.size() != labels.size())
    throw Error("train: empty or mismatched dataset");
  const int d = input_dim_;
  const std::size_t n = images.size();
  Rng rng(cfg.seed);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<double> gw1(w1.size()), gb1(kHidden), gw2(w2.size()),
      gb2(kClasses);
  std::vector<double> trace;
  trace.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n - 1; i >= 1; --i) {
      std::swap(order[i], order[rng.bounded(i + 1)]);
    }
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(gw1.begin(), gw1.end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      std::fill(gw2.begin(), gw2.end(), 0.0);
      std::fill(gb2.begin(), gb2.end(), 0.0);

      for (std::size_t s = start; s < end; ++s) {
        const std::vector<double>& x = images[order[s]].data;
        const int y = labels[order[s]];

        double h_pre[kHidden];
        double h[kHidden];
        hidden_forward(w1, b1, x.data(), d, h_pre);
        for (int i = 0; i < kHidden; ++i) h[i] = std::max(h_pre[i], 0.0);
        std::vector<double> logits(kClasses);
        for (int o = 0; o < kClasses; ++o) {
          const double* row = w2.data() + static_cast<std::size_t>(o) * kHidden;
          double acc = b2[o];
          for (int i = 0; i < kHidden; ++i) acc += row[i] * h[i];
          logits[o] = acc;
        }
        int best = 0;
        for (int o = 1; o < kClasses; ++o) {
          if (logits[o] > logits[best]) best = o;
        }
        if (best == y) ++correct;

        auto p = softmax(logits);
        double dlogits[kClasses];
        for (int o = 0; o < kClasses; ++o)
          dlogits[o] = p[o] - (o == y ? 1.0 : 0.0);
        for (int o = 0; o < kClasses; ++o) {
          double* gw = gw2.data() + static_cast<std::size_t>(o) * kHidden;
          const double g = dlogits[o];
          for (int i = 0; i < kHidden; ++i) gw[i] += g * h[i];
          gb2[o] += g;
        }
        double dh[kHidden];
        std::fill(dh, dh + kHidden, 0.0);
        for (int o = 0; o < kClasses; ++o) {
          const double* row = w2.data() + static_cast<std::size_t>(o) * kHidden;
          const double g = dlogits[o];
          for (int i = 0; i < kHidden; ++i) dh[i] += row[i] * g;
        }
        for (int hh = 0; hh < kHidden; ++hh) {
          if (h_pre[hh] <= 0.0 || dh[hh] == 0.0) continue;
          double* gw = gw1.data() + static_cast<std::size_t>(hh) * d;
          const double g = dh[hh];
          for (int i = 0; i < d; ++i) gw[i] += g * x[i];
          gb1[hh] += g;
        }
      }

      const double step = cfg.lr * scale;
      for (std::size_t i = 0; i < w1.size(); ++i) w1[i] -= step * gw1[i];
      for (int i = 0; i < kHidden; ++i) b1[i] -= step * gb1[i];
      for (std::size_t i = 0; i < w2.size(); ++i) w2[i] -= step * gw2[i];
      for (int i = 0; i < kClasses; ++i) b2[i] -= step * gb2[i];
    }
    trace.push_back(static_cast<double>(correct) / static_cast<double>(n));
  }
  return trace;
}

// Model file: "BWTM", u32 LE version, u32 tensor count, then per tensor
// u32 rows, u32 cols, row-major f32; trailing u64 init seed.
namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("model file truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_tensor(std::ofstream& out, const std::vector<double>& t,
                std::uint32_t rows, std::uint32_t cols) {
  put_u32(out, rows);
  put_u32(out, cols);
  for (double v : t) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
}

std::vector<double> get_tensor(std::ifstream& in, std::uint32_t* rows,
                               std::uint32_t* cols) {
  *rows = get_u32(in);
  *cols = get_u32(in);
  std::vector<double> t(static_cast<std::size_t>(*rows) * *cols);
  for (auto& v : t) {
    const std::uint32_t bits = get_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = f;
  }
  return t;
}

}  // namespace

void Classifier::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file: " + path);
  out.write("BWTM", 4);
  put_u32(out, 1);  // version
  put_u32(out, 4);  // tensor count
  put_tensor(out, w1, kHidden, static_cast<std::uint32_t>(input_dim_));
  put_tensor(out, b1, kHidden, 1);
  put_tensor(out, w2, kClasses, kHidden);
  put_tensor(out, b2, kClasses, 1);
  put_u32(out, static_cast<std::uint32_t>(init_seed_));
  put_u32(out, static_cast<std::uint32_t>(init_seed_ >> 32));
}

Classifier Classifier::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BWTM", 4) != 0)
    throw FormatError("not a BWTM model file: " + path);
  if (get_u32(in) != 1) throw FormatError("unsupported model version");
  if (get_u32(in) != 4) throw FormatError("unexpected tensor count");

  Classifier model;
  std::uint32_t rows, cols;
  model.w1 = get_tensor(in, &rows, &cols);
  if (rows != kHidden) throw FormatError("bad w1 shape");
  model.input_dim_ = static_cast<int>(cols);
  model.b1 = get_tensor(in, &rows, &cols);
  if (rows != kHidden || cols != 1) throw FormatError("bad b1 shape");
  model.w2 = get_tensor(in, &rows, &cols);
  if (rows != kClasses || cols != kHidden) throw FormatError("bad w2 shape");
  model.b2 = get_tensor(in, &rows, &cols);
  if (rows != kClasses || cols != 1) throw FormatError("bad b2 shape");
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t hi = get_u32(in);
  model.init_seed_ = lo | (hi << 32);
  return model;
}

}  // namespace bwt
