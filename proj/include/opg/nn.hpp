#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "opg/errors.hpp"
#include "opg/tensor.hpp"

namespace opg {

// ---- parameter store ------------------------------------------------------

/// Named parameters with matching gradients and adaptive-moment state.
template <class T>
class ParamStore {
 public:
  struct Entry {
    Tensor<T> value;
    Tensor<T> grad;
    Tensor<T> m1;  // first moment
    Tensor<T> m2;  // second moment
  };

  Tensor<T>& add(const std::string& name, Tensor<T> init) {
    if (entries_.count(name)) throw SimError("ParamStore: duplicate name " + name);
    Entry e;
    e.grad = Tensor<T>(init.dims);
    e.m1 = Tensor<T>(init.dims);
    e.m2 = Tensor<T>(init.dims);
    e.value = std::move(init);
    auto [it, ok] = entries_.emplace(name, std::move(e));
    (void)ok;
    return it->second.value;
  }

  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor<T>& value(const std::string& name) { return at(name).value; }
  const Tensor<T>& value(const std::string& name) const { return at(name).value; }
  Tensor<T>& grad(const std::string& name) { return at(name).grad; }

  Entry& at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw SimError("ParamStore: unknown name " + name);
    return it->second;
  }
  const Entry& at(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw SimError("ParamStore: unknown name " + name);
    return it->second;
  }

  void zero_grads() {
    for (auto& [n, e] : entries_) e.grad.zero();
  }

  /// One adaptive-moment update over every parameter.
  void adam_step(T lr, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8)) {
    ++step_;
    const T bc1 = T(1) - std::pow(beta1, static_cast<T>(step_));
    const T bc2 = T(1) - std::pow(beta2, static_cast<T>(step_));
    for (auto& [n, e] : entries_) {
      T* w = e.value.ptr();
      const T* g = e.grad.ptr();
      T* m = e.m1.ptr();
      T* v = e.m2.ptr();
      const long count = e.value.numel();
      for (long i = 0; i < count; ++i) {
        m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
        v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
        const T mhat = m[i] / bc1;
        const T vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }

  long step_count() const { return step_; }
  void set_step_count(long s) { step_ = s; }

  bool all_finite() const {
    for (const auto& [n, e] : entries_)
      if (!e.value.all_finite()) return false;
    return true;
  }

  // deterministic (alphabetical) iteration
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Entry> entries_;
  long step_ = 0;
};

template <class To, class From>
void copy_params(const ParamStore<From>& src, ParamStore<To>& dst) {
  for (const auto& [name, e] : src) {
    if (dst.has(name)) {
      Tensor<To>& t = dst.value(name);
      for (long i = 0; i < t.numel(); ++i) t[i] = static_cast<To>(e.value[i]);
    } else {
      dst.add(name, tensor_cast<To>(e.value));
    }
  }
}

template <class T>
void he_normal_init(Tensor<T>& t, long fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (long i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(dist(rng));
}

// ---- convolution ----------------------------------------------------------
// Cross-correlation, CHW layout, square kernel, symmetric zero padding.

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

template <class T>
void conv2d_forward(const T* in, int ic, int ih, int iw, const T* w, const T* b, int oc, int k,
                    int stride, int pad, T* out) {
  const int oh = conv_out_dim(ih, k, stride, pad);
  const int ow = conv_out_dim(iw, k, stride, pad);
  for (int o = 0; o < oc; ++o) {
    T* oplane = out + static_cast<size_t>(o) * oh * ow;
    std::fill(oplane, oplane + static_cast<size_t>(oh) * ow, b[o]);
    for (int c = 0; c < ic; ++c) {
      const T* iplane = in + static_cast<size_t>(c) * ih * iw;
      const T* wk = w + (static_cast<size_t>(o) * ic + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = wk[ky * k + kx];
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride - pad + ky;
            if (iy < 0 || iy >= ih) continue;
            const T* irow = iplane + static_cast<size_t>(iy) * iw;
            T* orow = oplane + static_cast<size_t>(oy) * ow;
            // valid ox: 0 <= ox*stride - pad + kx < iw
            int ox0 = 0, ox1 = ow;
            if (stride == 1) {
              ox0 = std::max(0, pad - kx);
              ox1 = std::min(ow, iw + pad - kx);
              const int shift = kx - pad;
              for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wv * irow[ox + shift];
            } else {
              while (ox0 < ow && ox0 * stride - pad + kx < 0) ++ox0;
              while (ox1 > ox0 && (ox1 - 1) * stride - pad + kx >= iw) --ox1;
              for (int ox = ox0; ox < ox1; ++ox)
                orow[ox] += wv * irow[ox * stride - pad + kx];
            }
          }
        }
      }
    }
  }
}

/// Accumulates into din/dw/db (callers zero or keep as needed).
/// `din` may be null when the input gradient is not required.
template <class T>
void conv2d_backward(const T* in, int ic, int ih, int iw, const T* w, int oc, int k, int stride,
                     int pad, const T* dout, T* din, T* dw, T* db) {
  const int oh = conv_out_dim(ih, k, stride, pad);
  const int ow = conv_out_dim(iw, k, stride, pad);
  for (int o = 0; o < oc; ++o) {
    const T* dplane = dout + static_cast<size_t>(o) * oh * ow;
    T acc = T(0);
    for (long i = 0; i < static_cast<long>(oh) * ow; ++i) acc += dplane[i];
    db[o] += acc;
    for (int c = 0; c < ic; ++c) {
      const T* iplane = in + static_cast<size_t>(c) * ih * iw;
      T* dinplane = din ? din + static_cast<size_t>(c) * ih * iw : nullptr;
      const T* wk = w + (static_cast<size_t>(o) * ic + c) * k * k;
      T* dwk = dw + (static_cast<size_t>(o) * ic + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = wk[ky * k + kx];
          T wgrad = T(0);
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride - pad + ky;
            if (iy < 0 || iy >= ih) continue;
            const T* irow = iplane + static_cast<size_t>(iy) * iw;
            const T* drow = dplane + static_cast<size_t>(oy) * ow;
            T* dirow = dinplane ? dinplane + static_cast<size_t>(iy) * iw : nullptr;
            if (stride == 1) {
              const int ox0 = std::max(0, pad - kx);
              const int ox1 = std::min(ow, iw + pad - kx);
              const int shift = kx - pad;
              for (int ox = ox0; ox < ox1; ++ox) wgrad += drow[ox] * irow[ox + shift];
              if (dirow)
                for (int ox = ox0; ox < ox1; ++ox) dirow[ox + shift] += wv * drow[ox];
            } else {
              for (int ox = 0; ox < ow; ++ox) {
                const int ix = ox * stride - pad + kx;
                if (ix < 0 || ix >= iw) continue;
                wgrad += drow[ox] * irow[ix];
                if (dirow) dirow[ix] += wv * drow[ox];
              }
            }
          }
          dwk[ky * k + kx] += wgrad;
        }
      }
    }
  }
}

// ---- pointwise ops ----------------------------------------------------------

template <class T>
void relu_forward(const T* in, T* out, long n) {
  for (long i = 0; i < n; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
}

/// `post` is the relu output (post > 0 iff pre > 0).
template <class T>
void relu_backward(const T* post, const T* dout, T* din, long n) {
  for (long i = 0; i < n; ++i) din[i] += post[i] > T(0) ? dout[i] : T(0);
}

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// ---- fully connected --------------------------------------------------------
// w: [out, in] row-major; y = w x + b

template <class T>
void linear_forward(const T* x, int in, const T* w, const T* b, int out, T* y) {
  for (int o = 0; o < out; ++o) {
    T acc = b[o];
    const T* wr = w + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i) acc += wr[i] * x[i];
    y[o] = acc;
  }
}

template <class T>
void linear_backward(const T* x, int in, const T* w, int out, const T* dy, T* dx, T* dw, T* db) {
  for (int o = 0; o < out; ++o) {
    const T g = dy[o];
    db[o] += g;
    const T* wr = w + static_cast<size_t>(o) * in;
    T* dwr = dw + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i) {
      dwr[i] += g * x[i];
      if (dx) dx[i] += g * wr[i];
    }
  }
}

// ---- bilinear upsampling ----------------------------------------------------
// align_corners = false: src = (dst + 0.5)/factor - 0.5, edges clamped.

struct UpsampleTap {
  int i0, i1;
  double w0, w1;
};

inline std::vector<UpsampleTap> upsample_taps(int in_dim, int factor) {
  std::vector<UpsampleTap> taps(static_cast<size_t>(in_dim) * factor);
  for (int d = 0; d < in_dim * factor; ++d) {
    double src = (d + 0.5) / factor - 0.5;
    int i0 = static_cast<int>(std::floor(src));
    double w1 = src - i0;
    int i1 = i0 + 1;
    i0 = std::clamp(i0, 0, in_dim - 1);
    i1 = std::clamp(i1, 0, in_dim - 1);
    taps[d] = {i0, i1, 1.0 - w1, w1};
  }
  return taps;
}

template <class T>
void bilinear_upsample_forward(const T* in, int c, int ih, int iw, int factor, T* out) {
  const auto ty = upsample_taps(ih, factor);
  const auto tx = upsample_taps(iw, factor);
  const int oh = ih * factor, ow = iw * factor;
  for (int ch = 0; ch < c; ++ch) {
    const T* ip = in + static_cast<size_t>(ch) * ih * iw;
    T* op = out + static_cast<size_t>(ch) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      const auto& a = ty[y];
      for (int x = 0; x < ow; ++x) {
        const auto& b = tx[x];
        double v = a.w0 * (b.w0 * ip[a.i0 * iw + b.i0] + b.w1 * ip[a.i0 * iw + b.i1]) +
                   a.w1 * (b.w0 * ip[a.i1 * iw + b.i0] + b.w1 * ip[a.i1 * iw + b.i1]);
        op[static_cast<size_t>(y) * ow + x] = static_cast<T>(v);
      }
    }
  }
}

template <class T>
void bilinear_upsample_backward(int c, int ih, int iw, int factor, const T* dout, T* din) {
  const auto ty = upsample_taps(ih, factor);
  const auto tx = upsample_taps(iw, factor);
  const int oh = ih * factor, ow = iw * factor;
  for (int ch = 0; ch < c; ++ch) {
    T* dp = din + static_cast<size_t>(ch) * ih * iw;
    const T* gp = dout + static_cast<size_t>(ch) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      const auto& a = ty[y];
      for (int x = 0; x < ow; ++x) {
        const auto& b = tx[x];
        const T g = gp[static_cast<size_t>(y) * ow + x];
        dp[a.i0 * iw + b.i0] += static_cast<T>(a.w0 * b.w0) * g;
        dp[a.i0 * iw + b.i1] += static_cast<T>(a.w0 * b.w1) * g;
        dp[a.i1 * iw + b.i0] += static_cast<T>(a.w1 * b.w0) * g;
        dp[a.i1 * iw + b.i1] += static_cast<T>(a.w1 * b.w1) * g;
      }
    }
  }
}

// ---- losses -----------------------------------------------------------------

template <class T>
T huber_loss(T delta) {
  const T a = std::abs(delta);
  return a <= T(1) ? T(0.5) * delta * delta : a - T(0.5);
}

template <class T>
T huber_grad(T delta) {
  return std::clamp(delta, T(-1), T(1));
}

template <class T>
T bce_loss(T y, T y_true) {
  const T eps = T(1e-7);
  y = std::clamp(y, eps, T(1) - eps);
  return -(y_true * std::log(y) + (T(1) - y_true) * std::log(T(1) - y));
}

// ---- gradient check ---------------------------------------------------------

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  long worst_index = -1;
  long checked = 0;
};

/// Central finite differences over every parameter element.
/// `loss_fn` evaluates the scalar loss at the current parameters;
/// `grad_fn` zeroes the grads and fills them analytically.
template <class T, class LossFn, class GradFn>
GradCheckReport grad_check(ParamStore<T>& params, LossFn loss_fn, GradFn grad_fn,
                           double h = 1e-3) {
  grad_fn();
  std::map<std::string, Tensor<T>> analytic;
  for (auto& [name, e] : params) analytic.emplace(name, e.grad);

  GradCheckReport rep;
  for (auto& [name, e] : params) {
    Tensor<T>& w = e.value;
    const Tensor<T>& a = analytic.at(name);
    for (long i = 0; i < w.numel(); ++i) {
      const T orig = w[i];
      w[i] = orig + static_cast<T>(h);
      const double lp = static_cast<double>(loss_fn());
      w[i] = orig - static_cast<T>(h);
      const double lm = static_cast<double>(loss_fn());
      w[i] = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double ana = static_cast<double>(a[i]);
      const double rel =
          std::abs(ana - numeric) / (std::max(std::abs(ana), std::abs(numeric)) + 1e-6);
      ++rep.checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = i;
      }
    }
  }
  return rep;
}

}  // namespace opg
