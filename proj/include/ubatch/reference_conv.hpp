// Copyright 2026 The ubatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ubatch/domain.hpp"

namespace ubatch {

// Dense row-major 4-d tensor of doubles, indexed [n, c, h, w]. Small and
// slow on purpose: this module exists to pin down semantics, not speed.
struct Tensor4 {
  std::int64_t n = 0;
  std::int64_t c = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;
  std::vector<double> data;

  static Tensor4 zeros(std::int64_t n, std::int64_t c, std::int64_t h,
                       std::int64_t w) {
    if (n < 0 || c < 0 || h < 0 || w < 0) {
      throw std::invalid_argument("tensor dims must be >= 0");
    }
    Tensor4 t{n, c, h, w, {}};
    t.data.assign(static_cast<std::size_t>(n * c * h * w), 0.0);
    return t;
  }

  double& at(std::int64_t in, std::int64_t ic, std::int64_t ih, std::int64_t iw) {
    return data[static_cast<std::size_t>(((in * c + ic) * h + ih) * w + iw)];
  }
  double at(std::int64_t in, std::int64_t ic, std::int64_t ih, std::int64_t iw) const {
    return data[static_cast<std::size_t>(((in * c + ic) * h + ih) * w + iw)];
  }

  std::int64_t count() const { return n * c * h * w; }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("shape mismatch: " + what);
}
inline std::int64_t conv_out(std::int64_t in, std::int64_t kernel,
                             std::int64_t pad, std::int64_t stride) {
  return (in + 2 * pad - kernel) / stride + 1;
}
}  // namespace detail

// Forward convolution: y[n,k,ho,wo] += f[k,c,v,u] * x[n,c,ho*sh-ph+v,
// wo*sw-pw+u], zero padding outside the input. With pad 0 and stride 1 this
// is the plain seven-loop convolution.
inline Tensor4 conv_forward(const Tensor4& x, const Tensor4& f,
                            std::int64_t pad_h, std::int64_t pad_w,
                            std::int64_t stride_h, std::int64_t stride_w) {
  detail::require(f.c == x.c, "filter in-channels must match input");
  const std::int64_t out_h = detail::conv_out(x.h, f.h, pad_h, stride_h);
  const std::int64_t out_w = detail::conv_out(x.w, f.w, pad_w, stride_w);
  detail::require(out_h >= 1 && out_w >= 1, "empty convolution output");
  Tensor4 y = Tensor4::zeros(x.n, f.n, out_h, out_w);
  for (std::int64_t n = 0; n < x.n; ++n) {
    for (std::int64_t k = 0; k < f.n; ++k) {
      for (std::int64_t ho = 0; ho < out_h; ++ho) {
        for (std::int64_t wo = 0; wo < out_w; ++wo) {
          double acc = 0.0;
          for (std::int64_t c = 0; c < x.c; ++c) {
            for (std::int64_t v = 0; v < f.h; ++v) {
              const std::int64_t hi = ho * stride_h - pad_h + v;
              if (hi < 0 || hi >= x.h) continue;
              for (std::int64_t u = 0; u < f.w; ++u) {
                const std::int64_t wi = wo * stride_w - pad_w + u;
                if (wi < 0 || wi >= x.w) continue;
                acc += f.at(k, c, v, u) * x.at(n, c, hi, wi);
              }
            }
          }
          y.at(n, k, ho, wo) = acc;
        }
      }
    }
  }
  return y;
}

// Input gradient: the adjoint of conv_forward with respect to x, written as
// the scatter form of the same loop nest. in_h/in_w give the original input
// size, which the output size alone does not determine for stride > 1.
inline Tensor4 conv_backward_data(const Tensor4& dy, const Tensor4& f,
                                  std::int64_t pad_h, std::int64_t pad_w,
                                  std::int64_t stride_h, std::int64_t stride_w,
                                  std::int64_t in_h, std::int64_t in_w) {
  detail::require(dy.c == f.n, "dy channels must match filter count");
  detail::require(dy.h == detail::conv_out(in_h, f.h, pad_h, stride_h) &&
                      dy.w == detail::conv_out(in_w, f.w, pad_w, stride_w),
                  "dy spatial dims do not match the forward output");
  Tensor4 dx = Tensor4::zeros(dy.n, f.c, in_h, in_w);
  for (std::int64_t n = 0; n < dy.n; ++n) {
    for (std::int64_t k = 0; k < f.n; ++k) {
      for (std::int64_t ho = 0; ho < dy.h; ++ho) {
        for (std::int64_t wo = 0; wo < dy.w; ++wo) {
          const double g = dy.at(n, k, ho, wo);
          for (std::int64_t c = 0; c < f.c; ++c) {
            for (std::int64_t v = 0; v < f.h; ++v) {
              const std::int64_t hi = ho * stride_h - pad_h + v;
              if (hi < 0 || hi >= in_h) continue;
              for (std::int64_t u = 0; u < f.w; ++u) {
                const std::int64_t wi = wo * stride_w - pad_w + u;
                if (wi < 0 || wi >= in_w) continue;
                dx.at(n, c, hi, wi) += f.at(k, c, v, u) * g;
              }
            }
          }
        }
      }
    }
  }
  return dx;
}

// Filter gradient contribution of the given samples, accumulated into
// dw_inout (output scale 1): dw[k,c,v,u] += sum over n,ho,wo of
// dy[n,k,ho,wo] * x[n,c,ho*sh-ph+v, wo*sw-pw+u]. Callers that want the
// mini-batch mean divide by N once at the end.
inline void conv_backward_filter_acc(const Tensor4& x, const Tensor4& dy,
                                     std::int64_t pad_h, std::int64_t pad_w,
                                     std::int64_t stride_h, std::int64_t stride_w,
                                     Tensor4& dw_inout) {
  detail::require(x.n == dy.n, "x and dy batch sizes must match");
  detail::require(dw_inout.n == dy.c && dw_inout.c == x.c,
                  "dw channels must match dy and x");
  detail::require(dy.h == detail::conv_out(x.h, dw_inout.h, pad_h, stride_h) &&
                      dy.w == detail::conv_out(x.w, dw_inout.w, pad_w, stride_w),
                  "dy spatial dims do not match the forward output");
  for (std::int64_t n = 0; n < x.n; ++n) {
    for (std::int64_t k = 0; k < dy.c; ++k) {
      for (std::int64_t ho = 0; ho < dy.h; ++ho) {
        for (std::int64_t wo = 0; wo < dy.w; ++wo) {
          const double g = dy.at(n, k, ho, wo);
          for (std::int64_t c = 0; c < x.c; ++c) {
            for (std::int64_t v = 0; v < dw_inout.h; ++v) {
              const std::int64_t hi = ho * stride_h - pad_h + v;
              if (hi < 0 || hi >= x.h) continue;
              for (std::int64_t u = 0; u < dw_inout.w; ++u) {
                const std::int64_t wi = wo * stride_w - pad_w + u;
                if (wi < 0 || wi >= x.w) continue;
                dw_inout.at(k, c, v, u) += g * x.at(n, c, hi, wi);
              }
            }
          }
        }
      }
    }
  }
}

inline Tensor4 conv_backward_filter(const Tensor4& x, const Tensor4& dy,
                                    std::int64_t pad_h, std::int64_t pad_w,
                                    std::int64_t stride_h, std::int64_t stride_w,
                                    std::int64_t kernel_h, std::int64_t kernel_w) {
  Tensor4 dw = Tensor4::zeros(dy.c, x.c, kernel_h, kernel_w);
  conv_backward_filter_acc(x, dy, pad_h, pad_w, stride_h, stride_w, dw);
  return dw;
}

namespace detail {
inline Tensor4 batch_slice(const Tensor4& t, std::int64_t begin, std::int64_t count) {
  Tensor4 out = Tensor4::zeros(count, t.c, t.h, t.w);
  const std::size_t stride = static_cast<std::size_t>(t.c * t.h * t.w);
  std::copy(t.data.begin() + static_cast<std::ptrdiff_t>(begin * stride),
            t.data.begin() + static_cast<std::ptrdiff_t>((begin + count) * stride),
            out.data.begin());
  return out;
}
inline void batch_store(Tensor4& dst, const Tensor4& src, std::int64_t begin) {
  const std::size_t stride = static_cast<std::size_t>(dst.c * dst.h * dst.w);
  std::copy(src.data.begin(), src.data.end(),
            dst.data.begin() + static_cast<std::ptrdiff_t>(begin * stride));
}
}  // namespace detail

// Runs the kernel's operation micro-batch by micro-batch as the plan
// prescribes and assembles the full-batch result. Forward and BackwardData
// write disjoint batch slices of the output; BackwardFilter accumulates the
// per-slice contributions into one shared filter gradient, sequentially.
//
// Inputs by op_type: Forward (a = x, b = filter), BackwardData (a = dy,
// b = filter), BackwardFilter (a = x, b = dy).
inline Tensor4 execute_plan(const KernelDescriptor& kernel,
                            const Configuration& config, const Tensor4& a,
                            const Tensor4& b) {
  kernel.validate();
  if (config.covered_batch() != kernel.batch) {
    std::ostringstream os;
    os << "plan covers " << config.covered_batch() << " samples but kernel '"
       << kernel.layer_name << "' has batch " << kernel.batch;
    throw std::invalid_argument(os.str());
  }
  detail::require(a.n == kernel.batch, "input batch must match kernel batch");

  const std::int64_t out_h = kernel.out_height();
  const std::int64_t out_w = kernel.out_width();
  switch (kernel.op_type) {
    case OpType::kForward: {
      detail::require(a.c == kernel.in_channels && a.h == kernel.height &&
                          a.w == kernel.width,
                      "x dims must match kernel shape");
      detail::require(b.n == kernel.out_channels && b.c == kernel.in_channels &&
                          b.h == kernel.kernel_h && b.w == kernel.kernel_w,
                      "filter dims must match kernel shape");
      Tensor4 y = Tensor4::zeros(kernel.batch, kernel.out_channels, out_h, out_w);
      std::int64_t offset = 0;
      for (const auto& micro : config.micros()) {
        Tensor4 xs = detail::batch_slice(a, offset, micro.micro_batch);
        Tensor4 ys = conv_forward(xs, b, kernel.pad_h, kernel.pad_w,
                                  kernel.stride_h, kernel.stride_w);
        detail::batch_store(y, ys, offset);
        offset += micro.micro_batch;
      }
      return y;
    }
    case OpType::kBackwardData: {
      detail::require(a.c == kernel.out_channels && a.h == out_h && a.w == out_w,
                      "dy dims must match kernel output shape");
      detail::require(b.n == kernel.out_channels && b.c == kernel.in_channels &&
                          b.h == kernel.kernel_h && b.w == kernel.kernel_w,
                      "filter dims must match kernel shape");
      Tensor4 dx = Tensor4::zeros(kernel.batch, kernel.in_channels,
                                  kernel.height, kernel.width);
      std::int64_t offset = 0;
      for (const auto& micro : config.micros()) {
        Tensor4 dys = detail::batch_slice(a, offset, micro.micro_batch);
        Tensor4 dxs = conv_backward_data(dys, b, kernel.pad_h, kernel.pad_w,
                                         kernel.stride_h, kernel.stride_w,
                                         kernel.height, kernel.width);
        detail::batch_store(dx, dxs, offset);
        offset += micro.micro_batch;
      }
      return dx;
    }
    case OpType::kBackwardFilter: {
      detail::require(a.c == kernel.in_channels && a.h == kernel.height &&
                          a.w == kernel.width,
                      "x dims must match kernel shape");
      detail::require(b.n == kernel.batch && b.c == kernel.out_channels &&
                          b.h == out_h && b.w == out_w,
                      "dy dims must match kernel output shape");
      Tensor4 dw = Tensor4::zeros(kernel.out_channels, kernel.in_channels,
                                  kernel.kernel_h, kernel.kernel_w);
      std::int64_t offset = 0;
      for (const auto& micro : config.micros()) {
        Tensor4 xs = detail::batch_slice(a, offset, micro.micro_batch);
        Tensor4 dys = detail::batch_slice(b, offset, micro.micro_batch);
        conv_backward_filter_acc(xs, dys, kernel.pad_h, kernel.pad_w,
                                 kernel.stride_h, kernel.stride_w, dw);
        offset += micro.micro_batch;
      }
      return dw;
    }
  }
  throw std::logic_error("unreachable op type");
}

}  // namespace ubatch
