#include "prvnet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace prvnet {

namespace {

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
  throw std::invalid_argument(op + ": " + detail);
}

constexpr float kSigmoidLo = 5.9604645e-8f;  // 2^-24
constexpr float kSigmoidHi = 1.0f - 5.9604645e-8f;
constexpr float kExpSat = 80.0f;

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (as.size() != 2 || bs.size() != 2)
    shape_error("matmul", "requires rank-2 operands, got " + a.value().shape_str() + " and " +
                              b.value().shape_str());
  if (as[1] != bs[0])
    shape_error("matmul", "inner dimensions differ: " + a.value().shape_str() + " vs " +
                              b.value().shape_str());
  const int m = as[0], k = as[1], n = bs[1];
  Tensor out({m, n});
  out.mat(m, n).noalias() = a.value().mat(m, k) * b.value().mat(k, n);
  return Var(std::move(out), {a, b}, [m, k, n](Node& self) {
    auto g = self.grad().mat(m, n);
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    pa.grad().mat(m, k).noalias() += g * pb.value.mat(k, n).transpose();
    pb.grad().mat(k, n).noalias() += pa.value.mat(m, k).transpose() * g;
  });
}

namespace {

// col layout: [C*kh*kw, H*W]; entry ((c*kh+i)*kw+j, y*W+x) = in[c, y+i-ph, x+j-pw] (0 outside).
void im2col(const float* in, int C, int H, int W, int kh, int kw, float* col) {
  const int ph = kh / 2, pw = kw / 2;
  const int hw = H * W;
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        float* dst = col + ((static_cast<std::int64_t>(c) * kh + i) * kw + j) * hw;
        const int dy = i - ph, dx = j - pw;
        for (int y = 0; y < H; ++y) {
          const int sy = y + dy;
          float* drow = dst + static_cast<std::int64_t>(y) * W;
          if (sy < 0 || sy >= H) {
            std::fill(drow, drow + W, 0.0f);
            continue;
          }
          const float* srow = in + (static_cast<std::int64_t>(c) * H + sy) * W;
          for (int x = 0; x < W; ++x) {
            const int sx = x + dx;
            drow[x] = (sx < 0 || sx >= W) ? 0.0f : srow[sx];
          }
        }
      }
    }
  }
}

void col2im_add(const float* col, int C, int H, int W, int kh, int kw, float* out) {
  const int ph = kh / 2, pw = kw / 2;
  const int hw = H * W;
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        const float* src = col + ((static_cast<std::int64_t>(c) * kh + i) * kw + j) * hw;
        const int dy = i - ph, dx = j - pw;
        for (int y = 0; y < H; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= H) continue;
          const float* srow = src + static_cast<std::int64_t>(y) * W;
          float* drow = out + (static_cast<std::int64_t>(c) * H + sy) * W;
          for (int x = 0; x < W; ++x) {
            const int sx = x + dx;
            if (sx >= 0 && sx < W) drow[sx] += srow[x];
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(const Var& input, const Var& kernels, int stride) {
  const auto& xs = input.shape();
  const auto& ks = kernels.shape();
  if (stride != 1)
    shape_error("conv2d", "stride " + std::to_string(stride) + " unsupported; this toolkit pins stride 1");
  if (ks.size() != 4)
    shape_error("conv2d", "kernels must be rank 4 [Co,Ci,kh,kw], got " + kernels.value().shape_str());
  if (xs.size() != 3 && xs.size() != 4)
    shape_error("conv2d", "input must be rank 3 [C,H,W] or rank 4 [B,C,H,W], got " +
                              input.value().shape_str());
  const bool batched = xs.size() == 4;
  const int B = batched ? xs[0] : 1;
  const int C = batched ? xs[1] : xs[0];
  const int H = batched ? xs[2] : xs[1];
  const int W = batched ? xs[3] : xs[2];
  const int Co = ks[0], Ci = ks[1], kh = ks[2], kw = ks[3];
  if (Ci != C)
    shape_error("conv2d", "kernel input channels do not match input: " +
                              input.value().shape_str() + " vs " + kernels.value().shape_str());
  if (kh % 2 == 0 || kw % 2 == 0)
    shape_error("conv2d", "kernel height/width must be odd for same-padding, got " +
                              kernels.value().shape_str());

  const int ckk = C * kh * kw;
  const int hw = H * W;
  std::vector<int> out_shape = batched ? std::vector<int>{B, Co, H, W} : std::vector<int>{Co, H, W};
  Tensor out(out_shape);

  {
    Tensor col({ckk, hw});
    auto kmat = kernels.value().mat(Co, ckk);
    for (int s = 0; s < B; ++s) {
      im2col(input.value().data() + static_cast<std::int64_t>(s) * C * hw, C, H, W, kh, kw,
             col.data());
      MapMatF out_s(out.data() + static_cast<std::int64_t>(s) * Co * hw, Co, hw);
      out_s.noalias() = kmat * col.mat(ckk, hw);
    }
  }

  return Var(std::move(out), {input, kernels}, [B, C, H, W, Co, kh, kw](Node& self) {
    const int ckk = C * kh * kw;
    const int hw = H * W;
    Node& px = *self.parents[0];
    Node& pk = *self.parents[1];
    Tensor col({ckk, hw});
    Tensor dcol({ckk, hw});
    auto kmat = pk.value.mat(Co, ckk);
    auto gk = pk.grad().mat(Co, ckk);
    for (int s = 0; s < B; ++s) {
      ConstMapMatF g_s(self.grad().data() + static_cast<std::int64_t>(s) * Co * hw, Co, hw);
      im2col(px.value.data() + static_cast<std::int64_t>(s) * C * hw, C, H, W, kh, kw, col.data());
      gk.noalias() += g_s * col.mat(ckk, hw).transpose();
      dcol.mat(ckk, hw).noalias() = kmat.transpose() * g_s;
      col2im_add(dcol.data(), C, H, W, kh, kw,
                 px.grad().data() + static_cast<std::int64_t>(s) * C * hw);
    }
  });
}

Var leaky_relu(const Var& x, float slope) {
  Tensor out(x.shape());
  {
    auto xi = x.value().arr();
    out.arr() = (xi >= 0.0f).select(xi, slope * xi);
  }
  return Var(std::move(out), {x}, [slope](Node& self) {
    Node& p = *self.parents[0];
    auto xi = p.value.arr();
    p.grad().arr() += (xi >= 0.0f).select(self.grad().arr(), slope * self.grad().arr());
  });
}

// Transcendentals below run element-by-element through scalar libm on
// purpose: Eigen's vectorized exp/tanh polynomials round differently from the
// scalar tail, and which elements take the SIMD path depends on the buffer's
// heap alignment, which would make identical computations differ between
// runs. Scalar loops keep every forward pass bitwise reproducible.

Var sigmoid(const Var& x) {
  Tensor out(x.shape());
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    const float y = 1.0f / (1.0f + std::exp(-x.value().at(i)));
    out.at(i) = std::min(std::max(y, kSigmoidLo), kSigmoidHi);
  }
  return Var(std::move(out), {x}, [](Node& self) {
    auto y = self.value.arr();
    self.parents[0]->grad().arr() += self.grad().arr() * y * (1.0f - y);
  });
}

Var tanh_act(const Var& x) {
  Tensor out(x.shape());
  for (std::int64_t i = 0; i < out.numel(); ++i) out.at(i) = std::tanh(x.value().at(i));
  return Var(std::move(out), {x}, [](Node& self) {
    auto y = self.value.arr();
    self.parents[0]->grad().arr() += self.grad().arr() * (1.0f - y * y);
  });
}

Var exp(const Var& x) {
  Tensor out(x.shape());
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    out.at(i) = std::exp(std::min(x.value().at(i), kExpSat));
  }
  return Var(std::move(out), {x}, [](Node& self) {
    Node& p = *self.parents[0];
    auto mask = (p.value.arr() < kExpSat).cast<float>();
    p.grad().arr() += self.grad().arr() * self.value.arr() * mask;
  });
}

namespace {
void check_same_shape(const char* op, const Var& a, const Var& b) {
  if (!a.value().same_shape(b.value()))
    shape_error(op, "operand shapes differ: " + a.value().shape_str() + " vs " +
                        b.value().shape_str());
}
}  // namespace

Var add(const Var& a, const Var& b) {
  check_same_shape("add", a, b);
  Tensor out(a.shape());
  out.arr() = a.value().arr() + b.value().arr();
  return Var(std::move(out), {a, b}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr();
    self.parents[1]->grad().arr() += self.grad().arr();
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape("sub", a, b);
  Tensor out(a.shape());
  out.arr() = a.value().arr() - b.value().arr();
  return Var(std::move(out), {a, b}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr();
    self.parents[1]->grad().arr() -= self.grad().arr();
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape("mul", a, b);
  Tensor out(a.shape());
  out.arr() = a.value().arr() * b.value().arr();
  return Var(std::move(out), {a, b}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr() * self.parents[1]->value.arr();
    self.parents[1]->grad().arr() += self.grad().arr() * self.parents[0]->value.arr();
  });
}

Var scale(const Var& a, float c) {
  Tensor out(a.shape());
  out.arr() = a.value().arr() * c;
  return Var(std::move(out), {a}, [c](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr() * c;
  });
}

Var add_scalar(const Var& a, float c) {
  Tensor out(a.shape());
  out.arr() = a.value().arr() + c;
  return Var(std::move(out), {a}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr();
  });
}

Var square(const Var& a) {
  Tensor out(a.shape());
  out.arr() = a.value().arr().square();
  return Var(std::move(out), {a}, [](Node& self) {
    Node& p = *self.parents[0];
    p.grad().arr() += self.grad().arr() * 2.0f * p.value.arr();
  });
}

Var sum(const Var& a) {
  // Fixed-order scalar accumulation; a vectorized reduction's grouping (and
  // thus its rounding) would depend on the buffer's heap alignment.
  float total = 0.0f;
  for (std::int64_t i = 0; i < a.value().numel(); ++i) total += a.value().at(i);
  return Var(Tensor::scalar(total), {a}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().at(0);
  });
}

Var add_row_bias(const Var& m, const Var& bias) {
  const auto& ms = m.shape();
  const auto& bs = bias.shape();
  if (ms.size() != 2 || bs.size() != 1 || bs[0] != ms[1])
    shape_error("add_row_bias", "want [r x c] plus [c], got " + m.value().shape_str() + " and " +
                                    bias.value().shape_str());
  const int r = ms[0], c = ms[1];
  Tensor out({r, c});
  out.mat(r, c) = m.value().mat(r, c).rowwise() +
                  Eigen::Map<const Eigen::RowVectorXf>(bias.value().data(), c);
  return Var(std::move(out), {m, bias}, [r, c](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr();
    // Fixed-order scalar accumulation keeps the bias gradient bitwise
    // reproducible (an Eigen redux's grouping depends on heap alignment).
    float* bg = self.parents[1]->grad().data();
    const float* g = self.grad().data();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) bg[j] += g[static_cast<std::int64_t>(i) * c + j];
  });
}

Var add_channel_bias(const Var& x, const Var& bias) {
  const auto& xs = x.shape();
  const auto& bs = bias.shape();
  if ((xs.size() != 3 && xs.size() != 4) || bs.size() != 1)
    shape_error("add_channel_bias", "want [B,C,H,W] or [C,H,W] plus [C], got " +
                                        x.value().shape_str() + " and " + bias.value().shape_str());
  const bool batched = xs.size() == 4;
  const int B = batched ? xs[0] : 1;
  const int C = batched ? xs[1] : xs[0];
  const int hw = (batched ? xs[2] : xs[1]) * (batched ? xs[3] : xs[2]);
  if (bs[0] != C)
    shape_error("add_channel_bias", "bias length does not match channels: " +
                                        x.value().shape_str() + " vs " + bias.value().shape_str());
  Tensor out(x.shape());
  {
    const float* src = x.value().data();
    const float* b = bias.value().data();
    float* dst = out.data();
    for (int s = 0; s < B; ++s)
      for (int c = 0; c < C; ++c) {
        const std::int64_t off = (static_cast<std::int64_t>(s) * C + c) * hw;
        MapArrF(dst + off, hw) = ConstMapArrF(src + off, hw) + b[c];
      }
  }
  return Var(std::move(out), {x, bias}, [B, C, hw](Node& self) {
    Node& px = *self.parents[0];
    Node& pb = *self.parents[1];
    px.grad().arr() += self.grad().arr();
    // Scalar accumulation for reproducibility, like add_row_bias.
    for (int s = 0; s < B; ++s)
      for (int c = 0; c < C; ++c) {
        const std::int64_t off = (static_cast<std::int64_t>(s) * C + c) * hw;
        const float* g = self.grad().data() + off;
        float acc = 0.0f;
        for (int i = 0; i < hw; ++i) acc += g[i];
        pb.grad().at(c) += acc;
      }
  });
}

Var reshape(const Var& a, std::vector<int> new_shape) {
  if (shape_numel(new_shape) != a.value().numel())
    shape_error("reshape", "cannot view " + a.value().shape_str() + " as " +
                               shape_to_string(new_shape));
  Tensor out(std::move(new_shape),
             std::vector<float>(a.value().data(), a.value().data() + a.value().numel()));
  return Var(std::move(out), {a}, [](Node& self) {
    self.parents[0]->grad().arr() += self.grad().arr();
  });
}

}  // namespace prvnet
