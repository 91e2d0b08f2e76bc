#pragma once

#include "prvnet/graph.hpp"

namespace prvnet {

// Differentiable op set. All ops build a new graph node; shape errors throw
// std::invalid_argument naming both operand shapes. Forward math is f32
// (Eigen-backed where a gemm applies); backward rules accumulate.

// [m x k] * [k x n] -> [m x n]
Var matmul(const Var& a, const Var& b);

// Cross-correlation with zero same-padding. input rank 3 [C,H,W] or rank 4
// [B,C,H,W]; kernels rank 4 [Co,Ci,kh,kw] with Ci == C and kh, kw odd.
// stride must be 1 (parameter exists for signature stability).
Var conv2d(const Var& input, const Var& kernels, int stride = 1);

// max(x, slope*x); derivative at exactly 0 is 1.
Var leaky_relu(const Var& x, float slope = 0.3f);
// Output clamped to [2^-24, 1 - 2^-24] so it is strictly inside (0,1) in f32.
Var sigmoid(const Var& x);
Var tanh_act(const Var& x);
// exp with input saturated at 80 so finite inputs cannot overflow f32.
Var exp(const Var& x);

Var add(const Var& a, const Var& b);  // same shape
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var scale(const Var& a, float c);
Var add_scalar(const Var& a, float c);
Var square(const Var& a);
Var sum(const Var& a);  // -> rank-0 scalar

// [r x c] + [c], broadcast over rows.
Var add_row_bias(const Var& m, const Var& bias);
// [B,C,H,W] or [C,H,W] plus [C], broadcast over batch and spatial dims.
Var add_channel_bias(const Var& x, const Var& bias);

Var reshape(const Var& a, std::vector<int> new_shape);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator*(float c, const Var& a) { return scale(a, c); }
inline Var operator*(const Var& a, float c) { return scale(a, c); }
inline Var operator+(const Var& a, float c) { return add_scalar(a, c); }
inline Var operator-(const Var& a, float c) { return add_scalar(a, -c); }

}  // namespace prvnet
