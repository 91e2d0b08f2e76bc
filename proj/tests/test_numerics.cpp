#include <doctest.h>

#include "prvnet/graph.hpp"
#include "prvnet/ops.hpp"
#include "prvnet/optim.hpp"
#include "prvnet/rng.hpp"
#include "support/graph_program.hpp"
#include "support/reference_ops.hpp"

#include <cmath>
#include <string>

using namespace prvnet;

namespace {

template <class F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

Tensor tensor2(int r, int c, std::vector<float> v) { return Tensor({r, c}, std::move(v)); }

}  // namespace

TEST_CASE("rng: streams are deterministic and purpose-separated") {
  Rng a = derive_rng(42, StreamPurpose::dataset, 7);
  Rng b = derive_rng(42, StreamPurpose::dataset, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = derive_rng(42, StreamPurpose::dataset, 8);
  Rng d = derive_rng(42, StreamPurpose::init, 7);
  Rng e = derive_rng(43, StreamPurpose::dataset, 7);
  Rng base = derive_rng(42, StreamPurpose::dataset, 7);
  int diff_c = 0, diff_d = 0, diff_e = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t r = base.next_u64();
    diff_c += r != c.next_u64();
    diff_d += r != d.next_u64();
    diff_e += r != e.next_u64();
  }
  CHECK(diff_c > 60);
  CHECK(diff_d > 60);
  CHECK(diff_e > 60);
}

TEST_CASE("rng: uniform ranges and gaussian moments") {
  Rng r(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("matmul: pinned values and shape errors") {
  Var a = constant(tensor2(1, 2, {1, 2}));
  Var b = constant(tensor2(2, 1, {3, 4}));
  Var c = matmul(a, b);
  CHECK(c.value().scalar_value() == doctest::Approx(11.0f));

  Var eye = constant(tensor2(2, 2, {1, 0, 0, 1}));
  Var m = constant(tensor2(2, 2, {5, 6, 7, 8}));
  Var id = matmul(m, eye);
  for (int i = 0; i < 4; ++i) CHECK(id.value().at(i) == m.value().at(i));

  const std::string msg =
      thrown_message([&] { matmul(constant(tensor2(2, 3, std::vector<float>(6))), m); });
  CHECK(msg.find("[2x3]") != std::string::npos);
  CHECK(msg.find("[2x2]") != std::string::npos);
}

TEST_CASE("matmul: gradients against analytic form") {
  Rng r(7);
  Tensor ta({5, 4}), tb({4, 3});
  for (std::int64_t i = 0; i < ta.numel(); ++i) ta.at(i) = static_cast<float>(r.gaussian());
  for (std::int64_t i = 0; i < tb.numel(); ++i) tb.at(i) = static_cast<float>(r.gaussian());
  Var a = param(ta), b = param(tb);
  Var loss = sum(matmul(a, b));
  backward(loss);
  // d/dA of sum(AB) = ones * B^T; d/dB = A^T * ones.
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      float expect = 0.0f;
      for (int k = 0; k < 3; ++k) expect += tb.at(j * 3 + k);
      CHECK(a.grad().at(i * 4 + j) == doctest::Approx(expect).epsilon(1e-5));
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      float expect = 0.0f;
      for (int k = 0; k < 5; ++k) expect += ta.at(k * 4 + i);
      CHECK(b.grad().at(i * 3 + j) == doctest::Approx(expect).epsilon(1e-5));
    }
}

TEST_CASE("conv2d: identity and zero kernels, shape contracts") {
  // 1x1 identity kernel reproduces the input.
  Tensor x({2, 4, 4});
  Rng r(9);
  for (std::int64_t i = 0; i < x.numel(); ++i) x.at(i) = static_cast<float>(r.gaussian());
  Tensor k1({2, 2, 1, 1});
  k1.at(0) = 1.0f;  // out0 <- in0
  k1.at(3) = 1.0f;  // out1 <- in1
  Var y = conv2d(constant(x), constant(k1));
  REQUIRE(y.value().shape() == std::vector<int>{2, 4, 4});
  for (std::int64_t i = 0; i < x.numel(); ++i) CHECK(y.value().at(i) == x.at(i));

  Var z = conv2d(constant(x), constant(Tensor({3, 2, 3, 3})));
  for (std::int64_t i = 0; i < z.value().numel(); ++i) CHECK(z.value().at(i) == 0.0f);

  CHECK(thrown_message([&] { conv2d(constant(x), constant(Tensor({3, 5, 3, 3}))); })
            .find("[2x4x4]") != std::string::npos);
  CHECK(thrown_message([&] { conv2d(constant(x), constant(Tensor({3, 2, 2, 2}))); })
            .find("odd") != std::string::npos);
  CHECK(thrown_message([&] { conv2d(constant(x), constant(Tensor({3, 2, 3, 3})), 2); })
            .find("stride") != std::string::npos);
}

TEST_CASE("conv2d: matches double-precision reference on random input") {
  Rng r(11);
  Tensor x({2, 3, 8, 8}), k({4, 3, 3, 3});
  for (std::int64_t i = 0; i < x.numel(); ++i) x.at(i) = static_cast<float>(r.gaussian());
  for (std::int64_t i = 0; i < k.numel(); ++i) k.at(i) = static_cast<float>(r.gaussian());
  Var y = conv2d(constant(x), constant(k));
  refops::RTensor yr = refops::conv2d(refops::from_f32(x), refops::from_f32(k));
  REQUIRE(y.value().numel() == yr.numel());
  for (std::int64_t i = 0; i < y.value().numel(); ++i)
    CHECK(y.value().at(i) == doctest::Approx(yr.data[static_cast<size_t>(i)]).epsilon(1e-4));
}

TEST_CASE("conv2d: batched forward equals per-sample forward") {
  Rng r(13);
  Tensor x({3, 2, 5, 6}), k({3, 2, 3, 3});
  for (std::int64_t i = 0; i < x.numel(); ++i) x.at(i) = static_cast<float>(r.gaussian());
  for (std::int64_t i = 0; i < k.numel(); ++i) k.at(i) = static_cast<float>(r.gaussian());
  Var batched = conv2d(constant(x), constant(k));
  const std::int64_t per = 2 * 5 * 6;
  const std::int64_t out_per = 3 * 5 * 6;
  for (int s = 0; s < 3; ++s) {
    Tensor xs({2, 5, 6});
    for (std::int64_t i = 0; i < per; ++i) xs.at(i) = x.at(s * per + i);
    Var ys = conv2d(constant(xs), constant(k));
    for (std::int64_t i = 0; i < out_per; ++i)
      CHECK(ys.value().at(i) == batched.value().at(s * out_per + i));
  }
}

TEST_CASE("activations: pinned values") {
  Tensor x({5}, {-1.0f, 0.0f, 2.0f, -100.0f, 100.0f});
  Var lr = leaky_relu(constant(x), 0.3f);
  CHECK(lr.value().at(0) == doctest::Approx(-0.3f));
  CHECK(lr.value().at(1) == 0.0f);
  CHECK(lr.value().at(2) == 2.0f);

  Var sg = sigmoid(constant(x));
  CHECK(sg.value().at(1) == doctest::Approx(0.5f));
  for (int i = 0; i < 5; ++i) {
    CHECK(sg.value().at(i) > 0.0f);
    CHECK(sg.value().at(i) < 1.0f);
  }

  Var th = tanh_act(constant(x));
  CHECK(th.value().at(1) == 0.0f);
  CHECK(th.value().at(2) == doctest::Approx(std::tanh(2.0f)));

  Var ex = exp(constant(Tensor({2}, {0.0f, 1000.0f})));
  CHECK(ex.value().at(0) == 1.0f);
  CHECK(std::isfinite(ex.value().at(1)));
}

TEST_CASE("activations and sum are bitwise stable across fresh allocations") {
  // Repeated identical computations must agree bit for bit no matter where
  // the heap places each buffer; a regression here breaks every
  // reproducibility guarantee downstream.
  Rng rng(4096);
  Tensor x({517});  // odd length so any vector body/tail split is exercised
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    x.at(i) = static_cast<float>(3.0 * rng.gaussian());
  }
  Tensor sg0 = sigmoid(constant(x)).value();
  Tensor th0 = tanh_act(constant(x)).value();
  Tensor ex0 = exp(constant(x)).value();
  const float sum0 = sum(constant(x)).value().scalar_value();
  std::vector<std::vector<char>> churn;
  for (int rep = 0; rep < 16; ++rep) {
    churn.emplace_back(static_cast<size_t>(rep * 13 + 1));  // shift heap layout
    Tensor cx = x;
    Var sg = sigmoid(constant(cx)), th = tanh_act(constant(cx)), ex = exp(constant(cx));
    bool same = sum(constant(cx)).value().scalar_value() == sum0;
    for (std::int64_t i = 0; i < x.numel(); ++i) {
      same = same && sg.value().at(i) == sg0.at(i) && th.value().at(i) == th0.at(i) &&
             ex.value().at(i) == ex0.at(i);
    }
    CHECK(same);
  }
}

TEST_CASE("adam: updates are bitwise stable across fresh allocations") {
  // The update expression mixes multiply-add chains with a square root; both
  // must round identically whether an element lands in the vector body or
  // the scalar tail of the loop, which moves with heap placement.
  Rng rng(8192);
  Tensor g({517});
  for (std::int64_t i = 0; i < g.numel(); ++i) {
    g.at(i) = static_cast<float>(rng.gaussian());
  }
  AdamConfig cfg;
  cfg.weight_decay = 1e-2f;
  auto run_steps = [&](Tensor& p) {
    AdamState st({static_cast<const Tensor*>(&p)}, cfg);
    for (int step = 0; step < 5; ++step) {
      adam_step({&p}, {static_cast<const Tensor*>(&g)}, st);
    }
  };
  Tensor ref({517});
  for (std::int64_t i = 0; i < ref.numel(); ++i) ref.at(i) = 0.5f;
  run_steps(ref);
  std::vector<std::vector<char>> churn;
  for (int rep = 0; rep < 16; ++rep) {
    churn.emplace_back(static_cast<size_t>(rep * 29 + 3));  // shift heap layout
    Tensor p({517});
    for (std::int64_t i = 0; i < p.numel(); ++i) p.at(i) = 0.5f;
    run_steps(p);
    bool same = true;
    for (std::int64_t i = 0; i < p.numel(); ++i) same = same && p.at(i) == ref.at(i);
    CHECK(same);
  }
}

TEST_CASE("backward: scalar chain rule and accumulation semantics") {
  // d(x^2)/dx at 3 is 6.
  Var x = param(Tensor::scalar(3.0f));
  Var y = square(x);
  backward(y);
  CHECK(x.grad().at(0) == doctest::Approx(6.0f));

  // Repeated backward without zero_grad accumulates.
  backward(y);
  CHECK(x.grad().at(0) == doctest::Approx(12.0f));
  x.zero_grad();
  CHECK(x.grad().at(0) == 0.0f);

  // Two paths into the same leaf accumulate: d(x + x)/dx = 2.
  Var x2 = param(Tensor::scalar(1.5f));
  Var s = add(x2, x2);
  backward(s);
  CHECK(x2.grad().at(0) == doctest::Approx(2.0f));

  CHECK(thrown_message([&] { backward(param(Tensor({2, 2}))); }).find("scalar") !=
        std::string::npos);
}

TEST_CASE("backward: accumulation is order-independent across branches") {
  auto build = [](bool swapped) {
    Var x = param(Tensor::scalar(0.7f));
    Var a = constant(Tensor::scalar(2.0f));
    Var b = constant(Tensor::scalar(-3.0f));
    Var lhs = mul(a, x), rhs = mul(b, x);
    Var loss = swapped ? add(rhs, lhs) : add(lhs, rhs);
    backward(loss);
    return x.grad().at(0);
  };
  CHECK(build(false) == build(true));
  CHECK(build(false) == doctest::Approx(-1.0f));
}

TEST_CASE("gradients: single-op finite-difference spot checks") {
  using namespace gprog;
  // sum(square(sigmoid(add_row_bias(matmul(x, w), b)))) exercises the dense stack.
  Program p;
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {3, 4}});
  p.leaf_slots.push_back(0);
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {4, 2}});
  p.leaf_slots.push_back(1);
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {2}});
  p.leaf_slots.push_back(2);
  p.instrs.push_back({OpKind::matmul, 0, 1, 0.0, {}});
  p.instrs.push_back({OpKind::add_row_bias, 3, 2, 0.0, {}});
  p.instrs.push_back({OpKind::sigmoid, 4, -1, 0.0, {}});
  p.instrs.push_back({OpKind::square, 5, -1, 0.0, {}});
  p.instrs.push_back({OpKind::sum, 6, -1, 0.0, {}});

  Rng r(21);
  auto leaves = random_leaf_values(p, r);
  auto res = fd_check(p, leaves, r, 25, 1e-3, 1e-3);
  INFO(res.worst);
  CHECK(res.pass);
  CHECK(res.coords_checked == 22);
}

TEST_CASE("gradients: conv kernel finite differences") {
  using namespace gprog;
  Program p;
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {2, 8, 8}});
  p.leaf_slots.push_back(0);
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {3, 2, 3, 3}});
  p.leaf_slots.push_back(1);
  p.instrs.push_back({OpKind::leaf, -1, -1, 0.0, {3}});
  p.leaf_slots.push_back(2);
  p.instrs.push_back({OpKind::conv2d, 0, 1, 0.0, {}});
  p.instrs.push_back({OpKind::add_channel_bias, 3, 2, 0.0, {}});
  p.instrs.push_back({OpKind::leaky_relu, 4, -1, 0.3, {}});
  p.instrs.push_back({OpKind::square, 5, -1, 0.0, {}});
  p.instrs.push_back({OpKind::sum, 6, -1, 0.0, {}});

  Rng r(22);
  auto leaves = random_leaf_values(p, r);
  auto res = fd_check(p, leaves, r, 25, 1e-3, 1e-3);
  INFO(res.worst);
  CHECK(res.pass);
}

TEST_CASE("gradients: random graphs match finite differences") {
  Rng gen(2024);
  for (int g = 0; g < 10; ++g) {
    auto prog = gprog::random_program(gen);
    auto leaves = gprog::random_leaf_values(prog, gen);
    auto res = gprog::fd_check(prog, leaves, gen, 15, 1e-3, 1e-3);
    INFO("graph " << g << " worst: " << res.worst);
    CHECK(res.pass);
  }
}

TEST_CASE("forward: random graph values stay finite and match reference") {
  Rng gen(515);
  for (int g = 0; g < 20; ++g) {
    auto prog = gprog::random_program(gen);
    auto leaves = gprog::random_leaf_values(prog, gen);
    auto run = gprog::run_f32(prog, leaves);
    const double ref = gprog::run_ref(prog, leaves);
    const float got = run.loss.value().scalar_value();
    CHECK(std::isfinite(got));
    CHECK(std::abs(got - ref) <= 1e-3 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("adam: first step moves by -lr * sign(g)") {
  Tensor p({3}, {0.5f, -0.2f, 1.0f});
  Tensor g({3}, {0.2f, -0.03f, 4.0f});
  AdamConfig cfg;
  cfg.lr = 0.01f;
  AdamState st({&p}, cfg);
  Tensor p0 = p;
  adam_step({&p}, {static_cast<const Tensor*>(&g)}, st);
  for (int i = 0; i < 3; ++i) {
    const float delta = p.at(i) - p0.at(i);
    const float want = -cfg.lr * (g.at(i) > 0 ? 1.0f : -1.0f);
    CHECK(delta == doctest::Approx(want).epsilon(1e-5));
  }
  CHECK(st.step_count() == 1);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Tensor p({4}, {1.0f, -2.0f, 3.0f, 0.5f});
  Tensor g({4});
  AdamState st({&p}, AdamConfig{});
  Tensor p0 = p;
  for (int i = 0; i < 5; ++i) adam_step({&p}, {static_cast<const Tensor*>(&g)}, st);
  for (int i = 0; i < 4; ++i) CHECK(p.at(i) == p0.at(i));
}

TEST_CASE("adam: |w| strictly decreases on f(w)=w^2") {
  Tensor w = Tensor::scalar(2.0f);
  AdamConfig cfg;
  cfg.lr = 0.01f;
  AdamState st({&w}, cfg);
  float prev = std::abs(w.at(0));
  for (int i = 0; i < 100; ++i) {
    Tensor g = Tensor::scalar(2.0f * w.at(0));
    adam_step({&w}, {static_cast<const Tensor*>(&g)}, st);
    const float cur = std::abs(w.at(0));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("adam: weight decay is decoupled from the moments") {
  Tensor p = Tensor::scalar(1.0f);
  Tensor g = Tensor::scalar(0.0f);
  AdamConfig cfg;
  cfg.lr = 0.01f;
  cfg.weight_decay = 0.1f;
  AdamState st({&p}, cfg);
  for (int i = 0; i < 3; ++i) adam_step({&p}, {static_cast<const Tensor*>(&g)}, st);
  const float want = std::pow(1.0f - 0.01f * 0.1f, 3.0f);
  CHECK(p.at(0) == doctest::Approx(want).epsilon(1e-6));
  CHECK(st.m(0).at(0) == 0.0f);  // decay never entered the moment estimates
  CHECK(st.v(0).at(0) == 0.0f);
}

TEST_CASE("adam: size and shape mismatches are reported") {
  Tensor p({2});
  Tensor g({3});
  AdamState st({&p}, AdamConfig{});
  CHECK(thrown_message([&] {
          adam_step({&p}, {static_cast<const Tensor*>(&g)}, st);
        }).find("[3]") != std::string::npos);
}

TEST_CASE("he_init: variance, mean, determinism") {
  Rng r1 = derive_rng(5, StreamPurpose::init, 0);
  Tensor t = he_init({100000}, 2, r1);  // target variance 2/2 = 1
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    sum += t.at(i);
    sumsq += static_cast<double>(t.at(i)) * t.at(i);
  }
  const double mean = sum / static_cast<double>(t.numel());
  const double var = sumsq / static_cast<double>(t.numel()) - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));

  Rng r2 = derive_rng(5, StreamPurpose::init, 0);
  Tensor t2 = he_init({100000}, 2, r2);
  for (std::int64_t i = 0; i < 100; ++i) CHECK(t.at(i) == t2.at(i));
}
