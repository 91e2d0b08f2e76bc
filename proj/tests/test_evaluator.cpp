#include <doctest.h>

#include "prvnet/evaluator.hpp"
#include "prvnet/model.hpp"
#include "prvnet/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace prvnet;

namespace {

ChannelDataset tiny_dataset(int count = 30, std::uint64_t seed = 9) {
  MultipathParams p;
  p.n_subcarriers = 64;
  p.n_t = 8;
  p.num_paths = 3;
  p.delay_min = 0;
  p.delay_max = 5;
  return build_dataset(Scenario::indoor, p, count, 8, seed);
}

Architecture tiny_arch(ModelMode mode = ModelMode::variational) {
  return Architecture::for_gamma(0.25, 8, 8, mode);
}

}  // namespace

TEST_CASE("nmse: pinned values, exclusions, sentinel") {
  Tensor h({2}, {3.0f, 4.0f});
  CHECK(nmse_db({h}, {h}) == kNmseFloorDb);

  // num = 0.5^2 + 1^2 = 1.25, den = 25 (all values exact in f32).
  Tensor h_hat({2}, {3.5f, 5.0f});
  CHECK(nmse_db({h}, {h_hat}) == doctest::Approx(10.0 * std::log10(0.05)).epsilon(1e-12));

  // Two samples average their ratios before the log.
  Tensor g({2}, {1.0f, 0.0f});
  Tensor g_hat({2}, {1.5f, 0.0f});  // ratio 0.25
  const double mean_ratio = 0.5 * (0.05 + 0.25);
  CHECK(nmse_db({h, g}, {h_hat, g_hat}) ==
        doctest::Approx(10.0 * std::log10(mean_ratio)).epsilon(1e-12));

  // Zero-norm references are excluded from the mean, not scored as zero.
  Tensor zero({2}, {0.0f, 0.0f});
  int excluded = -1;
  CHECK(nmse_db({h, zero}, {h_hat, g_hat}, &excluded) ==
        doctest::Approx(10.0 * std::log10(0.05)).epsilon(1e-12));
  CHECK(excluded == 1);

  CHECK(nmse_db({zero, zero}, {h, g}, &excluded) == kNmseFloorDb);
  CHECK(excluded == 2);

  CHECK_THROWS_AS(nmse_db({h}, {h, g}), std::invalid_argument);
  CHECK_THROWS_AS(nmse_db({h}, {Tensor({3})}), std::invalid_argument);
}

TEST_CASE("nmse: scaling the error by 2 adds exactly 20*log10(2) dB") {
  // Perturbations are powers of two on integer-valued references, so both
  // reconstructions are exact in f32 and the law holds to double precision.
  Rng rng(41);
  std::vector<Tensor> h, small, big;
  for (int s = 0; s < 5; ++s) {
    Tensor base({16}), lo({16}), hi({16});
    for (int i = 0; i < 16; ++i) {
      const float v = static_cast<float>(1 + rng.next_below(8));
      const float e = (rng.next_below(2) == 0 ? 1.0f : -1.0f) * 0.25f;
      base.at(i) = v;
      lo.at(i) = v + e;
      hi.at(i) = v + 2.0f * e;
    }
    h.push_back(base);
    small.push_back(lo);
    big.push_back(hi);
  }
  const double diff = nmse_db(h, big) - nmse_db(h, small);
  CHECK(diff == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));

  // Globally rescaling the reference and reconstruction together changes
  // nothing: the ratio is scale-free.
  std::vector<Tensor> h4, small4;
  for (int s = 0; s < 5; ++s) {
    Tensor a = h[static_cast<size_t>(s)], b = small[static_cast<size_t>(s)];
    for (int i = 0; i < 16; ++i) {
      a.at(i) *= 4.0f;  // exact in f32
      b.at(i) *= 4.0f;
    }
    h4.push_back(a);
    small4.push_back(b);
  }
  CHECK(nmse_db(h4, small4) == doctest::Approx(nmse_db(h, small)).epsilon(1e-12));
}

TEST_CASE("awgn: calibration against the requested snr") {
  Rng fill(7);
  Tensor z({1000, 64});
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    z.at(i) = static_cast<float>(2.0 * fill.gaussian());
  }
  double power = 0.0;
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    power += static_cast<double>(z.at(i)) * z.at(i);
  }
  power /= static_cast<double>(z.numel());

  Rng noise = derive_rng(3, StreamPurpose::channel_noise, 0);
  AwgnResult r = add_awgn(z, 10.0, noise);
  CHECK(r.signal_power == power);
  CHECK(r.noise_power == doctest::Approx(power / 10.0).epsilon(1e-12));

  // Empirical noise power over 64000 draws: se = sigma_n^2 * sqrt(2/n), so a
  // 5 se gate is under 3% relative.
  double measured = 0.0, mean = 0.0;
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    const double d = static_cast<double>(r.z.at(i)) - z.at(i);
    measured += d * d;
    mean += d;
  }
  measured /= static_cast<double>(z.numel());
  mean /= static_cast<double>(z.numel());
  CHECK(std::abs(measured - r.noise_power) / r.noise_power < 0.03);
  CHECK(std::abs(mean) < 5.0 * std::sqrt(r.noise_power / static_cast<double>(z.numel())));

  // The whole report grid stays calibrated within 5%.
  for (double snr : kSnrGridDb) {
    Rng g = derive_rng(4, StreamPurpose::channel_noise, static_cast<std::uint64_t>(snr));
    AwgnResult rr = add_awgn(z, snr, g);
    double emp = 0.0;
    for (std::int64_t i = 0; i < z.numel(); ++i) {
      const double d = static_cast<double>(rr.z.at(i)) - z.at(i);
      emp += d * d;
    }
    emp /= static_cast<double>(z.numel());
    CAPTURE(snr);
    CHECK(std::abs(emp - rr.noise_power) / rr.noise_power < 0.05);
    CHECK(rr.noise_power == doctest::Approx(power / std::pow(10.0, snr / 10.0)).epsilon(1e-12));
  }
}

TEST_CASE("awgn: determinism and the zero-signal edge") {
  Tensor z({64});
  Rng fill(11);
  for (std::int64_t i = 0; i < z.numel(); ++i) z.at(i) = static_cast<float>(fill.gaussian());

  Rng a = derive_rng(5, StreamPurpose::channel_noise, 1);
  Rng b = derive_rng(5, StreamPurpose::channel_noise, 1);
  Rng c = derive_rng(5, StreamPurpose::channel_noise, 2);
  AwgnResult ra = add_awgn(z, 20.0, a);
  AwgnResult rb = add_awgn(z, 20.0, b);
  AwgnResult rc = add_awgn(z, 20.0, c);
  bool same = true, different = false;
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    same = same && ra.z.at(i) == rb.z.at(i);
    different = different || ra.z.at(i) != rc.z.at(i);
  }
  CHECK(same);
  CHECK(different);

  Tensor silent({16});
  Rng d = derive_rng(5, StreamPurpose::channel_noise, 3);
  AwgnResult rs = add_awgn(silent, 20.0, d);
  CHECK(rs.signal_power == 0.0);
  CHECK(rs.noise_power == 0.0);
  for (std::int64_t i = 0; i < silent.numel(); ++i) CHECK(rs.z.at(i) == 0.0f);
}

TEST_CASE("evaluate: structure, determinism, and option effects") {
  ChannelDataset data = tiny_dataset();
  REQUIRE(data.n_train == 20);
  REQUIRE(data.n_val == 6);
  REQUIRE(data.n_test == 4);
  ModelParams model = ModelParams::init(tiny_arch(), 71);

  EvalOptions clean;
  clean.split = kSplitTest;
  EvalResult r1 = evaluate(model, data, clean);
  EvalResult r2 = evaluate(model, data, clean);
  CHECK(r1.n_samples == 4);
  CHECK(r1.excluded == 0);
  CHECK(r1.noise_power == 0.0);
  CHECK(r1.signal_power > 0.0);
  CHECK(std::isfinite(r1.nmse_db));
  CHECK(r1.nmse_db == r2.nmse_db);  // bitwise-reproducible pipeline

  EvalOptions val = clean;
  val.split = kSplitVal;
  CHECK(evaluate(model, data, val).n_samples == 6);

  EvalOptions noisy = clean;
  noisy.snr_db = 23.0;
  noisy.seed = 17;
  EvalResult rn = evaluate(model, data, noisy);
  CHECK(rn.noise_power > 0.0);
  CHECK(rn.noise_power ==
        doctest::Approx(rn.signal_power / std::pow(10.0, 2.3)).epsilon(1e-12));
  CHECK(rn.nmse_db != r1.nmse_db);

  EvalOptions sampled = clean;
  sampled.sample_codeword = true;
  sampled.seed = 17;
  EvalResult rsamp = evaluate(model, data, sampled);
  CHECK(rsamp.nmse_db != r1.nmse_db);

  ModelParams point = ModelParams::init(tiny_arch(ModelMode::point_estimate), 71);
  EvalResult rp = evaluate(point, data, clean);
  CHECK(std::isfinite(rp.nmse_db));
  CHECK_THROWS_AS(evaluate(point, data, sampled), std::invalid_argument);

  ModelParams wrong = ModelParams::init(Architecture::for_gamma(0.25, 16, 16), 71);
  CHECK_THROWS_AS(evaluate(wrong, data, clean), std::invalid_argument);
  EvalOptions bad = clean;
  bad.split = 3;
  CHECK_THROWS_AS(evaluate(model, data, bad), std::invalid_argument);
}

TEST_CASE("evaluate: the score is computed on denormalized values") {
  ChannelDataset data = tiny_dataset();
  ModelParams model = ModelParams::init(tiny_arch(), 71);
  EvalOptions opt;
  const double base = evaluate(model, data, opt).nmse_db;

  // Shifting the denormalization offset changes ||h||^2 but not the error,
  // so a score computed on normalized values would stay put.
  ChannelDataset shifted = data;
  shifted.norm.min_v = data.norm.min_v + 5.0f;
  shifted.norm.max_v = data.norm.max_v + 5.0f;
  CHECK(evaluate(model, shifted, opt).nmse_db != base);
}

TEST_CASE("snr sweep rows and report csv") {
  ChannelDataset data = tiny_dataset();
  ModelParams model = ModelParams::init(tiny_arch(), 71);
  std::vector<ReportRow> rows = snr_sweep(model, data, kSplitTest, 99);

  REQUIRE(rows.size() == 6);
  CHECK(rows[0].snr == "clean");
  CHECK(rows[1].snr == "35");
  CHECK(rows[5].snr == "23");
  for (const ReportRow& r : rows) {
    CHECK(r.gamma == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.scenario == "indoor");
    CHECK(r.model_id == "prvnet-g0.25-M32");
    CHECK(r.n_samples == 4);
    CHECK(r.seed == 99);
    CHECK(std::isfinite(r.nmse_db));
  }

  EvalOptions clean;
  clean.split = kSplitTest;
  CHECK(rows[0].nmse_db == evaluate(model, data, clean).nmse_db);

  const std::string body = report_csv_string(rows);
  CHECK(body.rfind("gamma,scenario,snr_db,nmse_db,n_samples,model_id,seed\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 7);
  CHECK(body == report_csv_string(rows));  // stable formatting

  const std::string path = "test_eval_report.csv";
  write_report_csv(path, rows);
  std::ifstream is(path, std::ios::binary);
  const std::string on_disk(std::istreambuf_iterator<char>(is), {});
  CHECK(on_disk == body);
  std::remove(path.c_str());
}

TEST_CASE("model ids are pinned") {
  CHECK(model_id(Architecture::for_gamma(0.25, 32, 32)) == "prvnet-g0.25-M512");
  CHECK(model_id(Architecture::for_gamma(1.0 / 16.0, 32, 32, ModelMode::point_estimate)) ==
        "ae-g0.0625-M128");
  CHECK(model_id(Architecture::for_gamma(1.0 / 64.0, 32, 32)) == "prvnet-g0.015625-M32");
}
