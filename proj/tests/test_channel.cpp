#include <doctest.h>

#include "prvnet/channel.hpp"
#include "prvnet/dataset.hpp"
#include "prvnet/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

using namespace prvnet;

namespace {

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "prvnet_channel_tests";
  std::filesystem::create_directories(p);
  return p;
}

double frob(const Eigen::MatrixXcd& m) { return std::sqrt(m.squaredNorm()); }

template <class F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("synth: single zero-delay broadside path gives an all-ones grid") {
  std::vector<PathSpec> paths{{std::complex<double>(1.0, 0.0), 0.0, 0.0}};
  auto ch = synth_channel(paths, 16, 8);
  for (int n = 0; n < 16; ++n)
    for (int t = 0; t < 8; ++t) {
      CHECK(ch.h(n, t).real() == doctest::Approx(1.0));
      CHECK(ch.h(n, t).imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("generate: deterministic per seed") {
  auto params = scenario_params(Scenario::indoor);
  auto a = generate_channel(params, 99);
  auto b = generate_channel(params, 99);
  auto c = generate_channel(params, 100);
  CHECK((a.h - b.h).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.h - c.h).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("to_angular_delay: constant grid concentrates at the origin cell") {
  std::vector<PathSpec> paths{{std::complex<double>(1.0, 0.0), 0.0, 0.0}};
  auto ch = synth_channel(paths, 64, 16);
  auto csi = to_angular_delay(ch, 64);
  const float* re = csi.values.data();
  const float* im = re + 64 * 16;
  double total = 0.0;
  for (int i = 0; i < 64 * 16; ++i)
    total += static_cast<double>(re[i]) * re[i] + static_cast<double>(im[i]) * im[i];
  const double origin =
      static_cast<double>(re[0]) * re[0] + static_cast<double>(im[0]) * im[0];
  CHECK(origin / total > 0.999999);
  CHECK(re[0] == doctest::Approx(std::sqrt(64.0 * 16.0)).epsilon(1e-5));
}

TEST_CASE("to_angular_delay: integer delay tau lands in delay row tau") {
  std::vector<PathSpec> paths{{std::complex<double>(0.8, -0.6), 3.0, 0.37}};
  auto ch = synth_channel(paths, 128, 16);
  auto csi = to_angular_delay(ch, 128);
  const float* re = csi.values.data();
  const float* im = re + 128 * 16;
  double total = 0.0, row3 = 0.0;
  for (int k = 0; k < 128; ++k)
    for (int t = 0; t < 16; ++t) {
      const int i = k * 16 + t;
      const double e = static_cast<double>(re[i]) * re[i] + static_cast<double>(im[i]) * im[i];
      total += e;
      if (k == 3) row3 += e;
    }
  CHECK(row3 / total > 0.9999);
}

TEST_CASE("to_angular_delay: unitary (norm preserved through f32 storage)") {
  Rng rng(4242);
  Eigen::MatrixXcd h(96, 24);
  for (int i = 0; i < h.rows(); ++i)
    for (int j = 0; j < h.cols(); ++j) h(i, j) = {rng.gaussian(), rng.gaussian()};
  SpatialFrequencyChannel ch{h};
  auto csi = to_angular_delay(ch, 96);
  double e = 0.0;
  for (std::int64_t i = 0; i < csi.values.numel(); ++i)
    e += static_cast<double>(csi.values.at(i)) * csi.values.at(i);
  const double rel = std::abs(std::sqrt(e) - frob(h)) / frob(h);
  CHECK(rel < 1e-5);
}

TEST_CASE("round trip: untruncated to/from angular-delay recovers the grid") {
  Rng rng(77);
  Eigen::MatrixXcd h(32, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) h(i, j) = {rng.gaussian(), rng.gaussian()};
  SpatialFrequencyChannel ch{h};
  auto back = from_angular_delay(to_angular_delay(ch, 32), 32);
  CHECK((back.h - h).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("truncation keeps >99.9% of energy for in-range delays") {
  // Presets draw integer delays: truncation is exact up to f32/DFT rounding.
  auto params = scenario_params(Scenario::outdoor);
  for (std::uint64_t s = 0; s < 8; ++s) {
    auto ch = generate_channel(params, derive_seed(11, StreamPurpose::dataset, s));
    CHECK(truncation_energy_ratio(ch, 32) > 0.999999);
  }
  // Small fractional jitter still clears the invariant. Measured over 200
  // seeds: jitter 0.01 keeps the worst ratio ~0.99995, while jitter 0.05
  // already leaks ~0.13% (Dirichlet tails alias into the truncated high
  // rows), so near-integer delays are a real requirement, not caution.
  MultipathParams frac = params;
  frac.delay_max = 12;
  frac.delay_jitter = 0.01;
  for (std::uint64_t s = 0; s < 16; ++s) {
    auto ch = generate_channel(frac, derive_seed(12, StreamPurpose::dataset, s));
    CHECK(truncation_energy_ratio(ch, 32) > 0.999);
  }
}

TEST_CASE("normalize: affine map, midpoint, round trip, no clamping") {
  AngularDelayCsi raw;
  raw.values = Tensor({2, 1, 2}, {-2.0f, 0.0f, 1.0f, 3.0f});
  NormRecord rec{-2.0f, 2.0f};
  auto norm = normalize(raw, rec);
  CHECK(norm.values.at(0) == 0.0f);
  CHECK(norm.values.at(1) == 0.5f);  // 0 maps to the midpoint of a symmetric record
  CHECK(norm.values.at(3) == doctest::Approx(1.25f));  // outside [0,1], preserved
  REQUIRE(norm.norm.has_value());

  Tensor back = denormalize(norm);
  for (int i = 0; i < 4; ++i) CHECK(back.at(i) == doctest::Approx(raw.values.at(i)).epsilon(1e-6));

  CHECK(thrown_message([&] { normalize(raw, NormRecord{1.0f, 1.0f}); }).find("below") !=
        std::string::npos);
}

TEST_CASE("from_angular_delay: zero in, zero out") {
  AngularDelayCsi csi;
  csi.values = Tensor({2, 8, 4});
  auto ch = from_angular_delay(csi, 32);
  CHECK(ch.h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full pipeline: preset channel reconstructs through truncation") {
  auto params = scenario_params(Scenario::indoor);
  auto ch = generate_channel(params, 2025);
  auto csi = to_angular_delay(ch, 32);  // integer delays <= 11 keep all energy
  NormRecord rec{csi.values.arr().minCoeff() - 0.01f, csi.values.arr().maxCoeff() + 0.01f};
  auto normed = normalize(csi, rec);
  auto back = from_angular_delay(normed, params.n_subcarriers);
  const double rel = frob(back.h - ch.h) / frob(ch.h);
  CHECK(rel < 1e-3);
}

TEST_CASE("build_dataset: 10:3:2 split at any scale") {
  auto params = scenario_params(Scenario::indoor, 64, 8);
  auto ds = build_dataset(Scenario::indoor, params, 150, 16, 5);
  CHECK(ds.n_train == 100);
  CHECK(ds.n_val == 30);
  CHECK(ds.n_test == 20);
  CHECK(ds.count() == 150);
  CHECK(ds.split_begin(1) == 100);
  CHECK(ds.split_begin(2) == 130);

  auto tiny = build_dataset(Scenario::indoor, params, 15, 16, 5);
  CHECK(tiny.n_train == 10);
  CHECK(tiny.n_val == 3);
  CHECK(tiny.n_test == 2);

  CHECK(thrown_message([&] { build_dataset(Scenario::indoor, params, 14, 16, 5); })
            .find("15") != std::string::npos);
}

TEST_CASE("build_dataset: normalization record comes from the train split") {
  auto params = scenario_params(Scenario::indoor, 64, 8);
  auto ds = build_dataset(Scenario::indoor, params, 30, 16, 9);
  float lo = 1e30f, hi = -1e30f;
  for (int i = 0; i < ds.n_train; ++i) {
    AngularDelayCsi csi;
    csi.values = ds.samples[static_cast<size_t>(i)];
    csi.norm = ds.norm;
    Tensor raw = denormalize(csi);
    lo = std::min(lo, raw.arr().minCoeff());
    hi = std::max(hi, raw.arr().maxCoeff());
  }
  CHECK(lo == doctest::Approx(ds.norm.min_v).epsilon(1e-4));
  CHECK(hi == doctest::Approx(ds.norm.max_v).epsilon(1e-4));
  // Normalized train values live in [0,1]; val/test may poke outside.
  for (int i = 0; i < ds.n_train; ++i) {
    CHECK(ds.samples[static_cast<size_t>(i)].arr().minCoeff() >= 0.0f);
    CHECK(ds.samples[static_cast<size_t>(i)].arr().maxCoeff() <= 1.0f);
  }
}

TEST_CASE("dataset file: round trip, determinism, fingerprints, corruption") {
  auto dir = temp_dir();
  auto params = scenario_params(Scenario::outdoor, 64, 8);
  auto ds = build_dataset(Scenario::outdoor, params, 30, 16, 31);
  const std::string p1 = (dir / "a.prvc").string();
  const std::string p2 = (dir / "b.prvc").string();
  save_dataset(ds, p1);

  auto ds2 = build_dataset(Scenario::outdoor, params, 30, 16, 31);
  save_dataset(ds2, p2);
  CHECK(fnv1a_file(p1) == fnv1a_file(p2));

  auto loaded = load_dataset(p1);
  CHECK(loaded.count() == 30);
  CHECK(loaded.n_a == 16);
  CHECK(loaded.n_t == 8);
  CHECK(loaded.n_train == 20);
  CHECK(loaded.n_val == 6);
  CHECK(loaded.n_test == 4);
  CHECK(loaded.norm.min_v == ds.norm.min_v);
  CHECK(loaded.norm.max_v == ds.norm.max_v);
  CHECK(loaded.scenario == Scenario::outdoor);
  CHECK(loaded.seed == 31);
  CHECK(loaded.params.num_paths == params.num_paths);
  for (int i = 0; i < 30; ++i)
    for (std::int64_t j = 0; j < loaded.samples[0].numel(); ++j)
      CHECK(loaded.samples[static_cast<size_t>(i)].at(j) ==
            ds.samples[static_cast<size_t>(i)].at(j));

  // Re-save of a loaded dataset is byte-identical.
  const std::string p3 = (dir / "c.prvc").string();
  save_dataset(loaded, p3);
  CHECK(fnv1a_file(p3) == fnv1a_file(p1));

  // Different seed, different bytes.
  auto other = build_dataset(Scenario::outdoor, params, 30, 16, 32);
  const std::string p4 = (dir / "d.prvc").string();
  save_dataset(other, p4);
  CHECK(fnv1a_file(p4) != fnv1a_file(p1));

  // Corrupt magic is rejected; missing sidecar is rejected.
  const std::string bad = (dir / "bad.prvc").string();
  {
    std::FILE* f = std::fopen(bad.c_str(), "wb");
    std::fputs("NOPE", f);
    std::fclose(f);
  }
  CHECK(thrown_message([&] { load_dataset(bad); }).find("magic") != std::string::npos);
  std::filesystem::remove(p2 + ".json");
  CHECK(thrown_message([&] { load_dataset(p2); }).find("sidecar") != std::string::npos);
}
