#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "rt60/errors.hpp"
#include "rt60/features.hpp"
#include "rt60/rng.hpp"

using namespace rt60;

namespace {

AudioSignal random_signal(std::size_t n, std::uint64_t seed) {
  AudioSignal x;
  x.samples.resize(n);
  Rng rng(seed);
  for (auto& v : x.samples) v = rng.uniform(-0.8, 0.8);
  return x;
}

AudioSignal sine(std::size_t n, double freq) {
  AudioSignal x;
  x.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.samples[i] = std::sin(2.0 * M_PI * freq * static_cast<double>(i) / kSampleRate);
  }
  return x;
}

}  // namespace

TEST_CASE("stft frame count: 1 s of audio gives 499 frames") {
  CHECK(stft_frame_count(16000) == 499);
  AudioSignal x = random_signal(16000, 1);
  Eigen::MatrixXd m = stft_magnitude(x);
  CHECK(m.rows() == 33);
  CHECK(m.cols() == 499);
}

TEST_CASE("stft of zero signal is all zero, magnitudes nonnegative") {
  AudioSignal x;
  x.samples.assign(1000, 0.0);
  Eigen::MatrixXd m = stft_magnitude(x);
  CHECK(m.maxCoeff() == 0.0);
  Eigen::MatrixXd r = stft_magnitude(random_signal(1000, 2));
  CHECK(r.minCoeff() >= 0.0);
}

TEST_CASE("stft rejects signals shorter than one window") {
  AudioSignal x;
  x.samples.assign(63, 0.1);
  CHECK_THROWS_AS(stft_magnitude(x), ArgumentError);
}

TEST_CASE("sinusoid at a bin center concentrates energy in that bin +-1") {
  // bin spacing is 250 Hz; pick bin 8 = 2000 Hz
  AudioSignal x = sine(8000, 2000.0);
  Eigen::MatrixXd m = stft_magnitude(x);
  for (int t = 0; t < m.cols(); ++t) {
    double total = 0.0, near = 0.0;
    for (int k = 0; k < m.rows(); ++k) {
      const double e = m(k, t) * m(k, t);
      total += e;
      if (k >= 7 && k <= 9) near += e;
    }
    if (total > 1e-12) CHECK(near / total >= 0.9);
  }
}

TEST_CASE("gammatone weights: shape, lowest center, unit row sums") {
  Eigen::MatrixXd w = gammatone_weights(33);
  CHECK(w.rows() == 21);
  CHECK(w.cols() == 33);
  for (int b = 0; b < w.rows(); ++b) {
    CHECK(w.row(b).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.row(b).minCoeff() >= 0.0);
  }
  auto cfs = erb_center_frequencies(21, 100.0, 0.9 * 8000.0);
  CHECK(cfs.front() == doctest::Approx(100.0));
  CHECK(cfs.back() == doctest::Approx(7200.0));
}

TEST_CASE("center frequencies increase strictly and uniformly on the ERB scale") {
  auto cfs = erb_center_frequencies(21, 100.0, 7200.0);
  REQUIRE(cfs.size() == 21);
  // independent oracle: the ERB-rate transform of the centers must be an
  // arithmetic progression
  const double e0 = 21.4 * std::log10(4.37 * cfs[0] / 1000.0 + 1.0);
  const double e20 = 21.4 * std::log10(4.37 * cfs[20] / 1000.0 + 1.0);
  for (std::size_t b = 1; b < cfs.size(); ++b) {
    CHECK(cfs[b] > cfs[b - 1]);
    const double eb = 21.4 * std::log10(4.37 * cfs[b] / 1000.0 + 1.0);
    const double expect = e0 + (e20 - e0) * static_cast<double>(b) / 20.0;
    CHECK(eb == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("gammatone_spectrogram shape and zero-signal value") {
  AudioSignal x = random_signal(16000, 3);
  GammatoneSpectrogram g = gammatone_spectrogram(x);
  CHECK(g.values.rows() == 21);
  CHECK(g.values.cols() == 499);
  CHECK(g.frame_hop_s == doctest::Approx(0.002));

  AudioSignal z;
  z.samples.assign(2000, 0.0);
  GammatoneSpectrogram gz = gammatone_spectrogram(z);
  for (int r = 0; r < gz.values.rows(); ++r) {
    for (int c = 0; c < gz.values.cols(); ++c) {
      CHECK(gz.values(r, c) == doctest::Approx(std::log(kLogEpsilon)).epsilon(1e-12));
    }
  }
}

TEST_CASE("doubling amplitude shifts log features by log 2") {
  AudioSignal x = random_signal(8000, 4);
  AudioSignal x2 = x;
  for (auto& v : x2.samples) v *= 2.0;
  GammatoneSpectrogram a = gammatone_spectrogram(x);
  GammatoneSpectrogram b = gammatone_spectrogram(x2);
  int checked = 0;
  for (int r = 0; r < a.values.rows(); ++r) {
    for (int c = 0; c < a.values.cols(); ++c) {
      if (a.values(r, c) > std::log(kLogEpsilon) + 8.0) {  // far above the floor
        CHECK(b.values(r, c) - a.values(r, c) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("frame timing: a lone impulse appears in the frames covering it") {
  AudioSignal x;
  x.samples.assign(16000, 0.0);
  const int pos = 6400;  // 0.4 s
  x.samples[pos] = 1.0;
  Eigen::MatrixXd m = stft_magnitude(x);
  // frame t covers samples [32 t, 32 t + 64); the Hann window is zero at
  // its first sample, so an impulse right on the frame start stays silent
  for (int t = 0; t < m.cols(); ++t) {
    const bool covers = 32 * t < pos && pos < 32 * t + 64;
    const double energy = m.col(t).sum();
    if (covers) {
      CHECK(energy > 0.0);
    } else {
      CHECK(energy == 0.0);
    }
  }
}

TEST_CASE("zero padding does not change shared frames") {
  AudioSignal x = random_signal(5000, 5);
  AudioSignal padded = x;
  padded.samples.resize(7000, 0.0);
  GammatoneSpectrogram a = gammatone_spectrogram(x);
  GammatoneSpectrogram b = gammatone_spectrogram(padded);
  for (int r = 0; r < a.values.rows(); ++r) {
    for (int c = 0; c < a.values.cols(); ++c) {
      CHECK(std::abs(a.values(r, c) - b.values(r, c)) < 1e-9);
    }
  }
}

TEST_CASE("whiten_and_standardize: global moments, row means, idempotence") {
  AudioSignal x = random_signal(16000, 6);
  GammatoneSpectrogram g = gammatone_spectrogram(x);
  GammatoneSpectrogram w = whiten_and_standardize(g);

  const double mean = w.values.mean();
  const double var = (w.values.array() - mean).square().mean();
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
  for (int r = 0; r < w.values.rows(); ++r) {
    CHECK(std::abs(w.values.row(r).mean()) < 1e-6);
  }

  GammatoneSpectrogram w2 = whiten_and_standardize(w);
  for (int r = 0; r < w.values.rows(); ++r) {
    for (int c = 0; c < w.values.cols(); ++c) {
      CHECK(std::abs(w2.values(r, c) - w.values(r, c)) < 1e-6);
    }
  }
}

TEST_CASE("whitening removes per-band gain") {
  AudioSignal x = random_signal(16000, 7);
  GammatoneSpectrogram a = whiten_and_standardize(gammatone_spectrogram(x));

  // scaling one band's pre-log energy multiplies magnitudes, which the
  // log turns into a constant offset removed by whitening
  GammatoneSpectrogram g = gammatone_spectrogram(x);
  g.values.row(7).array() += std::log(37.5);
  GammatoneSpectrogram b = whiten_and_standardize(std::move(g));
  for (int r = 0; r < a.values.rows(); ++r) {
    for (int c = 0; c < a.values.cols(); ++c) {
      CHECK(std::abs(a.values(r, c) - b.values(r, c)) < 1e-6);
    }
  }
}

TEST_CASE("whiten_and_standardize rejects degenerate input") {
  GammatoneSpectrogram g;
  g.values = Eigen::MatrixXd::Constant(21, 100, 3.0);
  CHECK_THROWS_AS(whiten_and_standardize(g), DegenerateInputError);

  AudioSignal z;
  z.samples.assign(1000, 0.0);
  CHECK_THROWS_AS(whiten_and_standardize(gammatone_spectrogram(z)), DegenerateInputError);
}

TEST_CASE("GTSP round trip preserves float32 values") {
  Rng rng(8);
  Eigen::MatrixXd m(21, 57);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-5.0, 5.0);
  }
  const auto path = std::filesystem::temp_directory_path() / "rt60_test.gtsp";
  write_gtsp(path, m);
  Eigen::MatrixXd back = read_gtsp(path);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      CHECK(back(r, c) == static_cast<double>(static_cast<float>(m(r, c))));
    }
  }
}
