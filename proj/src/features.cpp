#include "rt60/features.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rt60/errors.hpp"

namespace rt60 {

int stft_frame_count(std::size_t n_samples, const StftSpec& spec) {
  if (n_samples < static_cast<std::size_t>(spec.window_len)) return 0;
  return static_cast<int>((n_samples - spec.window_len) / spec.hop_len) + 1;
}

Eigen::MatrixXd stft_magnitude(const AudioSignal& x, const StftSpec& spec) {
  const int win = spec.window_len;
  const int hop = spec.hop_len;
  if (static_cast<int>(x.samples.size()) < win) {
    throw ArgumentError("stft_magnitude: signal shorter than one window (" +
                        std::to_string(x.samples.size()) + " < " + std::to_string(win) +
                        " samples)");
  }
  const int frames = stft_frame_count(x.samples.size(), spec);
  const int bins = win / 2 + 1;

  // Windowed DFT as two GEMMs against precomputed cos/sin bases. At a
  // 64-point window this beats setting up a transform per frame.
  Eigen::MatrixXd cos_basis(bins, win), sin_basis(bins, win);
  for (int k = 0; k < bins; ++k) {
    for (int n = 0; n < win; ++n) {
      const double hann = 0.5 * (1.0 - std::cos(2.0 * M_PI * n / win));
      const double ang = 2.0 * M_PI * k * n / win;
      cos_basis(k, n) = std::cos(ang) * hann;
      sin_basis(k, n) = std::sin(ang) * hann;
    }
  }

  Eigen::MatrixXd framed(win, frames);
  for (int t = 0; t < frames; ++t) {
    for (int n = 0; n < win; ++n) {
      framed(n, t) = x.samples[static_cast<std::size_t>(t) * hop + n];
    }
  }
  Eigen::MatrixXd re = cos_basis * framed;
  Eigen::MatrixXd im = sin_basis * framed;
  return (re.array().square() + im.array().square()).sqrt();
}

double erb_rate(double f_hz) {
  return 21.4 * std::log10(4.37 * f_hz / 1000.0 + 1.0);
}

namespace {

double erb_rate_inverse(double e) {
  return (std::pow(10.0, e / 21.4) - 1.0) / 4.37 * 1000.0;
}

double erb_bandwidth(double f_hz) {
  return 24.7 * (4.37 * f_hz / 1000.0 + 1.0);
}

}  // namespace

std::vector<double> erb_center_frequencies(int n_bands, double cf_low, double cf_high) {
  if (n_bands < 2) throw ArgumentError("erb_center_frequencies: need at least 2 bands");
  const double e_lo = erb_rate(cf_low);
  const double e_hi = erb_rate(cf_high);
  std::vector<double> cfs(n_bands);
  for (int b = 0; b < n_bands; ++b) {
    const double e = e_lo + (e_hi - e_lo) * b / (n_bands - 1);
    cfs[b] = erb_rate_inverse(e);
  }
  cfs.front() = cf_low;
  cfs.back() = cf_high;
  return cfs;
}

Eigen::MatrixXd gammatone_weights(int f_bins, int n_bands, double cf_low,
                                  double sample_rate) {
  if (f_bins < n_bands) {
    throw ArgumentError("gammatone_weights: need f_bins >= n_bands");
  }
  const double nyquist = sample_rate / 2.0;
  const double cf_high = 0.9 * nyquist;
  const std::vector<double> cfs = erb_center_frequencies(n_bands, cf_low, cf_high);

  // 4th-order gammatone magnitude response |H(f)| = [1 + ((f-fc)/b)^2]^-2
  // with b = 1.019 * ERB(fc) (Patterson/Holdsworth convention).
  Eigen::MatrixXd w(n_bands, f_bins);
  const double bin_hz = nyquist / (f_bins - 1);
  for (int b = 0; b < n_bands; ++b) {
    const double bw = 1.019 * erb_bandwidth(cfs[b]);
    double row_sum = 0.0;
    for (int k = 0; k < f_bins; ++k) {
      const double d = (k * bin_hz - cfs[b]) / bw;
      const double r = 1.0 / ((1.0 + d * d) * (1.0 + d * d));
      w(b, k) = r;
      row_sum += r;
    }
    w.row(b) /= row_sum;
  }
  return w;
}

GammatoneSpectrogram gammatone_spectrogram(const AudioSignal& x) {
  const StftSpec spec;
  Eigen::MatrixXd mag = stft_magnitude(x, spec);
  const int bins = spec.window_len / 2 + 1;
  static thread_local Eigen::MatrixXd weights;  // immutable once built
  if (weights.rows() != kNumBands || weights.cols() != bins) {
    weights = gammatone_weights(bins, kNumBands, kLowestCenterHz, x.sample_rate);
  }
  GammatoneSpectrogram g;
  g.values = ((weights * mag).array() + kLogEpsilon).log();
  g.band_center_freqs =
      erb_center_frequencies(kNumBands, kLowestCenterHz, 0.9 * x.sample_rate / 2.0);
  return g;
}

void whiten_rows(Eigen::MatrixXd& m) {
  if (m.cols() < 2) throw ArgumentError("whiten_rows: need at least 2 frames");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mean = m.row(r).mean();
    const double var = (m.row(r).array() - mean).square().mean();
    if (var <= 0.0) {
      throw DegenerateInputError("whiten_rows: band " + std::to_string(r) +
                                 " is constant over time");
    }
    m.row(r) = (m.row(r).array() - mean) / std::sqrt(var);
  }
}

void standardize_global(Eigen::MatrixXd& m) {
  const double mean = m.mean();
  const double var = (m.array() - mean).square().mean();
  if (var <= 0.0) throw DegenerateInputError("standardize_global: constant matrix");
  m = (m.array() - mean) / std::sqrt(var);
}

GammatoneSpectrogram whiten_and_standardize(GammatoneSpectrogram g) {
  whiten_rows(g.values);
  standardize_global(g.values);
  return g;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    int c = in.get();
    if (c == EOF) throw FormatError("GTSP: truncated header");
    v |= static_cast<std::uint32_t>(c & 0xff) << (8 * i);
  }
  return v;
}

}  // namespace

void write_gtsp(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("GTSP", 4);
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  write_u32(out, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float f = static_cast<float>(m(r, c));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      write_u32(out, bits);
    }
  }
  if (!out) throw IoError("short write to " + path.string());
}

Eigen::MatrixXd read_gtsp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GTSP", 4) != 0) {
    throw FormatError("not a GTSP file: " + path.string());
  }
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  const std::uint32_t reserved = read_u32(in);
  if (reserved != 0) throw FormatError("GTSP: nonzero reserved field");
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const std::uint32_t bits = read_u32(in);
      float f;
      std::memcpy(&f, &bits, 4);
      m(r, c) = static_cast<double>(f);
    }
  }
  return m;
}

}  // namespace rt60
