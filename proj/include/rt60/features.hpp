#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "rt60/signal.hpp"

namespace rt60 {

/// 4 ms windows with 2 ms hop (50 % overlap) at 16 kHz.
struct StftSpec {
  int window_len = 64;
  int hop_len = 32;
};

inline constexpr int kNumBands = 21;
inline constexpr double kLowestCenterHz = 100.0;
inline constexpr double kLogEpsilon = 1e-10;
inline constexpr double kFrameHopSeconds = 0.002;
inline constexpr double kFrameWindowSeconds = 0.004;

/// 21-band time-frequency representation; rows are bands (ascending center
/// frequency), columns are 2 ms frames.
struct GammatoneSpectrogram {
  Eigen::MatrixXd values;
  double frame_hop_s = kFrameHopSeconds;
  std::vector<double> band_center_freqs;
};

/// Number of STFT frames for a signal of n samples: floor((n - win)/hop) + 1.
int stft_frame_count(std::size_t n_samples, const StftSpec& spec = {});

/// Hann-windowed magnitude STFT, (window_len/2 + 1) x T.
Eigen::MatrixXd stft_magnitude(const AudioSignal& x, const StftSpec& spec = {});

/// ERB-rate value of a frequency in Hz: 21.4 * log10(4.37 * f_kHz + 1).
double erb_rate(double f_hz);

/// n_bands center frequencies uniformly spaced on the ERB-rate scale from
/// cf_low up to cf_high.
std::vector<double> erb_center_frequencies(int n_bands, double cf_low, double cf_high);

/// Rows hold the sampled magnitude response of 4th-order gammatone filters
/// at ERB-spaced centers from cf_low to 0.9 * Nyquist; each row sums to 1.
Eigen::MatrixXd gammatone_weights(int f_bins, int n_bands = kNumBands,
                                  double cf_low = kLowestCenterHz,
                                  double sample_rate = kSampleRate);

/// Log-compressed gammatone spectrogram: log(W * |STFT| + eps). Unnormalized.
GammatoneSpectrogram gammatone_spectrogram(const AudioSignal& x);

/// Removes each band's temporal mean/scale. Population statistics.
void whiten_rows(Eigen::MatrixXd& m);

/// Shifts/scales the whole matrix to zero mean and unit standard deviation.
void standardize_global(Eigen::MatrixXd& m);

/// Whitening then global standardization, as fed to the estimator.
GammatoneSpectrogram whiten_and_standardize(GammatoneSpectrogram g);

/// "GTSP" binary matrix dump: magic, u32 bands/frames/reserved, then
/// float32 row-major values, all little-endian.
void write_gtsp(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_gtsp(const std::filesystem::path& path);

}  // namespace rt60
