#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace rt60 {

inline constexpr int kSampleRate = 16000;

/// Mono audio at 16 kHz, amplitudes nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class AirSource { measured, simulated };

/// An acoustic impulse response with provenance and ground-truth RT60.
/// rt60_true is filled by the decay module once measured; 0 means unset.
struct Air {
  AudioSignal h;
  double rt60_true = 0.0;
  AirSource source = AirSource::simulated;
  std::string id;
};

/// Reads a RIFF/WAVE file. Accepts PCM16 and 32-bit float, takes the first
/// channel, and rejects anything not sampled at 16 kHz (no resampler).
AudioSignal read_wav(const std::filesystem::path& path);

/// Writes mono 32-bit float little-endian WAV.
void write_wav(const std::filesystem::path& path, const AudioSignal& x);

namespace fft {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 transform; a.size() must be a power of two.
void transform(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace fft

/// Full linear convolution, length len(x) + len(h) - 1.
std::vector<double> fft_convolve(const std::vector<double>& x,
                                 const std::vector<double>& h);
AudioSignal fft_convolve(const AudioSignal& x, const AudioSignal& h);

/// Reverberates x with h1 up to switch_sample and h2 afterwards; the tail of
/// the h1 segment rings out naturally past the switch. Output has len(x).
AudioSignal dynamic_convolve(const AudioSignal& x, const Air& h1, const Air& h2,
                             std::size_t switch_sample);

/// Scales the impulse response to unit l2 norm (applied before convolution
/// so that measured and simulated AIRs excite comparable signal levels).
Air normalize_energy(Air air);

}  // namespace rt60
