#include "rt60/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rt60/errors.hpp"

namespace rt60 {

namespace {

template <class T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  return v;
}

template <class T>
void write_le(std::ostream& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

float u32_to_float(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

std::uint32_t float_to_u32(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());

  char riff[4], wave[4];
  in.read(riff, 4);
  std::uint32_t riff_size = read_le<std::uint32_t>(in);
  (void)riff_size;
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (in) {
    char id[4];
    in.read(id, 4);
    if (!in) break;
    std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    if (!in) throw FormatError("truncated chunk header in " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw FormatError("fmt chunk too small in " + path.string());
      format = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      in.ignore(chunk_size - 16);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(chunk_size);
      in.read(data.data(), chunk_size);
      if (static_cast<std::uint32_t>(in.gcount()) != chunk_size) {
        throw FormatError("truncated data chunk in " + path.string());
      }
    } else {
      in.ignore(chunk_size + (chunk_size & 1));
    }
    if (std::memcmp(id, "data", 4) == 0 && have_fmt) break;
  }

  if (!have_fmt) throw FormatError("missing fmt chunk in " + path.string());
  if (data.empty()) throw FormatError("missing data chunk in " + path.string());
  if (channels == 0) throw FormatError("zero channels in " + path.string());
  if (rate != static_cast<std::uint32_t>(kSampleRate)) {
    throw RateError("expected 16000 Hz, file is " + std::to_string(rate) + " Hz: " +
                        path.string(),
                    static_cast<int>(rate));
  }

  AudioSignal out;
  out.sample_rate = kSampleRate;
  if (format == 1 && bits == 16) {
    const std::size_t frame_bytes = 2u * channels;
    const std::size_t n = data.size() / frame_bytes;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* p =
          reinterpret_cast<const unsigned char*>(data.data()) + i * frame_bytes;
      std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      out.samples[i] = static_cast<double>(s) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t frame_bytes = 4u * channels;
    const std::size_t n = data.size() / frame_bytes;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* p =
          reinterpret_cast<const unsigned char*>(data.data()) + i * frame_bytes;
      std::uint32_t bits32 = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
      out.samples[i] = static_cast<double>(u32_to_float(bits32));
    }
  } else {
    throw FormatError("unsupported encoding (format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits) in " + path.string());
  }

  for (double v : out.samples) {
    if (!std::isfinite(v)) throw FormatError("non-finite sample in " + path.string());
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioSignal& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write WAV file: " + path.string());

  const std::uint32_t n = static_cast<std::uint32_t>(x.samples.size());
  const std::uint32_t data_bytes = n * 4;
  // RIFF size: WAVE + fmt(8+16) + fact(8+4) + data(8+n*4)
  const std::uint32_t riff_size = 4 + 24 + 12 + 8 + data_bytes;

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, riff_size);
  out.write("WAVE", 4);

  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, 3);  // IEEE float
  write_le<std::uint16_t>(out, 1);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.sample_rate) * 4);
  write_le<std::uint16_t>(out, 4);
  write_le<std::uint16_t>(out, 32);

  out.write("fact", 4);
  write_le<std::uint32_t>(out, 4);
  write_le<std::uint32_t>(out, n);

  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);
  for (double v : x.samples) {
    write_le<std::uint32_t>(out, float_to_u32(static_cast<float>(v)));
  }
  if (!out) throw IoError("short write to " + path.string());
}

namespace fft {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ArgumentError("fft size must be a power of two");
  }
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

}  // namespace fft

std::vector<double> fft_convolve(const std::vector<double>& x,
                                 const std::vector<double>& h) {
  if (x.empty() || h.empty()) {
    throw ArgumentError("fft_convolve: empty input");
  }
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t n = fft::next_pow2(out_len);
  std::vector<std::complex<double>> fx(n), fh(n);
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = x[i];
  for (std::size_t i = 0; i < h.size(); ++i) fh[i] = h[i];
  fft::transform(fx, false);
  fft::transform(fh, false);
  for (std::size_t i = 0; i < n; ++i) fx[i] *= fh[i];
  fft::transform(fx, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fx[i].real();
  return out;
}

AudioSignal fft_convolve(const AudioSignal& x, const AudioSignal& h) {
  if (x.sample_rate != h.sample_rate) {
    throw ArgumentError("fft_convolve: sample rate mismatch");
  }
  AudioSignal out;
  out.sample_rate = x.sample_rate;
  out.samples = fft_convolve(x.samples, h.samples);
  return out;
}

AudioSignal dynamic_convolve(const AudioSignal& x, const Air& h1, const Air& h2,
                             std::size_t switch_sample) {
  if (x.samples.empty()) throw ArgumentError("dynamic_convolve: empty input");
  if (switch_sample == 0 || switch_sample >= x.samples.size()) {
    throw ArgumentError("dynamic_convolve: switch sample " +
                        std::to_string(switch_sample) + " outside (0, " +
                        std::to_string(x.samples.size()) + ")");
  }
  std::vector<double> pre(x.samples.begin(),
                          x.samples.begin() + static_cast<std::ptrdiff_t>(switch_sample));
  std::vector<double> post(x.samples.begin() + static_cast<std::ptrdiff_t>(switch_sample),
                           x.samples.end());

  std::vector<double> y1 = fft_convolve(pre, h1.h.samples);
  std::vector<double> y2 = fft_convolve(post, h2.h.samples);

  AudioSignal out;
  out.sample_rate = x.sample_rate;
  out.samples.assign(x.samples.size(), 0.0);
  const std::size_t n = out.samples.size();
  for (std::size_t i = 0; i < y1.size() && i < n; ++i) out.samples[i] += y1[i];
  for (std::size_t i = 0; i + switch_sample < n && i < y2.size(); ++i) {
    out.samples[i + switch_sample] += y2[i];
  }
  return out;
}

Air normalize_energy(Air air) {
  double e = 0.0;
  for (double v : air.h.samples) e += v * v;
  if (e <= 0.0) throw DegenerateInputError("normalize_energy: zero-energy AIR");
  const double scale = 1.0 / std::sqrt(e);
  for (double& v : air.h.samples) v *= scale;
  return air;
}

}  // namespace rt60
