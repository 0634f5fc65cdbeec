#pragma once

#include <Eigen/Core>
#include <array>

#include "rt60/rng.hpp"
#include "rt60/signal.hpp"

namespace rt60 {

/// Shoebox room. Absorption is one coefficient per opposite-wall pair
/// (x, y, z), each in (0, 1].
struct RoomSpec {
  Eigen::Vector3d dims;
  std::array<double, 3> absorption;
  Eigen::Vector3d src;
  Eigen::Vector3d rcv;
  double speed_of_sound = 343.0;
};

inline constexpr double kWallClearance = 0.3;

/// Throws ArgumentError on invariant violations (clearance, absorption range,
/// coincident source/receiver).
void validate_room(const RoomSpec& room);

/// Sabine prediction 0.161 * V / sum(alpha_i * S_i).
double sabine_rt60(const RoomSpec& room);

/// Eyring prediction 0.161 * V / (-S * ln(1 - alpha)) for uniform alpha.
/// This is the statistical decay an image-source simulation realizes.
double eyring_rt60(const RoomSpec& room);

/// Draws a room whose Eyring RT60 matches rt60_target: dims uniform in
/// [3,10] x [3,10] x [2.5,4.5] m, positions uniform with 0.3 m clearance,
/// uniform absorption solved analytically and required to land in
/// (0.02, 0.95]; otherwise the dims are redrawn (up to 100 attempts).
RoomSpec sample_room(Rng& rng, double rt60_target);

struct ImageMethodOptions {
  double length_factor = 1.25;  // AIR length as multiple of sabine_rt60
  double min_length_s = 0.06;
  int sinc_radius = 8;  // windowed-sinc fractional delay support
};

/// Allen-Berkley image-source impulse response at 16 kHz. The returned Air
/// has source=simulated and rt60_true unset (0); measure it with the decay
/// module.
Air image_method_air(const RoomSpec& room, const ImageMethodOptions& opts = {});

}  // namespace rt60
