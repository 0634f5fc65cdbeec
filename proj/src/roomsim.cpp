#include "rt60/roomsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rt60/errors.hpp"

namespace rt60 {

namespace {

double volume(const RoomSpec& r) { return r.dims.x() * r.dims.y() * r.dims.z(); }

// Surface area of the wall pair perpendicular to the given axis.
double pair_area(const RoomSpec& r, int axis) {
  switch (axis) {
    case 0: return 2.0 * r.dims.y() * r.dims.z();
    case 1: return 2.0 * r.dims.x() * r.dims.z();
    default: return 2.0 * r.dims.x() * r.dims.y();
  }
}

double ipow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

struct AxisImages {
  std::vector<double> offset;  // image coordinate minus receiver coordinate
  std::vector<double> weight;  // accumulated reflection attenuation
};

AxisImages axis_images(double src, double rcv, double len, double beta,
                       double max_dist) {
  AxisImages out;
  const int max_m = static_cast<int>(std::ceil((max_dist + 2.0 * len) / (2.0 * len))) + 1;
  for (int m = -max_m; m <= max_m; ++m) {
    for (int q = 0; q <= 1; ++q) {
      const double coord = (1 - 2 * q) * src + 2.0 * m * len;
      const double off = coord - rcv;
      if (std::abs(off) > max_dist) continue;
      const double w = ipow(beta, std::abs(m - q) + std::abs(m));
      if (w == 0.0 && (m != 0 || q != 0)) continue;
      out.offset.push_back(off);
      out.weight.push_back(w);
    }
  }
  // sort by |offset| so the assembly loop can prune on partial distance
  std::vector<std::size_t> order(out.offset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(out.offset[a]) < std::abs(out.offset[b]);
  });
  AxisImages sorted;
  sorted.offset.reserve(order.size());
  sorted.weight.reserve(order.size());
  for (std::size_t i : order) {
    sorted.offset.push_back(out.offset[i]);
    sorted.weight.push_back(out.weight[i]);
  }
  return sorted;
}

}  // namespace

void validate_room(const RoomSpec& room) {
  for (int i = 0; i < 3; ++i) {
    if (room.dims[i] <= 0.0) throw ArgumentError("room: nonpositive dimension");
    if (room.absorption[static_cast<std::size_t>(i)] <= 0.0 ||
        room.absorption[static_cast<std::size_t>(i)] > 1.0) {
      throw ArgumentError("room: absorption must lie in (0, 1]");
    }
    for (const auto* p : {&room.src, &room.rcv}) {
      if ((*p)[i] < kWallClearance || (*p)[i] > room.dims[i] - kWallClearance) {
        throw ArgumentError("room: position violates 0.3 m wall clearance");
      }
    }
  }
  if ((room.src - room.rcv).norm() == 0.0) {
    throw ArgumentError("room: source and receiver coincide");
  }
  if (room.speed_of_sound <= 0.0) throw ArgumentError("room: bad speed of sound");
}

double sabine_rt60(const RoomSpec& room) {
  double absorbing_area = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    absorbing_area += room.absorption[static_cast<std::size_t>(axis)] * pair_area(room, axis);
  }
  return 0.161 * volume(room) / absorbing_area;
}

double eyring_rt60(const RoomSpec& room) {
  double total_area = 0.0, absorbing_area = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    total_area += pair_area(room, axis);
    absorbing_area += room.absorption[static_cast<std::size_t>(axis)] * pair_area(room, axis);
  }
  const double mean_alpha = absorbing_area / total_area;
  if (mean_alpha >= 1.0) throw ArgumentError("eyring_rt60: total absorption");
  return 0.161 * volume(room) / (-total_area * std::log(1.0 - mean_alpha));
}

RoomSpec sample_room(Rng& rng, double rt60_target) {
  if (rt60_target < 0.01 || rt60_target > 0.9) {
    throw ArgumentError("sample_room: target outside [0.01, 0.9] s");
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    RoomSpec room;
    room.dims = {rng.uniform(3.0, 10.0), rng.uniform(3.0, 10.0), rng.uniform(2.5, 4.5)};

    double total_area = 0.0;
    for (int axis = 0; axis < 3; ++axis) total_area += pair_area(room, axis);
    // Invert Eyring for a uniform absorption meeting the target. The image
    // method realizes Eyring-like statistical decay, so this keeps the
    // measured RT60 near the request across the whole target range.
    const double alpha =
        1.0 - std::exp(-0.161 * volume(room) / (total_area * rt60_target));
    if (alpha <= 0.02 || alpha > 0.95) continue;  // redraw geometry
    room.absorption = {alpha, alpha, alpha};

    auto draw_pos = [&](int axis) {
      return rng.uniform(kWallClearance, room.dims[axis] - kWallClearance);
    };
    room.src = {draw_pos(0), draw_pos(1), draw_pos(2)};
    bool placed = false;
    for (int tries = 0; tries < 20 && !placed; ++tries) {
      room.rcv = {draw_pos(0), draw_pos(1), draw_pos(2)};
      placed = (room.src - room.rcv).norm() >= 0.5;
    }
    if (!placed) continue;
    validate_room(room);
    return room;
  }
  throw NumericError("sample_room: no feasible geometry for target " +
                     std::to_string(rt60_target) + " s after 100 attempts");
}

Air image_method_air(const RoomSpec& room, const ImageMethodOptions& opts) {
  validate_room(room);
  const double fs = kSampleRate;
  const double c = room.speed_of_sound;
  const double direct_s = (room.src - room.rcv).norm() / c;
  const double decay_s = std::max(opts.length_factor * sabine_rt60(room), opts.min_length_s);
  const int n = static_cast<int>(std::ceil((direct_s + decay_s) * fs)) + 2 * opts.sinc_radius;
  const double max_dist = c * static_cast<double>(n + opts.sinc_radius) / fs;

  // Negative deterministic reflection coefficient: the alternating sign
  // across bounce parity cancels the spurious same-sign low-frequency
  // build-up of the image lattice, without which the late decay comes out
  // far slower than the statistical prediction.
  std::array<AxisImages, 3> axes;
  for (int axis = 0; axis < 3; ++axis) {
    axes[axis] = axis_images(
        room.src[axis], room.rcv[axis], room.dims[axis],
        -std::sqrt(1.0 - room.absorption[static_cast<std::size_t>(axis)]), max_dist);
  }

  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  const double max_dist_sq = max_dist * max_dist;
  const int radius = opts.sinc_radius;
  const double cos_step = std::cos(M_PI / radius);
  const double sin_step = std::sin(M_PI / radius);

  for (std::size_t ix = 0; ix < axes[0].offset.size(); ++ix) {
    const double dx2 = axes[0].offset[ix] * axes[0].offset[ix];
    if (dx2 > max_dist_sq) break;
    const double wx = axes[0].weight[ix];
    for (std::size_t iy = 0; iy < axes[1].offset.size(); ++iy) {
      const double dxy2 = dx2 + axes[1].offset[iy] * axes[1].offset[iy];
      if (dxy2 > max_dist_sq) break;
      const double wxy = wx * axes[1].weight[iy];
      for (std::size_t iz = 0; iz < axes[2].offset.size(); ++iz) {
        const double d2 = dxy2 + axes[2].offset[iz] * axes[2].offset[iz];
        if (d2 > max_dist_sq) break;
        const double d = std::sqrt(d2);
        if (d < 1e-9) continue;
        const double amp = wxy * axes[2].weight[iz] / (4.0 * M_PI * d);
        if (amp == 0.0) continue;

        const double arrival = d / c * fs;
        const double base = std::floor(arrival);
        const double frac = arrival - base;
        const int k = static_cast<int>(base);
        // sin(pi * arrival) via the integer/fraction split, reused for
        // every tap through sin(pi*(m - arrival)) = -(-1)^m sin(pi*arrival)
        const double sin_pi_arrival =
            ((k & 1) ? -1.0 : 1.0) * std::sin(M_PI * frac);
        const int first = k - radius + 1;
        const int last = k + radius;
        // Hann window cos recurrence over the tap positions
        double ang_cos = std::cos(M_PI * (first - arrival) / radius);
        double ang_sin = std::sin(M_PI * (first - arrival) / radius);
        for (int m = first; m <= last; ++m) {
          if (m >= 0 && m < n) {
            const double u = m - arrival;
            double tap;
            if (std::abs(u) < 1e-12) {
              tap = 1.0;
            } else {
              const double sign = (m & 1) ? 1.0 : -1.0;
              tap = sign * sin_pi_arrival / (M_PI * u);
            }
            const double window = 0.5 * (1.0 + ang_cos);
            h[static_cast<std::size_t>(m)] += amp * tap * window;
          }
          const double nc = ang_cos * cos_step - ang_sin * sin_step;
          ang_sin = ang_sin * cos_step + ang_cos * sin_step;
          ang_cos = nc;
        }
      }
    }
  }

  Air air;
  air.h.sample_rate = kSampleRate;
  air.h.samples = std::move(h);
  air.source = AirSource::simulated;
  return air;
}

}  // namespace rt60
