#pragma once

#include <vector>

#include "rt60/signal.hpp"

namespace rt60 {

inline constexpr double kEdcFloorDb = -120.0;

/// Backward-integrated squared impulse response, normalized to 0 dB at t=0.
struct EnergyDecayCurve {
  std::vector<double> edc_db;
  int sample_rate = kSampleRate;
};

/// Exponential-plus-noise-floor model m(t) = A * exp(-delta * t) + B fitted
/// to the linear-energy EDC by dB-domain least squares.
struct DecayFit {
  double decay_rate = 0.0;   // delta, 1/s
  double noise_floor = 0.0;  // B, linear energy
  double amplitude = 0.0;    // A, linear energy
  double fit_rmse_db = 0.0;
};

EnergyDecayCurve schroeder_edc(const Air& air);

DecayFit fit_decay_model(const EnergyDecayCurve& edc);

/// RT60 = 6 ln(10) / delta.
double rt60_from_decay(double delta);

/// schroeder_edc -> fit_decay_model -> rt60_from_decay.
double ground_truth_rt60(const Air& air);

/// Measures rt60_true in place; throws if the AIR does not decay.
void measure_rt60(Air& air);

}  // namespace rt60
