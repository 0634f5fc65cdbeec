#include "rt60/decay.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rt60/errors.hpp"

namespace rt60 {

namespace {

constexpr double kDb = 10.0;
constexpr double kTinyEnergy = 1e-30;
constexpr int kGridSize = 100;
constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-6;
// delta grid spans RT60 from 20 s down to 5 ms
const double kDeltaMin = 6.0 * std::log(10.0) / 20.0;
const double kDeltaMax = 6.0 * std::log(10.0) / 0.005;

double db_of(double linear) {
  return std::max(kDb * std::log10(std::max(linear, kTinyEnergy)), kEdcFloorDb);
}

struct LinearFit {
  double a = 0.0;
  double b = 0.0;
};

// Closed-form least squares of y ~ A*e + B in the linear-energy domain for a
// fixed decay basis e(t); A and B clamped nonnegative.
LinearFit solve_amplitudes(const std::vector<double>& basis,
                           const std::vector<double>& y) {
  const std::size_t n = y.size();
  double see = 0.0, se = 0.0, sey = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    see += basis[i] * basis[i];
    se += basis[i];
    sey += basis[i] * y[i];
    sy += y[i];
  }
  const double nn = static_cast<double>(n);
  const double det = see * nn - se * se;
  LinearFit fit;
  if (det > 0.0) {
    fit.a = (sey * nn - se * sy) / det;
    fit.b = (see * sy - se * sey) / det;
  }
  if (fit.a <= 0.0 || fit.b < 0.0) {
    fit.b = 0.0;
    fit.a = see > 0.0 ? std::max(sey / see, 0.0) : 0.0;
  }
  return fit;
}

double rmse_db(double delta, double a, double b, const std::vector<double>& t,
               const std::vector<double>& ydb) {
  double acc = 0.0;
  const double decay_per_step = std::exp(-delta * (t.size() > 1 ? t[1] - t[0] : 0.0));
  double e = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double m = a * e + b;
    const double r = db_of(m) - ydb[i];
    acc += r * r;
    e *= decay_per_step;
  }
  return std::sqrt(acc / static_cast<double>(t.size()));
}

}  // namespace

EnergyDecayCurve schroeder_edc(const Air& air) {
  const auto& h = air.h.samples;
  if (h.empty()) throw ArgumentError("schroeder_edc: empty AIR");
  std::vector<double> tail(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    tail[i] = acc;
  }
  if (acc <= 0.0) throw DegenerateInputError("schroeder_edc: all-zero AIR");
  EnergyDecayCurve edc;
  edc.sample_rate = air.h.sample_rate;
  edc.edc_db.resize(h.size());
  const double inv_total = 1.0 / acc;
  edc.edc_db[0] = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    edc.edc_db[i] = db_of(tail[i] * inv_total);
  }
  return edc;
}

DecayFit fit_decay_model(const EnergyDecayCurve& edc) {
  const std::size_t n = edc.edc_db.size();
  if (n < 16) throw ArgumentError("fit_decay_model: EDC too short");

  const double min_db = *std::min_element(edc.edc_db.begin(), edc.edc_db.end());
  if (edc.edc_db.front() - min_db < 20.0) {
    throw NoDecayError("fit_decay_model: EDC spans less than 20 dB of decay");
  }

  std::vector<double> t(n), ylin(n);
  const double dt = 1.0 / edc.sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) * dt;
    ylin[i] = std::pow(10.0, edc.edc_db[i] / kDb);
  }
  const std::vector<double>& ydb = edc.edc_db;

  // Stage 1: coarse grid over delta, closed-form (A, B) per candidate,
  // scored by dB-domain RMSE.
  int best_idx = -1;
  double best_rmse = std::numeric_limits<double>::infinity();
  LinearFit best_fit;
  double best_delta = kDeltaMin;
  std::vector<double> basis(n);
  for (int g = 0; g < kGridSize; ++g) {
    const double delta =
        kDeltaMin * std::pow(kDeltaMax / kDeltaMin, static_cast<double>(g) / (kGridSize - 1));
    const double step = std::exp(-delta * dt);
    double e = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      basis[i] = e;
      e *= step;
    }
    const LinearFit fit = solve_amplitudes(basis, ylin);
    if (fit.a <= 0.0) continue;
    const double r = rmse_db(delta, fit.a, fit.b, t, ydb);
    if (r < best_rmse) {
      best_rmse = r;
      best_idx = g;
      best_fit = fit;
      best_delta = delta;
    }
  }
  if (best_idx < 0) throw NoDecayError("fit_decay_model: no decaying component found");
  if ((best_idx == 0 || best_idx == kGridSize - 1) && best_rmse > 6.0) {
    throw NoDecayError("fit_decay_model: decay rate at grid edge with poor fit (" +
                       std::to_string(best_rmse) + " dB RMSE)");
  }

  // Backward integration starves the last few 1/delta of the curve (the EDC
  // dives to the clamp as the remaining energy runs out), so the refinement
  // fits only samples earlier than 3/delta before the end.
  {
    const double trim_s = std::min(3.0 / best_delta, 0.4 * t.back());
    const std::size_t n_fit =
        std::max<std::size_t>(16, n - static_cast<std::size_t>(trim_s * edc.sample_rate));
    t.resize(n_fit);
    ylin.resize(n_fit);
  }
  const std::size_t n_trimmed = t.size();

  // Stage 2: damped (Levenberg-style) iterative least squares on
  // (delta, A, B) against the dB-domain residuals.
  double delta = best_delta, a = best_fit.a, b = best_fit.b;
  double rmse = rmse_db(delta, a, b, t, ydb);
  double lambda = 1e-3;
  const double ln10_scale = kDb / std::log(10.0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    const double step = std::exp(-delta * dt);
    double e = 1.0;
    for (std::size_t i = 0; i < n_trimmed; ++i) {
      const double m = std::max(a * e + b, kTinyEnergy);
      const double f = db_of(m);
      const double r = f - ydb[i];
      if (f > kEdcFloorDb) {  // clamped region carries no gradient
        Eigen::Vector3d j;
        j[0] = ln10_scale * (-t[i] * a * e) / m;
        j[1] = ln10_scale * e / m;
        j[2] = ln10_scale / m;
        jtj.noalias() += j * j.transpose();
        jtr.noalias() += j * r;
      }
      e *= step;
    }
    bool moved = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d delta_p = damped.ldlt().solve(-jtr);
      const double nd = std::max(delta + delta_p[0], 1e-6);
      const double na = std::max(a + delta_p[1], kTinyEnergy);
      const double nb = std::max(b + delta_p[2], 0.0);
      const double nr = rmse_db(nd, na, nb, t, ydb);
      if (nr < rmse) {
        const double rel_step = std::max(
            {std::abs(nd - delta) / std::max(delta, 1e-12), std::abs(na - a) / std::max(a, 1e-12),
             std::abs(nb - b) / std::max(std::abs(b), 1e-12)});
        delta = nd;
        a = na;
        b = nb;
        rmse = nr;
        lambda = std::max(lambda / 3.0, 1e-12);
        moved = rel_step >= kStepTolerance;
        break;
      }
      lambda *= 4.0;
    }
    if (!moved) break;
  }

  DecayFit fit;
  fit.decay_rate = delta;
  fit.amplitude = a;
  fit.noise_floor = b;
  fit.fit_rmse_db = rmse;
  return fit;
}

double rt60_from_decay(double delta) {
  if (delta <= 0.0) throw ArgumentError("rt60_from_decay: delta must be positive");
  return 6.0 * std::log(10.0) / delta;
}

double ground_truth_rt60(const Air& air) {
  return rt60_from_decay(fit_decay_model(schroeder_edc(air)).decay_rate);
}

void measure_rt60(Air& air) { air.rt60_true = ground_truth_rt60(air); }

}  // namespace rt60
