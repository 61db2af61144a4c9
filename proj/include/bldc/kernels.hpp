#pragma once

// Batch kernels over independent samples or simulations. Each OpenMP kernel
// has a `_serial` twin with the same contract; the serial versions are the
// reference the tests compare against and the benchmark baseline.

#include <span>
#include <vector>

#include "bldc/dynamics.hpp"
#include "bldc/transforms.hpp"

namespace bldc::kernels {

void dq_transform_batch(std::span<const ThreePhaseVector> abc, std::span<const double> theta,
                        std::span<DQVector> out);
void dq_transform_batch_serial(std::span<const ThreePhaseVector> abc,
                               std::span<const double> theta, std::span<DQVector> out);

void inverse_dq_batch(std::span<const DQVector> dq, std::span<const double> theta,
                      std::span<ThreePhaseVector> out);
void inverse_dq_batch_serial(std::span<const DQVector> dq, std::span<const double> theta,
                             std::span<ThreePhaseVector> out);

/// max over theta of |sin^2(t) + sin^2(t + 2pi/3) + sin^2(t - 2pi/3) - 3/2|.
double trig_identity_max_error(std::span<const double> theta);
double trig_identity_max_error_serial(std::span<const double> theta);

/// max relative gap between the three-phase power v.i and vd id + vq iq.
double power_invariance_max_error(std::span<const ThreePhaseVector> v,
                                  std::span<const ThreePhaseVector> i,
                                  std::span<const double> theta);
double power_invariance_max_error_serial(std::span<const ThreePhaseVector> v,
                                         std::span<const ThreePhaseVector> i,
                                         std::span<const double> theta);

struct EnsembleCase {
  QAxisMotorModel model;
  Controller controller;
  LoadProfile load;
  ModelSelector which = ModelSelector::QAxis;
  RunOptions options;
};

/// Runs independent simulations, one per case, in parallel. The first error
/// raised by any case is rethrown after all cases finish.
std::vector<SimTrace> run_ensemble(std::span<const EnsembleCase> cases);
std::vector<SimTrace> run_ensemble_serial(std::span<const EnsembleCase> cases);

}  // namespace bldc::kernels
