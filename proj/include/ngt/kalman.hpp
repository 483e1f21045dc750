#pragma once

#include "ngt/core.hpp"

#include <Eigen/Core>

namespace ngt {

using KalmanMean = Eigen::Matrix<double, 8, 1>;
using KalmanCovariance = Eigen::Matrix<double, 8, 8>;
using Measurement = Eigen::Vector4d;
using MeasurementCovariance = Eigen::Matrix4d;

// Constant-velocity model over (center x, center y, aspect ratio w/h, height)
// and their velocities. Noise standard deviations scale with the box height.
struct KalmanState {
    KalmanMean mean = KalmanMean::Zero();
    KalmanCovariance covariance = KalmanCovariance::Identity();
};

struct MeasurementProjection {
    Measurement mean;
    MeasurementCovariance covariance;  // innovation covariance S = H P H^T + R
};

Measurement to_measurement(const BoundingBox& box);
BoundingBox to_box(const KalmanState& state);

KalmanState kf_initiate(const BoundingBox& box);
KalmanState kf_predict(const KalmanState& state);
MeasurementProjection kf_project(const KalmanState& state);

// Throws NumericalError if the innovation covariance is not positive definite.
KalmanState kf_update(const KalmanState& state, const BoundingBox& box);

double mahalanobis_squared(const Measurement& innovation, const MeasurementCovariance& covariance);

// Squared Mahalanobis distance of the box under the state's predicted measurement distribution.
double gating_distance(const KalmanState& state, const BoundingBox& box);

// exp(-d^2 / 2) for the gating distance d^2, in [0, 1].
double motion_affinity(const KalmanState& state, const BoundingBox& box);
double motion_affinity_from_distance(double mahalanobis_sq);

}  // namespace ngt
