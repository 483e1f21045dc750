#include "ngt/kalman.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace ngt {

namespace {

constexpr double kPositionWeight = 1.0 / 20.0;
constexpr double kVelocityWeight = 1.0 / 160.0;

KalmanCovariance transition() {
    KalmanCovariance f = KalmanCovariance::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

Eigen::Matrix<double, 4, 8> observation() {
    Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
    h.leftCols<4>().setIdentity();
    return h;
}

KalmanCovariance symmetrized(const KalmanCovariance& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

Measurement to_measurement(const BoundingBox& box) {
    const Point c = box.center();
    return {c.x, c.y, box.width / box.height, box.height};
}

BoundingBox to_box(const KalmanState& state) {
    const double h = state.mean(3);
    const double w = state.mean(2) * h;
    return {state.mean(0) - w / 2.0, state.mean(1) - h / 2.0, w, h};
}

KalmanState kf_initiate(const BoundingBox& box) {
    KalmanState s;
    s.mean.head<4>() = to_measurement(box);
    s.mean.tail<4>().setZero();
    const double h = box.height;
    Eigen::Matrix<double, 8, 1> std;
    std << 2 * kPositionWeight * h, 2 * kPositionWeight * h, 1e-2, 2 * kPositionWeight * h,
        10 * kVelocityWeight * h, 10 * kVelocityWeight * h, 1e-5, 10 * kVelocityWeight * h;
    s.covariance = std.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kf_predict(const KalmanState& state) {
    const double h = state.mean(3);
    Eigen::Matrix<double, 8, 1> std;
    std << kPositionWeight * h, kPositionWeight * h, 1e-2, kPositionWeight * h,
        kVelocityWeight * h, kVelocityWeight * h, 1e-5, kVelocityWeight * h;
    const KalmanCovariance q = std.array().square().matrix().asDiagonal();
    static const KalmanCovariance f = transition();

    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = symmetrized(f * state.covariance * f.transpose() + q);
    return out;
}

MeasurementProjection kf_project(const KalmanState& state) {
    const double h = state.mean(3);
    Eigen::Vector4d std(kPositionWeight * h, kPositionWeight * h, 1e-1, kPositionWeight * h);
    const MeasurementCovariance r = std.array().square().matrix().asDiagonal();
    static const Eigen::Matrix<double, 4, 8> obs = observation();

    MeasurementProjection proj;
    proj.mean = obs * state.mean;
    proj.covariance = obs * state.covariance * obs.transpose() + r;
    proj.covariance = 0.5 * (proj.covariance + proj.covariance.transpose()).eval();
    return proj;
}

KalmanState kf_update(const KalmanState& state, const BoundingBox& box) {
    const MeasurementProjection proj = kf_project(state);
    Eigen::LLT<MeasurementCovariance> llt(proj.covariance);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("innovation covariance is not positive definite");
    }
    static const Eigen::Matrix<double, 4, 8> obs = observation();
    // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
    const Eigen::Matrix<double, 8, 4> gain = llt.solve(obs * state.covariance).transpose();
    const Measurement innovation = to_measurement(box) - proj.mean;

    KalmanState out;
    out.mean = state.mean + gain * innovation;
    out.covariance = symmetrized(state.covariance - gain * proj.covariance * gain.transpose());
    return out;
}

double mahalanobis_squared(const Measurement& innovation, const MeasurementCovariance& covariance) {
    Eigen::LLT<MeasurementCovariance> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("innovation covariance is not positive definite");
    }
    const Measurement z = llt.matrixL().solve(innovation);
    return z.squaredNorm();
}

double gating_distance(const KalmanState& state, const BoundingBox& box) {
    const MeasurementProjection proj = kf_project(state);
    return mahalanobis_squared(to_measurement(box) - proj.mean, proj.covariance);
}

double motion_affinity_from_distance(double mahalanobis_sq) {
    return std::clamp(std::exp(-0.5 * mahalanobis_sq), 0.0, 1.0);
}

double motion_affinity(const KalmanState& state, const BoundingBox& box) {
    return motion_affinity_from_distance(gating_distance(state, box));
}

}  // namespace ngt
