#include "ngt/features.hpp"

namespace ngt {

Vector blend_feature(const Vector& previous, const Vector& observed, double mu) {
    if (previous.size() != observed.size()) {
        throw InvalidInput("feature dimension mismatch: " + std::to_string(previous.size()) + " vs " +
                           std::to_string(observed.size()));
    }
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw InvalidInput("momentum must lie in [0, 1]");
    }
    return mu * previous + (1.0 - mu) * observed;
}

Vector update_smoothed_feature(const Vector& previous, const Vector& observed, double mu) {
    Vector blended = blend_feature(previous, observed, mu);
    const double norm = blended.norm();
    if (norm > 0.0) {
        blended /= norm;
    }
    return blended;
}

Vector l2_normalized(const Vector& v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) {
        throw InvalidInput("cannot normalize a zero vector");
    }
    return v / norm;
}

double cosine_similarity(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("cosine similarity of vectors with different dimensions");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw InvalidInput("cosine similarity of a zero vector");
    }
    return a.dot(b) / (na * nb);
}

}  // namespace ngt
