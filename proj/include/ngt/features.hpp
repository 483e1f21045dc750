#pragma once

#include "ngt/core.hpp"

namespace ngt {

// Exponential moving average of appearance: mu * previous + (1 - mu) * observed.
// No normalization; see update_smoothed_feature for the tracker's variant.
Vector blend_feature(const Vector& previous, const Vector& observed, double mu);

// blend_feature followed by L2 normalization. A zero blend is returned as-is.
Vector update_smoothed_feature(const Vector& previous, const Vector& observed, double mu);

// Throws InvalidInput for a zero vector.
Vector l2_normalized(const Vector& v);

// Throws InvalidInput on dimension mismatch or a zero argument.
double cosine_similarity(const Vector& a, const Vector& b);

}  // namespace ngt
