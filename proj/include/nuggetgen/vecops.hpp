#pragma once

#include <cstddef>
#include <vector>

// Dense vector kernels behind the clustering math. Each kernel has a scalar
// reference implementation and an AVX2+FMA variant; the variant is selected
// once at startup from CPU feature detection and can be overridden with
// set_force_scalar() so the two paths can be equivalence-tested.
namespace nuggetgen::vecops {

void set_force_scalar(bool v);
bool force_scalar();

// True when the dispatched kernels use AVX2 (detection result, ignoring the
// force_scalar override).
bool avx2_available();

float dot_f32(const float* a, const float* b, std::size_t n);
float norm_f32(const float* a, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);

// Cosine similarity; zero vectors compare as 0 against everything.
float cosine_f32(const std::vector<float>& a, const std::vector<float>& b);
double cosine_f64(const std::vector<double>& a, const std::vector<double>& b);

// Scalar reference kernels, kept callable for equivalence tests.
namespace scalar {
float dot_f32(const float* a, const float* b, std::size_t n);
float norm_f32(const float* a, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
}  // namespace scalar

}  // namespace nuggetgen::vecops
