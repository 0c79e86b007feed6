#include "nuggetgen/vecops.hpp"

#include <atomic>
#include <cmath>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define NUGGETGEN_X86_DISPATCH 1
#include <immintrin.h>
#endif

namespace nuggetgen::vecops {

namespace {
std::atomic<bool> g_force_scalar{false};
}

void set_force_scalar(bool v) { g_force_scalar.store(v, std::memory_order_relaxed); }
bool force_scalar() { return g_force_scalar.load(std::memory_order_relaxed); }

namespace scalar {

float dot_f32(const float* a, const float* b, std::size_t n) {
  float s = 0.0f;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

float norm_f32(const float* a, std::size_t n) {
  float s = 0.0f;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace scalar

#ifdef NUGGETGEN_X86_DISPATCH

__attribute__((target("avx2,fma"))) static float dot_f32_avx2(const float* a, const float* b,
                                                              std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
  }
  __m128 lo = _mm256_castps256_ps128(acc);
  __m128 hi = _mm256_extractf128_ps(acc, 1);
  __m128 sum = _mm_add_ps(lo, hi);
  sum = _mm_hadd_ps(sum, sum);
  sum = _mm_hadd_ps(sum, sum);
  float out = _mm_cvtss_f32(sum);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

__attribute__((target("avx2,fma"))) static float norm_f32_avx2(const float* a, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(a + i);
    acc = _mm256_fmadd_ps(v, v, acc);
  }
  __m128 lo = _mm256_castps256_ps128(acc);
  __m128 hi = _mm256_extractf128_ps(acc, 1);
  __m128 sum = _mm_add_ps(lo, hi);
  sum = _mm_hadd_ps(sum, sum);
  sum = _mm_hadd_ps(sum, sum);
  float out = _mm_cvtss_f32(sum);
  for (; i < n; ++i) out += a[i] * a[i];
  return std::sqrt(out);
}

__attribute__((target("avx2,fma"))) static double dot_f64_avx2(const double* a, const double* b,
                                                               std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d sum = _mm_add_pd(lo, hi);
  sum = _mm_hadd_pd(sum, sum);
  double out = _mm_cvtsd_f64(sum);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

static bool detect_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

bool avx2_available() {
  static const bool available = detect_avx2();
  return available;
}

#else

bool avx2_available() { return false; }

#endif  // NUGGETGEN_X86_DISPATCH

float dot_f32(const float* a, const float* b, std::size_t n) {
#ifdef NUGGETGEN_X86_DISPATCH
  if (avx2_available() && !force_scalar()) return dot_f32_avx2(a, b, n);
#endif
  return scalar::dot_f32(a, b, n);
}

float norm_f32(const float* a, std::size_t n) {
#ifdef NUGGETGEN_X86_DISPATCH
  if (avx2_available() && !force_scalar()) return norm_f32_avx2(a, n);
#endif
  return scalar::norm_f32(a, n);
}

double dot_f64(const double* a, const double* b, std::size_t n) {
#ifdef NUGGETGEN_X86_DISPATCH
  if (avx2_available() && !force_scalar()) return dot_f64_avx2(a, b, n);
#endif
  return scalar::dot_f64(a, b, n);
}

float cosine_f32(const std::vector<float>& a, const std::vector<float>& b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const float na = norm_f32(a.data(), n);
  const float nb = norm_f32(b.data(), n);
  if (na == 0.0f || nb == 0.0f) return 0.0f;
  return dot_f32(a.data(), b.data(), n) / (na * nb);
}

double cosine_f64(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const double na = std::sqrt(dot_f64(a.data(), a.data(), n));
  const double nb = std::sqrt(dot_f64(b.data(), b.data(), n));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot_f64(a.data(), b.data(), n) / (na * nb);
}

}  // namespace nuggetgen::vecops
