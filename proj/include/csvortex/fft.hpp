#pragma once

// FFTW-backed transforms. Plans are cached per grid size behind a mutex and
// executed through the new-array interface on per-call fftw_malloc buffers,
// so concurrent transforms on distinct fields are safe.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "csvortex/field.hpp"

namespace csvortex {
namespace detail {

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(std::size_t count)
      : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct C2CPlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

inline const C2CPlans& c2c_plans(int n) {
  static std::mutex mtx;
  static std::map<int, C2CPlans> cache;
  std::scoped_lock lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::size_t count = static_cast<std::size_t>(n) * n;
    FftwBuffer a(count), b(count);
    C2CPlans p;
    p.fwd = fftw_plan_dft_2d(n, n, a.p, b.p, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_2d(n, n, a.p, b.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    it = cache.emplace(n, p).first;
  }
  return it->second;
}

struct RealBuffer {
  double* p = nullptr;
  explicit RealBuffer(std::size_t count)
      : p(static_cast<double*>(fftw_malloc(sizeof(double) * count))) {
    if (!p) throw std::bad_alloc();
  }
  ~RealBuffer() { fftw_free(p); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
};

struct R2RPlan {
  fftw_plan plan = nullptr;
};

/// 2D DST-I plan for m x m interior data (homogeneous Dirichlet boxes).
/// Out-of-place; executions must also be out-of-place on fftw_malloc memory.
inline const R2RPlan& dst1_plan(int m) {
  static std::mutex mtx;
  static std::map<int, R2RPlan> cache;
  std::scoped_lock lock(mtx);
  auto it = cache.find(m);
  if (it == cache.end()) {
    const std::size_t count = static_cast<std::size_t>(m) * m;
    RealBuffer a(count), b(count);
    R2RPlan p;
    p.plan = fftw_plan_r2r_2d(m, m, a.p, b.p, FFTW_RODFT00, FFTW_RODFT00,
                              FFTW_ESTIMATE);
    it = cache.emplace(m, p).first;
  }
  return it->second;
}

}  // namespace detail

/// Forward transform; coefficients normalized so that at(0,0) is the mean.
inline SpectralField forward_fft(const Field& f) {
  const int n = f.n();
  const std::size_t count = f.grid().size();
  detail::FftwBuffer in(count), out(count);
  for (std::size_t k = 0; k < count; ++k) {
    in.p[k][0] = f.values()[k];
    in.p[k][1] = 0.0;
  }
  fftw_execute_dft(detail::c2c_plans(n).fwd, in.p, out.p);
  SpectralField s(f.grid());
  const double scale = 1.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k)
    s.coeff[k] = {out.p[k][0] * scale, out.p[k][1] * scale};
  return s;
}

/// Inverse transform of a Hermitian spectrum; imaginary residue is dropped.
inline Field inverse_fft(const SpectralField& s) {
  const int n = s.grid.n;
  const std::size_t count = s.grid.size();
  detail::FftwBuffer in(count), out(count);
  for (std::size_t k = 0; k < count; ++k) {
    in.p[k][0] = s.coeff[k].real();
    in.p[k][1] = s.coeff[k].imag();
  }
  fftw_execute_dft(detail::c2c_plans(n).bwd, in.p, out.p);
  Field f(s.grid);
  for (std::size_t k = 0; k < count; ++k) f.values()[k] = out.p[k][0];
  return f;
}

/// 2D DST-I of m x m data (unnormalized, as FFTW defines RODFT00: applying
/// it twice multiplies by (2(m+1))^2).
inline void dst1_2d(int m, std::vector<double>& data) {
  const std::size_t count = static_cast<std::size_t>(m) * m;
  detail::RealBuffer in(count), out(count);
  std::copy(data.begin(), data.end(), in.p);
  fftw_execute_r2r(detail::dst1_plan(m).plan, in.p, out.p);
  std::copy(out.p, out.p + count, data.begin());
}

}  // namespace csvortex
