#include "nlwlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (raw == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(raw);
}

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c_backward = nullptr;

  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    if (c2c_backward) fftw_destroy_plan(c2c_backward);
  }
};

using ShapeKey = std::pair<int, int>;

std::size_t half_size(int dim, int n) {
  std::size_t outer = 1;
  for (int a = 0; a + 1 < dim; ++a) outer *= static_cast<std::size_t>(n);
  return outer * static_cast<std::size_t>(n / 2 + 1);
}

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int dim, int n) {
  static std::map<ShapeKey, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[{dim, n}];
  if (!slot) {
    auto plans = std::make_unique<Plans>();
    int dims[kMaxDim];
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
      dims[a] = n;
      total *= static_cast<std::size_t>(n);
    }
    auto real = fftw_buffer<double>(total);
    auto half = fftw_buffer<fftw_complex>(half_size(dim, n));
    auto full = fftw_buffer<fftw_complex>(total);
    plans->r2c = fftw_plan_dft_r2c(dim, dims, real.get(), half.get(), FFTW_ESTIMATE);
    plans->c2r = fftw_plan_dft_c2r(dim, dims, half.get(), real.get(), FFTW_ESTIMATE);
    plans->c2c_backward =
        fftw_plan_dft(dim, dims, full.get(), full.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    require(plans->r2c && plans->c2r && plans->c2c_backward, ErrorCode::domain,
            "FFTW failed to create a plan");
    slot = std::move(plans);
  }
  return *slot;
}

struct Scratch {
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> half;
};

Scratch& scratch_for(int dim, int n) {
  thread_local std::map<ShapeKey, Scratch> buffers;
  auto it = buffers.find({dim, n});
  if (it == buffers.end()) {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    it = buffers
             .emplace(ShapeKey{dim, n},
                      Scratch{fftw_buffer<double>(total), fftw_buffer<fftw_complex>(half_size(dim, n))})
             .first;
  }
  return it->second;
}

// Parity of the axis-index sum: grid points start at -L/2, which contributes
// a factor (-1)^{k_1 + ... + k_d} to exp(-2 pi i x . xi_k).
struct OuterWalker {
  int dim;
  int n;
  LatticeIndex idx{};
  int parity = 0;
  bool nyquist = false;

  void refresh() {
    parity = 0;
    nyquist = false;
    for (int a = 0; a + 1 < dim; ++a) {
      parity += idx[a];
      nyquist = nyquist || idx[a] == n / 2;
    }
    parity &= 1;
  }

  std::size_t negated_flat() const {
    std::size_t flat = 0;
    for (int a = 0; a + 1 < dim; ++a) flat = flat * n + static_cast<std::size_t>((n - idx[a]) % n);
    return flat;
  }

  void advance() {
    for (int a = dim - 2; a >= 0; --a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
    refresh();
  }
};

std::size_t outer_count(const Grid& g) {
  std::size_t outer = 1;
  for (int a = 0; a + 1 < g.dim(); ++a) outer *= static_cast<std::size_t>(g.points());
  return outer;
}

}  // namespace

void fft_forward(const Grid& grid, std::span<const double> values, std::span<Complex> out) {
  require(values.size() == grid.size() && out.size() == grid.size(), ErrorCode::shape_mismatch,
          "fft_forward: array shape does not match the grid");
  const int d = grid.dim();
  const int n = grid.points();
  const Plans& plans = plans_for(d, n);
  Scratch& s = scratch_for(d, n);
  std::copy(values.begin(), values.end(), s.real.get());
  fftw_execute_dft_r2c(plans.r2c, s.real.get(), s.half.get());

  const double scale = std::pow(grid.length(), 0.5 * d) / static_cast<double>(grid.size());
  const std::size_t h = static_cast<std::size_t>(n / 2 + 1);
  OuterWalker walk{d, n};
  walk.refresh();
  const std::size_t outer = outer_count(grid);
  for (std::size_t o = 0; o < outer; ++o, walk.advance()) {
    Complex* row = out.data() + o * n;
    if (walk.nyquist) {
      std::fill(row, row + n, Complex{});
      continue;
    }
    const fftw_complex* direct = s.half.get() + o * h;
    const fftw_complex* mirror = s.half.get() + walk.negated_flat() * h;
    for (int k = 0; k < n; ++k) {
      if (k == n / 2) {
        row[k] = 0.0;
        continue;
      }
      const double sign = ((walk.parity + k) & 1) ? -scale : scale;
      if (k < n / 2) {
        row[k] = sign * Complex(direct[k][0], direct[k][1]);
      } else {
        const int mk = n - k;
        row[k] = sign * Complex(mirror[mk][0], -mirror[mk][1]);
      }
    }
  }
}

void fft_inverse(const Grid& grid, std::span<const Complex> coeffs, std::span<double> out) {
  require(coeffs.size() == grid.size() && out.size() == grid.size(), ErrorCode::shape_mismatch,
          "fft_inverse: array shape does not match the grid");
  const int d = grid.dim();
  const int n = grid.points();
  const Plans& plans = plans_for(d, n);
  Scratch& s = scratch_for(d, n);

  const double scale = std::pow(grid.length(), -0.5 * d);
  const std::size_t h = static_cast<std::size_t>(n / 2 + 1);
  OuterWalker walk{d, n};
  walk.refresh();
  const std::size_t outer = outer_count(grid);
  for (std::size_t o = 0; o < outer; ++o, walk.advance()) {
    fftw_complex* dst = s.half.get() + o * h;
    const Complex* row = coeffs.data() + o * n;
    for (std::size_t k = 0; k < h; ++k) {
      if (walk.nyquist || k == static_cast<std::size_t>(n / 2)) {
        dst[k][0] = dst[k][1] = 0.0;
        continue;
      }
      const double sign = ((walk.parity + static_cast<int>(k)) & 1) ? -scale : scale;
      dst[k][0] = sign * row[k].real();
      dst[k][1] = sign * row[k].imag();
    }
  }
  fftw_execute_dft_c2r(plans.c2r, s.half.get(), s.real.get());
  std::copy(s.real.get(), s.real.get() + grid.size(), out.begin());
}

SpectralField fft_forward(const RealField& field) {
  SpectralField out(field.grid());
  fft_forward(field.grid(), field.values(), out.coeffs());
  return out;
}

RealField fft_inverse(const SpectralField& field) {
  RealField out(field.grid());
  fft_inverse(field.grid(), field.coeffs(), out.values());
  return out;
}

std::vector<Complex> fft_inverse_complex(const SpectralField& field) {
  const Grid& grid = field.grid();
  const int d = grid.dim();
  const Plans& plans = plans_for(d, grid.points());
  auto full = fftw_buffer<fftw_complex>(grid.size());
  // x_j = -L/2 + j dx shifts every axis by half a period: a (-1)^{sum j} factor.
  const double scale = std::pow(grid.length(), -0.5 * d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const LatticeIndex idx = grid.unflatten(i);
    int parity = 0;
    for (int a = 0; a < d; ++a) parity += idx[a];
    const double sign = (parity & 1) ? -scale : scale;
    full[i][0] = sign * field[i].real();
    full[i][1] = sign * field[i].imag();
  }
  fftw_execute_dft(plans.c2c_backward, full.get(), full.get());
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = Complex(full[i][0], full[i][1]);
  return out;
}

double imaginary_residue(const SpectralField& field) {
  double worst = 0.0;
  for (const Complex& v : fft_inverse_complex(field)) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

}  // namespace nlwlab
