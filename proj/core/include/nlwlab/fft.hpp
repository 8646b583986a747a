#pragma once

#include <span>
#include <vector>

#include "nlwlab/field.hpp"

namespace nlwlab {

// Transforms are backed by FFTW (real-to-complex and complex-to-real, planned
// with FFTW_ESTIMATE so plans and results are reproducible run to run).
// All entry points are thread-safe.

SpectralField fft_forward(const RealField& field);
RealField fft_inverse(const SpectralField& field);

/// Span versions used by the solver hot loops; `out` must have grid.size() entries.
void fft_forward(const Grid& grid, std::span<const double> values, std::span<Complex> out);
void fft_inverse(const Grid& grid, std::span<const Complex> coeffs, std::span<double> out);

/// Full complex inverse transform (for fields that need not be real, such as
/// the projection of a real field onto one cube).
std::vector<Complex> fft_inverse_complex(const SpectralField& field);

/// Largest |Im f(x)| of the full complex inverse transform. Real fields give
/// round-off; a broken Hermitian symmetry shows up here.
double imaginary_residue(const SpectralField& field);

}  // namespace nlwlab
