#pragma once

#include <string>
#include <vector>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/cutoff.hpp"
#include "nlwlab/distribution.hpp"
#include "nlwlab/field.hpp"

namespace nlwlab {

/// Z^d = I u (-I) u {0}, where n is in I when its last nonzero coordinate is positive.
enum class IndexClass { zero, positive, negative };

IndexClass classify_index(const LatticeIndex& n, int dim) noexcept;

/// Coefficients g_{n,j}, j in {0, 1}, for every cube of a cutoff family.
/// Always satisfies g_{-n,j} = conj(g_{n,j}) and Im g_{0,j} = 0 once built.
class RandomizedDraw {
 public:
  /// Draws Re/Im of g_{n,j} for n in I (and the real g_{0,j}) from the keyed
  /// generator, then fills -I by conjugation.
  static RandomizedDraw generate(const DrawKey& key, const CoefficientDistribution& dist,
                                 const CutoffFamily& cutoff);

  /// Explicit coefficients indexed by cube id; throws on a symmetry violation.
  static RandomizedDraw from_coefficients(const CutoffFamily& cutoff, std::vector<Complex> g0,
                                          std::vector<Complex> g1);

  const DrawKey& key() const noexcept { return key_; }
  std::size_t cube_count() const noexcept { return g_[0].size(); }
  const Complex& coefficient(int j, std::size_t cube) const noexcept { return g_[j][cube]; }
  const std::vector<Complex>& coefficients(int j) const noexcept { return g_[j]; }

  /// max over n, j of |g_{-n,j} - conj(g_{n,j})| and |Im g_{0,j}|.
  double symmetry_defect(const CutoffFamily& cutoff) const noexcept;

 private:
  DrawKey key_;
  std::vector<Complex> g_[2];
};

/// output_j = sum_n g_{n,j} psi(D - n) input_j.
///
/// Throws on a symmetry violation in the draw, and (unless
/// `enforce_certificate` is false, used for degenerate diagnostics) when the
/// distribution has no sub-Gaussian certificate.
FieldPair randomize_pair(const FieldPair& pair, const CutoffFamily& cutoff,
                         const CoefficientDistribution& dist, const RandomizedDraw& draw,
                         bool enforce_certificate = true);

struct CubeProjection {
  SpectralField field;
  bool outside = false;  // cube does not meet the lattice; field is zero
};

CubeProjection cube_project(const SpectralField& field, const LatticeIndex& center,
                            const CutoffFamily& cutoff);

/// ||psi(D - n) f||_{L^q} / ||psi(D - n) f||_{L^p}, 1 <= p <= q <= inf.
double bernstein_ratio(const SpectralField& field, const LatticeIndex& center, double p, double q,
                       const CutoffFamily& cutoff);

/// || <n>^s ||psi(D - n) u||_{L^p} ||_{l^q_n}.
double modulation_norm(const SpectralField& field, double p, double q, double s,
                       const CutoffFamily& cutoff);

/// One JSON line of the draw manifest (coefficients are re-derivable from it).
std::string draw_manifest_record(const DrawKey& key, const CoefficientDistribution& dist,
                                 CutoffKind cutoff);

}  // namespace nlwlab
