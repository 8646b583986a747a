#include "nlwlab/randomize.hpp"

#include <cmath>

#include <nlohmann/json.hpp>
#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"

namespace nlwlab {

namespace {

constexpr double kSymmetryTolerance = 1e-14;

// Accumulates sum_n g_n psi(xi_k - n) for one spectral index by walking the
// tensor product of the per-axis weight lists.
class CubeSum {
 public:
  explicit CubeSum(const CutoffFamily& cutoff)
      : cutoff_(cutoff), dim_(cutoff.grid().dim()), side_(2 * cutoff.radius() + 1) {}

  template <class Visit>
  void visit(const LatticeIndex& axis_index, Visit&& fn) const {
    const std::vector<CutoffFamily::AxisWeight>* lists[kMaxDim];
    for (int a = 0; a < dim_; ++a) lists[a] = &cutoff_.axis_weights(axis_index[a]);
    recurse(lists, 0, 0, 1.0, fn);
  }

 private:
  template <class Visit>
  void recurse(const std::vector<CutoffFamily::AxisWeight>* const* lists, int axis, std::size_t id,
               double weight, Visit& fn) const {
    if (axis == dim_) {
      fn(id, weight);
      return;
    }
    for (const auto& e : *lists[axis]) {
      recurse(lists, axis + 1, id * side_ + static_cast<std::size_t>(e.cube + cutoff_.radius()),
              weight * e.weight, fn);
    }
  }

  const CutoffFamily& cutoff_;
  int dim_;
  std::size_t side_;
};

LatticeIndex negate(LatticeIndex m, int dim) {
  for (int a = 0; a < dim; ++a) m[a] = -m[a];
  return m;
}

}  // namespace

IndexClass classify_index(const LatticeIndex& n, int dim) noexcept {
  for (int a = dim - 1; a >= 0; --a) {
    if (n[a] > 0) return IndexClass::positive;
    if (n[a] < 0) return IndexClass::negative;
  }
  return IndexClass::zero;
}

RandomizedDraw RandomizedDraw::generate(const DrawKey& key, const CoefficientDistribution& dist,
                                        const CutoffFamily& cutoff) {
  dist.validate();
  RandomizedDraw draw;
  draw.key_ = key;
  const int dim = cutoff.grid().dim();
  for (int j = 0; j < 2; ++j) draw.g_[j].assign(cutoff.cube_count(), Complex{});
  for (std::size_t id = 0; id < cutoff.cube_count(); ++id) {
    const LatticeIndex m = cutoff.cube_center(id);
    const IndexClass cls = classify_index(m, dim);
    if (cls == IndexClass::negative) continue;
    const std::size_t mirror = cutoff.cube_id(negate(m, dim));
    for (int j = 0; j < 2; ++j) {
      // Cube ids are tied to the family radius; the keyed counter uses the
      // center itself so draws do not depend on the grid size.
      std::uint64_t counter = 0;
      for (int a = 0; a < dim; ++a) counter = counter * 0x10001ULL + static_cast<std::uint64_t>(m[a] + 0x8000);
      if (cls == IndexClass::zero) {
        draw.g_[j][id] = dist.draw_real(key, counter, static_cast<std::uint64_t>(j));
      } else {
        const Complex g = dist.draw_complex(key, counter, static_cast<std::uint64_t>(j));
        draw.g_[j][id] = g;
        draw.g_[j][mirror] = std::conj(g);
      }
    }
  }
  return draw;
}

RandomizedDraw RandomizedDraw::from_coefficients(const CutoffFamily& cutoff, std::vector<Complex> g0,
                                                 std::vector<Complex> g1) {
  require(g0.size() == cutoff.cube_count() && g1.size() == cutoff.cube_count(),
          ErrorCode::shape_mismatch, "coefficient arrays must have one entry per cube");
  RandomizedDraw draw;
  draw.g_[0] = std::move(g0);
  draw.g_[1] = std::move(g1);
  require(draw.symmetry_defect(cutoff) <= kSymmetryTolerance, ErrorCode::symmetry_violation,
          "coefficients violate g_{-n} = conj(g_n)");
  return draw;
}

double RandomizedDraw::symmetry_defect(const CutoffFamily& cutoff) const noexcept {
  const int dim = cutoff.grid().dim();
  double worst = 0.0;
  for (std::size_t id = 0; id < cube_count(); ++id) {
    const std::size_t mirror = cutoff.cube_id(negate(cutoff.cube_center(id), dim));
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(g_[j][mirror] - std::conj(g_[j][id])));
  }
  return worst;
}

FieldPair randomize_pair(const FieldPair& pair, const CutoffFamily& cutoff,
                         const CoefficientDistribution& dist, const RandomizedDraw& draw,
                         bool enforce_certificate) {
  const Grid& grid = pair.grid();
  require_same_grid(grid, cutoff.grid(), "randomize_pair");
  require(draw.cube_count() == cutoff.cube_count(), ErrorCode::shape_mismatch,
          "draw was generated for a different cutoff family");
  require(draw.symmetry_defect(cutoff) <= kSymmetryTolerance, ErrorCode::symmetry_violation,
          "draw violates g_{-n} = conj(g_n)");
  if (enforce_certificate) {
    require(dist.subgaussian_constant().has_value(), ErrorCode::domain,
            "distribution '" + std::string(to_string(dist.kind)) +
                "' has no sub-Gaussian moment certificate");
  }

  FieldPair out(grid);
  const CubeSum sum(cutoff);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) continue;
    Complex m0{}, m1{};
    sum.visit(grid.unflatten(i), [&](std::size_t cube, double w) {
      m0 += w * draw.coefficient(0, cube);
      m1 += w * draw.coefficient(1, cube);
    });
    out.pos[i] = m0 * pair.pos[i];
    out.vel[i] = m1 * pair.vel[i];
  }
  return out;
}

CubeProjection cube_project(const SpectralField& field, const LatticeIndex& center,
                            const CutoffFamily& cutoff) {
  const Grid& grid = field.grid();
  require_same_grid(grid, cutoff.grid(), "cube_project");
  CubeProjection result{SpectralField(grid), !cutoff.in_range(center)};
  if (result.outside) return result;
  bool touched = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) continue;
    const double w = cutoff.value(center, i);
    if (w != 0.0) {
      result.field[i] = w * field[i];
      touched = true;
    }
  }
  result.outside = !touched;
  return result;
}

double bernstein_ratio(const SpectralField& field, const LatticeIndex& center, double p, double q,
                       const CutoffFamily& cutoff) {
  require(p >= 1.0 && q >= p, ErrorCode::domain, "bernstein_ratio needs 1 <= p <= q");
  if (p == q) return 1.0;
  // A cube piece of a real field is complex-valued; norms are of its modulus.
  const Grid& grid = field.grid();
  const std::vector<Complex> piece = fft_inverse_complex(cube_project(field, center, cutoff).field);
  const double den = lebesgue_norm(grid, piece, p);
  require(den >= 1e-30, ErrorCode::undefined_ratio, "bernstein_ratio: cube projection vanishes");
  return lebesgue_norm(grid, piece, q) / den;
}

double modulation_norm(const SpectralField& field, double p, double q, double s,
                       const CutoffFamily& cutoff) {
  require(p >= 1.0 && q >= 1.0, ErrorCode::domain, "modulation_norm exponents must be >= 1");
  const int dim = field.grid().dim();
  double acc = 0.0;
  for (std::size_t id = 0; id < cutoff.cube_count(); ++id) {
    const LatticeIndex m = cutoff.cube_center(id);
    const CubeProjection proj = cube_project(field, m, cutoff);
    if (proj.outside) continue;
    double m2 = 0.0;
    for (int a = 0; a < dim; ++a) m2 += static_cast<double>(m[a]) * m[a];
    const double term = std::pow(japanese_bracket(std::sqrt(m2)), s) *
                        lebesgue_norm(field.grid(), fft_inverse_complex(proj.field), p);
    if (std::isinf(q)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, q);
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

std::string draw_manifest_record(const DrawKey& key, const CoefficientDistribution& dist,
                                 CutoffKind cutoff) {
  nlohmann::ordered_json rec;
  rec["master_seed"] = key.master_seed;
  rec["index"] = key.sample_index;
  rec["distribution"] = std::string(to_string(dist.kind));
  rec["scale"] = dist.scale;
  rec["cutoff"] = std::string(to_string(cutoff));
  return rec.dump();
}

}  // namespace nlwlab
