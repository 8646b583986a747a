#include "nlwlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlwlab/error.hpp"

namespace nlwlab {

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  require(a == b, ErrorCode::shape_mismatch, std::string(context) + ": fields live on different grids");
}

RealField::RealField(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

RealField::RealField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorCode::shape_mismatch,
          "real field has " + std::to_string(values_.size()) + " samples, grid expects " +
              std::to_string(grid_.size()));
}

double RealField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}

SpectralField::SpectralField(Grid grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == grid_.size(), ErrorCode::shape_mismatch,
          "spectral field has " + std::to_string(coeffs_.size()) + " coefficients, grid expects " +
              std::to_string(grid_.size()));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "spectral add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "spectral subtract");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) noexcept {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

SpectralField& SpectralField::add_scaled(double factor, const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "spectral axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += factor * other.coeffs_[i];
  return *this;
}

double SpectralField::squared_l2() const noexcept {
  double sum = 0.0;
  for (const auto& c : coeffs_) sum += std::norm(c);
  return sum;
}

double SpectralField::hermitian_defect() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    worst = std::max(worst, std::abs(coeffs_[grid_.negated(i)] - std::conj(coeffs_[i])));
  }
  return worst;
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void SpectralField::zero_nyquist() noexcept {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (grid_.is_nyquist(i)) coeffs_[i] = 0.0;
  }
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double factor, SpectralField a) { return a *= factor; }

FieldPair::FieldPair(SpectralField p, SpectralField v) : pos(std::move(p)), vel(std::move(v)) {
  require_same_grid(pos.grid(), vel.grid(), "field pair");
}

FieldPair& FieldPair::operator+=(const FieldPair& other) {
  pos += other.pos;
  vel += other.vel;
  return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& other) {
  pos -= other.pos;
  vel -= other.vel;
  return *this;
}

FieldPair& FieldPair::operator*=(double factor) noexcept {
  pos *= factor;
  vel *= factor;
  return *this;
}

FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
FieldPair operator-(FieldPair a, const FieldPair& b) { return a -= b; }
FieldPair operator*(double factor, FieldPair a) { return a *= factor; }

}  // namespace nlwlab
