#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lfmd {

/// Dense point in R^n. Entries are always finite and n >= 1; every
/// constructor validates, so a Vector that exists is a valid point.
class Vector {
 public:
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);

  static Vector constant(std::size_t dim, double value);
  static Vector zeros(std::size_t dim) { return constant(dim, 0.0); }

  std::size_t dim() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }
  const std::vector<double>& data() const noexcept { return entries_; }

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> entries_;
};

void require_same_dim(const Vector& x, const Vector& y);

double dot(const Vector& x, const Vector& y);
Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator*(double s, const Vector& x);
/// x + s * y
Vector axpy(const Vector& x, double s, const Vector& y);

}  // namespace lfmd
