#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tzlab {

using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major integer matrix.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0) {}
  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  std::int64_t& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::int64_t operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<std::int64_t> column(int c) const;
  std::vector<std::int64_t> row(int r) const;
  std::vector<std::vector<std::int64_t>> to_rows() const;
  std::string to_string() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> data_;
};

/// One linear constraint a.y >= b over the rationals.
struct LinearInequality {
  std::vector<Rational> a;
  Rational b;
};

/// Decides exactly (Fourier-Motzkin elimination) whether the system of
/// inequalities has a rational solution, and returns one if so. Free
/// variables are set to the feasible value of smallest magnitude, preferring
/// integers.
std::optional<std::vector<Rational>> solve_inequalities(const std::vector<LinearInequality>& system, int n_vars);

/// Result of a Smith normal form computation U*A*V = S.
struct SmithForm {
  std::vector<std::int64_t> diagonal;  // invariant factors, length min(rows, cols); zeros last
  IntMatrix V;                         // unimodular column transform (cols x cols)
  int rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& A);

std::int64_t gcd_i64(std::int64_t a, std::int64_t b);
std::int64_t lcm_i64(std::int64_t a, std::int64_t b);

}  // namespace tzlab
