#include "tzlab/integer_linear_algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tzlab/errors.hpp"

namespace tzlab {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw InputError("IntMatrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  IntMatrix m;
  m.rows_ = static_cast<int>(rows.size());
  m.cols_ = m.rows_ ? static_cast<int>(rows.front().size()) : 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != m.cols_) throw InputError("IntMatrix: ragged rows");
    m.data_.insert(m.data_.end(), r.begin(), r.end());
  }
  return m;
}

std::vector<std::int64_t> IntMatrix::column(int c) const {
  std::vector<std::int64_t> out(rows_);
  for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<std::int64_t> IntMatrix::row(int r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r) * cols_,
          data_.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols_};
}

std::vector<std::vector<std::int64_t>> IntMatrix::to_rows() const {
  std::vector<std::vector<std::int64_t>> out;
  for (int r = 0; r < rows_; ++r) out.push_back(row(r));
  return out;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (int c = 0; c < cols_; ++c) os << (c ? ", " : "") << (*this)(r, c);
    os << ']';
  }
  os << ']';
  return os.str();
}

std::int64_t gcd_i64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t lcm_i64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return std::lcm(a, b);
}

namespace {

Rational ceil_rational(const Rational& q) {
  using boost::multiprecision::cpp_int;
  cpp_int n = boost::multiprecision::numerator(q);
  cpp_int d = boost::multiprecision::denominator(q);
  cpp_int f = n / d;  // truncation toward zero
  if (f * d != n && n > 0) f += 1;
  return Rational(f);
}

Rational floor_rational(const Rational& q) { return -ceil_rational(-q); }

}  // namespace

std::optional<std::vector<Rational>> solve_inequalities(const std::vector<LinearInequality>& system, int n_vars) {
  // stages[v] holds the constraints involving only variables 0..v after
  // eliminating v+1..n-1 (stages[n-1] is the input system).
  std::vector<std::vector<LinearInequality>> stages(static_cast<std::size_t>(std::max(n_vars, 1)));
  for (const auto& ineq : system) {
    if (static_cast<int>(ineq.a.size()) != n_vars) throw InputError("solve_inequalities: coefficient length mismatch");
  }
  if (n_vars == 0) {
    for (const auto& ineq : system)
      if (ineq.b > 0) return std::nullopt;
    return std::vector<Rational>{};
  }
  stages[n_vars - 1] = system;
  for (int v = n_vars - 1; v >= 0; --v) {
    std::vector<LinearInequality> lower, upper, rest;
    for (const auto& ineq : stages[v]) {
      if (ineq.a[v] > 0) lower.push_back(ineq);
      else if (ineq.a[v] < 0) upper.push_back(ineq);
      else rest.push_back(ineq);
    }
    for (const auto& lo : lower) {
      for (const auto& up : upper) {
        // lo: a.y >= b with a_v > 0; up: c.y >= e with c_v < 0.
        const Rational s = lo.a[v];
        const Rational t = -up.a[v];
        LinearInequality comb;
        comb.a.resize(n_vars);
        for (int j = 0; j < n_vars; ++j) comb.a[j] = t * lo.a[j] + s * up.a[j];
        comb.a[v] = 0;
        comb.b = t * lo.b + s * up.b;
        rest.push_back(std::move(comb));
      }
    }
    if (v == 0) {
      for (const auto& ineq : rest)
        if (ineq.b > 0) return std::nullopt;
    } else {
      stages[v - 1] = std::move(rest);
    }
  }
  // Back substitution in increasing variable order.
  std::vector<Rational> y(n_vars, Rational(0));
  for (int v = 0; v < n_vars; ++v) {
    std::optional<Rational> lo, hi;
    for (const auto& ineq : stages[v]) {
      if (ineq.a[v] == 0) continue;
      Rational rhs = ineq.b;
      for (int j = 0; j < v; ++j) rhs -= ineq.a[j] * y[j];
      const Rational bound = rhs / ineq.a[v];
      if (ineq.a[v] > 0) {
        if (!lo || bound > *lo) lo = bound;
      } else {
        if (!hi || bound < *hi) hi = bound;
      }
    }
    Rational pick(0);
    if (lo && *lo > 0) {
      pick = ceil_rational(*lo);
      if (hi && pick > *hi) pick = *lo;
    } else if (hi && *hi < 0) {
      pick = floor_rational(*hi);
      if (lo && pick < *lo) pick = *hi;
    }
    y[v] = pick;
  }
  return y;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("smith_normal_form: integer overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("smith_normal_form: integer overflow");
  return r;
}

// Floor division so that remainders are nonnegative.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& input) {
  IntMatrix A = input;
  const int m = A.rows();
  const int n = A.cols();
  IntMatrix V(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = 1;

  auto swap_rows = [&](int r1, int r2) {
    if (r1 == r2) return;
    for (int c = 0; c < n; ++c) std::swap(A(r1, c), A(r2, c));
  };
  auto swap_cols = [&](int c1, int c2) {
    if (c1 == c2) return;
    for (int r = 0; r < m; ++r) std::swap(A(r, c1), A(r, c2));
    for (int r = 0; r < n; ++r) std::swap(V(r, c1), V(r, c2));
  };
  // row r2 -= q * row r1
  auto row_axpy = [&](int r2, int r1, std::int64_t q) {
    for (int c = 0; c < n; ++c) A(r2, c) = checked_sub(A(r2, c), checked_mul(q, A(r1, c)));
  };
  // col c2 -= q * col c1
  auto col_axpy = [&](int c2, int c1, std::int64_t q) {
    for (int r = 0; r < m; ++r) A(r, c2) = checked_sub(A(r, c2), checked_mul(q, A(r, c1)));
    for (int r = 0; r < n; ++r) V(r, c2) = checked_sub(V(r, c2), checked_mul(q, V(r, c1)));
  };

  const int steps = std::min(m, n);
  for (int t = 0; t < steps; ++t) {
    for (;;) {
      // Pivot: smallest nonzero |entry| in the trailing block.
      int pr = -1, pc = -1;
      std::int64_t best = 0;
      for (int r = t; r < m; ++r)
        for (int c = t; c < n; ++c)
          if (A(r, c) != 0 && (pr < 0 || std::llabs(A(r, c)) < best)) {
            best = std::llabs(A(r, c));
            pr = r;
            pc = c;
          }
      if (pr < 0) break;  // trailing block is zero
      swap_rows(t, pr);
      swap_cols(t, pc);
      bool clean = true;
      for (int r = t + 1; r < m; ++r) {
        if (A(r, t) == 0) continue;
        row_axpy(r, t, floor_div(A(r, t), A(t, t)));
        if (A(r, t) != 0) clean = false;
      }
      for (int c = t + 1; c < n; ++c) {
        if (A(t, c) == 0) continue;
        col_axpy(c, t, floor_div(A(t, c), A(t, t)));
        if (A(t, c) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: the pivot must divide the whole trailing block.
      int bad_row = -1;
      for (int r = t + 1; r < m && bad_row < 0; ++r)
        for (int c = t + 1; c < n; ++c)
          if (A(r, c) % A(t, t) != 0) {
            bad_row = r;
            break;
          }
      if (bad_row < 0) break;
      for (int c = t; c < n; ++c) A(t, c) = A(t, c) + A(bad_row, c);
    }
  }

  SmithForm out;
  out.diagonal.resize(steps);
  for (int t = 0; t < steps; ++t) {
    if (A(t, t) < 0) {
      for (int r = 0; r < m; ++r) A(r, t) = -A(r, t);
      for (int r = 0; r < n; ++r) V(r, t) = -V(r, t);
    }
    out.diagonal[t] = A(t, t);
    if (A(t, t) != 0) ++out.rank;
  }
  out.V = std::move(V);
  return out;
}

}  // namespace tzlab
