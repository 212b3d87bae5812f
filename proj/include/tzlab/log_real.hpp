#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace tzlab {

/// Signed real number stored as (sign, log|x|). Factorial ratios in the
/// isotype kernels reach e^{10^4}; everything is carried in log space and
/// converted to a plain number only on demand.
///
/// The log magnitude is a long double so that differences of large
/// log-factorials (~1.3e4 at n=2000) keep ~1e-15 absolute accuracy.
class LogReal {
 public:
  constexpr LogReal() = default;

  static LogReal from_log(long double log_abs, int sign = 1) {
    LogReal r;
    if (sign == 0 || log_abs == -std::numeric_limits<long double>::infinity()) return r;
    r.sign_ = sign > 0 ? 1 : -1;
    r.log_abs_ = log_abs;
    return r;
  }

  static LogReal from_value(long double v) {
    if (v == 0.0L) return {};
    return from_log(std::log(std::fabs(v)), v > 0 ? 1 : -1);
  }

  static LogReal one() { return from_log(0.0L); }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  /// log|x|; -inf for zero.
  long double log_abs() const {
    return sign_ == 0 ? -std::numeric_limits<long double>::infinity() : log_abs_;
  }
  long double value() const { return sign_ == 0 ? 0.0L : sign_ * std::exp(log_abs_); }
  double to_double() const { return static_cast<double>(value()); }

  LogReal operator-() const {
    LogReal r = *this;
    r.sign_ = -r.sign_;
    return r;
  }
  LogReal& operator*=(const LogReal& o);
  LogReal& operator/=(const LogReal& o);
  LogReal& operator+=(const LogReal& o);
  LogReal& operator-=(const LogReal& o) { return *this += -o; }

  friend LogReal operator*(LogReal a, const LogReal& b) { return a *= b; }
  friend LogReal operator/(LogReal a, const LogReal& b) { return a /= b; }
  friend LogReal operator+(LogReal a, const LogReal& b) { return a += b; }
  friend LogReal operator-(LogReal a, const LogReal& b) { return a -= b; }

  /// x^e for x >= 0.
  LogReal pow(long double e) const;

  friend bool operator==(const LogReal& a, const LogReal& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_abs_ == b.log_abs_);
  }

 private:
  int sign_ = 0;
  long double log_abs_ = 0.0L;
};

/// Streaming log-sum-exp of nonnegative terms given by their logs. The
/// accumulation order is the insertion order, so results are reproducible.
class LogSumExp {
 public:
  void add_log(long double log_term);
  void add(const LogReal& term);
  LogReal result() const;
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

 private:
  long double max_ = -std::numeric_limits<long double>::infinity();
  long double scaled_sum_ = 0.0L;
  std::size_t count_ = 0;
};

/// Complex number with log-space magnitude and unit phase.
struct LogComplex {
  LogReal modulus;                      // always >= 0
  std::complex<double> phase{1.0, 0.0};  // unit modulus (1 when modulus is zero)

  bool is_zero() const { return modulus.is_zero(); }
  std::complex<long double> value() const;
  static LogComplex from_log_polar(long double log_abs, std::complex<double> phase);
  static LogComplex zero() { return {}; }
};

/// log(n!) in long double; tabulated for small n, Stirling series beyond.
long double log_factorial(std::int64_t n);

/// Natural log of pi in long double.
inline constexpr long double kLogPi = 1.1447298858494001741434273513530587L;
inline constexpr long double kPi = 3.1415926535897932384626433832795029L;

}  // namespace tzlab
