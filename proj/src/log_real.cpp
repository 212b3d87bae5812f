#include "tzlab/log_real.hpp"

#include <stdexcept>
#include <vector>

namespace tzlab {

LogReal& LogReal::operator*=(const LogReal& o) {
  if (sign_ == 0 || o.sign_ == 0) {
    *this = LogReal{};
    return *this;
  }
  sign_ *= o.sign_;
  log_abs_ += o.log_abs_;
  return *this;
}

LogReal& LogReal::operator/=(const LogReal& o) {
  if (o.sign_ == 0) throw std::domain_error("LogReal: division by zero");
  if (sign_ == 0) return *this;
  sign_ *= o.sign_;
  log_abs_ -= o.log_abs_;
  return *this;
}

LogReal& LogReal::operator+=(const LogReal& o) {
  if (o.sign_ == 0) return *this;
  if (sign_ == 0) {
    *this = o;
    return *this;
  }
  const bool self_larger = log_abs_ >= o.log_abs_;
  const long double hi = self_larger ? log_abs_ : o.log_abs_;
  const long double lo = self_larger ? o.log_abs_ : log_abs_;
  const int hi_sign = self_larger ? sign_ : o.sign_;
  const long double t = std::exp(lo - hi);
  if (sign_ == o.sign_) {
    log_abs_ = hi + std::log1p(t);
    sign_ = hi_sign;
  } else if (t == 1.0L) {
    *this = LogReal{};
  } else {
    log_abs_ = hi + std::log1p(-t);
    sign_ = hi_sign;
  }
  return *this;
}

LogReal LogReal::pow(long double e) const {
  if (sign_ < 0) throw std::domain_error("LogReal::pow of a negative number");
  if (sign_ == 0) {
    if (e > 0) return {};
    if (e == 0) return one();
    throw std::domain_error("LogReal::pow: 0 to a negative power");
  }
  return from_log(log_abs_ * e);
}

void LogSumExp::add_log(long double log_term) {
  if (log_term == -std::numeric_limits<long double>::infinity()) return;
  ++count_;
  if (log_term <= max_) {
    scaled_sum_ += std::exp(log_term - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0L;
    max_ = log_term;
  }
}

void LogSumExp::add(const LogReal& term) {
  if (term.sign() < 0) throw std::domain_error("LogSumExp accepts nonnegative terms only");
  if (!term.is_zero()) add_log(term.log_abs());
}

LogReal LogSumExp::result() const {
  if (count_ == 0) return {};
  return LogReal::from_log(max_ + std::log(scaled_sum_));
}

std::complex<long double> LogComplex::value() const {
  const long double m = modulus.value();
  return {m * phase.real(), m * phase.imag()};
}

LogComplex LogComplex::from_log_polar(long double log_abs, std::complex<double> phase) {
  LogComplex c;
  c.modulus = LogReal::from_log(log_abs);
  c.phase = phase;
  return c;
}

namespace {

constexpr std::int64_t kTableSize = 1 << 17;

const std::vector<long double>& log_factorial_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kTableSize);
    t[0] = 0.0L;
    for (std::int64_t n = 1; n < kTableSize; ++n) t[n] = std::lgamma(static_cast<long double>(n) + 1.0L);
    return t;
  }();
  return table;
}

long double stirling_log_factorial(long double n) {
  // log n! = (n+1/2) log n - n + log(2 pi)/2 + 1/(12n) - 1/(360n^3) + 1/(1260n^5) - ...
  constexpr long double kHalfLog2Pi = 0.91893853320467274178032973640561764L;
  const long double inv = 1.0L / n;
  const long double inv2 = inv * inv;
  const long double series = inv * (1.0L / 12 - inv2 * (1.0L / 360 - inv2 * (1.0L / 1260 - inv2 / 1680)));
  return (n + 0.5L) * std::log(n) - n + kHalfLog2Pi + series;
}

}  // namespace

long double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial of a negative integer");
  if (n < kTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
  return stirling_log_factorial(static_cast<long double>(n));
}

}  // namespace tzlab
