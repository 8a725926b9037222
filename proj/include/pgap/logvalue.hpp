#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "pgap/errors.hpp"

namespace pgap {

/// A nonnegative real stored as its natural logarithm.
///
/// The eigenvalue-gap constant chain contains factors like
/// exp(-(m+1) 2^(m+3) gamma^(p(m+2))) whose logarithm itself can exceed the
/// exponent range of a double (for p = 5, m = 3 the logarithm is ~ -1e498),
/// so the log is kept in a long double (80-bit extended on x86-64, which
/// reaches ~1e4932). Multiplication, powers and comparisons are exact in
/// log space; addition goes through log-sum-exp.
class LogValue {
 public:
  // zero (ln = -inf)
  LogValue() : ln_(-std::numeric_limits<long double>::infinity()) {}

  static LogValue from_value(double v) {
    if (v < 0.0 || std::isnan(v))
      throw Error(ErrorCode::NonPositiveValue, "LogValue requires v >= 0");
    LogValue r;
    r.ln_ = (v == 0.0) ? -std::numeric_limits<long double>::infinity()
                       : std::log(static_cast<long double>(v));
    return r;
  }

  static LogValue from_ln(long double l) {
    LogValue r;
    r.ln_ = l;
    return r;
  }

  static LogValue zero() { return LogValue(); }
  static LogValue one() { return from_ln(0.0L); }

  long double ln() const { return ln_; }
  bool is_zero() const { return std::isinf(ln_) && ln_ < 0; }

  /// Collapses to 0 or +inf when outside double range.
  double value() const {
    if (is_zero()) return 0.0;
    return static_cast<double>(std::exp(ln_));
  }

  bool representable() const {
    return is_zero() || (ln_ > -708.0L && ln_ < 708.0L);
  }

  LogValue operator*(const LogValue& o) const {
    if (is_zero() || o.is_zero()) return zero();
    return from_ln(ln_ + o.ln_);
  }
  LogValue operator/(const LogValue& o) const {
    if (o.is_zero()) throw Error(ErrorCode::NonPositiveValue, "LogValue division by zero");
    if (is_zero()) return zero();
    return from_ln(ln_ - o.ln_);
  }
  LogValue pow(long double e) const {
    if (is_zero()) {
      if (e <= 0.0L) throw Error(ErrorCode::NonPositiveValue, "0^e with e <= 0");
      return zero();
    }
    return from_ln(ln_ * e);
  }

  /// log-sum-exp; stable for wildly different magnitudes.
  LogValue operator+(const LogValue& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    const long double hi = std::max(ln_, o.ln_);
    const long double lo = std::min(ln_, o.ln_);
    return from_ln(hi + std::log1p(std::exp(lo - hi)));
  }

  bool operator<(const LogValue& o) const { return ln_ < o.ln_; }
  bool operator<=(const LogValue& o) const { return ln_ <= o.ln_; }
  bool operator>(const LogValue& o) const { return ln_ > o.ln_; }
  bool operator>=(const LogValue& o) const { return ln_ >= o.ln_; }
  bool operator==(const LogValue& o) const { return ln_ == o.ln_; }

  friend std::ostream& operator<<(std::ostream& os, const LogValue& v) {
    return os << "exp(" << static_cast<double>(v.ln_) << ")";
  }

 private:
  long double ln_;
};

} // namespace pgap
