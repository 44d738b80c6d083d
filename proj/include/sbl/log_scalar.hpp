#ifndef SBL_LOG_SCALAR_HPP
#define SBL_LOG_SCALAR_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbl {

/// Stable log(exp(a) + exp(b)) for a, b in [-inf, +inf).
inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(a) && a < 0.0) return a;  // both are -inf
    return a + std::log1p(std::exp(b - a));
}

/// Nonnegative real carried as its natural logarithm.
///
/// The bound formulas multiply factors like 400^-m and e^{-206 K D^2} that
/// underflow IEEE doubles long before the mathematics degenerates, so every
/// bound value lives in log-space and is only exponentiated on demand.
/// Exact zero (the degenerate bound) is encoded as log value -infinity.
class LogScalar {
public:
    LogScalar() : log_value_(-inf()) {}

    static LogScalar from_log(double log_value) {
        if (std::isnan(log_value))
            throw std::invalid_argument("LogScalar::from_log: NaN log value");
        LogScalar s;
        s.log_value_ = log_value;
        return s;
    }

    static LogScalar from_linear(double value) {
        if (std::isnan(value) || value < 0.0)
            throw std::invalid_argument("LogScalar::from_linear: value must be >= 0");
        LogScalar s;
        s.log_value_ = value == 0.0 ? -inf() : std::log(value);
        return s;
    }

    static LogScalar zero() { return LogScalar(); }
    static LogScalar one() { return from_log(0.0); }

    double log_value() const { return log_value_; }
    bool is_zero() const { return std::isinf(log_value_) && log_value_ < 0.0; }

    /// exp(log_value); 0.0 for values the double range cannot hold.
    double linear() const { return is_zero() ? 0.0 : std::exp(log_value_); }

    /// True when linear() lost the value to underflow (zero or subnormal
    /// despite the represented number being positive).
    bool linear_underflows() const {
        return !is_zero() && log_value_ < min_normal_log();
    }

    LogScalar operator*(const LogScalar& o) const {
        if (is_zero() || o.is_zero()) return zero();
        return from_log(log_value_ + o.log_value_);
    }

    LogScalar operator/(const LogScalar& o) const {
        if (o.is_zero())
            throw std::domain_error("LogScalar: division by zero");
        if (is_zero()) return zero();
        return from_log(log_value_ - o.log_value_);
    }

    LogScalar operator+(const LogScalar& o) const {
        return from_log(log_sum_exp(log_value_, o.log_value_));
    }

    LogScalar pow(double exponent) const {
        if (is_zero()) {
            if (exponent > 0.0) return zero();
            if (exponent == 0.0) return one();
            throw std::domain_error("LogScalar::pow: negative power of zero");
        }
        return from_log(exponent * log_value_);
    }

    bool operator<(const LogScalar& o) const { return log_value_ < o.log_value_; }
    bool operator>(const LogScalar& o) const { return log_value_ > o.log_value_; }
    bool operator<=(const LogScalar& o) const { return log_value_ <= o.log_value_; }
    bool operator>=(const LogScalar& o) const { return log_value_ >= o.log_value_; }
    bool operator==(const LogScalar& o) const { return log_value_ == o.log_value_; }
    bool operator!=(const LogScalar& o) const { return log_value_ != o.log_value_; }

private:
    static double inf() { return std::numeric_limits<double>::infinity(); }
    static double min_normal_log() {
        // log(DBL_MIN): below this exp() returns subnormals, then zero.
        return -708.3964185322641;
    }

    double log_value_;
};

inline LogScalar min(const LogScalar& a, const LogScalar& b) { return a < b ? a : b; }
inline LogScalar max(const LogScalar& a, const LogScalar& b) { return a < b ? b : a; }

}  // namespace sbl

#endif  // SBL_LOG_SCALAR_HPP
