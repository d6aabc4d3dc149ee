#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <ostream>
#include <string>

namespace sidla {

/// Exact rational with a power-of-two denominator: numerator / 2^exponent,
/// kept in lowest terms.
class Dyadic {
 public:
  using Integer = boost::multiprecision::cpp_int;

  Dyadic() = default;
  Dyadic(Integer numerator, std::uint32_t exponent) : num_(std::move(numerator)), exp_(exponent) { normalize(); }

  static Dyadic integer(std::int64_t n) { return Dyadic(Integer(n), 0); }

  /// count / 2^k
  static Dyadic scaled(std::int64_t count, std::uint32_t k) { return Dyadic(Integer(count), k); }

  const Integer& numerator() const { return num_; }
  std::uint32_t exponent() const { return exp_; }

  Dyadic& operator+=(const Dyadic& o) {
    if (exp_ >= o.exp_) {
      num_ += o.num_ << (exp_ - o.exp_);
    } else {
      num_ = (num_ << (o.exp_ - exp_)) + o.num_;
      exp_ = o.exp_;
    }
    normalize();
    return *this;
  }

  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }

  std::string str() const {
    return exp_ == 0 ? num_.str() : num_.str() + "/2^" + std::to_string(exp_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && !bit_test(num_, 0)) {
      num_ >>= 1;
      --exp_;
    }
  }

  Integer num_ = 0;
  std::uint32_t exp_ = 0;
};

}  // namespace sidla
