#pragma once

#include <array>
#include <cmath>
#include <span>

#include "toolmorph/errors.hpp"

namespace toolmorph {

// Design vectors have at most 9 entries (largest scenario dimension), so
// tangents live inline and never touch the heap.
inline constexpr int kMaxTangents = 9;

// Forward-mode scalar: a value plus the tangent row d(value)/d(theta_k).
//
// Width 0 means "constant": constants combine with any tangent width and a
// width-0 rollout computes plain values at plain-double speed, which is what
// landscape grids and finite-difference oracles run with. Two nonzero widths
// must agree or the operation throws DimensionMismatch.
class Dual {
 public:
  Dual() : value_(0.0), width_(0) {}
  Dual(double v) : value_(v), width_(0) {}  // NOLINT: implicit by design

  static Dual constant(double v) { return Dual(v); }

  // Value with tangent row e_dim (the seed for d/d(theta_dim)).
  static Dual seeded(double v, int width, int dim) {
    Dual r(v);
    r.width_ = check_width(width);
    for (int i = 0; i < width; ++i) r.dv_[i] = 0.0;
    r.dv_[dim] = 1.0;
    return r;
  }

  static Dual with_tangents(double v, std::span<const double> tangents) {
    Dual r(v);
    r.width_ = check_width(static_cast<int>(tangents.size()));
    for (int i = 0; i < r.width_; ++i) r.dv_[i] = tangents[i];
    return r;
  }

  double value() const { return value_; }
  int width() const { return width_; }
  double tangent(int k) const { return k < width_ ? dv_[k] : 0.0; }
  std::span<const double> tangents() const {
    return {dv_.data(), static_cast<std::size_t>(width_)};
  }

  bool finite() const {
    if (!std::isfinite(value_)) return false;
    for (int i = 0; i < width_; ++i)
      if (!std::isfinite(dv_[i])) return false;
    return true;
  }

  Dual operator-() const {
    Dual r(-value_);
    r.width_ = width_;
    for (int i = 0; i < width_; ++i) r.dv_[i] = -dv_[i];
    return r;
  }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.value_ + b.value_);
    r.width_ = combined_width(a, b);
    if (a.width_ && b.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i] + b.dv_[i];
    else if (a.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i];
    else
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = b.dv_[i];
    return r;
  }

  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.value_ - b.value_);
    r.width_ = combined_width(a, b);
    if (a.width_ && b.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i] - b.dv_[i];
    else if (a.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i];
    else
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = -b.dv_[i];
    return r;
  }

  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.value_ * b.value_);
    r.width_ = combined_width(a, b);
    if (a.width_ && b.width_)
      for (int i = 0; i < r.width_; ++i)
        r.dv_[i] = a.dv_[i] * b.value_ + b.dv_[i] * a.value_;
    else if (a.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i] * b.value_;
    else
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = b.dv_[i] * a.value_;
    return r;
  }

  friend Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.value_;
    Dual r(a.value_ * inv);
    r.width_ = combined_width(a, b);
    if (a.width_ && b.width_)
      for (int i = 0; i < r.width_; ++i)
        r.dv_[i] = (a.dv_[i] - r.value_ * b.dv_[i]) * inv;
    else if (a.width_)
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = a.dv_[i] * inv;
    else
      for (int i = 0; i < r.width_; ++i) r.dv_[i] = -r.value_ * b.dv_[i] * inv;
    return r;
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  // Comparisons branch on values; the derivative of the surviving branch is
  // the derivative the trajectory actually follows.
  friend bool operator<(const Dual& a, const Dual& b) { return a.value_ < b.value_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value_ > b.value_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value_ <= b.value_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value_ >= b.value_; }

  // Apply f with known derivative at this point (chain rule helper).
  Dual unary(double f, double dfdx) const {
    Dual r(f);
    r.width_ = width_;
    for (int i = 0; i < width_; ++i) r.dv_[i] = dfdx * dv_[i];
    return r;
  }

 private:
  static int check_width(int w) {
    if (w < 0 || w > kMaxTangents)
      throw DimensionMismatch("tangent width " + std::to_string(w) +
                              " out of range [0, " + std::to_string(kMaxTangents) + "]");
    return w;
  }

  static int combined_width(const Dual& a, const Dual& b) {
    if (a.width_ == 0) return b.width_;
    if (b.width_ == 0) return a.width_;
    if (a.width_ != b.width_)
      throw DimensionMismatch("tangent widths differ: " + std::to_string(a.width_) +
                              " vs " + std::to_string(b.width_));
    return a.width_;
  }

  double value_;
  int width_;
  std::array<double, kMaxTangents> dv_;  // entries beyond width_ are unspecified
};

inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.unary(s, 0.5 / s);
}

inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.unary(e, e);
}

inline Dual log(const Dual& x) { return x.unary(std::log(x.value()), 1.0 / x.value()); }

inline Dual sin(const Dual& x) { return x.unary(std::sin(x.value()), std::cos(x.value())); }

inline Dual cos(const Dual& x) { return x.unary(std::cos(x.value()), -std::sin(x.value())); }

inline Dual tanh(const Dual& x) {
  const double t = std::tanh(x.value());
  return x.unary(t, 1.0 - t * t);
}

// |x| with sign(value) derivative; callers keep it away from 0 or sit in a
// region where the result is multiplied by zero anyway.
inline Dual abs(const Dual& x) {
  return x.value() < 0.0 ? -x : x;
}

inline Dual atan2(const Dual& y, const Dual& x) {
  // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2); the difference below is a
  // zero-valued dual carrying exactly that tangent row.
  const double denom = x.value() * x.value() + y.value() * y.value();
  Dual t = (Dual::constant(x.value()) * y - Dual::constant(y.value()) * x) /
           Dual::constant(denom);
  return Dual::constant(std::atan2(y.value(), x.value())) + t;
}

// Softplus with sharpness beta: smooth relaxation of max(0, x).
// Overflow-safe: for beta*x large the function is x plus an exponentially
// small tail; for very negative beta*x it is exponentially small itself.
inline Dual softplus(const Dual& x, double beta) {
  const double bx = beta * x.value();
  double f, dfdx;  // dfdx = sigmoid(beta*x)
  if (bx > 30.0) {
    f = x.value();
    dfdx = 1.0;
  } else if (bx < -30.0) {
    const double e = std::exp(bx);
    f = e / beta;
    dfdx = e;
  } else {
    f = std::log1p(std::exp(bx)) / beta;
    dfdx = 1.0 / (1.0 + std::exp(-bx));
  }
  return x.unary(f, dfdx);
}

// Logistic gate in (0,1); used to fade contact damping in and out smoothly.
inline Dual sigmoid(const Dual& x) {
  const double v = x.value();
  const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  return x.unary(s, s * (1.0 - s));
}

inline Dual min(const Dual& a, const Dual& b) { return a.value() <= b.value() ? a : b; }
inline Dual max(const Dual& a, const Dual& b) { return a.value() >= b.value() ? a : b; }

// 2D vector of duals; the workhorse of the planar simulator.
struct DualVec2 {
  Dual x, y;

  DualVec2() = default;
  DualVec2(Dual x, Dual y) : x(std::move(x)), y(std::move(y)) {}
  DualVec2(double x, double y) : x(x), y(y) {}

  DualVec2 operator+(const DualVec2& o) const { return {x + o.x, y + o.y}; }
  DualVec2 operator-(const DualVec2& o) const { return {x - o.x, y - o.y}; }
  DualVec2 operator-() const { return {-x, -y}; }
  DualVec2& operator+=(const DualVec2& o) { x += o.x; y += o.y; return *this; }
  DualVec2& operator-=(const DualVec2& o) { x -= o.x; y -= o.y; return *this; }

  friend DualVec2 operator*(const Dual& s, const DualVec2& v) { return {s * v.x, s * v.y}; }
  friend DualVec2 operator*(const DualVec2& v, const Dual& s) { return {s * v.x, s * v.y}; }
  friend DualVec2 operator*(double s, const DualVec2& v) {
    return {Dual::constant(s) * v.x, Dual::constant(s) * v.y};
  }

  Dual dot(const DualVec2& o) const { return x * o.x + y * o.y; }
  Dual cross(const DualVec2& o) const { return x * o.y - y * o.x; }
  Dual squared_norm() const { return x * x + y * y; }
  Dual norm() const { return toolmorph::sqrt(squared_norm()); }

  // Rotate 90 degrees counter-clockwise.
  DualVec2 perp() const { return {-y, x}; }
};

}  // namespace toolmorph
