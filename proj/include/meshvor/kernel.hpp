#pragma once

// Exact planar predicates for the time-weighted power diagram.
//
// Coordinates are doubles; every double is a dyadic rational, so all
// predicate arithmetic is carried out exactly on mpz mantissas with binary
// exponents. Public results that are genuinely rational (event times,
// circumcenters) are returned as mpq_class.
//
// Sign conventions used throughout the library:
//   orient2d(a, b, c) > 0  <=>  a, b, c counterclockwise
//   incircle_at(a, b, c, d, t) > 0  <=>  d lies strictly outside the
//   time-t orthoball of the ccw triangle (a, b, c), i.e. does not encroach.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "meshvor/errors.hpp"

namespace meshvor {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class WeightClass : std::uint8_t { Input, Steiner, Box };

inline const char* to_string(WeightClass k) {
  switch (k) {
    case WeightClass::Input: return "input";
    case WeightClass::Steiner: return "steiner";
    case WeightClass::Box: return "box";
  }
  return "?";
}

enum class Sign : std::int8_t { Negative = -1, Zero = 0, Positive = 1 };

inline Sign sign_of(int v) { return v < 0 ? Sign::Negative : (v > 0 ? Sign::Positive : Sign::Zero); }
inline Sign negate(Sign s) { return static_cast<Sign>(-static_cast<int>(s)); }

using ExactScalar = mpq_class;

struct LabeledPoint {
  Point p;
  WeightClass kind = WeightClass::Steiner;
};

/// A labeled point together with its symbolic-perturbation priority. Larger
/// ids carry infinitesimally larger weights.
struct Site {
  Point p;
  WeightClass kind = WeightClass::Steiner;
  std::uint64_t id = 0;

  LabeledPoint labeled() const { return {p, kind}; }

  friend bool operator==(const Site&, const Site&) = default;
};

namespace detail {

/// Exact value mant * 2^exp.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(mpz_class mant, long exp) : mant_(std::move(mant)), exp_(exp) {}

  explicit Dyadic(double v) {
    if (v == 0.0) return;
    int e = 0;
    const double frac = std::frexp(v, &e);
    auto m = static_cast<std::int64_t>(std::ldexp(frac, 53));
    long shift = e - 53;
    while ((m & 1) == 0) {
      m >>= 1;
      ++shift;
    }
    mant_ = static_cast<long>(m);
    exp_ = shift;
  }

  int sign() const { return sgn(mant_); }
  bool is_zero() const { return sign() == 0; }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.exp_ >= b.exp_) {
      mpz_class m = a.mant_;
      m <<= static_cast<mp_bitcnt_t>(a.exp_ - b.exp_);
      m += b.mant_;
      return {std::move(m), b.exp_};
    }
    mpz_class m = b.mant_;
    m <<= static_cast<mp_bitcnt_t>(b.exp_ - a.exp_);
    m += a.mant_;
    return {std::move(m), a.exp_};
  }
  friend Dyadic operator-(const Dyadic& a) { return {-a.mant_, a.exp_}; }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.mant_ * b.mant_, a.exp_ + b.exp_};
  }

  mpq_class to_rational() const {
    mpq_class q(mant_);
    if (exp_ > 0) {
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp_));
    } else if (exp_ < 0) {
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exp_));
    }
    return q;
  }

  /// Sign of this * q for rational q, without forming the product.
  int sign_times(const mpq_class& q) const { return sign() * sgn(q); }

 private:
  mpz_class mant_;
  long exp_ = 0;
};

/// sign(a + b * q) for dyadic a, b and rational q.
inline int sign_affine(const Dyadic& a, const Dyadic& b, const mpq_class& q) {
  if (b.is_zero() || sgn(q) == 0) return a.sign();
  const mpq_class v = a.to_rational() + b.to_rational() * q;
  return sgn(v);
}

inline Dyadic orient_exact(Point a, Point b, Point c) {
  const Dyadic ax(a.x), ay(a.y);
  const Dyadic bx = Dyadic(b.x) - ax, by = Dyadic(b.y) - ay;
  const Dyadic cx = Dyadic(c.x) - ax, cy = Dyadic(c.y) - ay;
  return bx * cy - by * cx;
}

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2;  // 2^-53
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrBound = (10.0 + 96.0 * kEps) * kEps;
constexpr double kFilterFloor = 1e-280;

}  // namespace detail

/// Exact orientation of (a, b, c).
inline Sign orient2d(Point a, Point b, Point c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::isfinite(det) && detsum > detail::kFilterFloor &&
      std::abs(det) > detail::kCcwErrBound * detsum) {
    return det > 0 ? Sign::Positive : Sign::Negative;
  }
  return sign_of(detail::orient_exact(a, b, c).sign());
}

/// Squared weight of a point at time t: t for input points, zero otherwise.
inline ExactScalar weight_sq(WeightClass k, const ExactScalar& t) {
  return k == WeightClass::Input ? t : ExactScalar(0);
}

/// Power distance from the origin: |p|^2 - w(p,t)^2.
inline ExactScalar lifted_height(Point p, WeightClass k, const ExactScalar& t) {
  const auto sq = detail::Dyadic(p.x) * detail::Dyadic(p.x) + detail::Dyadic(p.y) * detail::Dyadic(p.y);
  return sq.to_rational() - weight_sq(k, t);
}

/// The power determinant det[x_i, y_i, 1, h_i(t)] over four labeled points as
/// an exact affine function slope * t + offset of time. Positive at t means
/// the fourth point lies outside the orthoball of the first three (when
/// those are ccw).
struct PowerDeterminant {
  detail::Dyadic slope;
  detail::Dyadic offset;
  /// Cofactors of the height column; the perturbation reads their signs.
  std::array<detail::Dyadic, 4> cofactor;

  ExactScalar value_at(const ExactScalar& t) const {
    return offset.to_rational() + slope.to_rational() * t;
  }
  Sign sign_at(const ExactScalar& t) const { return sign_of(detail::sign_affine(offset, slope, t)); }
};

inline PowerDeterminant power_determinant(const std::array<LabeledPoint, 4>& q) {
  using detail::Dyadic;
  // Translate so the fourth point sits at the origin; the determinant is
  // unchanged because |p - d|^2 - |p|^2 is affine in p.
  const Dyadic dx(q[3].p.x), dy(q[3].p.y);
  std::array<Dyadic, 3> x, y;
  for (int i = 0; i < 3; ++i) {
    x[i] = Dyadic(q[i].p.x) - dx;
    y[i] = Dyadic(q[i].p.y) - dy;
  }
  PowerDeterminant r;
  r.cofactor[0] = -(x[1] * y[2] - y[1] * x[2]);
  r.cofactor[1] = x[0] * y[2] - y[0] * x[2];
  r.cofactor[2] = -(x[0] * y[1] - y[0] * x[1]);
  r.cofactor[3] = (x[1] - x[0]) * (y[2] - y[0]) - (y[1] - y[0]) * (x[2] - x[0]);
  for (int i = 0; i < 3; ++i) {
    r.offset = r.offset + (x[i] * x[i] + y[i] * y[i]) * r.cofactor[i];
  }
  for (int i = 0; i < 4; ++i) {
    if (q[i].kind == WeightClass::Input) r.slope = r.slope - r.cofactor[i];
  }
  return r;
}

/// Sign of the power determinant at time t with rows in the given order.
/// Uses a floating-point filter; the exact path decides whenever the filter
/// cannot certify the sign.
inline Sign power_sign(const std::array<LabeledPoint, 4>& q, const ExactScalar& t) {
  const bool t_zero = sgn(t) == 0;
  const double td = t_zero ? 0.0 : t.get_d();
  const double dx = q[3].p.x, dy = q[3].p.y;
  const double wd = q[3].kind == WeightClass::Input ? td : 0.0;
  std::array<double, 3> x, y, h, hp;
  for (int i = 0; i < 3; ++i) {
    x[i] = q[i].p.x - dx;
    y[i] = q[i].p.y - dy;
    const double wi = q[i].kind == WeightClass::Input ? td : 0.0;
    const double sq = x[i] * x[i] + y[i] * y[i];
    h[i] = sq - wi + wd;
    hp[i] = sq + std::abs(wi) + std::abs(wd);
  }
  const double m0a = x[1] * y[2], m0b = y[1] * x[2];
  const double m1a = x[2] * y[0], m1b = y[2] * x[0];
  const double m2a = x[0] * y[1], m2b = y[0] * x[1];
  const double det = h[0] * (m0a - m0b) + h[1] * (m1a - m1b) + h[2] * (m2a - m2b);
  const double perm = hp[0] * (std::abs(m0a) + std::abs(m0b)) + hp[1] * (std::abs(m1a) + std::abs(m1b)) +
                      hp[2] * (std::abs(m2a) + std::abs(m2b));
  // det here is the classic incircle determinant: positive when the fourth
  // point encroaches, so the power determinant is its negation.
  const bool wq = (q[0].kind == WeightClass::Input || q[1].kind == WeightClass::Input ||
                   q[2].kind == WeightClass::Input || q[3].kind == WeightClass::Input);
  const double bound = (t_zero || !wq) ? detail::kIccErrBound * perm : 1e-12 * perm;
  if (std::isfinite(det) && std::isfinite(perm) && perm > detail::kFilterFloor && std::abs(det) > bound) {
    return det > 0 ? Sign::Negative : Sign::Positive;
  }
  return power_determinant(q).sign_at(t);
}

/// Raw (unperturbed) encroachment test. Requires (a, b, c) counterclockwise.
inline Sign incircle_at(const LabeledPoint& a, const LabeledPoint& b, const LabeledPoint& c,
                        const LabeledPoint& d, const ExactScalar& t) {
  if (orient2d(a.p, b.p, c.p) != Sign::Positive) {
    throw PreconditionError("incircle_at: (a, b, c) must be counterclockwise");
  }
  return power_sign({a, b, c, d}, t);
}

namespace detail {

/// Resolves an exactly-zero power determinant by symbolic perturbation: each
/// site carries an extra infinitesimal weight whose magnitude is ordered by
/// id, largest id dominant. The perturbed determinant is
/// D - sum(delta_i * C_i), so the sign is -sign(C_k) for the dominant k
/// with a nonzero cofactor C_k.
inline Sign perturbation_sign(const std::array<Site, 4>& s) {
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return s[i].id > s[j].id; });
  constexpr std::array<int, 4> kCofactorSign{-1, 1, -1, 1};
  for (const int k : order) {
    std::array<Point, 3> rest;
    int n = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != k) rest[n++] = s[i].p;
    }
    const int c = kCofactorSign[k] * static_cast<int>(orient2d(rest[0], rest[1], rest[2]));
    if (c != 0) return sign_of(-c);
  }
  return Sign::Zero;
}

}  // namespace detail

/// Encroachment test with the symbolic tiebreak applied; never returns Zero
/// unless all four sites are collinear.
inline Sign incircle_perturbed(const Site& a, const Site& b, const Site& c, const Site& d,
                               const ExactScalar& t) {
  const Sign s = power_sign({a.labeled(), b.labeled(), c.labeled(), d.labeled()}, t);
  if (s != Sign::Zero) return s;
  return detail::perturbation_sign({a, b, c, d});
}

/// Same as incircle_perturbed at t = 0.
inline Sign incircle_perturbed(const Site& a, const Site& b, const Site& c, const Site& d) {
  static const ExactScalar zero(0);
  return incircle_perturbed(a, b, c, d, zero);
}

struct EventTime {
  enum class Outcome : std::uint8_t { At, NoEvent, AlwaysDegenerate };
  Outcome outcome = Outcome::NoEvent;
  ExactScalar time;  // meaningful only for At

  static EventTime at(ExactScalar t) { return {Outcome::At, std::move(t)}; }
  static EventTime none() { return {Outcome::NoEvent, {}}; }
  static EventTime always_degenerate() { return {Outcome::AlwaysDegenerate, {}}; }

  bool has_time() const { return outcome == Outcome::At; }
  friend bool operator==(const EventTime&, const EventTime&) = default;
};

/// Root of slope * t + offset = 0, or nullopt when slope is zero.
inline std::optional<ExactScalar> root_of(const PowerDeterminant& d) {
  if (d.slope.is_zero()) return std::nullopt;
  ExactScalar r = -d.offset.to_rational() / d.slope.to_rational();
  return r;
}

/// Time at which four labeled points become co-orthogonal. Roots at or
/// before t = 0 are reported as NoEvent.
inline EventTime flip_time(const std::array<LabeledPoint, 4>& q) {
  const PowerDeterminant d = power_determinant(q);
  if (d.slope.is_zero()) {
    return d.offset.is_zero() ? EventTime::always_degenerate() : EventTime::none();
  }
  ExactScalar root = *root_of(d);
  if (sgn(root) <= 0) return EventTime::none();
  return EventTime::at(std::move(root));
}

struct Ball {
  ExactScalar cx;
  ExactScalar cy;
  ExactScalar radius_sq;
};

/// Exact circumcenter of a non-degenerate triangle, as numerators over a
/// common denominator relative to a: center = a + (nx, ny) / den.
struct CircumcenterParts {
  detail::Dyadic nx, ny, den;
};

inline CircumcenterParts circumcenter_parts(Point a, Point b, Point c) {
  using detail::Dyadic;
  const Dyadic ax(a.x), ay(a.y);
  const Dyadic bx = Dyadic(b.x) - ax, by = Dyadic(b.y) - ay;
  const Dyadic cx = Dyadic(c.x) - ax, cy = Dyadic(c.y) - ay;
  const Dyadic b2 = bx * bx + by * by;
  const Dyadic c2 = cx * cx + cy * cy;
  const Dyadic d = bx * cy - by * cx;
  if (d.is_zero()) throw DegenerateError("circumball: collinear points");
  return {cy * b2 - by * c2, bx * c2 - cx * b2, d + d};
}

inline Ball circumball(Point a, Point b, Point c) {
  const CircumcenterParts parts = circumcenter_parts(a, b, c);
  const ExactScalar den = parts.den.to_rational();
  const ExactScalar ux = parts.nx.to_rational() / den;
  const ExactScalar uy = parts.ny.to_rational() / den;
  Ball ball;
  ball.cx = ExactScalar(a.x) + ux;
  ball.cy = ExactScalar(a.y) + uy;
  ball.radius_sq = ux * ux + uy * uy;
  return ball;
}

/// "num/den" (or "num" for integers) rendering of an exact scalar.
inline std::string to_exact_string(const ExactScalar& v) {
  return v.get_str();
}

}  // namespace meshvor
