#pragma once

namespace fj {

inline constexpr int kMaxBesselOrder = 64;
inline constexpr double kMaxBesselArgument = 1e4;

// Integer order n of J_n with |n| <= kMaxBesselOrder.
class BesselOrder {
 public:
  // Throws UnsupportedOrderError when |n| is out of range.
  explicit BesselOrder(int n);

  int value() const noexcept { return n_; }

 private:
  int n_;
};

// Bessel function of the first kind J_n(x) for integer order.
//
// Power series below |x| = 12 (accumulated in long double), Miller backward
// recurrence normalised by J_0 + 2 sum J_2k = 1 above. Negative orders and
// arguments are reduced by parity before evaluation. Absolute error is below
// 1e-12 for |x| <= 100.
//
// Throws DomainError for non-finite x or |x| > kMaxBesselArgument.
double bessel_j(BesselOrder n, double x);

inline double bessel_j(int n, double x) { return bessel_j(BesselOrder(n), x); }

}  // namespace fj
