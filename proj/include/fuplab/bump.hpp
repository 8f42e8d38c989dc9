#pragma once

namespace fuplab {

/// Order-9 polynomial step: 0 for t <= 0, 1 for t >= 1, with C^4 joins
/// (70t^9 - 315t^8 + 540t^7 - 420t^6 + 126t^5 in between).
/// deriv in 0..4 selects the derivative order.
double smoothstep(double t, int deriv = 0);

/// Monotone ramp from 0 at r <= lo to 1 at r >= hi, built on smoothstep.
double ramp(double r, double lo, double hi, int deriv = 0);

/// Tent profile b(t) = smoothstep(t+1) - smoothstep(t): supported on (-1,1),
/// b(0) = 1, and sum_k b(t - k) = 1 (exact telescoping partition of unity).
double tent(double t, int deriv = 0);

}  // namespace fuplab
