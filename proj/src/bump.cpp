#include "fuplab/bump.hpp"

#include <stdexcept>

namespace fuplab {

double smoothstep(double t, int deriv) {
    if (deriv < 0 || deriv > 4)
        throw std::invalid_argument("smoothstep: deriv must be in 0..4");
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return deriv == 0 ? 1.0 : 0.0;
    static const double c[10] = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};
    double acc = 0.0;
    for (int p = 9; p >= deriv; --p) {
        double coeff = c[p];
        for (int k = 0; k < deriv; ++k) coeff *= static_cast<double>(p - k);
        acc = acc * t + coeff;
    }
    return acc;
}

double ramp(double r, double lo, double hi, int deriv) {
    if (!(hi > lo)) throw std::invalid_argument("ramp: need hi > lo");
    double w = hi - lo;
    double s = smoothstep((r - lo) / w, deriv);
    for (int k = 0; k < deriv; ++k) s /= w;
    return s;
}

double tent(double t, int deriv) {
    return smoothstep(t + 1.0, deriv) - smoothstep(t, deriv);
}

}  // namespace fuplab
