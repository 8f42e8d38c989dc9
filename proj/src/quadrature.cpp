#include "fuplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fuplab {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
const double kNodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
const double kWeights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

double panel_sum(const std::function<double(double)>& f, double a, double b,
                 int panels) {
    double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * h;
        double half = h / 2.0;
        double acc = 0.0;
        for (int i = 0; i < 8; ++i)
            acc += kWeights[i] * (f(mid - half * kNodes[i]) + f(mid + half * kNodes[i]));
        total += acc * half;
    }
    return total;
}

}  // namespace

double integrate_fixed(const std::function<double(double)>& f, double a,
                       double b, int panels) {
    if (a == b) return 0.0;
    return panel_sum(f, a, b, std::max(1, panels));
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    QuadratureResult res;
    if (a == b) return res;
    int panels = 4;
    double prev = panel_sum(f, a, b, panels);
    for (int iter = 0; iter < 14; ++iter) {
        panels *= 2;
        double cur = panel_sum(f, a, b, panels);
        double diff = std::abs(cur - prev);
        res.value = cur;
        res.error_estimate = diff;
        res.panels = panels;
        if (diff < tol * (1.0 + std::abs(cur))) return res;
        prev = cur;
    }
    return res;  // best effort; error_estimate reports the residual gap
}

QuadratureResult integrate_many(const std::function<void(double, double*)>& f,
                                int n, double a, double b, double* out,
                                double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_many: tol must be positive");
    QuadratureResult res;
    for (int i = 0; i < n; ++i) out[i] = 0.0;
    if (a == b || n == 0) return res;
    std::vector<double> cur(n), prev(n), sample(n);
    auto sum_panels = [&](int panels, std::vector<double>& acc) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            double mid = a + (p + 0.5) * h;
            double half = h / 2.0;
            for (int i = 0; i < 8; ++i) {
                f(mid - half * kNodes[i], sample.data());
                for (int c = 0; c < n; ++c)
                    acc[c] += kWeights[i] * half * sample[c];
                f(mid + half * kNodes[i], sample.data());
                for (int c = 0; c < n; ++c)
                    acc[c] += kWeights[i] * half * sample[c];
            }
        }
    };
    int panels = 4;
    sum_panels(panels, prev);
    for (int iter = 0; iter < 14; ++iter) {
        panels *= 2;
        sum_panels(panels, cur);
        double diff = 0.0, mag = 0.0;
        for (int c = 0; c < n; ++c) {
            diff = std::max(diff, std::abs(cur[c] - prev[c]));
            mag = std::max(mag, std::abs(cur[c]));
        }
        res.error_estimate = diff;
        res.panels = panels;
        if (diff < tol * (1.0 + mag)) break;
        std::swap(prev, cur);
        if (iter == 13) std::swap(prev, cur);  // keep the finest sum
    }
    for (int c = 0; c < n; ++c) out[c] = cur[c];
    return res;
}

QuadratureResult integrate_real_line(const std::function<double(double)>& f,
                                     double tol) {
    const double kHalfPi = 1.57079632679489661923;
    auto g = [&f](double th) {
        double c = std::cos(th);
        double t = std::tan(th);
        return f(t) / (c * c);
    };
    return integrate(g, -kHalfPi, kHalfPi, tol);
}

QuadratureResult principal_value_real_line(const std::function<double(double)>& f,
                                           double t0, double tol) {
    const double kHalfPi = 1.57079632679489661923;
    auto g = [&f, t0](double th) {
        double c = std::cos(th);
        double s = std::tan(th);
        return (f(t0 + s) + f(t0 - s)) / (c * c);
    };
    return integrate(g, 0.0, kHalfPi, tol);
}

}  // namespace fuplab
