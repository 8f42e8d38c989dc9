#include "fuplab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fuplab/bump.hpp"
#include "fuplab/parallel.hpp"
#include "fuplab/quadrature.hpp"
#include "fuplab/sphere.hpp"

namespace fuplab {

// ---------------------------------------------------------------- jets

Jet operator+(const Jet& a, const Jet& b) {
    Jet c;
    for (int i = 0; i < 4; ++i) c.v[i] = a.v[i] + b.v[i];
    return c;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet c;
    for (int i = 0; i < 4; ++i) c.v[i] = a.v[i] - b.v[i];
    return c;
}

Jet operator-(const Jet& a) {
    Jet c;
    for (int i = 0; i < 4; ++i) c.v[i] = -a.v[i];
    return c;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet c;
    c.v[0] = a.v[0] * b.v[0];
    c.v[1] = a.v[1] * b.v[0] + a.v[0] * b.v[1];
    c.v[2] = a.v[2] * b.v[0] + 2.0 * a.v[1] * b.v[1] + a.v[0] * b.v[2];
    c.v[3] = a.v[3] * b.v[0] + 3.0 * a.v[2] * b.v[1] + 3.0 * a.v[1] * b.v[2] +
             a.v[0] * b.v[3];
    return c;
}

Jet operator*(double c, const Jet& a) {
    Jet r;
    for (int i = 0; i < 4; ++i) r.v[i] = c * a.v[i];
    return r;
}

namespace {

// value + first three derivatives of 1/b as a function of the jet variable
Jet jet_inverse(const Jet& b) {
    double b0 = b.v[0], b1 = b.v[1], b2 = b.v[2], b3 = b.v[3];
    Jet c;
    c.v[0] = 1.0 / b0;
    c.v[1] = -b1 / (b0 * b0);
    c.v[2] = (2.0 * b1 * b1 - b0 * b2) / (b0 * b0 * b0);
    c.v[3] = (6.0 * b0 * b1 * b2 - b0 * b0 * b3 - 6.0 * b1 * b1 * b1) /
             (b0 * b0 * b0 * b0);
    return c;
}

// Faa di Bruno through order 3 for outer f with derivative values f1..f3
Jet jet_compose(double f0, double f1, double f2, double f3, const Jet& a) {
    double a1 = a.v[1], a2 = a.v[2], a3 = a.v[3];
    Jet c;
    c.v[0] = f0;
    c.v[1] = f1 * a1;
    c.v[2] = f2 * a1 * a1 + f1 * a2;
    c.v[3] = f3 * a1 * a1 * a1 + 3.0 * f2 * a1 * a2 + f1 * a3;
    return c;
}

}  // namespace

Jet operator/(const Jet& a, const Jet& b) { return a * jet_inverse(b); }

Jet jet_log(const Jet& a) {
    double t = a.v[0];
    return jet_compose(std::log(t), 1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t), a);
}

Jet jet_smoothstep(const Jet& a) {
    double t = a.v[0];
    return jet_compose(smoothstep(t, 0), smoothstep(t, 1), smoothstep(t, 2),
                       smoothstep(t, 3), a);
}

Jet jet_ramp(const Jet& a, double lo, double hi) {
    Jet u = (1.0 / (hi - lo)) * (a - Jet::constant(lo));
    u.v[0] = (a.v[0] - lo) / (hi - lo);
    return jet_smoothstep(u);
}

double psi_shell(int k, double r, int deriv) {
    if (k < 0) throw std::invalid_argument("psi_shell: k must be >= 0");
    auto u = [&](int kk) {
        return ramp(r, std::pow(2.0, kk), std::pow(2.0, kk + 1), deriv);
    };
    if (k == 0) return (deriv == 0 ? 1.0 : 0.0) - u(1);
    return u(k) - u(k + 1);
}

Jet psi_shell_jet(int k, double r) {
    Jet rj = Jet::variable(r);
    auto u = [&](int kk) {
        return jet_ramp(rj, std::pow(2.0, kk), std::pow(2.0, kk + 1));
    };
    if (k == 0) return Jet::constant(1.0) - u(1);
    return u(k) - u(k + 1);
}

// ------------------------------------------------------- tensor helpers

namespace {

struct Tensors {
    int dim = 0;
    double v = 0.0;
    std::vector<double> g, h, t;  // grad d, hess d*d, third d*d*d

    explicit Tensors(int d)
        : dim(d), g(d, 0.0), h(d * d, 0.0), t(d * d * d, 0.0) {}

    void add(const Tensors& o, double c = 1.0) {
        v += c * o.v;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * o.g[i];
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += c * o.h[i];
        for (std::size_t i = 0; i < t.size(); ++i) t[i] += c * o.t[i];
    }
};

// tensors of x -> f(|x|) from the jet of f at r = |x|
Tensors radial_tensors(const Jet& f, const std::vector<double>& x) {
    int d = static_cast<int>(x.size());
    Tensors out(d);
    out.v = f.v[0];
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    double r = std::sqrt(r2);
    if (r < 1e-12) return out;  // all radial pieces vanish identically near 0
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = x[i] / r;
    double f1 = f.v[1], f2 = f.v[2], f3 = f.v[3];
    for (int i = 0; i < d; ++i) out.g[i] = f1 * u[i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out.h[i * d + j] = f2 * u[i] * u[j] +
                               (f1 / r) * ((i == j ? 1.0 : 0.0) - u[i] * u[j]);
    double b = (f2 - f1 / r) / r;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double sym = (i == j ? u[k] : 0.0) + (i == k ? u[j] : 0.0) +
                             (j == k ? u[i] : 0.0);
                double t3 = u[i] * u[j] * u[k];
                out.t[(i * d + j) * d + k] = f3 * t3 + b * (sym - 3.0 * t3);
            }
    return out;
}

// product rule: tensors of a*b through order 3
Tensors product_tensors(const Tensors& a, const Tensors& b) {
    int d = a.dim;
    Tensors out(d);
    out.v = a.v * b.v;
    for (int i = 0; i < d; ++i) out.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out.h[i * d + j] = a.h[i * d + j] * b.v + a.g[i] * b.g[j] +
                               a.g[j] * b.g[i] + a.v * b.h[i * d + j];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                out.t[(i * d + j) * d + k] =
                    a.t[(i * d + j) * d + k] * b.v + a.h[i * d + j] * b.g[k] +
                    a.h[i * d + k] * b.g[j] + a.h[j * d + k] * b.g[i] +
                    a.g[i] * b.h[j * d + k] + a.g[j] * b.h[i * d + k] +
                    a.g[k] * b.h[i * d + j] + a.v * b.t[(i * d + j) * d + k];
    return out;
}

double radius_of(const std::vector<double>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::sqrt(r2);
}

Jet cutoff_jet(double r, double c0, double c1, double c2, double c3) {
    Jet rj = Jet::variable(r);
    return jet_ramp(rj, c0, c1) * (Jet::constant(1.0) - jet_ramp(rj, c2, c3));
}

double cutoff_value(double r, double c0, double c1, double c2, double c3) {
    return ramp(r, c0, c1) * (1.0 - ramp(r, c2, c3));
}

// per-cube tent product derivatives, all axes and orders 0..3 at once
Tensors cube_sum_tensors(const CubeCluster& cl, const std::vector<double>& x,
                         int max_order) {
    int d = static_cast<int>(x.size());
    Tensors out(d);
    double half = cl.width / 2.0;
    double scale = 2.0 / cl.width;  // tent argument derivative
    double tb[3][4];
    for (const auto& c : cl.centers) {
        bool hit = true;
        for (int i = 0; i < d; ++i)
            if (std::abs(x[i] - c[i]) >= half) {
                hit = false;
                break;
            }
        if (!hit) continue;
        for (int i = 0; i < d; ++i) {
            double u = scale * (x[i] - c[i]);
            double pw = 1.0;
            for (int o = 0; o <= max_order; ++o) {
                tb[i][o] = tent(u, o) * pw;
                pw *= scale;
            }
        }
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= tb[i][0];
        out.v += v;
        if (max_order < 1) continue;
        for (int i = 0; i < d; ++i) {
            double p = 1.0;
            for (int a = 0; a < d; ++a) p *= tb[a][a == i ? 1 : 0];
            out.g[i] += p;
        }
        if (max_order < 2) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                int ord[3] = {0, 0, 0};
                ++ord[i];
                ++ord[j];
                double p = 1.0;
                for (int a = 0; a < d; ++a) p *= tb[a][ord[a]];
                out.h[i * d + j] += p;
            }
        if (max_order < 3) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    int ord[3] = {0, 0, 0};
                    ++ord[i];
                    ++ord[j];
                    ++ord[k];
                    double p = 1.0;
                    for (int a = 0; a < d; ++a) p *= tb[a][ord[a]];
                    out.t[(i * d + j) * d + k] += p;
                }
    }
    return out;
}

Tensors cluster_tensors(const CubeCluster& cl, const std::vector<double>& x,
                        int max_order) {
    int d = static_cast<int>(x.size());
    double r = radius_of(x);
    if (r <= cl.cut0 || r >= cl.cut3) return Tensors(d);
    Tensors cubes = cube_sum_tensors(cl, x, max_order);
    Jet chi = cutoff_jet(r, cl.cut0, cl.cut1, cl.cut2, cl.cut3);
    Tensors rad = radial_tensors(chi, x);
    Tensors out = product_tensors(rad, cubes);
    Tensors scaled(d);
    scaled.add(out, cl.amplitude);
    return scaled;
}

Jet radial_piece_jet(const RadialPiece& p, double r) {
    if (p.kind == "omega0") {
        if (r <= 5.0) return Jet();
        Jet rj = Jet::variable(r);
        Jet num = jet_ramp(rj, 5.0, 10.0) * rj;
        Jet den = jet_log(Jet::constant(2.0) + rj);
        return (-p.amplitude) * (num / (den * den));
    }
    if (p.kind == "shell") {
        double b = std::pow(2.0, p.k);
        return p.amplitude *
               cutoff_jet(r, b / 2.0, b, 2.0 * b, 4.0 * b);
    }
    if (p.kind == "psi") return p.amplitude * psi_shell_jet(p.k, r);
    if (p.kind == "indicator") {
        Jet j;
        j.v[0] = (r >= p.r_lo && r <= p.r_hi) ? p.amplitude : 0.0;
        return j;  // distributional derivatives reported as 0
    }
    throw std::invalid_argument("unknown radial piece kind: " + p.kind);
}

double radial_piece_value(const RadialPiece& p, double r) {
    return radial_piece_jet(p, r).v[0];
}

bool radial_in_shell(const RadialPiece& p, int k) {
    return (p.kind == "shell" || p.kind == "psi" || p.kind == "indicator") &&
           p.k == k;
}

std::vector<double> flatten(const Tensors& t, int order) {
    switch (order) {
        case 0: return {t.v};
        case 1: return t.g;
        case 2: return t.h;
        case 3: return t.t;
        default: throw std::invalid_argument("derivative order must be 0..3");
    }
}

}  // namespace

// ------------------------------------------------------- SmoothWeight

double SmoothWeight::value(const std::vector<double>& x) const {
    double r = radius_of(x);
    double out = 0.0;
    for (const auto& cl : clusters) {
        if (r <= cl.cut0 || r >= cl.cut3) continue;
        double chi = cutoff_value(r, cl.cut0, cl.cut1, cl.cut2, cl.cut3);
        if (chi == 0.0) continue;
        double b = cube_sum_tensors(cl, x, 0).v;
        out += cl.amplitude * chi * b;
    }
    for (const auto& p : radials) out += radial_piece_value(p, r);
    return out;
}

std::vector<double> SmoothWeight::derivative(const std::vector<double>& x,
                                             int order) const {
    if (order < 0 || order > 3)
        throw std::invalid_argument("derivative order must be 0..3");
    Tensors acc(dim);
    for (const auto& cl : clusters) acc.add(cluster_tensors(cl, x, order));
    double r = radius_of(x);
    for (const auto& p : radials)
        acc.add(radial_tensors(radial_piece_jet(p, r), x));
    return flatten(acc, order);
}

double SmoothWeight::shell_value(int k, const std::vector<double>& x) const {
    double r = radius_of(x);
    double out = 0.0;
    for (const auto& cl : clusters) {
        if (cl.k != k || r <= cl.cut0 || r >= cl.cut3) continue;
        double chi = cutoff_value(r, cl.cut0, cl.cut1, cl.cut2, cl.cut3);
        if (chi == 0.0) continue;
        out += cl.amplitude * chi * cube_sum_tensors(cl, x, 0).v;
    }
    for (const auto& p : radials)
        if (radial_in_shell(p, k)) out += radial_piece_value(p, r);
    return out;
}

std::vector<double> SmoothWeight::shell_derivative(int k,
                                                   const std::vector<double>& x,
                                                   int order) const {
    Tensors acc(dim);
    for (const auto& cl : clusters)
        if (cl.k == k) acc.add(cluster_tensors(cl, x, order));
    double r = radius_of(x);
    for (const auto& p : radials)
        if (radial_in_shell(p, k))
            acc.add(radial_tensors(radial_piece_jet(p, r), x));
    return flatten(acc, order);
}

int SmoothWeight::k_min() const {
    int out = 1 << 20;
    for (const auto& cl : clusters) out = std::min(out, cl.k);
    for (const auto& p : radials)
        if (p.kind != "omega0") out = std::min(out, p.k);
    return out == (1 << 20) ? -1 : out;
}

int SmoothWeight::k_max() const {
    int out = -1;
    for (const auto& cl : clusters) out = std::max(out, cl.k);
    for (const auto& p : radials)
        if (p.kind != "omega0") out = std::max(out, p.k);
    return out;
}

double SmoothWeight::support_radius() const {
    double out = 0.0;
    for (const auto& cl : clusters) out = std::max(out, cl.cut3);
    for (const auto& p : radials) {
        if (p.kind == "shell") out = std::max(out, std::pow(2.0, p.k + 2));
        if (p.kind == "psi") out = std::max(out, std::pow(2.0, p.k + 2));
        if (p.kind == "indicator") out = std::max(out, p.r_hi);
    }
    return out;
}

bool SmoothWeight::has_unbounded_support() const {
    for (const auto& p : radials)
        if (p.kind == "omega0") return true;
    return false;
}

// ------------------------------------------------- build_damping_weight

SmoothWeight build_damping_weight(const GridSet& Y, double nu, double mu,
                                  double s, double alpha) {
    if (!(s > 0.0) || !(alpha > 3.0 * s) || !(alpha < 1.0))
        throw std::invalid_argument(
            "build_damping_weight: parameters must satisfy 0 < 3s < alpha < 1");
    SmoothWeight w;
    w.dim = Y.dim();
    w.s = s;
    w.alpha = alpha;
    w.mu = mu;
    w.nu = nu;

    int k0 = 2;
    while (std::pow(2.0, k0) / std::pow(static_cast<double>(k0), s) <= mu) ++k0;

    double extent = 0.0;
    int d = Y.dim();
    Y.for_each_cell([&](const std::vector<std::int64_t>& q) {
        auto lo = Y.box_lo();
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) {
            double a = lo[j] + q[j] * Y.cell_width();
            double b = a + Y.cell_width();
            double m = std::max(std::abs(a), std::abs(b));
            r2 += m * m;
        }
        extent = std::max(extent, std::sqrt(r2));
    });
    if (extent <= std::pow(2.0, k0)) {
        w.warning = true;
        w.note = "set extent below the first shell; zero weight";
        return w;
    }
    int kmax = static_cast<int>(std::floor(std::log2(extent)));

    auto box_lo = Y.box_lo();
    double cw = Y.cell_width();
    for (int k = k0; k <= kmax; ++k) {
        double W = std::pow(2.0, k) / std::pow(static_cast<double>(k), s);
        double step = W / 2.0;
        double ann_lo = std::pow(2.0, k), ann_hi = std::pow(2.0, k + 1);
        std::set<std::vector<std::int64_t>> lattice;
        Y.for_each_cell([&](const std::vector<std::int64_t>& q) {
            double minr2 = 0.0, maxr2 = 0.0;
            std::vector<double> clo(d), chi(d);
            for (int j = 0; j < d; ++j) {
                clo[j] = box_lo[j] + q[j] * cw;
                chi[j] = clo[j] + cw;
                double mn = (clo[j] <= 0.0 && chi[j] >= 0.0)
                                ? 0.0
                                : std::min(std::abs(clo[j]), std::abs(chi[j]));
                double mx = std::max(std::abs(clo[j]), std::abs(chi[j]));
                minr2 += mn * mn;
                maxr2 += mx * mx;
            }
            if (minr2 > ann_hi * ann_hi || maxr2 < ann_lo * ann_lo) return;
            // every lattice cube whose open support meets this cell
            std::vector<std::int64_t> mlo(d), mhi(d), m(d);
            for (int j = 0; j < d; ++j) {
                mlo[j] = static_cast<std::int64_t>(
                    std::ceil((clo[j] - W / 2.0) / step - 1e-9));
                mhi[j] = static_cast<std::int64_t>(
                    std::floor((chi[j] + W / 2.0) / step + 1e-9));
            }
            m = mlo;
            while (true) {
                lattice.insert(m);
                int j = d - 1;
                while (j >= 0 && ++m[j] > mhi[j]) {
                    m[j] = mlo[j];
                    --j;
                }
                if (j < 0) break;
            }
        });
        if (lattice.empty()) continue;
        CubeCluster cl;
        cl.k = k;
        cl.amplitude = -std::pow(2.0, k) / std::pow(static_cast<double>(k), alpha);
        cl.width = W;
        cl.cut0 = std::pow(2.0, k - 1);
        cl.cut1 = ann_lo;
        cl.cut2 = ann_hi;
        cl.cut3 = std::pow(2.0, k + 2);
        for (const auto& m : lattice) {
            std::vector<double> c(d);
            for (int j = 0; j < d; ++j) c[j] = m[j] * step;
            cl.centers.push_back(std::move(c));
        }
        w.clusters.push_back(std::move(cl));
    }
    if (w.clusters.empty()) {
        w.warning = true;
        w.note = "no annulus intersected the set; zero weight";
    }
    return w;
}

SmoothWeight make_omega0(int dim, double amplitude) {
    SmoothWeight w;
    w.dim = dim;
    RadialPiece p;
    p.kind = "omega0";
    p.amplitude = amplitude;
    w.radials.push_back(p);
    return w;
}

double eval_weight(const SmoothWeight& w, const std::vector<double>& x) {
    return w.value(x);
}
double eval_weight(const ModifiedWeight& w, const std::vector<double>& x) {
    return w.value(x);
}

// ----------------------------------------------- spherical projections

namespace {

std::pair<double, double> shell_radial_support(const SmoothWeight& w, int k) {
    double lo = 1e300, hi = 0.0;
    for (const auto& cl : w.clusters)
        if (cl.k == k) {
            lo = std::min(lo, cl.cut0);
            hi = std::max(hi, cl.cut3);
        }
    for (const auto& p : w.radials) {
        if (!radial_in_shell(p, k)) continue;
        if (p.kind == "shell") {
            lo = std::min(lo, std::pow(2.0, p.k - 1));
            hi = std::max(hi, std::pow(2.0, p.k + 2));
        } else if (p.kind == "psi") {
            lo = std::min(lo, std::pow(2.0, p.k));
            hi = std::max(hi, std::pow(2.0, p.k + 2));
        } else {
            lo = std::min(lo, p.r_lo);
            hi = std::max(hi, p.r_hi);
        }
    }
    if (hi <= 0.0) return {0.0, 0.0};  // empty shell
    return {lo, hi};
}

}  // namespace

double spherical_projection(const SmoothWeight& w, int k,
                            const std::vector<double>& dir) {
    auto [lo, hi] = shell_radial_support(w, k);
    if (hi == 0.0) return 0.0;
    if (lo <= 0.0)
        throw std::invalid_argument("spherical_projection: piece touches the origin");
    std::vector<double> x(w.dim);
    auto f = [&](double t) mutable {
        for (int j = 0; j < w.dim; ++j) x[j] = t * dir[j];
        return w.shell_value(k, x) / (t * t);
    };
    return integrate(f, lo, hi, 1e-9).value;
}

double spherical_projection(const ModifiedWeight& w, int k,
                            const std::vector<double>& dir) {
    double base = 0.0;
    auto [lo, hi] = shell_radial_support(w.base, k);
    if (hi > 0.0) base = spherical_projection(w.base, k, dir);
    const ShellCorrection* c = w.correction_for(k);
    if (!c) return base;
    // pi of g_k = p^-1 * (q - P(dir)) * pi(psi_k) = q - P(dir)
    return base + (c->q - c->angular(dir));
}

double psi_projection(int k) {
    if (k < 1) throw std::invalid_argument("psi_projection: k must be >= 1");
    double lo = std::pow(2.0, k), hi = std::pow(2.0, k + 2);
    auto f = [k](double t) { return psi_shell(k, t) / (t * t); };
    return integrate(f, lo, hi, 1e-12).value;
}

// ------------------------------------------------------ modify_weight

double ShellCorrection::angular(const std::vector<double>& xhat) const {
    std::size_t M = proj.size();
    if (M == 0) return 0.0;
    if (xhat.size() == 2) {
        const double kTwoPi = 6.28318530717958647692;
        double th = std::atan2(xhat[1], xhat[0]);
        if (th < 0.0) th += kTwoPi;
        double h = kTwoPi / static_cast<double>(M);
        double u = th / h;
        std::size_t i = static_cast<std::size_t>(std::floor(u)) % M;
        double a = u - std::floor(u);
        std::size_t ip = (i + 1) % M;
        // periodic cubic spline with precomputed second derivatives
        double y0 = proj[i], y1 = proj[ip];
        double m0 = spline[i], m1 = spline[ip];
        double b = 1.0 - a;
        return b * y0 + a * y1 +
               ((b * b * b - b) * m0 + (a * a * a - a) * m1) * (h * h) / 6.0;
    }
    // d = 3: inverse multiquadric interpolation over the direction sample
    double eps = 2.0 / std::sqrt(12.5663706143591729539 / static_cast<double>(M));
    double out = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            double df = xhat[a] - dirs[j][a];
            d2 += df * df;
        }
        out += rbf[j] / std::sqrt(1.0 + eps * eps * d2);
    }
    return out;
}

namespace {

std::vector<double> periodic_spline_moments(const std::vector<double>& y,
                                            double h) {
    // cyclic tridiagonal system for natural periodic cubic spline M values
    std::size_t n = y.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
        A(i, im) = 1.0;
        A(i, i) = 4.0;
        A(i, ip) += 1.0;
        rhs(i) = 6.0 * (y[ip] - 2.0 * y[i] + y[im]) / (h * h);
    }
    Eigen::VectorXd m = A.partialPivLu().solve(rhs);
    return std::vector<double>(m.data(), m.data() + n);
}

}  // namespace

ModifiedWeight modify_weight(const SmoothWeight& w, int dir_table_size) {
    if (w.dim < 2 || w.dim > 3)
        throw std::invalid_argument("modify_weight: dim must be 2 or 3");
    ModifiedWeight out;
    out.base = w;
    int M = dir_table_size > 0 ? dir_table_size : (w.dim == 2 ? 2048 : 400);

    int kmax = w.k_max();
    for (int k = 5; k <= kmax; ++k) {
        auto [lo, hi] = shell_radial_support(w, k);
        if (hi == 0.0) continue;
        ShellCorrection c;
        c.k = k;
        c.dirs.resize(M);
        c.proj.resize(M);
        if (w.dim == 2) {
            const double kTwoPi = 6.28318530717958647692;
            for (int i = 0; i < M; ++i)
                c.dirs[i] = {std::cos(kTwoPi * i / M), std::sin(kTwoPi * i / M)};
        } else {
            double golden = (1.0 + std::sqrt(5.0)) / 2.0;
            const double kTwoPi = 6.28318530717958647692;
            for (int i = 0; i < M; ++i) {
                double z = 1.0 - (2.0 * i + 1.0) / M;
                double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                double th = kTwoPi * i / golden;
                c.dirs[i] = {r * std::cos(th), r * std::sin(th), z};
            }
        }
#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_count()) \
    if (!force_serial())
        for (int i = 0; i < M; ++i)
            c.proj[i] = spherical_projection(w, k, c.dirs[i]);

        double scale = 0.0;
        for (double p : c.proj) scale = std::max(scale, std::abs(p));
        double pmin = c.proj[0];
        for (double p : c.proj) pmin = std::min(pmin, p);
        // Lipschitz-in-direction margin from table slopes
        double h_dir;
        double L = 0.0;
        if (w.dim == 2) {
            h_dir = 6.28318530717958647692 / M;
            for (int i = 0; i < M; ++i) {
                int ip = (i + 1) % M, im = (i + M - 1) % M;
                L = std::max(L, std::abs(c.proj[ip] - c.proj[im]) / (2.0 * h_dir));
            }
        } else {
            h_dir = std::sqrt(12.5663706143591729539 / M);
            for (int i = 1; i < M; ++i) {
                double d2 = 0.0;
                for (int a = 0; a < 3; ++a) {
                    double df = c.dirs[i][a] - c.dirs[i - 1][a];
                    d2 += df * df;
                }
                double dd = std::sqrt(d2);
                if (dd > 1e-12)
                    L = std::max(L, std::abs(c.proj[i] - c.proj[i - 1]) / dd);
            }
        }
        c.lipschitz_margin = L * h_dir / 2.0;
        c.q = pmin - c.lipschitz_margin;
        c.p = psi_projection(k);
        if (c.lipschitz_margin > 0.05 * (scale + 1e-300)) {
            out.ok = false;
            out.message = "direction sample too coarse to certify the shell "
                          "projection inf; increase dir_table_size";
        }
        if (scale == 0.0) continue;  // zero shell needs no correction
        double pmax = c.proj[0];
        for (double p : c.proj) pmax = std::max(pmax, p);
        if (pmax - pmin < 1e-11 * scale) continue;  // already constant (radial)
        if (w.dim == 2) {
            c.spline = periodic_spline_moments(c.proj,
                                               6.28318530717958647692 / M);
        } else {
            double eps = 2.0 / h_dir;
            Eigen::MatrixXd A(M, M);
            for (int i = 0; i < M; ++i)
                for (int j = 0; j < M; ++j) {
                    double d2 = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        double df = c.dirs[i][a] - c.dirs[j][a];
                        d2 += df * df;
                    }
                    A(i, j) = 1.0 / std::sqrt(1.0 + eps * eps * d2);
                }
            Eigen::VectorXd rhs(M);
            for (int i = 0; i < M; ++i) rhs(i) = c.proj[i];
            Eigen::VectorXd coef = A.partialPivLu().solve(rhs);
            c.rbf.assign(coef.data(), coef.data() + M);
        }
        out.corrections.push_back(std::move(c));
    }
    return out;
}

// ----------------------------------------------------- ModifiedWeight

const ShellCorrection* ModifiedWeight::correction_for(int k) const {
    for (const auto& c : corrections)
        if (c.k == k) return &c;
    return nullptr;
}

double ModifiedWeight::correction_value(int k, const std::vector<double>& x) const {
    const ShellCorrection* c = correction_for(k);
    if (!c) return 0.0;
    double r = radius_of(x);
    double psi = psi_shell(k, r);
    if (psi == 0.0) return 0.0;
    std::vector<double> xhat(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) xhat[j] = x[j] / r;
    return (1.0 / c->p) * psi * (c->q - c->angular(xhat));
}

double ModifiedWeight::value(const std::vector<double>& x) const {
    double out = base.value(x);
    for (const auto& c : corrections) out += correction_value(c.k, x);
    return out;
}

double ModifiedWeight::shell_value(int k, const std::vector<double>& x) const {
    return base.shell_value(k, x) + correction_value(k, x);
}

std::vector<double> ModifiedWeight::derivative(const std::vector<double>& x,
                                               int order) const {
    std::vector<double> out = base.derivative(x, order);
    if (corrections.empty()) return out;
    auto corr = [&](const std::vector<double>& p) {
        double v = 0.0;
        for (const auto& c : corrections) v += correction_value(c.k, p);
        return v;
    };
    int d = base.dim;
    double r = radius_of(x);
    if (order == 0) {
        out[0] += corr(x);
        return out;
    }
    double h = (order == 3 ? 1e-3 : 1e-4) * std::max(1.0, r);
    std::vector<double> p = x;
    if (order == 1) {
        for (int i = 0; i < d; ++i) {
            p[i] = x[i] + h;
            double fp = corr(p);
            p[i] = x[i] - h;
            double fm = corr(p);
            p[i] = x[i];
            out[i] += (fp - fm) / (2.0 * h);
        }
        return out;
    }
    auto hess_fd = [&](const std::vector<double>& at, std::vector<double>& H) {
        std::vector<double> q = at;
        double f0 = corr(q);
        for (int i = 0; i < d; ++i) {
            q[i] = at[i] + h;
            double fp = corr(q);
            q[i] = at[i] - h;
            double fm = corr(q);
            q[i] = at[i];
            H[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
            for (int j = i + 1; j < d; ++j) {
                q[i] = at[i] + h;
                q[j] = at[j] + h;
                double fpp = corr(q);
                q[j] = at[j] - h;
                double fpm = corr(q);
                q[i] = at[i] - h;
                double fmm = corr(q);
                q[j] = at[j] + h;
                double fmp = corr(q);
                q[i] = at[i];
                q[j] = at[j];
                double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                H[i * d + j] = v;
                H[j * d + i] = v;
            }
        }
    };
    if (order == 2) {
        std::vector<double> H(d * d, 0.0);
        hess_fd(x, H);
        for (int i = 0; i < d * d; ++i) out[i] += H[i];
        return out;
    }
    // order 3: central difference of the FD Hessian
    std::vector<double> Hp(d * d), Hm(d * d);
    for (int k3 = 0; k3 < d; ++k3) {
        std::vector<double> at = x;
        at[k3] = x[k3] + h;
        hess_fd(at, Hp);
        at[k3] = x[k3] - h;
        hess_fd(at, Hm);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out[(i * d + j) * d + k3] += (Hp[i * d + j] - Hm[i * d + j]) / (2.0 * h);
    }
    return out;
}

// ------------------------------------------------------ growth report

namespace {

template <typename W>
GrowthReport growth_report_impl(const W& w, int dim, double support,
                                bool unbounded, double amp_max) {
    GrowthReport rep;
    auto base_dirs = direction_sample(dim, dim == 2 ? 16 : 48);
    std::vector<std::vector<double>> dirs;
    for (const auto& u : base_dirs) {
        dirs.push_back(u);
        std::vector<double> neg(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) neg[j] = -u[j];
        dirs.push_back(neg);
    }
    double Rmax;
    if (unbounded)
        Rmax = std::max(4.0 * support, std::pow(2.0, 18));
    else if (support == 0.0)
        Rmax = 1.0;
    else
        Rmax = 2.0 * support;

    auto g_star = [&](double r) {
        if (r <= 0.0) return 0.0;
        double best = 0.0;
        std::int64_t n = static_cast<std::int64_t>(dirs.size());
#pragma omp parallel for schedule(dynamic) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
        for (std::int64_t i = 0; i < n; ++i) {
            std::vector<double> x(dim);
            auto f = [&](double t) {
                for (int j = 0; j < dim; ++j) x[j] = t * r * dirs[i][j];
                return std::abs(eval_weight(w, x));
            };
            double g = integrate_fixed(f, 0.5, 2.0, 24);
            if (g > best) best = g;
        }
        return best;
    };

    // dyadic segments [2^j, 2^(j+1)] from 1/4 up to Rmax, plus [0, 1/4]
    int jmax = static_cast<int>(std::ceil(std::log2(Rmax)));
    double total = 0.0;
    {
        auto f = [&](double r) {
            double g = g_star(r);
            return g / (1.0 + r * r);
        };
        total += integrate_fixed(f, 0.0, 0.25, 4);
        for (int j = -2; j < jmax; ++j) {
            double a = std::pow(2.0, j), b = std::pow(2.0, j + 1);
            double inc = integrate_fixed(f, a, b, 4);
            rep.dyadic_increments.push_back(inc);
            total += inc;
            rep.radii.push_back(b);
            rep.g_star.push_back(g_star(b));
        }
    }
    rep.integral_value = total;
    if (unbounded)
        rep.tail_bound = amp_max / std::log(Rmax);
    else
        rep.tail_bound = support > 0.0 ? 3.0 * amp_max / Rmax : 0.0;

    const auto& inc = rep.dyadic_increments;
    if (inc.size() >= 6) {
        double tail3 = 0.0, prev3 = 0.0;
        for (std::size_t i = inc.size() - 3; i < inc.size(); ++i) tail3 += inc[i];
        for (std::size_t i = inc.size() - 6; i < inc.size() - 3; ++i) prev3 += inc[i];
        if (prev3 > 0.0 && tail3 >= 0.98 * prev3) rep.diverged = true;
    }
    return rep;
}

double max_amplitude(const SmoothWeight& w) {
    double a = 0.0;
    for (const auto& cl : w.clusters) a = std::max(a, std::abs(cl.amplitude));
    for (const auto& p : w.radials) a = std::max(a, std::abs(p.amplitude));
    return a;
}

}  // namespace

GrowthReport growth_report(const SmoothWeight& w) {
    return growth_report_impl(w, w.dim, w.support_radius(),
                              w.has_unbounded_support(), max_amplitude(w));
}

GrowthReport growth_report(const ModifiedWeight& w) {
    return growth_report_impl(w, w.base.dim, w.base.support_radius(),
                              w.base.has_unbounded_support(),
                              max_amplitude(w.base));
}

// --------------------------------------------------- regularity scans

namespace {

std::vector<std::vector<double>> scan_points(const SmoothWeight& w,
                                             const std::vector<int>& shells) {
    std::vector<std::vector<double>> pts;
    int d = w.dim;
    for (const auto& cl : w.clusters) {
        if (!shells.empty() &&
            std::find(shells.begin(), shells.end(), cl.k) == shells.end())
            continue;
        std::size_t stride = std::max<std::size_t>(1, cl.centers.size() / 64);
        for (std::size_t ci = 0; ci < cl.centers.size(); ci += stride) {
            const auto& c = cl.centers[ci];
            pts.push_back(c);
            for (int j = 0; j < d; ++j) {
                for (double off : {cl.width / 4.0, 0.45 * cl.width,
                                   -cl.width / 4.0, -0.45 * cl.width}) {
                    auto p = c;
                    p[j] += off;
                    pts.push_back(p);
                }
            }
        }
    }
    for (const auto& rp : w.radials) {
        if (!shells.empty() && !(radial_in_shell(rp, shells.front())))
            continue;
        double lo, hi;
        if (rp.kind == "omega0") {
            lo = 5.0;
            hi = 1024.0;
        } else if (rp.kind == "indicator") {
            continue;  // distributional; excluded from smooth scans
        } else {
            lo = std::pow(2.0, rp.k - 1);
            hi = std::pow(2.0, rp.k + 2);
        }
        auto dirs = direction_sample(d, d == 1 ? 1 : 8);
        for (int i = 0; i <= 64; ++i) {
            double r = lo + (hi - lo) * i / 64.0;
            for (const auto& u : dirs) {
                std::vector<double> p(d);
                for (int j = 0; j < d; ++j) p[j] = r * u[j];
                pts.push_back(p);
            }
        }
    }
    return pts;
}

double tensor_max_abs(const std::vector<double>& t) {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

double regularity_scan(const SmoothWeight& w, int a) {
    if (a < 0 || a > 3) throw std::invalid_argument("regularity_scan: a must be 0..3");
    auto pts = scan_points(w, {});
    double best = 0.0;
    std::int64_t n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
    for (std::int64_t i = 0; i < n; ++i) {
        double val = tensor_max_abs(w.derivative(pts[i], a));
        double jr = std::sqrt(1.0 + radius_of(pts[i]) * radius_of(pts[i]));
        double scaled = val * std::pow(jr, a - 1);
        if (scaled > best) best = scaled;
    }
    return best;
}

double regularity_scan(const ModifiedWeight& w, int a) {
    if (a < 0 || a > 3) throw std::invalid_argument("regularity_scan: a must be 0..3");
    auto pts = scan_points(w.base, {});
    // correction supports: radial probes per shell across the psi_k annulus
    int d = w.base.dim;
    for (const auto& c : w.corrections) {
        double lo = std::pow(2.0, c.k), hi = std::pow(2.0, c.k + 2);
        auto dirs = direction_sample(d, 8);
        for (int i = 0; i <= 32; ++i) {
            double r = lo + (hi - lo) * i / 32.0;
            for (const auto& u : dirs) {
                std::vector<double> p(d);
                for (int j = 0; j < d; ++j) p[j] = r * u[j];
                pts.push_back(p);
            }
        }
    }
    double best = 0.0;
    std::int64_t n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
    for (std::int64_t i = 0; i < n; ++i) {
        double val = tensor_max_abs(w.derivative(pts[i], a));
        double jr = std::sqrt(1.0 + radius_of(pts[i]) * radius_of(pts[i]));
        double scaled = val * std::pow(jr, a - 1);
        if (scaled > best) best = scaled;
    }
    return best;
}

double shell_regularity(const SmoothWeight& w, int k, int a) {
    auto pts = scan_points(w, {k});
    double best = 0.0;
    std::int64_t n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
    for (std::int64_t i = 0; i < n; ++i) {
        double val = tensor_max_abs(w.shell_derivative(k, pts[i], a));
        if (val > best) best = val;
    }
    return best * std::pow(2.0, (a - 1) * k);
}

// ----------------------------------------------------------- file I/O

void save_weight(const ModifiedWeight& w, const std::string& path) {
    nlohmann::json j;
    j["dim"] = w.base.dim;
    j["s"] = w.base.s;
    j["alpha"] = w.base.alpha;
    j["mu"] = w.base.mu;
    j["nu"] = w.base.nu;
    j["profile"] = w.base.profile.id;
    j["warning"] = w.base.warning;
    j["note"] = w.base.note;
    j["ok"] = w.ok;
    j["message"] = w.message;
    j["clusters"] = nlohmann::json::array();
    for (const auto& cl : w.base.clusters) {
        nlohmann::json c;
        c["k"] = cl.k;
        c["amplitude"] = cl.amplitude;
        c["width"] = cl.width;
        c["cut"] = {cl.cut0, cl.cut1, cl.cut2, cl.cut3};
        c["centers"] = cl.centers;
        j["clusters"].push_back(std::move(c));
    }
    j["radials"] = nlohmann::json::array();
    for (const auto& p : w.base.radials) {
        nlohmann::json r;
        r["kind"] = p.kind;
        r["amplitude"] = p.amplitude;
        r["k"] = p.k;
        r["r_lo"] = p.r_lo;
        r["r_hi"] = p.r_hi;
        j["radials"].push_back(std::move(r));
    }
    j["corrections"] = nlohmann::json::array();
    for (const auto& c : w.corrections) {
        nlohmann::json cc;
        cc["k"] = c.k;
        cc["q"] = c.q;
        cc["p"] = c.p;
        cc["lipschitz_margin"] = c.lipschitz_margin;
        cc["dirs"] = c.dirs;
        cc["proj"] = c.proj;
        cc["spline"] = c.spline;
        cc["rbf"] = c.rbf;
        j["corrections"].push_back(std::move(cc));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_weight: cannot open " + path);
    out << j.dump(2) << "\n";
}

ModifiedWeight load_weight(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_weight: cannot open " + path);
    nlohmann::json j;
    in >> j;
    ModifiedWeight w;
    w.base.dim = j.at("dim").get<int>();
    w.base.s = j.value("s", 0.0);
    w.base.alpha = j.value("alpha", 0.0);
    w.base.mu = j.value("mu", 0.0);
    w.base.nu = j.value("nu", 0.0);
    w.base.warning = j.value("warning", false);
    w.base.note = j.value("note", std::string());
    w.ok = j.value("ok", true);
    w.message = j.value("message", std::string());
    for (const auto& c : j.at("clusters")) {
        CubeCluster cl;
        cl.k = c.at("k").get<int>();
        cl.amplitude = c.at("amplitude").get<double>();
        cl.width = c.at("width").get<double>();
        auto cut = c.at("cut");
        cl.cut0 = cut[0];
        cl.cut1 = cut[1];
        cl.cut2 = cut[2];
        cl.cut3 = cut[3];
        cl.centers = c.at("centers").get<std::vector<std::vector<double>>>();
        w.base.clusters.push_back(std::move(cl));
    }
    for (const auto& r : j.at("radials")) {
        RadialPiece p;
        p.kind = r.at("kind").get<std::string>();
        p.amplitude = r.at("amplitude").get<double>();
        p.k = r.value("k", 0);
        p.r_lo = r.value("r_lo", 0.0);
        p.r_hi = r.value("r_hi", 0.0);
        w.base.radials.push_back(std::move(p));
    }
    for (const auto& cc : j.at("corrections")) {
        ShellCorrection c;
        c.k = cc.at("k").get<int>();
        c.q = cc.at("q").get<double>();
        c.p = cc.at("p").get<double>();
        c.lipschitz_margin = cc.value("lipschitz_margin", 0.0);
        c.dirs = cc.at("dirs").get<std::vector<std::vector<double>>>();
        c.proj = cc.at("proj").get<std::vector<double>>();
        c.spline = cc.value("spline", std::vector<double>());
        c.rbf = cc.value("rbf", std::vector<double>());
        w.corrections.push_back(std::move(c));
    }
    return w;
}

}  // namespace fuplab
