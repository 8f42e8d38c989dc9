#include "fuplab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "fuplab/parallel.hpp"
#include "fuplab/quadrature.hpp"
#include "fuplab/sphere.hpp"

namespace fuplab {

namespace {

const double kPi = 3.14159265358979323846;

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

std::vector<double> normalized(const std::vector<double>& v) {
    double n = norm2(v);
    if (n == 0.0) throw std::invalid_argument("zero vector cannot be normalized");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// effective radius containing the weight's support (sampling box for
// unbounded radial weights)
double effective_radius(const ModifiedWeight& w) {
    if (w.base.has_unbounded_support()) return 128.0;
    return std::max(4.0, w.base.support_radius());
}

double halton(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

const int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

// Intersection of the line p(t) = x0 + t*dir with the support ball.
struct LineClip {
    bool bounded = true;
    bool empty = false;
    double a = 0.0, b = 0.0;
};

LineClip clip_line(const ModifiedWeight& w, const std::vector<double>& x0,
                   const std::vector<double>& dir) {
    LineClip c;
    if (w.base.has_unbounded_support()) {
        c.bounded = false;
        return c;
    }
    double R = w.base.support_radius();
    double d2 = dot(dir, dir);
    if (R <= 0.0 || d2 == 0.0) {
        c.empty = true;
        return c;
    }
    double bb = dot(x0, dir) / d2;
    double disc = bb * bb - (dot(x0, x0) - R * R) / d2;
    if (disc <= 0.0) {
        c.empty = true;
        return c;
    }
    double sq = std::sqrt(disc);
    c.a = -bb - sq;
    c.b = -bb + sq;
    return c;
}

// |t| = e^u stays squarable in doubles up to u ~ 350; the neglected tail of
// a 1/(t log^2 t) integrand beyond that is below 2/340 of its constant.
const double kLogTailMax = 340.0;

// Integral of a vector integrand over the whole line for integrands decaying
// like 1/(t log^2 t): [-1, 1] directly, |t| > 1 through t = +-e^u.
void integrate_line_many(const std::function<void(double, double*)>& f, int n,
                         double* out, double tol);

// Upper-triangle X-ray transform of D^2 w along x0 + t yhat (plain dt). The
// plurisubharmonicity scan calls this on exactly the lines the certificate
// integrates, so the two see bitwise identical values.
void xray_packed(const ModifiedWeight& w, const std::vector<double>& x0,
                 const std::vector<double>& yhat, double* packed) {
    int d = w.base.dim;
    int npairs = d * (d + 1) / 2;
    std::fill(packed, packed + npairs, 0.0);
    std::vector<double> p(d);
    auto fn = [&](double t, double* o) {
        for (int j = 0; j < d; ++j) p[j] = x0[j] + t * yhat[j];
        auto H = w.derivative(p, 2);
        int idx = 0;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) o[idx++] = H[a * d + b];
    };
    LineClip c = clip_line(w, x0, yhat);
    if (c.bounded && !c.empty)
        integrate_many(fn, npairs, c.a, c.b, packed, 1e-6);
    else if (!c.bounded)
        integrate_line_many(fn, npairs, packed, 1e-6);
}

void unpack_sym(const double* packed, int d, std::vector<double>& M) {
    M.assign(static_cast<std::size_t>(d) * d, 0.0);
    int idx = 0;
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            M[a * d + b] = packed[idx];
            M[b * d + a] = packed[idx];
            ++idx;
        }
}

void integrate_line_many(const std::function<void(double, double*)>& f, int n,
                         double* out, double tol) {
    std::vector<double> core(n), tail(n), b1(n), b2(n);
    integrate_many(f, n, -1.0, 1.0, core.data(), tol);
    auto g = [&](double u, double* o) {
        double t = std::exp(u);
        f(t, b1.data());
        f(-t, b2.data());
        for (int c = 0; c < n; ++c) o[c] = (b1[c] + b2[c]) * t;
    };
    integrate_many(g, n, 0.0, kLogTailMax, tail.data(), tol);
    for (int c = 0; c < n; ++c) out[c] = core[c] + tail[c];
}

// orthonormal basis of the hyperplane orthogonal to unit yhat
std::vector<std::vector<double>> orthogonal_basis(const std::vector<double>& yhat) {
    int d = static_cast<int>(yhat.size());
    std::vector<std::vector<double>> basis;
    for (int j = 0; j < d && static_cast<int>(basis.size()) < d - 1; ++j) {
        std::vector<double> v(d, 0.0);
        v[j] = 1.0;
        double c = dot(v, yhat);
        for (int a = 0; a < d; ++a) v[a] -= c * yhat[a];
        for (const auto& b : basis) {
            double cb = dot(v, b);
            for (int a = 0; a < d; ++a) v[a] -= cb * b[a];
        }
        double n = norm2(v);
        if (n < 1e-8) continue;
        for (int a = 0; a < d; ++a) v[a] /= n;
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

// ------------------------------------------------------- HermitianForm

double HermitianForm::quad(const std::vector<double>& v) const {
    std::complex<double> s = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += at(i, j) * v[j] * v[i];
    return s.real();
}

double HermitianForm::min_eigenvalue() const {
    Eigen::MatrixXcd H(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) H(i, j) = at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    return es.eigenvalues()(0);
}

double HermitianForm::hermitian_defect() const {
    double m = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m = std::max(m, std::abs(at(i, j) - std::conj(at(j, i))));
    return m;
}

void HermitianForm::add(const HermitianForm& o, double c) {
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += c * o.entries[i];
}

// ----------------------------------------------------------- operators

double poisson_extend(const ModifiedWeight& w, const ComplexPoint& z, double tol) {
    int d = w.base.dim;
    double ylen = norm2(z.y);
    if (ylen == 0.0) return w.value(z.x);
    std::vector<double> p(d);
    auto f = [&](double t) {
        for (int j = 0; j < d; ++j) p[j] = z.x[j] + t * z.y[j];
        return w.value(p) / (kPi * (1.0 + t * t));
    };
    LineClip c = clip_line(w, z.x, z.y);
    if (c.empty) return 0.0;
    if (c.bounded) return integrate(f, c.a, c.b, tol).value;
    double out;
    auto fv = [&](double t, double* o) { o[0] = f(t); };
    integrate_line_many(fv, 1, &out, tol);
    return out;
}

double hilbert_restriction(const ModifiedWeight& w, const std::vector<double>& x0,
                           const std::vector<double>& yhat, double t0,
                           double tol) {
    int d = w.base.dim;
    auto u = normalized(yhat);
    std::vector<double> p(d);
    auto fprime = [&](double t) {
        for (int j = 0; j < d; ++j) p[j] = x0[j] + t * u[j];
        auto g = w.derivative(p, 1);
        return dot(g, u);
    };
    // symmetrized principal value: bounded near s = 0
    auto g = [&](double s) { return (fprime(t0 - s) - fprime(t0 + s)) / (kPi * s); };
    LineClip c = clip_line(w, x0, u);
    if (c.empty) return 0.0;
    if (c.bounded) {
        double smax = std::max(std::abs(t0 - c.a), std::abs(t0 - c.b));
        if (smax <= 0.0) return 0.0;
        return integrate(g, 0.0, smax, tol).value;
    }
    auto tail = [&](double uu) {
        double s = std::exp(uu);
        return g(s) * s;
    };
    return integrate(g, 0.0, 1.0, tol).value +
           integrate(tail, 0.0, kLogTailMax, tol).value;
}

double second_deriv_line_integral(const ModifiedWeight& w,
                                  const std::vector<double>& x0,
                                  const std::vector<double>& yhat,
                                  const std::vector<double>& vhat,
                                  double tol) {
    auto u = normalized(yhat);
    auto v = normalized(vhat);
    if (std::abs(dot(u, v)) > 1e-10)
        throw std::invalid_argument(
            "second_deriv_line_integral: vhat must be orthogonal to yhat");
    int d = w.base.dim;
    std::vector<double> p(d);
    auto m = [&](double t) {
        for (int j = 0; j < d; ++j) p[j] = x0[j] + t * u[j];
        auto H = w.derivative(p, 2);
        double s = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s += H[a * d + b] * v[a] * v[b];
        return s;
    };
    LineClip c = clip_line(w, x0, u);
    if (c.empty) return 0.0;
    if (c.bounded) return integrate(m, c.a, c.b, tol).value;
    double out;
    auto mv = [&](double t, double* o) { o[0] = m(t); };
    integrate_line_many(mv, 1, &out, tol);
    return out;
}

double eval_uspec(const USpec& u, const ComplexPoint& z) {
    double out = 0.0;
    for (const auto& term : u) {
        switch (term.kind) {
            case USpecTerm::Kind::ExtendWeight:
                out += term.coef * poisson_extend(*term.w, z);
                break;
            case USpecTerm::Kind::AbsY:
                out += term.coef * norm2(z.y);
                break;
            case USpecTerm::Kind::BracketY: {
                double y2 = dot(z.y, z.y);
                out += term.coef * (std::sqrt(1.0 + y2) - 1.0);
                break;
            }
            case USpecTerm::Kind::LogZInf: {
                double zi = 0.0;
                for (std::size_t j = 0; j < z.x.size(); ++j)
                    zi = std::max(zi, std::hypot(z.x[j], z.y[j]));
                if (zi == 0.0)
                    throw std::invalid_argument("log|z|_inf undefined at z = 0");
                out += term.coef * std::log(zi);
                break;
            }
        }
    }
    return out;
}

HermitianForm complex_hessian(const USpec& u, const ComplexPoint& z) {
    int d = static_cast<int>(z.x.size());
    HermitianForm out(d);
    for (const auto& term : u) {
        switch (term.kind) {
            case USpecTerm::Kind::ExtendWeight: {
                double ylen = norm2(z.y);
                if (ylen == 0.0)
                    throw std::invalid_argument(
                        "complex_hessian: E w term needs y != 0 (use the "
                        "real-locus Hilbert surrogate there)");
                auto yhat = normalized(z.y);
                const ModifiedWeight& w = *term.w;
                std::vector<double> packed(d * (d + 1) / 2);
                xray_packed(w, z.x, yhat, packed.data());
                std::vector<double> M;
                unpack_sym(packed.data(), d, M);
                // P M P with P = I - yhat yhat^t, scaled by 1/(4 pi |y|)
                std::vector<double> PM(d * d, 0.0), PMP(d * d, 0.0);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        double s = 0.0;
                        for (int c = 0; c < d; ++c) {
                            double P = (a == c ? 1.0 : 0.0) - yhat[a] * yhat[c];
                            s += P * M[c * d + b];
                        }
                        PM[a * d + b] = s;
                    }
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        double s = 0.0;
                        for (int c = 0; c < d; ++c) {
                            double P = (c == b ? 1.0 : 0.0) - yhat[c] * yhat[b];
                            s += PM[a * d + c] * P;
                        }
                        PMP[a * d + b] = s;
                    }
                double scale = term.coef / (4.0 * kPi * ylen);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        out.at(a, b) += scale * PMP[a * d + b];
                break;
            }
            case USpecTerm::Kind::AbsY: {
                double ylen = norm2(z.y);
                if (ylen == 0.0)
                    throw std::invalid_argument(
                        "complex_hessian: |y| term singular at y = 0");
                auto yhat = normalized(z.y);
                double scale = term.coef / (4.0 * ylen);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        out.at(a, b) += scale * ((a == b ? 1.0 : 0.0) -
                                                 yhat[a] * yhat[b]);
                break;
            }
            case USpecTerm::Kind::BracketY: {
                double y2 = dot(z.y, z.y);
                double br = std::sqrt(1.0 + y2);
                double scale = term.coef / (4.0 * br * br * br);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        out.at(a, b) += scale * ((a == b ? (1.0 + y2) : 0.0) -
                                                 z.y[a] * z.y[b]);
                break;
            }
            case USpecTerm::Kind::LogZInf: {
                double zi = 0.0;
                for (int j = 0; j < d; ++j)
                    zi = std::max(zi, std::hypot(z.x[j], z.y[j]));
                if (zi == 0.0)
                    throw std::invalid_argument("log|z|_inf undefined at z = 0");
                // log of a single coordinate modulus is pluriharmonic
                break;
            }
        }
    }
    return out;
}

HermitianForm complex_hessian_fd(
    const std::function<double(const ComplexPoint&)>& u, const ComplexPoint& z,
    double h) {
    int d = static_cast<int>(z.x.size());
    if (h <= 0.0) {
        double zn = std::sqrt(dot(z.x, z.x) + dot(z.y, z.y));
        h = 1e-4 * std::max(1.0, zn);
    }
    // real coordinates (x_1..x_d, y_1..y_d)
    auto at = [&](const std::vector<double>& c) {
        ComplexPoint p;
        p.x.assign(c.begin(), c.begin() + d);
        p.y.assign(c.begin() + d, c.end());
        return u(p);
    };
    std::vector<double> c0(2 * d);
    for (int j = 0; j < d; ++j) {
        c0[j] = z.x[j];
        c0[d + j] = z.y[j];
    }
    auto second = [&](int i, int j) {
        std::vector<double> c = c0;
        if (i == j) {
            double f0 = at(c);
            c[i] = c0[i] + h;
            double fp = at(c);
            c[i] = c0[i] - h;
            double fm = at(c);
            return (fp - 2.0 * f0 + fm) / (h * h);
        }
        c[i] = c0[i] + h;
        c[j] = c0[j] + h;
        double fpp = at(c);
        c[j] = c0[j] - h;
        double fpm = at(c);
        c[i] = c0[i] - h;
        double fmm = at(c);
        c[j] = c0[j] + h;
        double fmp = at(c);
        return (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    };
    HermitianForm out(d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double re = 0.25 * (second(j, k) + second(d + j, d + k));
            double im = 0.25 * (second(j, d + k) - second(d + j, k));
            out.at(j, k) = {re, im};
        }
    return out;
}

// -------------------------------------------------------- certificates

namespace {

std::vector<ComplexPoint> cert_samples(const ModifiedWeight& w,
                                       const SampleSpec& spec) {
    int d = w.base.dim;
    double R = effective_radius(w);
    std::vector<ComplexPoint> pts;
    for (int i = 0; i < spec.count; ++i) {
        std::uint64_t idx = spec.seed + 17 + static_cast<std::uint64_t>(i);
        ComplexPoint z;
        z.x.resize(d);
        z.y.resize(d);
        for (int j = 0; j < d; ++j)
            z.x[j] = R * (2.0 * halton(idx, kPrimes[j]) - 1.0);
        double ylen2 = 0.0;
        for (int j = 0; j < d; ++j) {
            z.y[j] = 2.0 * halton(idx, kPrimes[d + j]) - 1.0;
            ylen2 += z.y[j] * z.y[j];
        }
        if (ylen2 < 1e-12) {
            z.y[0] = 1.0;
            ylen2 = 1.0;
        }
        double mag = spec.y_min *
                     std::pow(spec.y_max / spec.y_min,
                              halton(idx, kPrimes[std::min(2 * d, 7)]));
        for (int j = 0; j < d; ++j) z.y[j] *= mag / std::sqrt(ylen2);
        pts.push_back(std::move(z));
    }
    // adversarial points on shell boundaries where pieces join
    int kmin = w.base.k_min(), kmax = w.base.k_max();
    if (kmax >= 0) {
        auto dirs = direction_sample(d, 4);
        for (int k = std::max(0, kmin); k <= kmax; ++k) {
            for (const auto& u : dirs) {
                for (double r : {std::pow(2.0, k), std::pow(2.0, k + 1)}) {
                    ComplexPoint z;
                    z.x.resize(d);
                    z.y.assign(d, 0.0);
                    for (int j = 0; j < d; ++j) z.x[j] = r * u[j];
                    z.y[d - 1] = 0.05;
                    pts.push_back(std::move(z));
                }
            }
        }
    }
    return pts;
}

struct Line {
    std::vector<double> x0;
    std::vector<double> yhat;
};

std::vector<Line> margin_lines(const ModifiedWeight& w, const SampleSpec& spec) {
    int d = w.base.dim;
    double R = effective_radius(w);
    std::vector<Line> lines;
    for (const auto& z : cert_samples(w, spec)) {
        Line l;
        l.x0 = z.x;
        l.yhat = normalized(z.y);
        lines.push_back(std::move(l));
    }
    for (int i = 0; i < spec.line_samples; ++i) {
        std::uint64_t idx = spec.seed + 7919 + static_cast<std::uint64_t>(i);
        Line l;
        l.x0.resize(d);
        std::vector<double> u(d);
        double n2 = 0.0;
        for (int j = 0; j < d; ++j) {
            l.x0[j] = R * (2.0 * halton(idx, kPrimes[j]) - 1.0);
            u[j] = 2.0 * halton(idx, kPrimes[std::min(d + j, 7)]) - 1.0;
            n2 += u[j] * u[j];
        }
        if (n2 < 1e-12) {
            u[0] = 1.0;
            n2 = 1.0;
        }
        for (int j = 0; j < d; ++j) u[j] /= std::sqrt(n2);
        l.yhat = std::move(u);
        lines.push_back(std::move(l));
    }
    return lines;
}

}  // namespace

PropConstants scan_prop_constants(const ModifiedWeight& w, const SampleSpec& spec) {
    auto lines = margin_lines(w, spec);
    PropConstants out;
    double c1 = 0.0, li_min = 1e300, li_max = -1e300;
    std::int64_t n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel num_threads(worker_count()) if (!force_serial())
    {
        double l_c1 = 0.0, l_min = 1e300, l_max = -1e300;
#pragma omp for schedule(dynamic, 2) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            const Line& l = lines[i];
            int d = w.base.dim;
            l_c1 = std::max(l_c1,
                            std::abs(hilbert_restriction(w, l.x0, l.yhat, 0.0)));
            // eigenvalues of the X-ray matrix compressed to yhat-orthogonal,
            // exactly the quantity the Hessian certificate divides by 4 pi |y|
            std::vector<double> packed(d * (d + 1) / 2), M;
            xray_packed(w, l.x0, l.yhat, packed.data());
            unpack_sym(packed.data(), d, M);
            auto basis = orthogonal_basis(l.yhat);
            int nb = static_cast<int>(basis.size());
            Eigen::MatrixXd B(nb, nb);
            for (int a = 0; a < nb; ++a)
                for (int b = 0; b < nb; ++b) {
                    double s = 0.0;
                    for (int r = 0; r < d; ++r)
                        for (int cidx = 0; cidx < d; ++cidx)
                            s += basis[a][r] * M[r * d + cidx] * basis[b][cidx];
                    B(a, b) = s;
                }
            if (nb > 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
                l_min = std::min(l_min, es.eigenvalues()(0));
                l_max = std::max(l_max, es.eigenvalues()(nb - 1));
            }
        }
#pragma omp critical
        {
            c1 = std::max(c1, l_c1);
            li_min = std::min(li_min, l_min);
            li_max = std::max(li_max, l_max);
        }
    }
    out.c1 = c1;
    out.line_integral_min = li_min == 1e300 ? 0.0 : li_min;
    out.line_integral_max = li_max == -1e300 ? 0.0 : li_max;
    out.c2 = std::max(0.0, -out.line_integral_min / kPi);
    return out;
}

PshCertificate psh_certificate(const ModifiedWeight& w, double C,
                               const SampleSpec& spec) {
    if (C < 0.0) throw std::invalid_argument("psh_certificate: C must be >= 0");
    PshCertificate cert;
    cert.constant_C = C;
    cert.sample_points = cert_samples(w, spec);
    cert.min_eig.assign(cert.sample_points.size(), 0.0);

    USpec u;
    USpecTerm ew;
    ew.kind = USpecTerm::Kind::ExtendWeight;
    ew.coef = 1.0;
    ew.w = &w;
    u.push_back(ew);
    USpecTerm ay;
    ay.kind = USpecTerm::Kind::AbsY;
    ay.coef = C;
    u.push_back(ay);

    std::int64_t n = static_cast<std::int64_t>(cert.sample_points.size());
#pragma omp parallel for schedule(dynamic, 2) num_threads(worker_count()) \
    if (!force_serial())
    for (std::int64_t i = 0; i < n; ++i)
        cert.min_eig[i] = complex_hessian(u, cert.sample_points[i]).min_eigenvalue();

    double gmin = 1e300;
    for (double e : cert.min_eig) gmin = std::min(gmin, e);
    cert.global_min = n > 0 ? gmin : 0.0;

    auto lines = margin_lines(w, spec);
    double worst = 0.0;
    std::int64_t nl = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 2) reduction(max : worst) \
    num_threads(worker_count()) if (!force_serial())
    for (std::int64_t i = 0; i < nl; ++i) {
        double h = std::abs(
            hilbert_restriction(w, lines[i].x0, lines[i].yhat, 0.0));
        if (h > worst) worst = h;
    }
    cert.real_locus_margin = C - worst;
    cert.pass = cert.global_min >= -cert.tolerance;
    return cert;
}

PhiContext make_phi_context(const ModifiedWeight& w, double C, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("make_phi_context: rho > 0 required");
    PhiContext ctx;
    ctx.w = w;
    ctx.C = C;
    ctx.rho = rho;
    ctx.omega0.base = make_omega0(w.base.dim);
    SampleSpec spec;
    spec.count = 32;
    spec.line_samples = 48;
    spec.seed = 99;
    auto pc = scan_prop_constants(ctx.omega0, spec);
    double c0 = std::max(pc.c1, pc.c2);
    ctx.c_d = std::min(1.0, c0 > 0.0 ? 1.0 / (4.0 * c0) : 1.0);
    return ctx;
}

std::pair<double, double> phi_kappa(const ComplexPoint& z, const PhiContext& ctx) {
    int d = ctx.w.base.dim;
    double zi = 0.0;
    for (int j = 0; j < d; ++j) zi = std::max(zi, std::hypot(z.x[j], z.y[j]));
    if (zi == 0.0) throw std::invalid_argument("phi_kappa: |z|_inf must be nonzero");
    double ylen = norm2(z.y);
    double br = std::sqrt(1.0 + ylen * ylen);
    double u = poisson_extend(ctx.w, z) + ctx.C * ylen;
    double u0 = ctx.c_d * poisson_extend(ctx.omega0, z) + 0.25 * ylen;
    double phi = 2.0 * u + 20.0 * d * std::log(zi) + ctx.rho * u0 +
                 (ctx.rho / 2.0) * (br - 1.0);
    double kappa = (ctx.rho / 8.0) / (br * br * br);
    return {phi, kappa};
}

void save_certificate(const PshCertificate& cert, const std::string& path) {
    nlohmann::json j;
    j["constant_C"] = cert.constant_C;
    j["global_min"] = cert.global_min;
    j["tolerance"] = cert.tolerance;
    j["pass"] = cert.pass;
    j["real_locus_margin"] = cert.real_locus_margin;
    j["min_eig"] = cert.min_eig;
    j["samples"] = nlohmann::json::array();
    for (const auto& z : cert.sample_points) {
        nlohmann::json p;
        p["x"] = z.x;
        p["y"] = z.y;
        j["samples"].push_back(std::move(p));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_certificate: cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace fuplab
