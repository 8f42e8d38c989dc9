#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fuplab/weight.hpp"

namespace fuplab {

struct ComplexPoint {
    std::vector<double> x, y;  // z = x + iy
};

struct HermitianForm {
    int dim = 0;
    std::vector<std::complex<double>> entries;  // row-major d x d

    explicit HermitianForm(int d = 0)
        : dim(d), entries(static_cast<std::size_t>(d) * d) {}
    std::complex<double>& at(int i, int j) { return entries[i * dim + j]; }
    std::complex<double> at(int i, int j) const { return entries[i * dim + j]; }

    double quad(const std::vector<double>& v) const;  // <Hv, v> for real v
    double min_eigenvalue() const;
    double hermitian_defect() const;  // max entrywise |H - H^*|
    void add(const HermitianForm& o, double c = 1.0);
};

/// E w(x+iy) = (1/pi) int w(x+ty)/(1+t^2) dt; equals w(x) when y = 0.
double poisson_extend(const ModifiedWeight& w, const ComplexPoint& z,
                      double tol = 1e-8);

/// H[(w restricted to the line x0 + t yhat)'](t0), with the 1/pi of the
/// Hilbert transform included.
double hilbert_restriction(const ModifiedWeight& w, const std::vector<double>& x0,
                           const std::vector<double>& yhat, double t0,
                           double tol = 1e-7);

/// int <(D^2 w)(x0 + t yhat) vhat, vhat> dt (plain dt, no 1/pi); vhat must
/// be orthogonal to yhat.
double second_deriv_line_integral(const ModifiedWeight& w,
                                  const std::vector<double>& x0,
                                  const std::vector<double>& yhat,
                                  const std::vector<double>& vhat,
                                  double tol = 1e-7);

struct USpecTerm {
    enum class Kind { ExtendWeight, AbsY, BracketY, LogZInf };
    Kind kind = Kind::AbsY;
    double coef = 1.0;
    const ModifiedWeight* w = nullptr;  // ExtendWeight only
};
using USpec = std::vector<USpecTerm>;

double eval_uspec(const USpec& u, const ComplexPoint& z);

/// Closed-form complex Hessian assembly: the X-ray formula for E w terms,
/// (1/(4|y|))(I - yhat yhat^t) for |y|, (1/4)<y>^-3((1+|y|^2)I - y y^t) for
/// <y>, and 0 for log|z|_inf away from |z|_inf = 0.
HermitianForm complex_hessian(const USpec& u, const ComplexPoint& z);

/// Finite-difference oracle in the 2d real coordinates.
HermitianForm complex_hessian_fd(
    const std::function<double(const ComplexPoint&)>& u, const ComplexPoint& z,
    double h = 0.0);

struct SampleSpec {
    int count = 200;            // off-locus Hessian samples
    double y_min = 1e-3, y_max = 10.0;
    int line_samples = 64;      // real-locus Hilbert margin lines
    std::uint64_t seed = 1;
};

struct PshCertificate {
    std::vector<ComplexPoint> sample_points;
    std::vector<double> min_eig;
    double global_min = 0.0;
    double constant_C = 0.0;
    double tolerance = 1e-6;
    bool pass = false;
    double real_locus_margin = 0.0;  // C - sup over sampled lines |H[(w|l)']|
};

/// Empirical propagation constants: c1 = sup over sampled lines of the
/// Hilbert transform magnitude, c2 = sup of the negative part of the
/// second-derivative line integrals divided by pi. Lines are drawn from the
/// same deterministic sample a certificate with this spec would use.
struct PropConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double line_integral_min = 0.0;  // plain dt normalization
    double line_integral_max = 0.0;
};
PropConstants scan_prop_constants(const ModifiedWeight& w, const SampleSpec& spec);

/// Certifies u = E w + C|y|: min complex-Hessian eigenvalue at the sampled
/// off-locus points, Hilbert-margin surrogate on the real locus.
PshCertificate psh_certificate(const ModifiedWeight& w, double C,
                               const SampleSpec& spec);

struct PhiContext {
    ModifiedWeight w;        // the modified weight inside u
    double C = 0.0;          // certified constant for u = Ew + C|y|
    double rho = 1.0;
    double c_d = 1.0;        // scaling of E omega_0 inside u_0
    ModifiedWeight omega0;   // radial barrier weight
};

/// Computes c_d = min(1, 1/(4 max(c1, c2)(omega_0))) so that u_0 >= 0.
PhiContext make_phi_context(const ModifiedWeight& w, double C, double rho);

/// phi = 2u + 20 d log|z|_inf + rho u_0 + (rho/2)(<y> - 1) and the
/// curvature floor kappa = (rho/8) <y>^-3.
std::pair<double, double> phi_kappa(const ComplexPoint& z, const PhiContext& ctx);

void save_certificate(const PshCertificate& cert, const std::string& path);

}  // namespace fuplab
