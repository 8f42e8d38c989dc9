#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuplab/grid_set.hpp"

namespace fuplab {

/// Value and first three derivatives of a scalar function at a point;
/// arithmetic propagates derivatives exactly (Leibniz/chain rules), which is
/// how all radial profiles get their order-3 jets in closed form.
struct Jet {
    double v[4] = {0, 0, 0, 0};

    static Jet constant(double c) {
        Jet j;
        j.v[0] = c;
        return j;
    }
    static Jet variable(double t) {
        Jet j;
        j.v[0] = t;
        j.v[1] = 1.0;
        return j;
    }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double c, const Jet& a);
Jet operator/(const Jet& a, const Jet& b);
Jet jet_log(const Jet& a);       // natural log
Jet jet_smoothstep(const Jet& a);
Jet jet_ramp(const Jet& a, double lo, double hi);

/// Shell partition of unity on [0, inf): psi_0 + psi_1 + ... = 1, with
/// supp psi_0 in [0, 4] and supp psi_k in [2^k, 2^(k+2)] for k >= 1.
double psi_shell(int k, double r, int deriv = 0);
Jet psi_shell_jet(int k, double r);

/// The single 1D profile used by all cube bumps (order-9 smoothstep tent).
struct BumpProfile {
    int order = 9;
    std::string id = "smoothstep9";
};

/// One dyadic shell's cube cluster: amplitude * cutoff(|x|) * sum_Q eta_Q,
/// where eta_Q is the tensor tent of width `width` at each stored center and
/// the radial cutoff ramps 0->1 on [cut0, cut1], 1->0 on [cut2, cut3].
/// With cut1 = 2^k and cut2 = 2^(k+1), the piece equals `amplitude` exactly
/// on annulus points fully covered by the selected cubes.
struct CubeCluster {
    int k = 0;
    double amplitude = 0.0;  // nonpositive
    double width = 0.0;      // W_k
    double cut0 = 0, cut1 = 0, cut2 = 0, cut3 = 0;
    std::vector<std::vector<double>> centers;
};

/// Closed-form radial piece. Kinds:
///  "omega0":    amplitude * (-ramp(r,5,10) * r / log(2+r)^2)
///  "shell":     amplitude * cutoff_k(r)   (ramps at 2^(k-1),2^k,2^(k+1),2^(k+2))
///  "psi":       amplitude * psi_shell(k, r)
///  "indicator": amplitude * 1_[r_lo, r_hi]  (projection tests only; its
///               distributional derivatives are reported as 0)
struct RadialPiece {
    std::string kind;
    double amplitude = 0.0;
    int k = 0;
    double r_lo = 0.0, r_hi = 0.0;
};

class SmoothWeight {
public:
    int dim = 1;
    double s = 0.0, alpha = 0.0, mu = 0.0, nu = 0.0;  // build parameters
    BumpProfile profile;
    std::vector<CubeCluster> clusters;
    std::vector<RadialPiece> radials;
    bool warning = false;
    std::string note;

    double value(const std::vector<double>& x) const;
    /// Flattened derivative tensor: order 1 -> d, order 2 -> d*d,
    /// order 3 -> d*d*d entries (symmetric).
    std::vector<double> derivative(const std::vector<double>& x, int order) const;

    /// omega_k: the sum of this weight's shell-k pieces only.
    double shell_value(int k, const std::vector<double>& x) const;
    std::vector<double> shell_derivative(int k, const std::vector<double>& x,
                                         int order) const;

    int k_min() const;
    int k_max() const;
    double support_radius() const;  // 0 for the zero weight
    bool has_unbounded_support() const;
};

/// Per-shell correction data: q_k, p_k, and the angular projection table
/// P_k(dir) = pi_{S^{d-1}} omega_k(dir) with smooth interpolation
/// (periodic cubic spline over theta for d = 2, inverse-multiquadric
/// interpolation on the direction sample for d = 3).
struct ShellCorrection {
    int k = 0;
    double q = 0.0;  // certified inf of the projection over directions
    double p = 0.0;  // p_k = pi of psi_k
    double lipschitz_margin = 0.0;  // amount subtracted for certification
    std::vector<std::vector<double>> dirs;
    std::vector<double> proj;    // P_k at dirs
    std::vector<double> spline;  // d=2: periodic spline second derivatives
    std::vector<double> rbf;     // d=3: interpolation coefficients

    double angular(const std::vector<double>& xhat) const;  // interpolated P_k
};

class ModifiedWeight {
public:
    SmoothWeight base;
    std::vector<ShellCorrection> corrections;
    bool ok = true;
    std::string message;

    double value(const std::vector<double>& x) const;
    /// Base tensors are analytic; correction-piece derivatives use central
    /// finite differences at matched tolerance (the g_k representation is a
    /// tabulated-analytic hybrid).
    std::vector<double> derivative(const std::vector<double>& x, int order) const;

    double correction_value(int k, const std::vector<double>& x) const;  // g_k
    double shell_value(int k, const std::vector<double>& x) const;       // omega~_k
    const ShellCorrection* correction_for(int k) const;
};

struct GrowthReport {
    std::vector<double> radii;
    std::vector<double> g_star;  // G*(r) samples
    double integral_value = 0.0;
    double tail_bound = 0.0;
    bool diverged = false;
    std::vector<double> dyadic_increments;
};

/// Damping-weight construction: lattice cube cover of each dyadic annulus
/// A_k = {2^k <= |x| <= 2^(k+1)} at step W_k/2, cubes meeting Y selected,
/// amplitude -2^k/k^alpha, all inside the guard annulus via the radial
/// cutoff. Requires 3s < alpha < 1; k0 is the smallest k >= 2 with W_k > mu.
SmoothWeight build_damping_weight(const GridSet& Y, double nu, double mu,
                                  double s, double alpha);

/// omega_0 = -ramp(|x|,5,10) * |x| / log(2+|x|)^2, scaled by `amplitude`.
SmoothWeight make_omega0(int dim, double amplitude = 1.0);

double eval_weight(const SmoothWeight& w, const std::vector<double>& x);
double eval_weight(const ModifiedWeight& w, const std::vector<double>& x);

/// pi_{S^{d-1}} f(dir) = int_0^inf f(t dir) t^-2 dt for the shell-k piece.
double spherical_projection(const SmoothWeight& w, int k,
                            const std::vector<double>& dir);
double spherical_projection(const ModifiedWeight& w, int k,
                            const std::vector<double>& dir);
/// p_k: the projection of the psi_k shell profile (direction-independent).
double psi_projection(int k);

/// Runs the shell-projection equalization for every shell k >= 5.
/// dir_table_size controls the angular table resolution.
ModifiedWeight modify_weight(const SmoothWeight& w, int dir_table_size = 0);

GrowthReport growth_report(const SmoothWeight& w);
GrowthReport growth_report(const ModifiedWeight& w);

/// sup over a deterministic sample of |D^a w(x)| <x>^(a-1); the empirical
/// regularity constant of condition |D^a w| <= C <x>^(1-a).
double regularity_scan(const SmoothWeight& w, int a);
double regularity_scan(const ModifiedWeight& w, int a);
/// Same sup for a single shell, scaled by 2^((a-1)k) (per-shell constant).
double shell_regularity(const SmoothWeight& w, int k, int a);

void save_weight(const ModifiedWeight& w, const std::string& path);
ModifiedWeight load_weight(const std::string& path);

}  // namespace fuplab
