#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuplab/grid_set.hpp"

namespace fuplab {

enum class PorosityKind { Ball, Line, Box };

/// Ball or segment (in embedded coordinates) for which no hole of the
/// requested radius was found.
struct PorosityWitness {
    std::vector<double> center;     // ball center / segment start
    std::vector<double> direction;  // line kind only (unit vector)
    double scale = 0.0;             // ball diameter / segment length
};

struct PorosityReport {
    PorosityKind kind = PorosityKind::Ball;
    double nu_max = 0.0;  // largest certified nu on the search lattice, <= 1/3
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    int directions_tested = 0;  // line kind only
    bool exact = true;          // false when positions were subsampled
    std::size_t positions_tested = 0;
    std::optional<PorosityWitness> witness;
    // Certification is exact on the stated search lattices (nu in j/192,
    // scales on a 3/2 ladder, positions on the cell lattice); continuum
    // porosity may differ by a bounded constant factor.
    std::string note;
};

/// nu search lattice: {j/192 : 1 <= j <= 64}; 64/192 = 1/3 is the cap.
inline constexpr double kNuStep = 1.0 / 192.0;
inline constexpr int kNuLatticeSize = 64;

/// Exact Euclidean distance from half-cell lattice points to the nearest
/// occupied cell cube, via a squared distance transform on the doubled grid.
class HoleDistance {
public:
    explicit HoleDistance(const GridSet& s);

    std::int64_t doubled_side() const { return m_; }
    int dim() const { return dim_; }

    /// Squared distance in doubled-lattice units at doubled coords e in
    /// [0, 2N]^d. Physical distance = sqrt(value) * cell_width / 2.
    double sq_at(const std::vector<std::int64_t>& e) const;

    /// Exact distance (embedded units) from the half-lattice point nearest
    /// to x, minus the snapping offset (a sound lower bound on the hole
    /// radius at x itself; the field is 1-Lipschitz).
    double lower_bound_at(const std::vector<double>& x) const;

    const std::vector<double>& raw() const { return sq_; }
    double cell_width() const { return cw_; }
    const GridSet* source() const { return src_; }

private:
    const GridSet* src_;
    int dim_;
    std::int64_t m_;
    double cw_;
    std::vector<double> sq_;  // squared distances, doubled units
};

PorosityReport analyze_ball_porosity(const GridSet& s, double alpha0, double alpha1,
                                     double requested_nu = kNuStep);

PorosityReport analyze_line_porosity(const GridSet& s, double alpha0, double alpha1,
                                     int dir_count, double requested_nu = kNuStep);

/// Exact base-L box porosity check at depth n (Han--Schlag style): every
/// occupied L^-n cube of the canonical partition contains an empty
/// L^-(n+1) subcube. Requires side % L^(n+1) == 0.
bool check_box_porosity(const GridSet& s, int L, int n);

/// Max over tested length-R segments of the 1D Lebesgue measure of
/// segment ∩ s, computed exactly per segment by cell-interval clipping.
double line_intersection_profile(const GridSet& s, double R, int segment_count);

/// Exact 1D measure of {t in [0,R] : p + t*u in s} for a single segment.
double segment_intersection_measure(const GridSet& s, const std::vector<double>& p,
                                    const std::vector<double>& u, double R);

struct PowerLawFit {
    double exponent = 0.0;  // gamma
    double constant = 0.0;  // C
    double max_residual = 0.0;
    int points = 0;
};

/// Fits |tau ∩ s| <= C R (alpha0/R)^gamma over a 3/2 ladder of segment
/// lengths; the fitted gamma feeds the damping-weight alpha default.
PowerLawFit fit_line_gamma(const GridSet& s, double alpha0, double alpha1,
                           int segment_count);

/// Fits max_B |s ∩ B| <= C R^d (alpha0/R)^gamma over sampled balls.
PowerLawFit fit_ball_gamma(const GridSet& s, double alpha0, double alpha1);

namespace reference {

/// Brute-force hole distances on the doubled lattice (O(points * cells));
/// the serial oracle for HoleDistance.
std::vector<double> hole_distance_brute(const GridSet& s);

/// Brute-force certification at a single scale: largest nu on the j/192
/// lattice such that every occupied cell center has a hole of radius nu*R
/// within distance R - nu*R. Comparisons match analyze_ball_porosity.
double ball_nu_at_scale_brute(const GridSet& s, double R);

}  // namespace reference

}  // namespace fuplab
