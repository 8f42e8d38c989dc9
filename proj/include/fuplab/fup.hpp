#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fuplab/grid_set.hpp"

namespace fuplab {

struct FupResult {
    double norm = 0.0;      // largest singular value of 1_X F^{-1} 1_Y
    int iterations = 0;
    double residual = 0.0;  // last Rayleigh-quotient difference
    bool converged = false;
};

/// Operator norm of 1_X F^{-1} 1_Y on Z_N^d with the unitary DFT
/// normalization (kernel entries e^{2 pi i x.y / N} N^{-d/2}).
///
/// Cell coordinates of X (spatial) and Y (frequency) are taken as residues
/// mod N; embeddings are ignored here. Power iteration on the normal
/// operator with FFT applications; deterministic start vector.
FupResult fup_norm(const GridSet& X, const GridSet& Y, double tol = 1e-10,
                   int max_iter = 10000);

/// min(1, sqrt(|X| |Y| / N^d)): Cauchy-Schwarz bound, also the unitarity cap.
double trivial_bound(const GridSet& X, const GridSet& Y);

struct FupScanPoint {
    std::int64_t side = 0;
    double norm = 0.0;
    double trivial = 0.0;
    int iterations = 0;
};

struct FupScanResult {
    std::vector<FupScanPoint> points;
    double beta = 0.0;  // fitted exponent in norm ~ C N^-beta
    double constant = 0.0;
    double max_residual = 0.0;  // log-scale fit residual
};

/// Computes fup_norm for each (X, Y) pair and fits norm = C N^-beta by
/// least squares in log-log coordinates.
FupScanResult fup_scan(const std::vector<std::pair<GridSet, GridSet>>& pairs,
                       double tol = 1e-10, int max_iter = 10000);

namespace reference {

/// Dense route: explicit |X| x |Y| kernel matrix and full SVD. Independent
/// of the FFT implementation; feasible up to |X|*|Y| of a few million.
double fup_norm_dense(const GridSet& X, const GridSet& Y);

}  // namespace reference

}  // namespace fuplab
