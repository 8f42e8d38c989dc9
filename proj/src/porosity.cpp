#include "fuplab/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fuplab/parallel.hpp"
#include "fuplab/sphere.hpp"

namespace fuplab {

namespace {

constexpr double kInf = 1e18;
constexpr double kSlack = 1.0 + 1e-12;  // absorbs rounding in squared compares

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void dt1d(const double* f, std::int64_t n, double* d, std::int64_t* v, double* z) {
    std::int64_t k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (std::int64_t q = 1; q < n; ++q) {
        double s;
        while (true) {
            double vq = static_cast<double>(q);
            double vk = static_cast<double>(v[k]);
            s = ((f[q] + vq * vq) - (f[v[k]] + vk * vk)) / (2.0 * (vq - vk));
            if (s <= z[k] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (std::int64_t q = 0; q < n; ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        double dq = static_cast<double>(q - v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

std::vector<std::int64_t> grid_strides(int dim, std::int64_t m) {
    std::vector<std::int64_t> st(dim);
    st[dim - 1] = 1;
    for (int j = dim - 2; j >= 0; --j) st[j] = st[j + 1] * m;
    return st;
}

// In-place d-dimensional squared EDT over an m^d grid.
void edt_grid(std::vector<double>& g, int dim, std::int64_t m) {
    auto stride = grid_strides(dim, m);
    std::int64_t lines = 1;
    for (int j = 1; j < dim; ++j) lines *= m;
    for (int a = 0; a < dim; ++a) {
#pragma omp parallel num_threads(worker_count()) if (!force_serial())
        {
            std::vector<double> buf(m), out(m), z(m + 1);
            std::vector<std::int64_t> v(m);
#pragma omp for schedule(static)
            for (std::int64_t lid = 0; lid < lines; ++lid) {
                std::int64_t base = 0, rem = lid;
                for (int j = dim - 1; j >= 0; --j) {
                    if (j == a) continue;
                    base += (rem % m) * stride[j];
                    rem /= m;
                }
                for (std::int64_t i = 0; i < m; ++i) buf[i] = g[base + i * stride[a]];
                dt1d(buf.data(), m, out.data(), v.data(), z.data());
                for (std::int64_t i = 0; i < m; ++i) g[base + i * stride[a]] = out[i];
            }
        }
    }
}

std::vector<double> scale_ladder(double a0, double a1) {
    if (!(a0 > 0.0) || !(a1 > a0))
        throw std::invalid_argument("porosity scales must satisfy 0 < alpha0 < alpha1");
    std::vector<double> rs;
    for (double R = a0; R < a1 * (1.0 - 1e-9); R *= 1.5) rs.push_back(R);
    rs.push_back(a1);
    return rs;
}

int quantize_nu(double nu) {
    int j = static_cast<int>(std::floor(nu * 192.0 + 1e-9));
    return std::clamp(j, 0, kNuLatticeSize);
}

}  // namespace

HoleDistance::HoleDistance(const GridSet& s)
    : src_(&s), dim_(s.dim()), m_(2 * s.side() + 1), cw_(s.cell_width()) {
    double total_d = std::pow(static_cast<double>(m_), dim_);
    if (total_d > 6.0e7)
        throw std::invalid_argument("HoleDistance: doubled grid exceeds the point cap");
    std::size_t total = 1;
    for (int j = 0; j < dim_; ++j) total *= static_cast<std::size_t>(m_);
    sq_.assign(total, kInf);

    auto stride = grid_strides(dim_, m_);
    int combos = 1;
    for (int j = 0; j < dim_; ++j) combos *= 3;
    // Each occupied cell cube [q, q+1] covers doubled coordinates 2q..2q+2
    // per axis; marking those as sources makes the EDT output the exact
    // squared point-to-cube distance (clamping per axis).
    s.for_each_cell([&](const std::vector<std::int64_t>& q) {
        for (int c = 0; c < combos; ++c) {
            std::int64_t idx = 0;
            int r = c;
            for (int j = dim_ - 1; j >= 0; --j) {
                idx += (2 * q[j] + r % 3) * stride[j];
                r /= 3;
            }
            sq_[static_cast<std::size_t>(idx)] = 0.0;
        }
    });
    if (!s.empty()) edt_grid(sq_, dim_, m_);
}

double HoleDistance::sq_at(const std::vector<std::int64_t>& e) const {
    auto stride = grid_strides(dim_, m_);
    std::int64_t idx = 0;
    for (int j = 0; j < dim_; ++j) {
        if (e[j] < 0 || e[j] >= m_)
            throw std::out_of_range("HoleDistance::sq_at: coordinate out of range");
        idx += e[j] * stride[j];
    }
    return sq_[static_cast<std::size_t>(idx)];
}

double HoleDistance::lower_bound_at(const std::vector<double>& x) const {
    const Embedding& emb = src_->embedding();
    double half = cw_ / 2.0;
    auto stride = grid_strides(dim_, m_);
    std::int64_t idx = 0;
    double off2 = 0.0;
    for (int j = 0; j < dim_; ++j) {
        double u = (x[j] - emb.offset[j]) / half;
        std::int64_t e = std::llround(u);
        e = std::clamp<std::int64_t>(e, 0, m_ - 1);
        double dd = (u - static_cast<double>(e)) * half;
        off2 += dd * dd;
        idx += e * stride[j];
    }
    double sq = sq_[static_cast<std::size_t>(idx)];
    if (sq >= kInf / 2) return kInf;  // empty source set
    return std::max(0.0, std::sqrt(sq) * half - std::sqrt(off2));
}

namespace {

struct BallCertScratch {
    std::vector<double> g;
    std::vector<std::size_t> occ_idx;     // doubled-grid flat index of cell centers
    std::vector<std::vector<std::int64_t>> occ_coords;
};

// Certifies nu-porosity of every occupied cell center at ball radius R:
// some doubled-grid point e with hole radius > nu*R lies within R - nu*R.
bool ball_cert(const HoleDistance& hd, BallCertScratch& scr, double R, double nu,
               std::vector<double>* worst_center) {
    const GridSet& s = *hd.source();
    double cw = hd.cell_width();
    double thr2 = (2.0 * nu * R / cw) * (2.0 * nu * R / cw) * kSlack;
    double rd2 = (2.0 * (R - nu * R) / cw) * (2.0 * (R - nu * R) / cw) * kSlack;
    const std::vector<double>& rho = hd.raw();
    std::size_t total = rho.size();
    scr.g.resize(total);
    std::int64_t n = static_cast<std::int64_t>(total);
    bool any = false;
#pragma omp parallel for schedule(static) reduction(|| : any) \
    num_threads(worker_count()) if (!force_serial())
    for (std::int64_t i = 0; i < n; ++i) {
        bool src = rho[i] > thr2;
        scr.g[i] = src ? 0.0 : kInf;
        any = any || src;
    }
    if (!any) {
        if (worst_center && !scr.occ_coords.empty())
            *worst_center = s.cell_center(scr.occ_coords.front());
        return false;
    }
    edt_grid(scr.g, hd.dim(), hd.doubled_side());

    double worst = -1.0;
    std::size_t worst_i = 0;
    std::int64_t occ_n = static_cast<std::int64_t>(scr.occ_idx.size());
#pragma omp parallel num_threads(worker_count()) if (!force_serial())
    {
        double local = -1.0;
        std::size_t local_i = 0;
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < occ_n; ++i) {
            double d = scr.g[scr.occ_idx[i]];
            if (d > local) {
                local = d;
                local_i = static_cast<std::size_t>(i);
            }
        }
#pragma omp critical
        if (local > worst) {
            worst = local;
            worst_i = local_i;
        }
    }
    if (worst <= rd2) return true;
    if (worst_center) *worst_center = s.cell_center(scr.occ_coords[worst_i]);
    return false;
}

}  // namespace

PorosityReport analyze_ball_porosity(const GridSet& s, double alpha0, double alpha1,
                                     double requested_nu) {
    PorosityReport rep;
    rep.kind = PorosityKind::Ball;
    rep.alpha0 = alpha0;
    rep.alpha1 = alpha1;
    auto ladder = scale_ladder(alpha0, alpha1);
    rep.note = "certified on the j/192 nu lattice and 3/2 scale ladder; "
               "ball centers taken at occupied cell centers";
    if (s.empty()) {
        rep.nu_max = kNuLatticeSize * kNuStep;
        rep.note = "empty set: vacuously porous";
        return rep;
    }
    if (alpha0 < s.cell_width())
        rep.note += "; alpha0 below cell width, sub-cell holes unresolved";

    HoleDistance hd(s);
    BallCertScratch scr;
    auto stride = grid_strides(s.dim(), hd.doubled_side());
    s.for_each_cell([&](const std::vector<std::int64_t>& q) {
        std::int64_t idx = 0;
        for (int j = 0; j < s.dim(); ++j) idx += (2 * q[j] + 1) * stride[j];
        scr.occ_idx.push_back(static_cast<std::size_t>(idx));
        scr.occ_coords.push_back(q);
    });

    int j_min = kNuLatticeSize;
    double worst_scale = ladder.front();
    for (double R : ladder) {
        int lo = 0, hi = kNuLatticeSize + 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (ball_cert(hd, scr, R, mid * kNuStep, nullptr))
                lo = mid;
            else
                hi = mid;
        }
        rep.positions_tested += scr.occ_idx.size();
        if (lo < j_min) {
            j_min = lo;
            worst_scale = R;
        }
    }
    rep.nu_max = j_min * kNuStep;
    if (rep.nu_max < requested_nu - 1e-15) {
        int j_req = std::max(1, static_cast<int>(std::ceil(requested_nu * 192.0 - 1e-9)));
        std::vector<double> center;
        ball_cert(hd, scr, worst_scale, j_req * kNuStep, &center);
        PorosityWitness w;
        w.center = center;
        w.scale = 2.0 * worst_scale;  // ball diameter
        rep.witness = w;
    }
    return rep;
}

PorosityReport analyze_line_porosity(const GridSet& s, double alpha0, double alpha1,
                                     int dir_count, double requested_nu) {
    PorosityReport rep;
    rep.kind = PorosityKind::Line;
    rep.alpha0 = alpha0;
    rep.alpha1 = alpha1;
    auto ladder = scale_ladder(alpha0, alpha1);
    auto dirs = direction_sample(s.dim(), dir_count);
    rep.directions_tested = static_cast<int>(dirs.size());
    rep.note = "segment starts on the cell-center lattice; hole radii are "
               "Lipschitz-sound lower bounds from the half-lattice field";
    if (s.empty()) {
        rep.nu_max = kNuLatticeSize * kNuStep;
        rep.note = "empty set: vacuously porous";
        return rep;
    }

    HoleDistance hd(s);
    int d = s.dim();
    double cw = s.cell_width();
    std::size_t total = s.total_cells();
    double nu_cap = kNuLatticeSize * kNuStep;
    // hole centers are clipped to the embedded box; the set lives inside it,
    // so the clipped distance is a sound lower bound for the original point
    auto box_lo = s.box_lo();
    auto box_hi = s.box_hi();

    double best_nu = nu_cap;
    PorosityWitness best_w;
    bool exact = true;

    for (double R : ladder) {
        std::int64_t steps = static_cast<std::int64_t>(std::ceil(2.0 * R / cw)) + 1;
        std::size_t cap = std::max<std::size_t>(
            1024, static_cast<std::size_t>(6.0e6 / static_cast<double>(steps)));
        std::size_t stride_p = (total + cap - 1) / cap;
        if (stride_p > 1) exact = false;
        std::int64_t npos = static_cast<std::int64_t>((total + stride_p - 1) / stride_p);
        double hole_cap = nu_cap * R;

        for (const auto& u : dirs) {
            rep.positions_tested += static_cast<std::size_t>(npos);
            double dir_best = best_nu;
            std::vector<double> dir_p;
#pragma omp parallel num_threads(worker_count()) if (!force_serial())
            {
                double loc_best = kInf;
                std::vector<double> loc_p;
                std::vector<double> x(d), p(d);
                std::vector<std::int64_t> coords(d);
#pragma omp for schedule(dynamic, 16) nowait
                for (std::int64_t pi = 0; pi < npos; ++pi) {
                    std::size_t idx = static_cast<std::size_t>(pi) * stride_p;
                    std::size_t rem = idx;
                    for (int j = d - 1; j >= 0; --j) {
                        coords[j] = static_cast<std::int64_t>(rem % s.side());
                        rem /= s.side();
                    }
                    p = s.cell_center(coords);
                    double seg_best = 0.0;
                    for (std::int64_t ti = 0; ti <= steps; ++ti) {
                        double t = std::min(R, ti * cw / 2.0);
                        // hole centers are clipped to the embedded box; the set
                        // lives inside it, so both the clipped distance and the
                        // overshoot beyond the box are sound lower bounds.
                        double out2 = 0.0;
                        for (int j = 0; j < d; ++j) {
                            double xv = p[j] + t * u[j];
                            x[j] = std::clamp(xv, box_lo[j], box_hi[j]);
                            out2 += (xv - x[j]) * (xv - x[j]);
                        }
                        double lb = std::max(hd.lower_bound_at(x),
                                             std::sqrt(out2));
                        if (lb > seg_best) seg_best = lb;
                        if (seg_best >= hole_cap) break;
                    }
                    if (seg_best < loc_best) {
                        loc_best = seg_best;
                        loc_p = p;
                    }
                }
#pragma omp critical
                if (loc_best / R < dir_best) {
                    dir_best = loc_best / R;
                    dir_p = loc_p;
                }
            }
            if (dir_best < best_nu) {
                best_nu = dir_best;
                best_w.center = dir_p;
                best_w.direction = u;
                best_w.scale = R;
            }
        }
    }
    rep.exact = exact;
    rep.nu_max = quantize_nu(best_nu) * kNuStep;
    if (rep.nu_max < requested_nu - 1e-15) rep.witness = best_w;
    return rep;
}

namespace {

// (N+1)^d integral image of cell occupancy.
struct PrefixCounts {
    int dim;
    std::int64_t m;  // side + 1
    std::vector<std::int64_t> st;
    std::vector<std::uint64_t> p;

    explicit PrefixCounts(const GridSet& s) : dim(s.dim()), m(s.side() + 1) {
        st = grid_strides(dim, m);
        std::size_t total = 1;
        for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(m);
        p.assign(total, 0);
        s.for_each_cell([&](const std::vector<std::int64_t>& q) {
            std::int64_t idx = 0;
            for (int j = 0; j < dim; ++j) idx += (q[j] + 1) * st[j];
            p[static_cast<std::size_t>(idx)] = 1;
        });
        for (int a = 0; a < dim; ++a) {
            std::int64_t lines = 1;
            for (int j = 1; j < dim; ++j) lines *= m;
            for (std::int64_t lid = 0; lid < lines; ++lid) {
                std::int64_t base = 0, rem = lid;
                for (int j = dim - 1; j >= 0; --j) {
                    if (j == a) continue;
                    base += (rem % m) * st[j];
                    rem /= m;
                }
                for (std::int64_t i = 1; i < m; ++i)
                    p[base + i * st[a]] += p[base + (i - 1) * st[a]];
            }
        }
    }

    // occupied cells in prod_j [lo_j, hi_j)
    std::uint64_t count(const std::vector<std::int64_t>& lo,
                        const std::vector<std::int64_t>& hi) const {
        std::int64_t result = 0;
        for (int mask = 0; mask < (1 << dim); ++mask) {
            std::int64_t idx = 0;
            int bits = 0;
            for (int j = 0; j < dim; ++j) {
                bool use_lo = (mask >> j) & 1;
                idx += (use_lo ? lo[j] : hi[j]) * st[j];
                bits += use_lo;
            }
            std::int64_t term = static_cast<std::int64_t>(p[static_cast<std::size_t>(idx)]);
            result += (bits % 2 == 0) ? term : -term;
        }
        return static_cast<std::uint64_t>(result);
    }
};

}  // namespace

bool check_box_porosity(const GridSet& s, int L, int n) {
    if (L < 2 || n < 0)
        throw std::invalid_argument("check_box_porosity: need L >= 2 and n >= 0");
    std::int64_t ln1 = 1;
    for (int j = 0; j <= n; ++j) {
        ln1 *= L;
        if (ln1 > s.side()) throw std::invalid_argument("check_box_porosity: L^(n+1) exceeds side");
    }
    if (s.side() % ln1 != 0)
        throw std::invalid_argument("check_box_porosity: side must be divisible by L^(n+1)");
    std::int64_t sb = s.side() / ln1;  // level n+1 sub-block side in cells
    std::int64_t b = sb * L;           // level n block side in cells
    std::int64_t nb = s.side() / b;    // blocks per axis

    PrefixCounts pc(s);
    int d = s.dim();
    std::int64_t nblocks = 1;
    for (int j = 0; j < d; ++j) nblocks *= nb;
    int subs = 1;
    for (int j = 0; j < d; ++j) subs *= L;

    bool ok = true;
#pragma omp parallel for schedule(static) num_threads(worker_count()) if (!force_serial())
    for (std::int64_t bi = 0; bi < nblocks; ++bi) {
        if (!ok) continue;
        std::vector<std::int64_t> lo(d), hi(d), slo(d), shi(d);
        std::int64_t rem = bi;
        for (int j = d - 1; j >= 0; --j) {
            lo[j] = (rem % nb) * b;
            hi[j] = lo[j] + b;
            rem /= nb;
        }
        if (pc.count(lo, hi) == 0) continue;
        bool has_empty = false;
        for (int si = 0; si < subs && !has_empty; ++si) {
            int r = si;
            for (int j = d - 1; j >= 0; --j) {
                slo[j] = lo[j] + (r % L) * sb;
                shi[j] = slo[j] + sb;
                r /= L;
            }
            if (pc.count(slo, shi) == 0) has_empty = true;
        }
        if (!has_empty) ok = false;
    }
    return ok;
}

double segment_intersection_measure(const GridSet& s, const std::vector<double>& p,
                                    const std::vector<double>& uin, double R) {
    int d = s.dim();
    std::vector<double> u = uin;
    double norm = 0.0;
    for (double c : u) norm += c * c;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !(R > 0.0))
        throw std::invalid_argument("segment_intersection_measure: bad direction or length");
    for (double& c : u) c /= norm;

    auto lo = s.box_lo();
    auto hi = s.box_hi();
    double t0 = 0.0, t1 = R;
    for (int j = 0; j < d; ++j) {
        if (std::abs(u[j]) < 1e-15) {
            if (p[j] < lo[j] || p[j] > hi[j]) return 0.0;
        } else {
            double ta = (lo[j] - p[j]) / u[j];
            double tb = (hi[j] - p[j]) / u[j];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
    }
    if (t1 <= t0) return 0.0;

    double cw = s.cell_width();
    std::int64_t N = s.side();
    double eps = 1e-12 * (std::abs(t0) + std::abs(t1) + 1.0);
    double tstart = t0 + eps;
    std::vector<std::int64_t> cell(d);
    std::vector<double> tnext(d);
    std::vector<int> step(d);
    for (int j = 0; j < d; ++j) {
        double c = (p[j] + tstart * u[j] - lo[j]) / cw;
        cell[j] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(c)), 0, N - 1);
        if (u[j] > 1e-15) {
            step[j] = 1;
            tnext[j] = ((cell[j] + 1) * cw + lo[j] - p[j]) / u[j];
        } else if (u[j] < -1e-15) {
            step[j] = -1;
            tnext[j] = (cell[j] * cw + lo[j] - p[j]) / u[j];
        } else {
            step[j] = 0;
            tnext[j] = kInf;
        }
    }
    double measure = 0.0;
    double t = t0;
    while (t < t1 - 1e-15) {
        int jmin = 0;
        for (int j = 1; j < d; ++j)
            if (tnext[j] < tnext[jmin]) jmin = j;
        double te = std::min(tnext[jmin], t1);
        if (s.test(cell)) measure += te - t;
        t = te;
        if (te >= t1) break;
        cell[jmin] += step[jmin];
        if (cell[jmin] < 0 || cell[jmin] >= N) break;
        tnext[jmin] += cw / std::abs(u[jmin]);
    }
    return measure;
}

double line_intersection_profile(const GridSet& s, double R, int segment_count) {
    if (s.empty()) return 0.0;
    int d = s.dim();
    auto dirs = direction_sample(d, d == 2 ? 12 : 24);
    std::vector<std::size_t> occ;
    occ.reserve(s.cell_count());
    for (std::size_t idx = 0; idx < s.total_cells(); ++idx)
        if (s.test(idx)) occ.push_back(idx);
    std::size_t per_dir = std::max<std::size_t>(
        1, static_cast<std::size_t>(segment_count) / dirs.size());
    std::size_t stride = std::max<std::size_t>(1, occ.size() / per_dir);

    double best = 0.0;
    std::int64_t ndir = static_cast<std::int64_t>(dirs.size());
    for (std::int64_t di = 0; di < ndir; ++di) {
        const auto& u = dirs[static_cast<std::size_t>(di)];
        std::int64_t npos = static_cast<std::int64_t>((occ.size() + stride - 1) / stride);
#pragma omp parallel for schedule(dynamic, 8) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
        for (std::int64_t pi = 0; pi < npos; ++pi) {
            std::size_t idx = occ[static_cast<std::size_t>(pi) * stride];
            auto coords = s.coords_of(idx);
            auto c = s.cell_center(coords);
            std::vector<double> start(d);
            for (int j = 0; j < d; ++j) start[j] = c[j] - (R / 2.0) * u[j];
            double m = segment_intersection_measure(s, start, u, R);
            if (m > best) best = m;
        }
    }
    return best;
}

namespace {

PowerLawFit fit_loglog(const std::vector<double>& w, const std::vector<double>& z) {
    PowerLawFit fit;
    fit.points = static_cast<int>(w.size());
    if (w.size() < 2) return fit;
    double n = static_cast<double>(w.size());
    double sw = 0, sz = 0, sww = 0, swz = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sw += w[i];
        sz += z[i];
        sww += w[i] * w[i];
        swz += w[i] * z[i];
    }
    double denom = n * sww - sw * sw;
    double slope = denom != 0.0 ? (n * swz - sw * sz) / denom : 0.0;
    double icept = (sz - slope * sw) / n;
    fit.exponent = slope;
    fit.constant = std::exp(icept);
    for (std::size_t i = 0; i < w.size(); ++i)
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(z[i] - (icept + slope * w[i])));
    return fit;
}

}  // namespace

PowerLawFit fit_line_gamma(const GridSet& s, double alpha0, double alpha1,
                           int segment_count) {
    auto ladder = scale_ladder(alpha0, alpha1);
    std::vector<double> w, z;
    for (double R : ladder) {
        double y = line_intersection_profile(s, R, segment_count);
        if (y <= 0.0) continue;
        w.push_back(std::log(alpha0 / R));
        z.push_back(std::log(y) - std::log(R));
    }
    return fit_loglog(w, z);
}

PowerLawFit fit_ball_gamma(const GridSet& s, double alpha0, double alpha1) {
    auto ladder = scale_ladder(alpha0, alpha1);
    int d = s.dim();
    double cw = s.cell_width();
    std::vector<std::size_t> occ;
    occ.reserve(s.cell_count());
    for (std::size_t idx = 0; idx < s.total_cells(); ++idx)
        if (s.test(idx)) occ.push_back(idx);
    if (occ.empty()) return {};
    std::size_t stride = std::max<std::size_t>(1, occ.size() / 256);

    std::vector<double> w, z;
    for (double R : ladder) {
        std::int64_t rc = static_cast<std::int64_t>(std::ceil(R / cw));
        std::int64_t npos = static_cast<std::int64_t>((occ.size() + stride - 1) / stride);
        std::uint64_t best = 0;
#pragma omp parallel for schedule(dynamic, 4) reduction(max : best) \
    num_threads(worker_count()) if (!force_serial())
        for (std::int64_t pi = 0; pi < npos; ++pi) {
            auto qc = s.coords_of(occ[static_cast<std::size_t>(pi) * stride]);
            std::int64_t win = 1;
            for (int j = 0; j < d; ++j) win *= 2 * rc + 1;
            std::uint64_t cnt = 0;
            std::vector<std::int64_t> q(d);
            for (std::int64_t wi = 0; wi < win; ++wi) {
                std::int64_t rem = wi;
                bool in = true;
                double dist2 = 0.0;
                for (int j = d - 1; j >= 0; --j) {
                    std::int64_t off = rem % (2 * rc + 1) - rc;
                    rem /= 2 * rc + 1;
                    q[j] = qc[j] + off;
                    if (q[j] < 0 || q[j] >= s.side()) {
                        in = false;
                        break;
                    }
                    dist2 += static_cast<double>(off) * off;
                }
                if (!in || dist2 * cw * cw > R * R) continue;
                if (s.test(q)) ++cnt;
            }
            if (cnt > best) best = cnt;
        }
        double mass = static_cast<double>(best) * std::pow(cw, d);
        if (mass <= 0.0) continue;
        w.push_back(std::log(alpha0 / R));
        z.push_back(std::log(mass) - d * std::log(R));
    }
    return fit_loglog(w, z);
}

namespace reference {

std::vector<double> hole_distance_brute(const GridSet& s) {
    int d = s.dim();
    std::int64_t m = 2 * s.side() + 1;
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(m);
    std::vector<std::vector<std::int64_t>> occ;
    s.for_each_cell([&](const std::vector<std::int64_t>& q) { occ.push_back(q); });

    std::vector<double> out(total, kInf);
    std::vector<std::int64_t> e(d, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (int j = d - 1; j >= 0; --j) {
            e[j] = static_cast<std::int64_t>(rem % m);
            rem /= m;
        }
        double best = kInf;
        for (const auto& q : occ) {
            double sum = 0.0;
            for (int j = 0; j < d; ++j) {
                std::int64_t lo = 2 * q[j], hi = 2 * q[j] + 2;
                std::int64_t dj = e[j] < lo ? lo - e[j] : (e[j] > hi ? e[j] - hi : 0);
                sum += static_cast<double>(dj) * dj;
            }
            best = std::min(best, sum);
        }
        out[idx] = best;
    }
    return out;
}

double ball_nu_at_scale_brute(const GridSet& s, double R) {
    if (s.empty()) return kNuLatticeSize * kNuStep;
    int d = s.dim();
    std::int64_t m = 2 * s.side() + 1;
    double cw = s.cell_width();
    auto rho = hole_distance_brute(s);
    std::vector<std::vector<std::int64_t>> occ;
    s.for_each_cell([&](const std::vector<std::int64_t>& q) { occ.push_back(q); });
    std::size_t total = rho.size();

    for (int j = kNuLatticeSize; j >= 1; --j) {
        double nu = j * kNuStep;
        double thr2 = (2.0 * nu * R / cw) * (2.0 * nu * R / cw) * kSlack;
        double rd2 = (2.0 * (R - nu * R) / cw) * (2.0 * (R - nu * R) / cw) * kSlack;
        bool all_ok = true;
        for (const auto& q : occ) {
            bool found = false;
            std::vector<std::int64_t> e(d, 0);
            for (std::size_t idx = 0; idx < total && !found; ++idx) {
                if (!(rho[idx] > thr2)) continue;
                std::size_t rem = idx;
                for (int jj = d - 1; jj >= 0; --jj) {
                    e[jj] = static_cast<std::int64_t>(rem % m);
                    rem /= m;
                }
                double dist2 = 0.0;
                for (int jj = 0; jj < d; ++jj) {
                    double dd = static_cast<double>(e[jj] - (2 * q[jj] + 1));
                    dist2 += dd * dd;
                }
                if (dist2 <= rd2) found = true;
            }
            if (!found) {
                all_ok = false;
                break;
            }
        }
        if (all_ok) return nu;
    }
    return 0.0;
}

}  // namespace reference

}  // namespace fuplab
