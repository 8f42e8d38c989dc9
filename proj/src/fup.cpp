#include "fuplab/fup.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <random>
#include <stdexcept>

#include "fuplab/parallel.hpp"

namespace fuplab {

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

struct FftwPair {
    fftw_plan backward = nullptr;
    fftw_plan forward = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t total = 0;

    FftwPair(int dim, std::int64_t side) {
        total = 1;
        for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(side);
        buf = fftw_alloc_complex(total);
        if (!buf) throw std::bad_alloc();
        int n[3] = {static_cast<int>(side), static_cast<int>(side),
                    static_cast<int>(side)};
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_plan_with_nthreads(worker_count());
        backward = fftw_plan_dft(dim, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        forward = fftw_plan_dft(dim, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        if (!backward || !forward) throw std::runtime_error("FFTW planning failed");
    }
    ~FftwPair() {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        if (backward) fftw_destroy_plan(backward);
        if (forward) fftw_destroy_plan(forward);
        if (buf) fftw_free(buf);
    }
    FftwPair(const FftwPair&) = delete;
    FftwPair& operator=(const FftwPair&) = delete;
};

struct FftwThreadsInit {
    FftwThreadsInit() { fftw_init_threads(); }
};
FftwThreadsInit g_fftw_threads_init;

std::vector<std::size_t> occupied_indices(const GridSet& s) {
    std::vector<std::size_t> idx;
    idx.reserve(s.cell_count());
    for (std::size_t i = 0; i < s.total_cells(); ++i)
        if (s.test(i)) idx.push_back(i);
    return idx;
}

void check_pair(const GridSet& X, const GridSet& Y) {
    if (X.dim() != Y.dim() || X.side() != Y.side())
        throw std::invalid_argument("fup_norm: X and Y must share dim and side");
}

}  // namespace

double trivial_bound(const GridSet& X, const GridSet& Y) {
    check_pair(X, Y);
    double nd = std::pow(static_cast<double>(X.side()), X.dim());
    double b = std::sqrt(static_cast<double>(X.cell_count()) *
                         static_cast<double>(Y.cell_count()) / nd);
    return std::min(1.0, b);
}

FupResult fup_norm(const GridSet& X, const GridSet& Y, double tol, int max_iter) {
    check_pair(X, Y);
    if (X.empty() || Y.empty()) {
        FupResult zero;
        zero.converged = true;
        return zero;
    }
    auto xi = occupied_indices(X);
    auto yi = occupied_indices(Y);
    FftwPair fft(X.dim(), X.side());
    double nd = std::pow(static_cast<double>(X.side()), X.dim());

    std::mt19937 rng(20240915u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::complex<double>> v(yi.size()), w(yi.size());
    std::vector<std::complex<double>> tmpx(xi.size());
    double nv = 0.0;
    for (auto& c : v) {
        c = {unif(rng), unif(rng)};
        nv += std::norm(c);
    }
    nv = std::sqrt(nv);
    for (auto& c : v) c /= nv;

    FupResult res;
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        std::memset(fft.buf, 0, sizeof(fftw_complex) * fft.total);
        for (std::size_t i = 0; i < yi.size(); ++i) {
            fft.buf[yi[i]][0] = v[i].real();
            fft.buf[yi[i]][1] = v[i].imag();
        }
        fftw_execute(fft.backward);
        for (std::size_t i = 0; i < xi.size(); ++i)
            tmpx[i] = {fft.buf[xi[i]][0], fft.buf[xi[i]][1]};
        std::memset(fft.buf, 0, sizeof(fftw_complex) * fft.total);
        for (std::size_t i = 0; i < xi.size(); ++i) {
            fft.buf[xi[i]][0] = tmpx[i].real();
            fft.buf[xi[i]][1] = tmpx[i].imag();
        }
        fftw_execute(fft.forward);
        for (std::size_t i = 0; i < yi.size(); ++i)
            w[i] = std::complex<double>(fft.buf[yi[i]][0], fft.buf[yi[i]][1]) / nd;

        double ray = 0.0, nw = 0.0;
        for (std::size_t i = 0; i < yi.size(); ++i) {
            ray += (std::conj(v[i]) * w[i]).real();
            nw += std::norm(w[i]);
        }
        nw = std::sqrt(nw);
        res.iterations = it;
        res.residual = std::abs(ray - lambda);
        lambda = ray;
        if (nw == 0.0) {  // operator annihilated the iterate
            lambda = 0.0;
            res.converged = true;
            break;
        }
        for (auto& c : w) c /= nw;
        v.swap(w);
        if (it > 1 && res.residual < tol) {
            res.converged = true;
            break;
        }
    }
    res.norm = std::sqrt(std::max(0.0, lambda));
    return res;
}

FupScanResult fup_scan(const std::vector<std::pair<GridSet, GridSet>>& pairs,
                       double tol, int max_iter) {
    FupScanResult out;
    std::vector<double> lw, lz;
    for (const auto& pr : pairs) {
        FupResult r = fup_norm(pr.first, pr.second, tol, max_iter);
        FupScanPoint pt;
        pt.side = pr.first.side();
        pt.norm = r.norm;
        pt.trivial = trivial_bound(pr.first, pr.second);
        pt.iterations = r.iterations;
        out.points.push_back(pt);
        if (r.norm > 0.0) {
            lw.push_back(std::log(static_cast<double>(pt.side)));
            lz.push_back(std::log(r.norm));
        }
    }
    if (lw.size() >= 2) {
        double n = static_cast<double>(lw.size());
        double sw = 0, sz = 0, sww = 0, swz = 0;
        for (std::size_t i = 0; i < lw.size(); ++i) {
            sw += lw[i];
            sz += lz[i];
            sww += lw[i] * lw[i];
            swz += lw[i] * lz[i];
        }
        double denom = n * sww - sw * sw;
        double slope = denom != 0.0 ? (n * swz - sw * sz) / denom : 0.0;
        double icept = (sz - slope * sw) / n;
        out.beta = -slope;
        out.constant = std::exp(icept);
        for (std::size_t i = 0; i < lw.size(); ++i)
            out.max_residual = std::max(out.max_residual,
                                        std::abs(lz[i] - (icept + slope * lw[i])));
    }
    return out;
}

namespace reference {

double fup_norm_dense(const GridSet& X, const GridSet& Y) {
    check_pair(X, Y);
    if (X.empty() || Y.empty()) return 0.0;
    auto xi = occupied_indices(X);
    auto yi = occupied_indices(Y);
    if (xi.size() * yi.size() > 4'000'000)
        throw std::invalid_argument("fup_norm_dense: restricted kernel too large");
    std::int64_t N = X.side();
    int d = X.dim();
    double scale = std::pow(static_cast<double>(N), -0.5 * d);
    const double kTwoPi = 6.28318530717958647692;

    Eigen::MatrixXcd A(xi.size(), yi.size());
    for (std::size_t r = 0; r < xi.size(); ++r) {
        auto xc = X.coords_of(xi[r]);
        for (std::size_t c = 0; c < yi.size(); ++c) {
            auto yc = Y.coords_of(yi[c]);
            std::int64_t dot = 0;
            for (int j = 0; j < d; ++j) dot += xc[j] * yc[j];
            double phase = kTwoPi * static_cast<double>(dot % N) / static_cast<double>(N);
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::complex<double>(std::cos(phase), std::sin(phase)) * scale;
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(0);
}

}  // namespace reference

}  // namespace fuplab
