// Timing comparison of the parallel kernels against their serial reference
// implementations. Thread counts are controlled through FUPLAB_THREADS, the
// same knob the library honors everywhere.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "fuplab/fup.hpp"
#include "fuplab/grid_set.hpp"
#include "fuplab/parallel.hpp"
#include "fuplab/porosity.hpp"

using namespace fuplab;

namespace {

double time_once(const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const char* name, double serial, double parallel, int threads) {
    std::printf("%-34s %10.3fs %10.3fs  x%.2f (%d threads)\n", name, serial,
                parallel, parallel > 0 ? serial / parallel : 0.0, threads);
}

}  // namespace

int main() {
    int threads = worker_count();
    std::printf("%-34s %11s %11s\n", "kernel", "serial", "parallel");

    {
        GridSet s = gen_sierpinski(4);
        std::vector<double> brute, fast;
        double ts = time_once([&] { brute = reference::hole_distance_brute(s); });
        double tp = time_once([&] {
            HoleDistance hd(s);
            fast = hd.raw();
        });
        double max_diff = 0.0;
        for (std::size_t i = 0; i < brute.size(); ++i)
            max_diff = std::max(max_diff, std::abs(brute[i] - fast[i]));
        row("hole distance (brute vs EDT)", ts, tp, threads);
        std::printf("  max |brute - transform| = %.3g\n", max_diff);
    }

    {
        CantorSpec spec;
        spec.dim = 2;
        spec.base = 3;
        spec.kept_digits = {{0, 2}, {0, 2}};
        spec.depth = 6;
        GridSet s = gen_cantor_product(spec);
        double n1, np;
        setenv("FUPLAB_THREADS", "1", 1);
        double ts = time_once([&] { n1 = fup_norm(s, s).norm; });
        unsetenv("FUPLAB_THREADS");
        double tp = time_once([&] { np = fup_norm(s, s).norm; });
        row("fup norm, N = 729, d = 2", ts, tp, threads);
        std::printf("  |norm(1 thread) - norm| = %.3g\n", std::abs(n1 - np));
    }

    {
        GridSet s = gen_sierpinski(5);
        double r1, rp;
        setenv("FUPLAB_THREADS", "1", 1);
        double ts = time_once([&] {
            r1 = analyze_line_porosity(s, 4.0 / 243.0, 1.0, 16).nu_max;
        });
        unsetenv("FUPLAB_THREADS");
        double tp = time_once([&] {
            rp = analyze_line_porosity(s, 4.0 / 243.0, 1.0, 16).nu_max;
        });
        row("line porosity, 243^2 grid", ts, tp, threads);
        std::printf("  |nu(1 thread) - nu| = %.3g\n", std::abs(r1 - rp));
    }

    return 0;
}
