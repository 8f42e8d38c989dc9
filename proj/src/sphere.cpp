#include "fuplab/sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace fuplab {

namespace {

const double kPi = 3.14159265358979323846;

bool contains(const std::vector<std::vector<double>>& dirs,
              const std::vector<double>& u) {
    for (const auto& v : dirs) {
        double dot = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) dot += u[j] * v[j];
        if (std::abs(std::abs(dot) - 1.0) < 1e-12) return true;  // same line
    }
    return false;
}

void push_unique(std::vector<std::vector<double>>& dirs, std::vector<double> u) {
    double norm = 0.0;
    for (double c : u) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : u) c /= norm;
    if (!contains(dirs, u)) dirs.push_back(std::move(u));
}

}  // namespace

std::vector<std::vector<double>> direction_sample(int dim, int n) {
    if (n < 1) throw std::invalid_argument("direction_sample: n must be positive");
    std::vector<std::vector<double>> dirs;
    if (dim == 1) {
        dirs.push_back({1.0});
        return dirs;
    }
    if (dim == 2) {
        for (int j = 0; j < n; ++j) {
            double th = kPi * j / n;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        push_unique(dirs, {1.0, 0.0});
        push_unique(dirs, {0.0, 1.0});
        push_unique(dirs, {1.0, 1.0});
        push_unique(dirs, {1.0, -1.0});
        return dirs;
    }
    if (dim == 3) {
        double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int j = 0; j < n; ++j) {
            double z = 1.0 - (2.0 * j + 1.0) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = 2.0 * kPi * j / golden;
            dirs.push_back({r * std::cos(th), r * std::sin(th), z});
        }
        push_unique(dirs, {1, 0, 0});
        push_unique(dirs, {0, 1, 0});
        push_unique(dirs, {0, 0, 1});
        push_unique(dirs, {1, 1, 0});
        push_unique(dirs, {1, -1, 0});
        push_unique(dirs, {1, 0, 1});
        push_unique(dirs, {1, 0, -1});
        push_unique(dirs, {0, 1, 1});
        push_unique(dirs, {0, 1, -1});
        push_unique(dirs, {1, 1, 1});
        push_unique(dirs, {1, 1, -1});
        push_unique(dirs, {1, -1, 1});
        push_unique(dirs, {1, -1, -1});
        return dirs;
    }
    throw std::invalid_argument("direction_sample: dim must be 1..3");
}

}  // namespace fuplab
