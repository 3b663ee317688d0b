#ifndef GSNMF_TESTS_SUPPORT_HPP
#define GSNMF_TESTS_SUPPORT_HPP

// Random instance generators and small reference computations shared by the tests.

#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testing {

using gsnmf::Matrix;
using gsnmf::Vector;

struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }

    Matrix uniform_matrix(Eigen::Index r, Eigen::Index c, double lo = 0.0, double hi = 1.0) {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    Matrix normal_matrix(Eigen::Index r, Eigen::Index c) {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
        return m;
    }

    Vector normal_vector(Eigen::Index n) { return normal_matrix(n, 1).col(0); }

    /// Symmetric, zero diagonal, each pair present with probability `density`.
    Matrix symmetric_weights(Eigen::Index n, double density = 0.6) {
        Matrix w = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (uniform() < density) w(i, j) = w(j, i) = uniform(0.05, 1.0);
        return w;
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), engine);
        return p;
    }

    /// Every row gets type 0..k at random; each type keeps at least one row.
    std::vector<int> marker_types(std::size_t n, int k) {
        std::vector<int> t(n);
        for (auto& x : t) x = integer(0, k);
        for (int r = 1; r <= k && static_cast<std::size_t>(r) <= n; ++r) t[static_cast<std::size_t>(r - 1)] = r;
        return t;
    }

    std::mt19937_64 engine;
};

/// Central differences of a scalar function of a matrix.
inline Matrix central_difference(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-6) {
    Matrix g(x.rows(), x.cols());
    Matrix y = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double old = y(i, j);
            y(i, j) = old + h;
            const double up = f(y);
            y(i, j) = old - h;
            const double down = f(y);
            y(i, j) = old;
            g(i, j) = (up - down) / (2.0 * h);
        }
    }
    return g;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

/// Cosine computed from scratch, used as the oracle for every distance check.
inline double cosine(const Vector& x, const Vector& y) {
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xy += x(i) * y(i);
        xx += x(i) * x(i);
        yy += y(i) * y(i);
    }
    return xy / (std::sqrt(xx) * std::sqrt(yy));
}

inline Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(perm[i]));
    return out;
}

/// Fraction of rows whose label agrees with the truth after the best matching of labels.
inline double purity(const std::vector<int>& found, const std::vector<int>& truth, int k) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 1);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < found.size(); ++i)
            if (perm[static_cast<std::size_t>(found[i] - 1)] == truth[i]) ++hits;
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(found.size());
}

/// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("gsnmf-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing

#endif
