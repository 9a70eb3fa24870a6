#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cohlab/complex_matrix.hpp"

namespace cohlab {

/// Seeded random source. Wraps mt19937_64 but maps to doubles and Gaussians
/// explicitly (std::*_distribution output is implementation-defined), so a
/// given seed yields identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive), unbiased enough for sampling work.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Standard complex normal (unit variance per real/imag component).
    cplx complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    /// Matrix with i.i.d. standard complex Gaussian entries.
    ComplexMatrix ginibre(int rows, int cols) {
        ComplexMatrix g(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) g(i, j) = complex_gaussian();
        return g;
    }

    /// Uniform point on the probability simplex (normalized exponentials).
    std::vector<double> simplex_point(int d) {
        std::vector<double> v(static_cast<size_t>(d));
        double total = 0.0;
        for (auto& x : v) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            x = -std::log(u);
            total += x;
        }
        for (auto& x : v) x /= total;
        return v;
    }

    /// Random permutation of {0, ..., n-1} (Fisher-Yates).
    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = uniform_int(0, i);
            std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]);
        }
        return p;
    }

    std::uint64_t raw() { return gen_(); }

  private:
    static constexpr double pi = 3.14159265358979323846;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cohlab
