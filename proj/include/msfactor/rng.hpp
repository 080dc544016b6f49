#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "msfactor/linalg.hpp"

namespace msfactor {

/// Deterministic random source. Draws raw bits from mt19937_64 and maps
/// them to doubles directly, so sequences are reproducible byte-for-byte
/// independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {  // inclusive range
        return lo + engine_() % (hi - lo + 1);
    }

    double gaussian() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform over the complex unit disk.
    linalg::Complex complex_in_disk() {
        const double r = std::sqrt(uniform());
        const double phi = 2.0 * M_PI * uniform();
        return std::polar(r, phi);
    }

    linalg::Complex complex_gaussian() { return {gaussian(), gaussian()}; }

    linalg::ComplexMatrix matrix_in_disk(std::size_t rows, std::size_t cols) {
        linalg::ComplexMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = complex_in_disk();
        return m;
    }

    linalg::ComplexMatrix hermitian(std::size_t n) {
        linalg::ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = uniform(-1.0, 1.0);
            for (std::size_t j = i + 1; j < n; ++j) {
                m(i, j) = complex_in_disk();
                m(j, i) = std::conj(m(i, j));
            }
        }
        return m;
    }

    /// Haar-ish random unitary via Gram-Schmidt of a Gaussian matrix.
    linalg::ComplexMatrix unitary(std::size_t n) {
        linalg::ComplexMatrix g(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g(i, j) = complex_gaussian();
        for (std::size_t k = 0; k < n; ++k) {
            linalg::ComplexVector col = g.column(k);
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < k; ++j) {
                    const linalg::ComplexVector prev = g.column(j);
                    const linalg::Complex c = linalg::dot(prev, col);
                    for (std::size_t i = 0; i < n; ++i) col[i] -= c * prev[i];
                }
            }
            const double nn = linalg::norm(col);
            for (std::size_t i = 0; i < n; ++i) col[i] /= nn;
            g.set_column(k, col);
        }
        return g;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace msfactor
