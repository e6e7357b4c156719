#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace swlab {

using cplx = std::complex<double>;
using Grid = std::vector<cplx>;

enum class Backend { spectral, link };

std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

/// Uniform grid on T^4 = (ℝ/L1ℤ)^2 × (ℝ/L2ℤ)^2 with L_k = sqrt(a_k).
/// Axis order (x1, y1, x2, y2); flat index ((i0*N + i1)*N + i2)*N + i3.
struct GridSpec {
    int N = 16;
    double a1 = 1.0;
    double a2 = 1.0;
    Backend backend = Backend::spectral;
    int d1 = 0;
    int d2 = 0;
    int rank = 1;

    void validate() const;
    std::size_t points() const { return static_cast<std::size_t>(N) * N * N * N; }
    double area(int factor) const { return factor == 0 ? a1 : a2; }
    double length(int axis) const;
    double spacing(int axis) const { return length(axis) / N; }
    double volume() const { return a1 * a2; }
    double cell_volume() const;
    int degree(int factor) const { return factor == 0 ? d1 : d2; }
    bool twisted() const { return d1 != 0 || d2 != 0; }

    std::array<int, 4> coords(std::size_t idx) const;
    std::size_t index(const std::array<int, 4>& c) const;
    /// Index of the neighbour one step along `axis` (step = ±1), wrapping.
    std::size_t shift(std::size_t idx, int axis, int step) const;
    double coordinate(std::size_t idx, int axis) const;

    bool operator==(const GridSpec& o) const = default;
};

/// Spectral operations on periodic scalar grids (FFTW, 4-D, unnormalized
/// forward transform). Derivative symbols zero the Nyquist mode.
class Spectral {
public:
    explicit Spectral(const GridSpec& g);

    void forward(Grid& data) const;
    void inverse(Grid& data) const;  ///< includes the 1/N^4 normalization

    Grid derivative(const Grid& f, int axis) const;
    std::array<Grid, 4> gradient(const Grid& f) const;
    /// Δ = −Σ D_a ∘ D_a (non-negative).
    Grid laplacian(const Grid& f) const;
    /// Mean-zero solution of Δ v = f. Throws if f has a nonzero mean or
    /// content in modes the derivative symbol annihilates (Nyquist).
    Grid solve_laplace(const Grid& f, double tol = 1e-10) const;
    /// Applies (Δ + shift)^{-1} in Fourier space; shift > 0.
    Grid shifted_inverse(const Grid& f, double shift) const;

    /// Signed wavenumber of index i, or 0 for the Nyquist index.
    int wavenumber(int i) const;
    double symbol(int axis, int i) const;  ///< 2π k / L (0 at Nyquist)

private:
    GridSpec g_;
};

}  // namespace swlab
