#include "swlab/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include <fftw3.h>

namespace swlab {

std::string to_string(Backend b) { return b == Backend::spectral ? "spectral" : "link"; }

Backend parse_backend(const std::string& s) {
    if (s == "spectral") return Backend::spectral;
    if (s == "link") return Backend::link;
    throw std::invalid_argument("unknown backend '" + s + "' (expected spectral or link)");
}

void GridSpec::validate() const {
    if (N < 8 || N % 2 != 0) throw std::invalid_argument("grid N must be even and >= 8");
    if (!(a1 > 0) || !(a2 > 0)) throw std::invalid_argument("torus areas must be positive");
    if (rank < 1) throw std::invalid_argument("rank must be >= 1");
    if (backend == Backend::spectral && twisted())
        throw std::invalid_argument("spectral backend requires bidegree (0,0); use the link backend");
}

double GridSpec::length(int axis) const { return std::sqrt(axis < 2 ? a1 : a2); }

double GridSpec::cell_volume() const { return volume() / static_cast<double>(points()); }

std::array<int, 4> GridSpec::coords(std::size_t idx) const {
    std::array<int, 4> c{};
    for (int a = 3; a >= 0; --a) {
        c[a] = static_cast<int>(idx % N);
        idx /= N;
    }
    return c;
}

std::size_t GridSpec::index(const std::array<int, 4>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < 4; ++a) idx = idx * N + static_cast<std::size_t>(((c[a] % N) + N) % N);
    return idx;
}

std::size_t GridSpec::shift(std::size_t idx, int axis, int step) const {
    std::size_t stride = 1;
    for (int a = 3; a > axis; --a) stride *= N;
    const int c = static_cast<int>((idx / stride) % N);
    const int nc = ((c + step) % N + N) % N;
    return idx + (static_cast<std::ptrdiff_t>(nc) - c) * static_cast<std::ptrdiff_t>(stride);
}

double GridSpec::coordinate(std::size_t idx, int axis) const {
    std::size_t stride = 1;
    for (int a = 3; a > axis; --a) stride *= N;
    return static_cast<double>((idx / stride) % N) * spacing(axis);
}

namespace {

struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int>, fftw_plan> plans;

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        const std::size_t total = static_cast<std::size_t>(n) * n * n * n;
        auto* buf = fftw_alloc_complex(total);
        int dims[4] = {n, n, n, n};
        fftw_plan p = fftw_plan_dft(4, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(int n, int sign, Grid& data) {
    if (data.size() != static_cast<std::size_t>(n) * n * n * n)
        throw std::invalid_argument("FFT: grid size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(cache().get(n, sign), p, p);
}

}  // namespace

Spectral::Spectral(const GridSpec& g) : g_(g) {}

void Spectral::forward(Grid& data) const { execute(g_.N, FFTW_FORWARD, data); }

void Spectral::inverse(Grid& data) const {
    execute(g_.N, FFTW_BACKWARD, data);
    const double s = 1.0 / static_cast<double>(g_.points());
    for (auto& v : data) v *= s;
}

int Spectral::wavenumber(int i) const {
    if (2 * i == g_.N) return 0;
    return i < g_.N / 2 ? i : i - g_.N;
}

double Spectral::symbol(int axis, int i) const {
    return 2.0 * std::numbers::pi * wavenumber(i) / g_.length(axis);
}

Grid Spectral::derivative(const Grid& f, int axis) const {
    Grid h = f;
    forward(h);
    const cplx I{0.0, 1.0};
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
        const auto c = g_.coords(idx);
        h[idx] *= I * symbol(axis, c[axis]);
    }
    inverse(h);
    return h;
}

std::array<Grid, 4> Spectral::gradient(const Grid& f) const {
    Grid h = f;
    forward(h);
    const cplx I{0.0, 1.0};
    std::array<Grid, 4> out;
    for (int a = 0; a < 4; ++a) {
        out[a] = h;
        for (std::size_t idx = 0; idx < h.size(); ++idx) out[a][idx] *= I * symbol(a, g_.coords(idx)[a]);
        inverse(out[a]);
    }
    return out;
}

Grid Spectral::laplacian(const Grid& f) const {
    Grid h = f;
    forward(h);
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
        const auto c = g_.coords(idx);
        double k2 = 0;
        for (int a = 0; a < 4; ++a) k2 += symbol(a, c[a]) * symbol(a, c[a]);
        h[idx] *= k2;
    }
    inverse(h);
    return h;
}

Grid Spectral::solve_laplace(const Grid& f, double tol) const {
    Grid h = f;
    forward(h);
    const double scale = static_cast<double>(g_.points());
    double fmax = 0;
    for (auto v : h) fmax = std::max(fmax, std::abs(v) / scale);
    const double cutoff = tol * (1.0 + fmax);
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
        const auto c = g_.coords(idx);
        double k2 = 0;
        for (int a = 0; a < 4; ++a) k2 += symbol(a, c[a]) * symbol(a, c[a]);
        if (k2 == 0.0) {
            if (std::abs(h[idx]) / scale > cutoff) {
                if (idx == 0) throw std::domain_error("solve_laplace: right-hand side has nonzero mean");
                throw std::domain_error("solve_laplace: right-hand side has Nyquist content the discrete Laplacian cannot reach");
            }
            h[idx] = 0;
        } else {
            h[idx] /= k2;
        }
    }
    inverse(h);
    return h;
}

Grid Spectral::shifted_inverse(const Grid& f, double shift) const {
    Grid h = f;
    forward(h);
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
        const auto c = g_.coords(idx);
        double k2 = 0;
        for (int a = 0; a < 4; ++a) k2 += symbol(a, c[a]) * symbol(a, c[a]);
        h[idx] /= (k2 + shift);
    }
    inverse(h);
    return h;
}

}  // namespace swlab
