#include "swlab/field_calculus.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace swlab {

namespace {

const cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// e01,e02,e03,e12,e13,e23
int pair_index(int a, int b) {
    static const int table[4][4] = {{-1, 0, 1, 2}, {-1, -1, 3, 4}, {-1, -1, -1, 5}, {-1, -1, -1, -1}};
    return table[a][b];
}

void require_kind(const Field& f, FormType k, const char* op) {
    if (f.kind != k)
        throw std::invalid_argument(std::string(op) + ": expected a " + to_string(k) + " field, got " +
                                    to_string(f.kind));
}

void require_grid(const GridSpec& a, const GridSpec& b, const char* op) {
    if (!(a == b)) throw std::invalid_argument(std::string(op) + ": grid mismatch");
}

}  // namespace

int component_count(FormType k) {
    switch (k) {
        case FormType::k00: return 1;
        case FormType::k10: return 2;
        case FormType::k01: return 2;
        case FormType::k20: return 1;
        case FormType::k02: return 1;
        case FormType::k1: return 4;
        case FormType::k2: return 6;
        case FormType::k3: return 4;
    }
    return 0;
}

double component_weight(FormType k) {
    switch (k) {
        case FormType::k10:
        case FormType::k01: return 2.0;
        case FormType::k20:
        case FormType::k02: return 4.0;
        default: return 1.0;
    }
}

std::string to_string(FormType k) {
    switch (k) {
        case FormType::k00: return "k00";
        case FormType::k10: return "k10";
        case FormType::k01: return "k01";
        case FormType::k20: return "k20";
        case FormType::k02: return "k02";
        case FormType::k1: return "k1";
        case FormType::k2: return "k2";
        case FormType::k3: return "k3";
    }
    return "?";
}

std::string to_string(Fiber f) {
    switch (f) {
        case Fiber::scalar: return "scalar";
        case Fiber::section: return "section";
        case Fiber::endo: return "endo";
    }
    return "?";
}

FormType parse_form_type(const std::string& s) {
    for (auto k : {FormType::k00, FormType::k10, FormType::k01, FormType::k20, FormType::k02, FormType::k1,
                   FormType::k2, FormType::k3})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown form kind '" + s + "'");
}

Fiber parse_fiber(const std::string& s) {
    for (auto f : {Fiber::scalar, Fiber::section, Fiber::endo})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown fiber '" + s + "'");
}

// Field ------------------------------------------------------------------

Field::Field(const GridSpec& g, FormType k, Fiber f) : grid(g), kind(k), fiber(f) {
    data.assign(static_cast<std::size_t>(components() * fiber_dim()), Grid(g.points(), cplx{}));
}

int Field::fiber_dim() const {
    switch (fiber) {
        case Fiber::scalar: return 1;
        case Fiber::section: return grid.rank;
        case Fiber::endo: return grid.rank * grid.rank;
    }
    return 1;
}

Eigen::MatrixXcd Field::value(int comp, std::size_t p) const {
    const int r = rank();
    if (fiber == Fiber::endo) {
        Eigen::MatrixXcd m(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) m(i, j) = at(comp, i * r + j)[p];
        return m;
    }
    Eigen::MatrixXcd v(fiber_dim(), 1);
    for (int i = 0; i < fiber_dim(); ++i) v(i, 0) = at(comp, i)[p];
    return v;
}

void Field::set_value(int comp, std::size_t p, const Eigen::MatrixXcd& m) {
    const int r = rank();
    if (fiber == Fiber::endo) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) at(comp, i * r + j)[p] = m(i, j);
    } else {
        for (int i = 0; i < fiber_dim(); ++i) at(comp, i)[p] = m(i, 0);
    }
}

bool Field::same_shape(const Field& o) const {
    return grid == o.grid && kind == o.kind && fiber == o.fiber && data.size() == o.data.size();
}

Field& Field::operator+=(const Field& o) {
    if (!same_shape(o)) throw std::invalid_argument("field addition: shape mismatch");
    for (std::size_t c = 0; c < data.size(); ++c)
        for (std::size_t p = 0; p < data[c].size(); ++p) data[c][p] += o.data[c][p];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    if (!same_shape(o)) throw std::invalid_argument("field subtraction: shape mismatch");
    for (std::size_t c = 0; c < data.size(); ++c)
        for (std::size_t p = 0; p < data[c].size(); ++p) data[c][p] -= o.data[c][p];
    return *this;
}

Field& Field::operator*=(cplx s) {
    for (auto& g : data)
        for (auto& v : g) v *= s;
    return *this;
}

Field constant_field(const GridSpec& g, FormType k, Fiber f, cplx value) {
    Field out(g, k, f);
    const int r = out.rank();
    for (int c = 0; c < out.components(); ++c) {
        if (f == Fiber::endo) {
            for (int i = 0; i < r; ++i) std::fill(out.at(c, i * r + i).begin(), out.at(c, i * r + i).end(), value);
        } else {
            for (int e = 0; e < out.fiber_dim(); ++e) std::fill(out.at(c, e).begin(), out.at(c, e).end(), value);
        }
    }
    return out;
}

// Connection ---------------------------------------------------------------

Connection::Connection(const GridSpec& g) : grid(g), potential(g, FormType::k1, Fiber::endo) { g.validate(); }

double Connection::skew_defect() const {
    double worst = 0;
    for (int a = 0; a < 4; ++a)
        for (std::size_t p = 0; p < grid.points(); ++p) {
            const auto m = potential.value(a, p);
            worst = std::max(worst, (m + m.adjoint()).cwiseAbs().maxCoeff());
        }
    return worst;
}

cplx background_link(const GridSpec& g, int axis, std::size_t p) {
    const int factor = axis / 2;
    const int d = g.degree(factor);
    if (d == 0) return 1.0;
    const double B = 2.0 * kPi * d / g.area(factor);
    const double h = g.spacing(axis);
    const int xaxis = 2 * factor;
    if (axis % 2 == 1) return std::exp(-I * B * g.coordinate(p, xaxis) * h);
    // x-link: trivial except across the seam, where the transition function enters
    const auto c = g.coords(p);
    if (c[static_cast<std::size_t>(xaxis)] != g.N - 1) return 1.0;
    return std::exp(I * B * g.length(xaxis) * g.coordinate(p, xaxis + 1));
}

LinkSet::LinkSet(const Connection& A) : r_(A.grid.rank) {
    const auto& g = A.grid;
    if (A.has_explicit_links()) {
        u_ = A.links;
        return;
    }
    const std::size_t rr = static_cast<std::size_t>(r_ * r_);
    u_.assign(4 * rr, Grid(g.points()));
    for (int a = 0; a < 4; ++a) {
        const double h = g.spacing(a);
        for (std::size_t p = 0; p < g.points(); ++p) {
            const std::size_t q = g.shift(p, a, 1);
            const cplx bg = background_link(g, a, p);
            if (r_ == 1) {
                const cplx mid = 0.5 * (A.potential.at(a)[p] + A.potential.at(a)[q]);
                u_[static_cast<std::size_t>(a)][p] = bg * std::exp(h * mid);
                continue;
            }
            const Eigen::MatrixXcd mid = 0.5 * (A.potential.value(a, p) + A.potential.value(a, q));
            const Eigen::MatrixXcd U = bg * (h * mid).exp();
            for (int i = 0; i < r_; ++i)
                for (int j = 0; j < r_; ++j) u_[a * rr + static_cast<std::size_t>(i * r_ + j)][p] = U(i, j);
        }
    }
}

Eigen::MatrixXcd LinkSet::at(int axis, std::size_t p) const {
    Eigen::MatrixXcd m(r_, r_);
    const std::size_t rr = static_cast<std::size_t>(r_ * r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) m(i, j) = u_[axis * rr + static_cast<std::size_t>(i * r_ + j)][p];
    return m;
}

// Covariant derivatives -----------------------------------------------------

namespace {

Field nabla_spectral(const Connection& A, const Field& f, int axis) {
    Spectral sp(f.grid);
    Field out(f.grid, f.kind, f.fiber);
    for (std::size_t c = 0; c < f.data.size(); ++c) out.data[c] = sp.derivative(f.data[c], axis);
    if (f.fiber == Fiber::scalar) return out;
    const int r = f.grid.rank;
    const auto& pot = A.potential;
    for (int c = 0; c < f.components(); ++c) {
        for (std::size_t p = 0; p < f.grid.points(); ++p) {
            if (f.fiber == Fiber::section) {
                for (int i = 0; i < r; ++i) {
                    cplx s = 0;
                    for (int j = 0; j < r; ++j) s += pot.at(axis, i * r + j)[p] * f.at(c, j)[p];
                    out.at(c, i)[p] += s;
                }
            } else {
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < r; ++j) {
                        cplx s = 0;
                        for (int k = 0; k < r; ++k)
                            s += pot.at(axis, i * r + k)[p] * f.at(c, k * r + j)[p] -
                                 f.at(c, i * r + k)[p] * pot.at(axis, k * r + j)[p];
                        out.at(c, i * r + j)[p] += s;
                    }
            }
        }
    }
    return out;
}

Field nabla_link(const Connection& A, const Field& f, int axis) {
    if (f.fiber == Fiber::scalar) {
        Spectral sp(f.grid);
        Field out(f.grid, f.kind, f.fiber);
        for (std::size_t c = 0; c < f.data.size(); ++c) out.data[c] = sp.derivative(f.data[c], axis);
        return out;
    }
    const LinkSet U(A);
    const auto& g = f.grid;
    const int r = g.rank;
    const double inv2h = 1.0 / (2.0 * g.spacing(axis));
    Field out(g, f.kind, f.fiber);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const std::size_t fwd = g.shift(p, axis, 1);
        const std::size_t bwd = g.shift(p, axis, -1);
        if (r == 1) {
            const cplx uf = U.scalar(axis, p), ub = U.scalar(axis, bwd);
            for (int c = 0; c < f.components(); ++c) {
                const auto& src = f.at(c);
                if (f.fiber == Fiber::section)
                    out.at(c)[p] = (uf * src[fwd] - std::conj(ub) * src[bwd]) * inv2h;
                else
                    out.at(c)[p] = (src[fwd] - src[bwd]) * inv2h;
            }
            continue;
        }
        const Eigen::MatrixXcd Uf = U.at(axis, p), Ub = U.at(axis, bwd);
        for (int c = 0; c < f.components(); ++c) {
            Eigen::MatrixXcd v;
            if (f.fiber == Fiber::section)
                v = (Uf * f.value(c, fwd) - Ub.adjoint() * f.value(c, bwd)) * inv2h;
            else
                v = (Uf * f.value(c, fwd) * Uf.adjoint() - Ub.adjoint() * f.value(c, bwd) * Ub) * inv2h;
            out.set_value(c, p, v);
        }
    }
    return out;
}

// ½(∇_x ± i∇_y) on factor k, as a linear combination of two derivative fields.
Field combine(const Field& dx, const Field& dy, cplx sy) {
    Field out = dx;
    for (std::size_t c = 0; c < out.data.size(); ++c)
        for (std::size_t p = 0; p < out.data[c].size(); ++p) out.data[c][p] = 0.5 * (dx.data[c][p] + sy * dy.data[c][p]);
    return out;
}

// Copy component `from` of f into component `to` of out with coefficient s (accumulating).
void accumulate(Field& out, int to, const Field& f, int from, cplx s) {
    for (int e = 0; e < f.fiber_dim(); ++e) {
        auto& dst = out.at(to, e);
        const auto& src = f.at(from, e);
        for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += s * src[p];
    }
}

}  // namespace

Field nabla(const Connection& A, const Field& f, int axis) {
    require_grid(A.grid, f.grid, "nabla");
    if (axis < 0 || axis > 3) throw std::invalid_argument("nabla: axis out of range");
    if (A.grid.backend == Backend::spectral && !A.has_explicit_links()) return nabla_spectral(A, f, axis);
    return nabla_link(A, f, axis);
}

Field dbar(const Connection& A, const Field& f) {
    if (f.kind == FormType::k00) {
        Field out(f.grid, FormType::k01, f.fiber);
        for (int k = 0; k < 2; ++k) accumulate(out, k, combine(nabla(A, f, 2 * k), nabla(A, f, 2 * k + 1), I), 0, 1.0);
        return out;
    }
    if (f.kind == FormType::k01) {
        const Field z1 = combine(nabla(A, f, 0), nabla(A, f, 1), I);
        const Field z2 = combine(nabla(A, f, 2), nabla(A, f, 3), I);
        Field out(f.grid, FormType::k02, f.fiber);
        accumulate(out, 0, z1, 1, 1.0);
        accumulate(out, 0, z2, 0, -1.0);
        return out;
    }
    throw std::invalid_argument("dbar: kind mismatch (expected k00 or k01, got " + to_string(f.kind) + ")");
}

Field partial(const Connection& A, const Field& f) {
    if (f.kind == FormType::k00) {
        Field out(f.grid, FormType::k10, f.fiber);
        for (int k = 0; k < 2; ++k) accumulate(out, k, combine(nabla(A, f, 2 * k), nabla(A, f, 2 * k + 1), -I), 0, 1.0);
        return out;
    }
    if (f.kind == FormType::k10) {
        const Field z1 = combine(nabla(A, f, 0), nabla(A, f, 1), -I);
        const Field z2 = combine(nabla(A, f, 2), nabla(A, f, 3), -I);
        Field out(f.grid, FormType::k20, f.fiber);
        accumulate(out, 0, z1, 1, 1.0);
        accumulate(out, 0, z2, 0, -1.0);
        return out;
    }
    throw std::invalid_argument("partial: kind mismatch (expected k00 or k10, got " + to_string(f.kind) + ")");
}

Field lambda_partial(const Connection& A, const Field& alpha) {
    require_kind(alpha, FormType::k02, "lambda_partial");
    const Field z1 = combine(nabla(A, alpha, 0), nabla(A, alpha, 1), -I);
    const Field z2 = combine(nabla(A, alpha, 2), nabla(A, alpha, 3), -I);
    // Λ(dz1∧dz̄1∧dz̄2) = −2i dz̄2, Λ(dz2∧dz̄1∧dz̄2) = 2i dz̄1
    Field out(alpha.grid, FormType::k01, alpha.fiber);
    accumulate(out, 0, z2, 0, 2.0 * I);
    accumulate(out, 1, z1, 0, -2.0 * I);
    return out;
}

Field dbar_adjoint(const Connection& A, const Field& theta) {
    require_kind(theta, FormType::k01, "dbar_adjoint");
    const Field z1 = combine(nabla(A, theta, 0), nabla(A, theta, 1), -I);
    const Field z2 = combine(nabla(A, theta, 2), nabla(A, theta, 3), -I);
    Field out(theta.grid, FormType::k00, theta.fiber);
    accumulate(out, 0, z1, 0, -2.0);
    accumulate(out, 0, z2, 1, -2.0);
    return out;
}

// Curvature -----------------------------------------------------------------

namespace {

Field curvature_spectral(const Connection& A) {
    const auto& g = A.grid;
    const int r = g.rank;
    Spectral sp(g);
    Field F(g, FormType::k2, Fiber::endo);
    std::vector<std::array<Grid, 4>> grad(static_cast<std::size_t>(4 * r * r));
    for (int a = 0; a < 4; ++a)
        for (int e = 0; e < r * r; ++e) grad[static_cast<std::size_t>(a * r * r + e)] = sp.gradient(A.potential.at(a, e));
    for (int pi = 0; pi < 6; ++pi) {
        const int a = (pi < 3) ? 0 : (pi < 5 ? 1 : 2);
        const int b = (pi < 3) ? pi + 1 : (pi < 5 ? pi - 1 : 3);
        for (int e = 0; e < r * r; ++e) {
            auto& dst = F.at(pi, e);
            const auto& dab = grad[static_cast<std::size_t>(b * r * r + e)][a];
            const auto& dba = grad[static_cast<std::size_t>(a * r * r + e)][b];
            for (std::size_t p = 0; p < g.points(); ++p) dst[p] = dab[p] - dba[p];
        }
        for (std::size_t p = 0; p < g.points(); ++p) {
            const auto& pot = A.potential;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    cplx s = 0;
                    for (int k = 0; k < r; ++k)
                        s += pot.at(a, i * r + k)[p] * pot.at(b, k * r + j)[p] -
                             pot.at(b, i * r + k)[p] * pot.at(a, k * r + j)[p];
                    F.at(pi, i * r + j)[p] += s;
                }
        }
    }
    return F;
}

// log of a unitary matrix, skew-Hermitian, with a branch check.
Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& U) {
    constexpr double kBranch = 0.75 * kPi;
    const auto fail = [] {
        throw std::runtime_error(
            "plaquette logarithm left its principal branch (phase > 3π/4): field too rough for this grid, refine N");
    };
    if (U.rows() == 1) {
        const double th = std::arg(U(0, 0));
        if (std::abs(th) > kBranch) fail();
        return Eigen::MatrixXcd::Constant(1, 1, I * th);
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(U);
    Eigen::VectorXcd lg(U.rows());
    for (int i = 0; i < U.rows(); ++i) {
        const double th = std::arg(es.eigenvalues()(i));
        if (std::abs(th) > kBranch) fail();
        lg(i) = I * th;
    }
    const Eigen::MatrixXcd V = es.eigenvectors();
    Eigen::MatrixXcd L = V * lg.asDiagonal() * V.inverse();
    return 0.5 * (L - L.adjoint());
}

Field curvature_link(const Connection& A) {
    const auto& g = A.grid;
    const LinkSet U(A);
    const int r = g.rank;
    Field F(g, FormType::k2, Fiber::endo);
    for (int pi = 0; pi < 6; ++pi) {
        const int a = (pi < 3) ? 0 : (pi < 5 ? 1 : 2);
        const int b = (pi < 3) ? pi + 1 : (pi < 5 ? pi - 1 : 3);
        const double area = g.spacing(a) * g.spacing(b);
        for (std::size_t n = 0; n < g.points(); ++n) {
            const std::size_t na = g.shift(n, a, 1), nb = g.shift(n, b, 1);
            const std::size_t ma = g.shift(n, a, -1), mb = g.shift(n, b, -1);
            const std::size_t nb_ma = g.shift(nb, a, -1), ma_mb = g.shift(ma, b, -1), na_mb = g.shift(na, b, -1);
            if (r == 1) {
                const auto u = [&](int ax, std::size_t p) { return U.scalar(ax, p); };
                const cplx q1 = u(a, n) * u(b, na) * std::conj(u(a, nb)) * std::conj(u(b, n));
                const cplx q2 = u(b, n) * std::conj(u(a, nb_ma)) * std::conj(u(b, ma)) * u(a, ma);
                const cplx q3 = std::conj(u(a, ma)) * std::conj(u(b, ma_mb)) * u(a, ma_mb) * u(b, mb);
                const cplx q4 = std::conj(u(b, mb)) * u(a, mb) * u(b, na_mb) * std::conj(u(a, n));
                cplx s = 0;
                for (cplx q : {q1, q2, q3, q4}) s += unitary_log(Eigen::MatrixXcd::Constant(1, 1, q))(0, 0);
                F.at(pi)[n] = 0.25 * s / area;
                continue;
            }
            const auto u = [&](int ax, std::size_t p) { return U.at(ax, p); };
            const Eigen::MatrixXcd q1 = u(a, n) * u(b, na) * u(a, nb).adjoint() * u(b, n).adjoint();
            const Eigen::MatrixXcd q2 = u(b, n) * u(a, nb_ma).adjoint() * u(b, ma).adjoint() * u(a, ma);
            const Eigen::MatrixXcd q3 = u(a, ma).adjoint() * u(b, ma_mb).adjoint() * u(a, ma_mb) * u(b, mb);
            const Eigen::MatrixXcd q4 = u(b, mb).adjoint() * u(a, mb) * u(b, na_mb) * u(a, n).adjoint();
            const Eigen::MatrixXcd s = unitary_log(q1) + unitary_log(q2) + unitary_log(q3) + unitary_log(q4);
            F.set_value(pi, n, 0.25 * s / area);
        }
    }
    return F;
}

}  // namespace

Field curvature(const Connection& A) {
    if (A.grid.backend == Backend::spectral && !A.has_explicit_links()) return curvature_spectral(A);
    return curvature_link(A);
}

Field covariant_exterior(const Connection& A, const Field& F) {
    require_kind(F, FormType::k2, "covariant_exterior");
    std::array<Field, 4> dF;
    for (int a = 0; a < 4; ++a) dF[static_cast<std::size_t>(a)] = nabla(A, F, a);
    static const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    Field out(F.grid, FormType::k3, F.fiber);
    for (int t = 0; t < 4; ++t) {
        const int a = triples[t][0], b = triples[t][1], c = triples[t][2];
        accumulate(out, t, dF[static_cast<std::size_t>(a)], pair_index(b, c), 1.0);
        accumulate(out, t, dF[static_cast<std::size_t>(b)], pair_index(a, c), -1.0);
        accumulate(out, t, dF[static_cast<std::size_t>(c)], pair_index(a, b), 1.0);
    }
    return out;
}

Field exterior_derivative(const Field& f) {
    Spectral sp(f.grid);
    const auto d = [&](int comp, int e, int axis) { return sp.derivative(f.at(comp, e), axis); };
    if (f.kind == FormType::k00) {
        Field out(f.grid, FormType::k1, f.fiber);
        for (int e = 0; e < f.fiber_dim(); ++e)
            for (int a = 0; a < 4; ++a) out.at(a, e) = d(0, e, a);
        return out;
    }
    if (f.kind == FormType::k1) {
        Field out(f.grid, FormType::k2, f.fiber);
        for (int e = 0; e < f.fiber_dim(); ++e)
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) {
                    const Grid x = d(b, e, a), y = d(a, e, b);
                    auto& dst = out.at(pair_index(a, b), e);
                    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = x[p] - y[p];
                }
        return out;
    }
    if (f.kind == FormType::k2) {
        static const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        Field out(f.grid, FormType::k3, f.fiber);
        for (int e = 0; e < f.fiber_dim(); ++e)
            for (int t = 0; t < 4; ++t) {
                const int a = triples[t][0], b = triples[t][1], c = triples[t][2];
                const Grid x = d(pair_index(b, c), e, a), y = d(pair_index(a, c), e, b), z = d(pair_index(a, b), e, c);
                auto& dst = out.at(t, e);
                for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = x[p] - y[p] + z[p];
            }
        return out;
    }
    throw std::invalid_argument("exterior_derivative: kind mismatch (expected k00, k1 or k2)");
}

double chern_weil_degree(const Connection& A) {
    const auto& g = A.grid;
    if (g.backend == Backend::spectral && !A.has_explicit_links()) {
        const Field F = curvature(A);
        return std::real(I * (integrate(F, 0) + integrate(F, 5))) / (2.0 * kPi);
    }
    // Sum of plaquette phases: exact for the abelian part.
    const LinkSet U(A);
    const int r = g.rank;
    double total = 0;
    const std::array<std::array<int, 2>, 2> planes{{{0, 1}, {2, 3}}};
    for (int k = 0; k < 2; ++k) {
        const int a = planes[k][0], b = planes[k][1];
        const double weight = std::pow(g.spacing(2 - 2 * k), 2);  // cell area of the complementary factor
        double s = 0;
        for (std::size_t n = 0; n < g.points(); ++n) {
            const std::size_t na = g.shift(n, a, 1), nb = g.shift(n, b, 1);
            cplx det;
            if (r == 1) {
                det = U.scalar(a, n) * U.scalar(b, na) * std::conj(U.scalar(a, nb)) * std::conj(U.scalar(b, n));
            } else {
                det = (U.at(a, n) * U.at(b, na) * U.at(a, nb).adjoint() * U.at(b, n).adjoint()).determinant();
            }
            s += std::arg(det);
        }
        total += weight * s;
    }
    return -total / (2.0 * kPi);
}

// Algebra --------------------------------------------------------------------

Field lambda_contract(const Field& F) {
    require_kind(F, FormType::k2, "lambda_contract");
    Field out(F.grid, FormType::k00, F.fiber);
    accumulate(out, 0, F, 0, 1.0);
    accumulate(out, 0, F, 5, 1.0);
    return out;
}

Field wedge_omega(const Field& f) {
    require_kind(f, FormType::k00, "wedge_omega");
    Field out(f.grid, FormType::k2, f.fiber);
    accumulate(out, 0, f, 0, 1.0);
    accumulate(out, 5, f, 0, 1.0);
    return out;
}

Field hodge_star(const Field& F) {
    require_kind(F, FormType::k2, "hodge_star");
    Field out(F.grid, FormType::k2, F.fiber);
    accumulate(out, 0, F, 5, 1.0);
    accumulate(out, 1, F, 4, -1.0);
    accumulate(out, 2, F, 3, 1.0);
    accumulate(out, 3, F, 2, 1.0);
    accumulate(out, 4, F, 1, -1.0);
    accumulate(out, 5, F, 0, 1.0);
    return out;
}

Field selfdual_plus(const Field& F) {
    Field out = F + hodge_star(F);
    out *= 0.5;
    return out;
}

Field part20(const Field& F) {
    require_kind(F, FormType::k2, "part20");
    Field out(F.grid, FormType::k20, F.fiber);
    accumulate(out, 0, F, 1, 0.25);
    accumulate(out, 0, F, 2, -0.25 * I);
    accumulate(out, 0, F, 3, -0.25 * I);
    accumulate(out, 0, F, 4, -0.25);
    return out;
}

Field part02(const Field& F) {
    require_kind(F, FormType::k2, "part02");
    Field out(F.grid, FormType::k02, F.fiber);
    accumulate(out, 0, F, 1, 0.25);
    accumulate(out, 0, F, 2, 0.25 * I);
    accumulate(out, 0, F, 3, 0.25 * I);
    accumulate(out, 0, F, 4, -0.25);
    return out;
}

Field trace(const Field& f) {
    if (f.fiber != Fiber::endo) throw std::invalid_argument("trace: expected an endo field");
    Field out(f.grid, f.kind, Fiber::scalar);
    const int r = f.grid.rank;
    for (int c = 0; c < f.components(); ++c)
        for (int i = 0; i < r; ++i) {
            const auto& src = f.at(c, i * r + i);
            for (std::size_t p = 0; p < src.size(); ++p) out.at(c)[p] += src[p];
        }
    return out;
}

Field adjoint(const Field& f) {
    Field out(f.grid, f.kind, f.fiber);
    const int r = f.rank();
    for (int c = 0; c < f.components(); ++c) {
        if (f.fiber == Fiber::endo) {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    const auto& src = f.at(c, j * r + i);
                    auto& dst = out.at(c, i * r + j);
                    for (std::size_t p = 0; p < src.size(); ++p) dst[p] = std::conj(src[p]);
                }
        } else {
            for (int e = 0; e < f.fiber_dim(); ++e)
                for (std::size_t p = 0; p < f.at(c, e).size(); ++p) out.at(c, e)[p] = std::conj(f.at(c, e)[p]);
        }
    }
    return out;
}

Field multiply(const Field& scalar, const Field& f) {
    if (scalar.fiber != Fiber::scalar || scalar.kind != FormType::k00)
        throw std::invalid_argument("multiply: first factor must be a scalar k00 field");
    require_grid(scalar.grid, f.grid, "multiply");
    Field out = f;
    for (auto& g : out.data)
        for (std::size_t p = 0; p < g.size(); ++p) g[p] *= scalar.at(0)[p];
    return out;
}

Field apply(const Field& endo, const Field& f) {
    if (endo.fiber != Fiber::endo || endo.kind != FormType::k00)
        throw std::invalid_argument("apply: first factor must be an endo k00 field");
    require_grid(endo.grid, f.grid, "apply");
    Field out(f.grid, f.kind, f.fiber);
    for (std::size_t p = 0; p < f.grid.points(); ++p) {
        const auto m = endo.value(0, p);
        for (int c = 0; c < f.components(); ++c) out.set_value(c, p, m * f.value(c, p));
    }
    return out;
}

cplx inner_product(const Field& f, const Field& g) {
    if (!f.same_shape(g)) throw std::invalid_argument("inner_product: shape mismatch");
    const double w = component_weight(f.kind);
    cplx s = 0;
    for (std::size_t c = 0; c < f.data.size(); ++c)
        for (std::size_t p = 0; p < f.data[c].size(); ++p) s += f.data[c][p] * std::conj(g.data[c][p]);
    return s * w * f.grid.cell_volume();
}

double norm(const Field& f) { return std::sqrt(std::max(0.0, std::real(inner_product(f, f)))); }

double sup_norm(const Field& f) {
    const double w = component_weight(f.kind);
    double worst = 0;
    for (std::size_t p = 0; p < f.grid.points(); ++p) {
        double s = 0;
        for (const auto& g : f.data) s += std::norm(g[p]);
        worst = std::max(worst, w * s);
    }
    return std::sqrt(worst);
}

cplx integrate(const Field& f, int comp) {
    if (f.fiber == Fiber::section) throw std::invalid_argument("integrate: section fields have no invariant integral");
    // Neumaier summation: means of 10^6-point grids feed exact mean-zero checks
    cplx s = 0, comp_err = 0;
    const auto add = [&](cplx v) {
        const cplx t = s + v;
        const auto fix = [](double a, double b, double sum) {
            return std::abs(a) >= std::abs(b) ? (a - sum) + b : (b - sum) + a;
        };
        comp_err += cplx(fix(s.real(), v.real(), t.real()), fix(s.imag(), v.imag(), t.imag()));
        s = t;
    };
    const int r = f.rank();
    if (f.fiber == Fiber::scalar) {
        for (auto v : f.at(comp)) add(v);
    } else {
        for (int i = 0; i < r; ++i)
            for (auto v : f.at(comp, i * r + i)) add(v);
    }
    return (s + comp_err) * f.grid.cell_volume();
}

double mean(const Field& scalar) { return std::real(integrate(scalar, 0)) / scalar.grid.volume(); }

// Randomness -----------------------------------------------------------------

Field random_band_limited(const GridSpec& g, std::uint64_t seed, int cutoff, FormType k, Fiber f, double amplitude) {
    if (cutoff < 1 || 2 * cutoff > g.N) throw std::invalid_argument("random_band_limited: need 1 <= cutoff <= N/2");
    Field out(g, k, f);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Spectral sp(g);
    const int width = 2 * cutoff - 1;
    const double count = std::pow(width, 4);
    const double scale = amplitude / std::sqrt(2.0 * count) * static_cast<double>(g.points());
    for (auto& grid : out.data) {
        std::fill(grid.begin(), grid.end(), cplx{});
        for (int k0 = 1 - cutoff; k0 < cutoff; ++k0)
            for (int k1 = 1 - cutoff; k1 < cutoff; ++k1)
                for (int k2 = 1 - cutoff; k2 < cutoff; ++k2)
                    for (int k3 = 1 - cutoff; k3 < cutoff; ++k3) {
                        const double re = normal(rng), im = normal(rng);
                        grid[g.index({k0, k1, k2, k3})] = scale * cplx(re, im);
                    }
        sp.inverse(grid);
    }
    return out;
}

Field skew_hermitian_part(const Field& f) {
    Field out = f - adjoint(f);
    out *= 0.5;
    return out;
}

Field hermitian_part(const Field& f) {
    Field out = f + adjoint(f);
    out *= 0.5;
    return out;
}

Connection random_connection(const GridSpec& g, std::uint64_t seed, int cutoff, double amplitude) {
    Connection A(g);
    A.potential = skew_hermitian_part(random_band_limited(g, seed, cutoff, FormType::k1, Fiber::endo, amplitude));
    return A;
}

// Gauge ------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd random_unitary(int r, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd m(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m(i, j) = cplx(normal(rng), normal(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    return q;
}

}  // namespace

Gauge random_exact_gauge(const GridSpec& g, std::uint64_t seed, int max_winding) {
    const int r = g.rank;
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXcd W = random_unitary(r, rng), V = random_unitary(r, rng);
    std::uniform_int_distribution<int> wind(-max_winding, max_winding);
    std::vector<std::array<int, 4>> n(static_cast<std::size_t>(r));
    for (auto& nj : n)
        for (auto& v : nj) v = wind(rng);

    Gauge out{Field(g, FormType::k00, Fiber::endo), Field(g, FormType::k1, Fiber::endo)};
    for (std::size_t p = 0; p < g.points(); ++p) {
        Eigen::VectorXcd phase(r);
        for (int j = 0; j < r; ++j) {
            double arg = 0;
            for (int a = 0; a < 4; ++a) arg += 2.0 * kPi * n[static_cast<std::size_t>(j)][a] * g.coordinate(p, a) / g.length(a);
            phase(j) = std::exp(I * arg);
        }
        out.g.set_value(0, p, W * phase.asDiagonal() * V);
    }
    for (int a = 0; a < 4; ++a) {
        Eigen::VectorXcd rate(r);
        for (int j = 0; j < r; ++j) rate(j) = I * 2.0 * kPi * double(n[static_cast<std::size_t>(j)][a]) / g.length(a);
        const Eigen::MatrixXcd mc = V.adjoint() * rate.asDiagonal() * V;
        for (std::size_t p = 0; p < g.points(); ++p) out.maurer_cartan->set_value(a, p, mc);
    }
    return out;
}

Gauge gauge_from_values(const Field& g) {
    if (g.kind != FormType::k00 || g.fiber != Fiber::endo) throw std::invalid_argument("gauge: expected a k00 endo field");
    return Gauge{g, std::nullopt};
}

namespace {

Field maurer_cartan(const Gauge& G) {
    if (G.maurer_cartan) return *G.maurer_cartan;
    const Field dg = exterior_derivative(G.g);
    const Field ginv = adjoint(G.g);
    Field out(G.g.grid, FormType::k1, Fiber::endo);
    for (std::size_t p = 0; p < G.g.grid.points(); ++p) {
        const auto gi = ginv.value(0, p);
        for (int a = 0; a < 4; ++a) out.set_value(a, p, gi * dg.value(a, p));
    }
    return out;
}

}  // namespace

Connection gauge_transform(const Gauge& G, const Connection& A) {
    require_grid(G.g.grid, A.grid, "gauge_transform");
    const auto& g = A.grid;
    Connection out(g);
    const Field mc = maurer_cartan(G);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const auto gm = G.g.value(0, p);
        const Eigen::MatrixXcd gi = gm.adjoint();
        for (int a = 0; a < 4; ++a) out.potential.set_value(a, p, gi * A.potential.value(a, p) * gm + mc.value(a, p));
    }
    if (g.backend == Backend::link || A.has_explicit_links()) {
        const LinkSet U(A);
        const int r = g.rank;
        out.links.assign(static_cast<std::size_t>(4 * r * r), Grid(g.points()));
        for (int a = 0; a < 4; ++a)
            for (std::size_t p = 0; p < g.points(); ++p) {
                const Eigen::MatrixXcd v = G.g.value(0, p).adjoint() * U.at(a, p) * G.g.value(0, g.shift(p, a, 1));
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < r; ++j) out.links[static_cast<std::size_t>(a * r * r + i * r + j)][p] = v(i, j);
            }
    }
    return out;
}

Field gauge_transform(const Gauge& G, const Field& f) {
    require_grid(G.g.grid, f.grid, "gauge_transform");
    if (f.fiber == Fiber::scalar) return f;
    Field out(f.grid, f.kind, f.fiber);
    for (std::size_t p = 0; p < f.grid.points(); ++p) {
        const auto gm = G.g.value(0, p);
        const Eigen::MatrixXcd gi = gm.adjoint();
        for (int c = 0; c < f.components(); ++c) {
            if (f.fiber == Fiber::section)
                out.set_value(c, p, gi * f.value(c, p));
            else
                out.set_value(c, p, gi * f.value(c, p) * gm);
        }
    }
    return out;
}

Field holomorphic_section(const GridSpec& g) {
    const auto theta = [&](int factor, double x, double y) -> cplx {
        const int d = g.degree(factor);
        if (d < 0) throw std::domain_error("holomorphic_section: negative degree has no holomorphic sections");
        if (d == 0) return 1.0;
        const double L = g.length(2 * factor);
        cplx s = 0;
        for (int m = -6 * d; m <= 7 * d; ++m) {
            const double c = x / L - double(m) / d;
            s += std::exp(-kPi * d * c * c) * std::exp(I * (2.0 * kPi * m * y / L));
        }
        return s;
    };
    Field out(g, FormType::k00, Fiber::section);
    for (std::size_t p = 0; p < g.points(); ++p)
        out.at(0, 0)[p] = theta(0, g.coordinate(p, 0), g.coordinate(p, 1)) * theta(1, g.coordinate(p, 2), g.coordinate(p, 3));
    return out;
}

}  // namespace swlab
