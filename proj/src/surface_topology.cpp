#include "swlab/surface_topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace swlab::topology {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

IntMatrix hyperbolic_sum(int copies) {
    IntMatrix q(2 * copies, IntVector(2 * copies, 0));
    for (int i = 0; i < copies; ++i) {
        q[2 * i][2 * i + 1] = 1;
        q[2 * i + 1][2 * i] = 1;
    }
    return q;
}

// Negative of the E8 Cartan matrix (chain 0-1-2-3-4-5-6, node 7 on node 4).
IntMatrix negative_e8() {
    IntMatrix q(8, IntVector(8, 0));
    for (int i = 0; i < 8; ++i) q[i][i] = -2;
    auto edge = [&](int a, int b) {
        q[a][b] = 1;
        q[b][a] = 1;
    };
    for (int i = 0; i + 1 < 7; ++i) edge(i, i + 1);
    edge(4, 7);
    return q;
}

IntMatrix block_sum(const IntMatrix& a, const IntMatrix& b) {
    const auto n = a.size() + b.size();
    IntMatrix q(n, IntVector(n, 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) q[i][j] = a[i][j];
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) q[a.size() + i][a.size() + j] = b[i][j];
    return q;
}

bool all_even(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x % 2 == 0; });
}

std::string format_vector(const IntVector& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

}  // namespace

std::int64_t SurfacePresentation::pair(const IntVector& x, const IntVector& y) const {
    require(x.size() == Q.size() && y.size() == Q.size(), "class has wrong length (expected b2 entries)");
    std::int64_t s = 0;
    for (std::size_t i = 0; i < Q.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j) s += x[i] * Q[i][j] * y[j];
    return s;
}

Rational SurfacePresentation::pair(const IntVector& x, const RatVector& y) const {
    require(x.size() == Q.size() && y.size() == Q.size(), "class has wrong length (expected b2 entries)");
    Rational s;
    for (std::size_t i = 0; i < Q.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j)
            if (Q[i][j] != 0 && x[i] != 0) s += Rational(x[i] * Q[i][j]) * y[j];
    return s;
}

std::int64_t signature(const IntMatrix& q) {
    const std::size_t n = q.size();
    std::vector<RatVector> a(n, RatVector(n));
    for (std::size_t i = 0; i < n; ++i) {
        require(q[i].size() == n, "intersection matrix is not square");
        for (std::size_t j = 0; j < n; ++j) a[i][j] = q[i][j];
    }
    std::int64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i][i] == Rational(0)) {
            std::size_t j = i + 1;
            while (j < n && a[j][j] == Rational(0)) ++j;
            if (j < n) {
                std::swap(a[i], a[j]);
                for (auto& row : a) std::swap(row[i], row[j]);
            } else {
                j = i + 1;
                while (j < n && a[i][j] == Rational(0)) ++j;
                if (j == n) continue;  // null direction
                // e_i ← e_i + e_j makes the pivot 2 a_ij ≠ 0
                for (std::size_t k = 0; k < n; ++k) a[i][k] += a[j][k];
                for (std::size_t k = 0; k < n; ++k) a[k][i] += a[k][j];
            }
        }
        const Rational p = a[i][i];
        (p > Rational(0) ? pos : neg) += 1;
        for (std::size_t r = i + 1; r < n; ++r) {
            if (a[r][i] == Rational(0)) continue;
            const Rational f = a[r][i] / p;
            for (std::size_t k = i; k < n; ++k) a[r][k] -= f * a[i][k];
            for (std::size_t k = i; k < n; ++k) a[k][r] = a[r][k];
        }
    }
    return pos - neg;
}

void SurfacePresentation::validate() const {
    require(b2 >= 0 && static_cast<std::size_t>(b2) == Q.size(), "Q must be b2 x b2");
    for (std::size_t i = 0; i < Q.size(); ++i) {
        require(Q[i].size() == Q.size(), "Q must be square");
        for (std::size_t j = 0; j < i; ++j) require(Q[i][j] == Q[j][i], "Q must be symmetric");
    }
    require(signature(Q) == sigma, "sigma does not equal the signature of Q");
    require(K.size() == Q.size(), "K must have b2 entries");
    for (auto t : torsion) require(t >= 2, "torsion invariant factors must be >= 2");
    require(volume > Rational(0), "volume must be positive");
    if (kahler) {
        require(omega.size() == Q.size(), "omega must have b2 entries");
        Rational w2;
        for (std::size_t i = 0; i < Q.size(); ++i)
            for (std::size_t j = 0; j < Q.size(); ++j) w2 += omega[i] * Rational(Q[i][j]) * omega[j];
        require(w2 > Rational(0), "Kahler class must have positive square");
        const auto k2e = pair(K, K) + euler;
        require(k2e % 12 == 0, "K^2 + e must be divisible by 12 (Noether)");
        require(k2e / 12 == chiO, "chiO must equal (K^2 + e)/12");
    }
}

SurfacePresentation preset(std::string_view name) {
    SurfacePresentation s;
    s.name = std::string(name);
    if (name == "K3") {
        s.Q = block_sum(block_sum(negative_e8(), negative_e8()), hyperbolic_sum(3));
        s.b2 = 22;
        s.sigma = -16;
        s.euler = 24;
        s.K = IntVector(22, 0);
        s.omega = RatVector(22, Rational(0));
        s.omega[16] = 1;
        s.omega[17] = 1;
        s.volume = 1;
        s.chiO = 2;
    } else if (name == "T4") {
        s.Q = hyperbolic_sum(3);
        s.b2 = 6;
        s.K = IntVector(6, 0);
        s.omega = RatVector(6, Rational(0));
        s.omega[0] = 1;
        s.omega[1] = 1;
        s.volume = 1;
        s.chiO = 0;
    } else if (name == "P2") {
        s.Q = {{1}};
        s.b2 = 1;
        s.sigma = 1;
        s.euler = 3;
        s.K = {-3};
        s.omega = {Rational(1)};
        s.volume = Rational(1, 2);
        s.chiO = 1;
    } else if (name == "P2#P2bar") {
        s.Q = {{1, 0}, {0, -1}};
        s.b2 = 2;
        s.euler = 4;
        s.K = {-3, 1};
        s.omega = {Rational(2), Rational(-1)};
        s.volume = Rational(3, 2);
        s.chiO = 1;
    } else if (name == "E8neg") {
        // Not a complex surface; an even negative-definite lattice for divisor arithmetic.
        s.Q = negative_e8();
        s.b2 = 8;
        s.sigma = -8;
        s.euler = 10;
        s.K = IntVector(8, 0);
        s.kahler = false;
    } else {
        throw std::invalid_argument("unknown surface preset '" + std::string(name) + "'");
    }
    s.validate();
    return s;
}

std::vector<std::string> preset_names() { return {"K3", "T4", "P2", "P2#P2bar", "E8neg"}; }

bool is_characteristic(const SurfacePresentation& s, const IntVector& L) {
    for (std::size_t i = 0; i < s.Q.size(); ++i) {
        // x = e_i: x² = Q_ii, x·L = (QL)_i
        std::int64_t xl = 0;
        for (std::size_t j = 0; j < s.Q.size(); ++j) xl += s.Q[i][j] * L.at(j);
        if ((s.Q[i][i] - xl) % 2 != 0) return false;
    }
    return true;
}

bool is_almost_canonical(const SurfacePresentation& s, const IntVector& L) {
    return is_characteristic(s, L) && s.pair(L, L) == 3 * s.sigma + 2 * s.euler;
}

SpinorChern spinor_chern(const SurfacePresentation& s, const IntVector& L, bool check_characteristic) {
    if (check_characteristic && !is_characteristic(s, L))
        throw std::domain_error("L = (" + format_vector(L) +
                                ") is not characteristic: w2 does not reduce to it, no Spin^c structure");
    const std::int64_t p1 = 3 * s.sigma;
    const std::int64_t e = s.euler;
    const std::int64_t l2 = s.pair(L, L);
    SpinorChern out{L, Rational(l2 - p1 - 2 * e, 4), Rational(l2 - p1 + 2 * e, 4)};
    if (!out.c2_plus.is_integer() || !out.c2_minus.is_integer())
        throw std::domain_error("c2 of the spinor bundles is not integral: L fails the lifting parity");
    if (out.c2_minus - out.c2_plus != Rational(e))
        throw std::logic_error("c2(S-) - c2(S+) != e");
    return out;
}

std::int64_t count_spinc_lifts(const SurfacePresentation& s, bool w2_lifts) {
    if (!w2_lifts) return 0;
    std::int64_t count = 1;
    for (auto t : s.torsion) count *= std::gcd(t, std::int64_t{2});
    return count;
}

Slopes slopes(const SurfacePresentation& s, const BundleTopology& e, std::optional<double> t_m) {
    require(e.rank >= 1, "bundle rank must be >= 1");
    Slopes out;
    out.mu_E = s.degree(e.c1) / Rational(e.rank);
    out.mu_K = s.degree(s.K);
    out.lambda_sw = out.mu_K / Rational(2);
    out.J = Rational(2 * e.rank) * (out.mu_E - out.lambda_sw);
    if (t_m) {
        constexpr double pi = 3.14159265358979323846;
        out.lambda_t = *t_m * s.volume.to_double() / (4.0 * pi);
    }
    return out;
}

std::int64_t expected_dimension(const SurfacePresentation& s, const BundleTopology& e) {
    require(e.rank >= 1, "bundle rank must be >= 1");
    if (e.rank == 1) require(e.c2 == 0, "a line bundle has c2 = 0");
    const Rational r(e.rank);
    const Rational c1sq(s.pair(e.c1, e.c1));
    const Rational c1k(s.pair(e.c1, s.K));
    const Rational chi_o(s.chiO);
    const Rational c2(e.c2);
    const Rational chi_e = r * chi_o - c1k / Rational(2) + c1sq / Rational(2) - c2;
    const Rational chi_end = r * r * chi_o + (r - Rational(1)) * c1sq - Rational(2) * r * c2;
    const Rational dim = chi_e - chi_end;
    if (!dim.is_integer()) throw std::domain_error("non-integral expected dimension; inconsistent input");
    return dim.num();
}

DivisorSearch divisor_search(const SurfacePresentation& s, const IntVector& H0, std::int64_t n, int box) {
    require(box >= 1, "box must be >= 1");
    require(H0.size() == s.Q.size(), "H0 must have b2 entries");
    DivisorSearch out;
    out.box = box;
    out.H.resize(H0.size());
    for (std::size_t i = 0; i < H0.size(); ++i) out.H[i] = H0[i] + n * s.K[i];
    out.warning = "search is complete only within |coefficients| <= " + std::to_string(box);

    const std::size_t b = s.Q.size();
    IntVector D(b, -box);
    if (b == 0) return out;
    for (;;) {
        IntVector DminusK(b);
        for (std::size_t i = 0; i < b; ++i) DminusK[i] = D[i] - s.K[i];
        if (s.pair(D, DminusK) == 0) {
            DivisorCandidate c;
            c.D = D;
            c.L.resize(b);
            for (std::size_t i = 0; i < b; ++i) c.L[i] = 2 * D[i] - s.K[i];
            c.LH = s.pair(c.L, out.H);
            c.DH = s.pair(D, out.H);
            c.effective_candidate = c.DH >= 0;
            out.solutions.push_back(c);
            if (c.effective_candidate) out.effective.push_back(c);
        }
        std::size_t i = 0;
        while (i < b && D[i] == box) D[i++] = -box;
        if (i == b) break;
        ++D[i];
    }
    return out;
}

Rank1Classification rank1_sw_classification(const SurfacePresentation& s, const IntVector& L, int box) {
    require(L.size() == s.Q.size(), "L must have b2 entries");
    const std::size_t b = L.size();
    IntVector diff(b);
    for (std::size_t i = 0; i < b; ++i) diff[i] = L[i] - s.K[i];
    if (!all_even(diff))
        throw std::domain_error("L is not congruent to K mod 2: w2 does not lift to L, no Spin^c structure");

    Rank1Classification out;
    out.L = L;
    out.mu_L = s.degree(L);
    out.part = out.mu_L < Rational(0) ? 1 : (out.mu_L > Rational(0) ? -1 : 0);
    out.D.resize(b);
    out.E_class.resize(b);
    if (out.part == 0) {
        out.note = "mu(L) = 0: wall, neither chamber applies";
    } else {
        // part i: 2D − K = L; part ii: 2D − K = −L
        for (std::size_t i = 0; i < b; ++i) out.D[i] = (s.K[i] + out.part * L[i]) / 2;
        for (std::size_t i = 0; i < b; ++i) out.E_class[i] = out.part == 1 ? out.D[i] : s.K[i] - out.D[i];
        out.in_box = std::all_of(out.D.begin(), out.D.end(), [box](std::int64_t x) { return x >= -box && x <= box; });
        out.empty_divisor = std::all_of(out.D.begin(), out.D.end(), [](std::int64_t x) { return x == 0; });
        out.effective_candidate = out.empty_divisor || s.degree(out.D) > Rational(0);
        out.note = out.part == 1 ? "moduli = linear systems |D| with 2D - K = L"
                                 : "moduli = linear systems |D| with 2D - K = -L";
    }
    if (s.degree(s.K) <= Rational(0)) {
        out.reducible_only = true;
        out.note += "; total scalar curvature >= 0: all rank-1 solutions reducible";
        if (s.pair(s.K, s.K) > 0 && is_almost_canonical(s, L)) {
            out.incompatible = true;
            out.note += "; K^2 > 0 and L almost canonical: equations incompatible";
        }
    }
    return out;
}

}  // namespace swlab::topology
