#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swlab/rational.hpp"

/// Integer and rational arithmetic on the second cohomology lattice of a
/// closed oriented 4-manifold: Spin^c characteristic classes, almost
/// canonical classes, slopes, expected dimensions and divisor searches.
/// Everything here is exact; no floating point enters a verdict.
namespace swlab::topology {

using IntVector = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVector>;
using RatVector = std::vector<Rational>;

/// Lattice data of a surface. Classes are coefficient vectors in the basis
/// in which `Q` is written; torsion is tracked only by invariant factors.
struct SurfacePresentation {
    std::string name;
    int b2 = 0;
    IntMatrix Q;
    IntVector torsion;
    std::int64_t sigma = 0;
    std::int64_t euler = 0;
    IntVector K;
    RatVector omega;
    Rational volume{1};
    std::int64_t chiO = 0;
    bool kahler = true;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    std::int64_t pair(const IntVector& x, const IntVector& y) const;
    Rational pair(const IntVector& x, const RatVector& y) const;
    Rational degree(const IntVector& c1) const { return pair(c1, omega); }
};

struct BundleTopology {
    int rank = 1;
    IntVector c1;
    std::int64_t c2 = 0;
};

/// Signature of a symmetric integer matrix, by exact congruence
/// diagonalization over the rationals.
std::int64_t signature(const IntMatrix& q);

/// Built-in presets: "K3", "T4", "P2", "P2#P2bar", "E8neg".
SurfacePresentation preset(std::string_view name);
std::vector<std::string> preset_names();

struct SpinorChern {
    IntVector c1;
    Rational c2_plus;
    Rational c2_minus;
};

/// Chern classes of the spinor bundles of a Spin^c structure with
/// determinant L. Throws std::domain_error when L is not characteristic
/// (unless the check is suppressed) or when c2 comes out non-integral.
SpinorChern spinor_chern(const SurfacePresentation& s, const IntVector& L, bool check_characteristic = true);

/// Number of Spin^c lifts with a fixed determinant: the 2-torsion of H^2.
std::int64_t count_spinc_lifts(const SurfacePresentation& s, bool w2_lifts);

bool is_characteristic(const SurfacePresentation& s, const IntVector& L);
bool is_almost_canonical(const SurfacePresentation& s, const IntVector& L);

struct Slopes {
    Rational mu_E;
    Rational mu_K;
    Rational J;
    Rational lambda_sw;
    std::optional<double> lambda_t;  ///< t_m Vol / 4π, when t_m is supplied
};

Slopes slopes(const SurfacePresentation& s, const BundleTopology& e, std::optional<double> t_m = std::nullopt);

/// χ(E) − χ(End E) by Riemann–Roch. Requires integral input.
std::int64_t expected_dimension(const SurfacePresentation& s, const BundleTopology& e);

struct DivisorCandidate {
    IntVector D;
    IntVector L;       ///< 2D − K
    std::int64_t LH;   ///< L·H
    std::int64_t DH;   ///< D·H
    bool effective_candidate;  ///< passes the necessary condition D·H ≥ 0
};

struct DivisorSearch {
    IntVector H;  ///< H0 + nK
    int box = 0;
    std::vector<DivisorCandidate> solutions;  ///< all D in the box with D(D−K) = 0
    std::vector<DivisorCandidate> effective;  ///< those surviving D·H ≥ 0
    std::string warning;
};

DivisorSearch divisor_search(const SurfacePresentation& s, const IntVector& H0, std::int64_t n, int box);

struct Rank1Classification {
    IntVector L;
    Rational mu_L;
    int part = 0;        ///< +1: μ(L) < 0, −1: μ(L) > 0, 0: μ(L) = 0
    IntVector D;         ///< the divisor class with 2D − K = ±L
    IntVector E_class;   ///< c1 of the line bundle carrying the pair
    bool in_box = false;
    bool effective_candidate = false;
    bool empty_divisor = false;
    bool reducible_only = false;  ///< total scalar curvature ≥ 0, i.e. K·[ω] ≤ 0
    bool incompatible = false;    ///< additionally K² > 0 and L almost canonical
    std::string note;
};

/// Throws std::domain_error when L ≢ K (mod 2).
Rank1Classification rank1_sw_classification(const SurfacePresentation& s, const IntVector& L, int box);

}  // namespace swlab::topology
