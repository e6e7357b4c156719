// swlab: batch driver. Reports are `key = value` lines on stdout, mirrored
// into --out DIR when given. Exit 0 success, 2 negative verdict, 1 error.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swlab/config.hpp"
#include "swlab/field_io.hpp"
#include "swlab/spin_algebra.hpp"
#include "swlab/surface_topology.hpp"
#include "swlab/sw_system.hpp"
#include "swlab/vortex_solver.hpp"

using namespace swlab;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kError = 1, kNegative = 2;

struct RunConfig {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    int grid_N = 0;  // 0: keep the config value
    double tol = -1;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

template <class V>
std::string join(const V& v, const char* sep = " ") {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
    return os.str();
}

class Report {
public:
    template <class T>
    void kv(const std::string& key, const T& value) {
        os_ << key << " = " << value << "\n";
    }
    void line(const std::string& s) { os_ << s << "\n"; }
    void emit(const RunConfig& rc, const std::string& file) const {
        std::cout << os_.str();
        if (rc.out_dir.empty()) return;
        fs::create_directories(rc.out_dir);
        std::ofstream f(fs::path(rc.out_dir) / file, std::ios::binary);
        f << os_.str();
        if (!f) throw std::runtime_error("cannot write " + (fs::path(rc.out_dir) / file).string());
    }

private:
    std::ostringstream os_;
};

config::Config load_config(const RunConfig& rc) {
    if (rc.config_path.empty()) return {};
    return config::Config::load(rc.config_path);
}

topology::SurfacePresentation surface_of(const RunConfig& rc, const config::Config& c) {
    if (!rc.preset.empty()) return topology::preset(rc.preset);
    if (!c.has_section("surface")) throw std::invalid_argument("no surface: pass --preset or a config with [surface]");
    return config::surface_from_config(c);
}

GridSpec grid_of(const RunConfig& rc, const config::Config& c) {
    GridSpec g = config::grid_from_config(c);
    if (rc.grid_N > 0) g.N = rc.grid_N;
    g.validate();
    return g;
}

// topology ---------------------------------------------------------------------

int run_topology(const RunConfig& rc) {
    const auto c = load_config(rc);
    const auto s = surface_of(rc, c);
    Report r;
    r.kv("seed", rc.seed);
    r.kv("surface", s.name.empty() ? std::string("custom") : s.name);
    r.kv("b2", s.b2);
    r.kv("signature", s.sigma);
    r.kv("euler", s.euler);
    r.kv("chi_O", s.chiO);
    r.kv("K", join(s.K));
    r.kv("K.K", s.pair(s.K, s.K));
    r.kv("torsion", join(s.torsion));
    r.kv("spinc_lifts", topology::count_spinc_lifts(s, true));
    r.kv("K_almost_canonical", topology::is_almost_canonical(s, s.K) ? "yes" : "no");
    const auto ch = topology::spinor_chern(s, s.K);
    r.kv("canonical.c1", join(ch.c1));
    r.kv("canonical.c2_plus", ch.c2_plus);
    r.kv("canonical.c2_minus", ch.c2_minus);
    if (c.has_section("bundle")) {
        const auto e = config::bundle_from_config(c, s.b2);
        std::optional<double> tm;
        if (c.has("solve", "t_m")) tm = c.get_double("solve", "t_m");
        const auto sl = topology::slopes(s, e, tm);
        r.kv("bundle.rank", e.rank);
        r.kv("bundle.c1", join(e.c1));
        r.kv("bundle.c2", e.c2);
        r.kv("slope.mu_E", sl.mu_E);
        r.kv("slope.mu_K", sl.mu_K);
        r.kv("slope.lambda_sw", sl.lambda_sw);
        r.kv("slope.J", sl.J);
        if (sl.lambda_t) r.kv("slope.lambda_t", num(*sl.lambda_t));
        r.kv("expected_dimension", topology::expected_dimension(s, e));
    }
    r.emit(rc, "topology.txt");
    return kOk;
}

// identities -------------------------------------------------------------------

int run_identities(const RunConfig& rc, int cutoff, int rank, int fibers) {
    const auto c = load_config(rc);
    GridSpec g = grid_of(rc, c);
    g.rank = rank;
    if (g.backend != Backend::spectral) throw std::invalid_argument("identities: the identity suite runs on the spectral backend");
    if (cutoff <= 0) cutoff = std::max(1, g.N / 4);
    const double tol = rc.tol > 0 ? rc.tol : 1e-8;

    double clifford = 0;
    std::mt19937_64 rng(rc.seed);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < fibers; ++i) {
        spin::Covector u, v;
        for (int a = 0; a < 4; ++a) {
            u[a] = cplx(n(rng), n(rng));
            v[a] = cplx(n(rng), n(rng));
        }
        const cplx m = spin::metric_c(u, v);
        clifford = std::max(clifford, (spin::gamma(u) * spin::gamma(v) + spin::gamma(v) * spin::gamma(u) +
                                       2.0 * m * spin::Mat4::Identity()).norm());
    }

    const Connection A = random_connection(g, rc.seed + 1, cutoff, 0.5);
    const auto psi = sw::SpinorField::random(g, rc.seed + 2, cutoff);
    const double weitz = sw::weitzenbock_gap(A, psi);
    const double energy = sw::energy_identity(A, psi).gap;
    const double pairing = sw::curvature_pairing(A, psi).gap;
    const auto res = sw::sw_star_residual(A, psi);
    const double equiv = std::abs(res.gamma_gap - res.aggregate()) / (1.0 + res.aggregate());

    struct Row {
        const char* name;
        double value;
    };
    const std::vector<Row> rows{{"clifford", clifford},
                                {"weitzenbock", weitz},
                                {"energy", energy},
                                {"curvature_pairing", pairing},
                                {"formulation_equivalence", equiv}};
    Report r;
    r.kv("seed", rc.seed);
    r.kv("grid", g.N);
    r.kv("rank", g.rank);
    r.kv("cutoff", cutoff);
    r.kv("tolerance", num(tol));
    r.line("# identity, gap, status");
    std::string failed;
    for (const auto& row : rows) {
        const bool ok = row.value < tol;
        if (!ok && failed.empty()) failed = row.name;
        r.line(std::string(row.name) + ", " + num(row.value) + ", " + (ok ? "PASS" : "FAIL"));
    }
    r.emit(rc, "identities.txt");
    if (!failed.empty()) {
        std::cerr << "swlab: identity " << failed << " exceeds tolerance " << num(tol) << "\n";
        return kError;
    }
    return kOk;
}

// solve / sweep -----------------------------------------------------------------

vortex::VortexParameters parameters_of(const config::Config& c, const GridSpec& g, double tm) {
    std::vector<vortex::VortexParameters::CosineMode> modes;
    if (c.has("solve", "cosine")) {
        for (const auto& row : c.get_rows("solve", "cosine")) {
            if (row.size() != 5) throw std::invalid_argument("config: [solve] cosine: rows need k1 k2 k3 k4 amplitude");
            vortex::VortexParameters::CosineMode m{};
            for (int a = 0; a < 4; ++a) m.k[a] = static_cast<int>(std::lround(row[a]));
            m.amplitude = row[4];
            modes.push_back(m);
        }
    }
    return vortex::VortexParameters::cosine(g, tm, modes);
}

Field phi0_of(const config::Config& c, const GridSpec& g) {
    const std::string kind = c.get_or("solve", "phi0", g.twisted() ? "theta" : "1");
    if (kind == "theta") return holomorphic_section(g);
    try {
        return constant_field(g, FormType::k00, Fiber::section, std::stod(kind));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("config: [solve] phi0: expected a number or 'theta', got '" + kind + "'");
    }
}

double chain_tolerance(const RunConfig& rc, const config::Config& c, const GridSpec& g, double tm) {
    if (rc.tol > 0) return rc.tol;
    if (c.has("solve", "tol")) return c.get_double("solve", "tol");
    if (g.backend == Backend::spectral) return 1e-8;
    // link residuals are O(h²) relative to the constant term ½t
    const double h2 = 1.0 / (static_cast<double>(g.N) * g.N);
    return 5.0 * h2 * std::max(1.0, 0.5 * std::abs(tm) * std::sqrt(g.volume()));
}

vortex::SolverOptions options_of(const config::Config& c) {
    vortex::SolverOptions o;
    if (c.has("solve", "max_iterations")) o.max_iterations = static_cast<int>(c.get_int("solve", "max_iterations"));
    return o;
}

int run_solve(const RunConfig& rc, std::optional<double> tm_override, const std::string& dump_u) {
    const auto c = load_config(rc);
    const GridSpec g = grid_of(rc, c);
    if (g.rank != 1) throw std::invalid_argument("solve: the vortex solver is rank 1");
    double tm = 0;
    if (tm_override) tm = *tm_override;
    else if (c.has("solve", "t_m")) tm = c.get_double("solve", "t_m");
    else throw std::invalid_argument("config: [solve] t_m: missing required field");
    const auto params = parameters_of(c, g, tm);
    const Field phi0 = phi0_of(c, g);
    const double tol = chain_tolerance(rc, c, g, tm);
    const Connection A0(g);
    const auto rep = vortex::moduli_chain_check(A0, phi0, params, tol, options_of(c));

    Report r;
    r.kv("seed", rc.seed);
    r.kv("grid", g.N);
    r.kv("backend", to_string(g.backend));
    r.kv("bidegree", std::to_string(g.d1) + " " + std::to_string(g.d2));
    r.kv("t_m", num(tm));
    r.kv("lambda", num(params.lambda));
    r.kv("tolerance", num(tol));
    r.kv("stability", vortex::to_string(rep.stability.verdict));
    r.kv("stability.reason", rep.stability.reason);
    r.kv("outcome", rep.outcome);
    if (rep.solution) {
        const auto& s = rep.solution->report;
        r.kv("iterations", s.iterations);
        r.kv("residual", num(s.residual));
        r.kv("vt_residual", num(s.vt_residual[0]) + " " + num(s.vt_residual[1]) + " " + num(s.vt_residual[2]));
        for (const auto& it : s.trace)
            r.kv("trace." + std::to_string(it.iteration), num(it.residual) + " " + num(it.functional) + " " + num(it.step));
    }
    if (rep.dichotomy) {
        r.kv("dichotomy.J", num(rep.dichotomy->J));
        r.kv("dichotomy.branch", sw::to_string(rep.dichotomy->branch));
    }
    for (const auto& st : rep.stages)
        r.kv("stage." + st.name, std::string(st.passed ? "PASS " : "FAIL ") + num(st.value) + " (" + st.detail + ")");
    r.kv("verdict", rep.outcome == "solved" ? "solved" : rep.outcome == "unstable" ? "Unstable" : "Reducible");
    r.emit(rc, "solve.txt");
    if (rep.solution && !dump_u.empty()) io::dump_file(rep.solution->u, dump_u);

    if (!rep.all_passed()) {
        for (const auto& st : rep.stages)
            if (!st.passed) std::cerr << "swlab: stage '" << st.name << "' failed: " << num(st.value) << "\n";
        return kError;
    }
    return rep.solved ? kOk : kNegative;
}

int run_sweep(const RunConfig& rc, const std::vector<double>& values) {
    const auto c = load_config(rc);
    const GridSpec g = grid_of(rc, c);
    const Field phi0 = phi0_of(c, g);
    const Connection A0(g);
    const Rational degree(std::llround(chern_weil_degree(A0)));
    std::ostringstream csv;
    csv << "# seed = " << rc.seed << ", grid = " << g.N << "\n";
    csv << "t_m,converged,residual,verdict\n";
    for (double tm : values) {
        const auto params = parameters_of(c, g, tm);
        const auto verdict = vortex::stability_check({1, {}, 0}, degree, params.lambda);
        bool converged = false;
        double residual = std::numeric_limits<double>::quiet_NaN();
        try {
            const auto sol = vortex::kazdan_warner_solve(A0, phi0, params, options_of(c));
            converged = sol.report.converged;
            residual = sol.report.residual;
        } catch (const vortex::UnstablePair&) {
        } catch (const vortex::NonConvergence& e) {
            residual = e.report.residual;
        }
        csv << num(tm) << "," << (converged ? 1 : 0) << "," << num(residual) << "," << vortex::to_string(verdict.verdict)
            << "\n";
    }
    std::cout << csv.str();
    if (!rc.out_dir.empty()) {
        fs::create_directories(rc.out_dir);
        std::ofstream(fs::path(rc.out_dir) / "sweep.csv", std::ios::binary) << csv.str();
    }
    return kOk;
}

// divisors ----------------------------------------------------------------------

int run_divisors(const RunConfig& rc, std::vector<std::int64_t> H0, std::int64_t n, int box) {
    const auto c = load_config(rc);
    const auto s = surface_of(rc, c);
    if (H0.empty()) {
        if (c.has("divisors", "H")) H0 = c.get_ints("divisors", "H");
        else throw std::invalid_argument("divisors: --H or [divisors] H is required");
    }
    if (c.has("divisors", "n")) n = c.get_int("divisors", "n");
    if (c.has("divisors", "box")) box = static_cast<int>(c.get_int("divisors", "box"));
    const auto res = topology::divisor_search(s, H0, n, box);
    Report r;
    r.kv("seed", rc.seed);
    r.kv("surface", s.name.empty() ? std::string("custom") : s.name);
    r.kv("H", join(res.H));
    r.kv("box", res.box);
    r.kv("solutions", res.solutions.size());
    for (const auto& d : res.solutions)
        r.kv("solution", "D = " + join(d.D) + " | L = " + join(d.L) + " | D.H = " + std::to_string(d.DH) +
                             (d.effective_candidate ? " | effective candidate" : ""));
    r.kv("effective", res.effective.size());
    if (!res.warning.empty()) r.kv("warning", res.warning);
    r.emit(rc, "divisors.txt");
    return kOk;
}

// dump / load ---------------------------------------------------------------------

int run_dump(const RunConfig& rc, const std::string& path, const std::string& form, const std::string& fiber, int cutoff) {
    const auto c = load_config(rc);
    const GridSpec g = grid_of(rc, c);
    const Field f = random_band_limited(g, rc.seed, cutoff, parse_form_type(form), parse_fiber(fiber));
    io::dump_file(f, path);
    Report r;
    r.kv("seed", rc.seed);
    r.kv("file", path);
    r.kv("form", to_string(f.kind));
    r.kv("fiber", to_string(f.fiber));
    r.kv("norm", num(norm(f)));
    r.emit(rc, "dump.txt");
    return kOk;
}

int run_load(const RunConfig& rc, const std::string& path, const std::string& redump) {
    const Field f = io::load_file(path);
    Report r;
    r.kv("seed", rc.seed);
    r.kv("file", path);
    r.kv("grid", f.grid.N);
    r.kv("backend", to_string(f.grid.backend));
    r.kv("rank", f.grid.rank);
    r.kv("form", to_string(f.kind));
    r.kv("fiber", to_string(f.fiber));
    r.kv("norm", num(norm(f)));
    r.kv("sup", num(sup_norm(f)));
    if (!redump.empty()) {
        io::dump_file(f, redump);
        r.kv("redump", redump);
    }
    r.emit(rc, "load.txt");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swlab: topology, identity checks and vortex solves on the flat 4-torus"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig rc;
    app.add_option("-c,--config", rc.config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", rc.seed, "random seed (recorded in every report)");
    app.add_option("-o,--out", rc.out_dir, "directory receiving report files");
    app.add_option("--grid", rc.grid_N, "override [grid] N");
    app.add_option("--tol", rc.tol, "override the pass tolerance");

    auto* topo = app.add_subcommand("topology", "characteristic classes, slopes and dimensions");
    topo->add_option("--preset", rc.preset, "built-in surface");

    int cutoff = 0, rank = 1, fibers = 1000;
    auto* ident = app.add_subcommand("identities", "Clifford, Weitzenbock, energy and pairing identities");
    ident->add_option("--cutoff", cutoff, "band limit (default N/4)");
    ident->add_option("--rank", rank, "bundle rank");
    ident->add_option("--fibers", fibers, "random fibers for the Clifford check");

    std::optional<double> tm;
    std::string dump_u;
    auto* solve = app.add_subcommand("solve", "vortex solve followed by the moduli chain");
    solve->add_option("--tm", tm, "override [solve] t_m");
    solve->add_option("--dump-u", dump_u, "write the conformal factor u to this file");

    std::vector<double> sweep_values{-1.0, -0.1, 0.0, 0.1, 1.0};
    auto* sweep = app.add_subcommand("sweep", "t_m phase sweep as CSV");
    sweep->add_option("--values", sweep_values, "t_m values");

    std::vector<std::int64_t> H0;
    std::int64_t n = 0;
    int box = 6;
    auto* div = app.add_subcommand("divisors", "search for D with D(D-K) = 0");
    div->add_option("--preset", rc.preset, "built-in surface");
    div->add_option("--H", H0, "polarization H0");
    div->add_option("--n", n, "H = H0 + nK");
    div->add_option("--box", box, "coefficient bound");

    std::string path, form = "k00", fiber = "section", redump;
    int dump_cutoff = 2;
    auto* dump = app.add_subcommand("dump", "write a seeded random field");
    dump->add_option("file", path)->required();
    dump->add_option("--form", form, "k00 k10 k01 k20 k02 k1 k2 k3");
    dump->add_option("--fiber", fiber, "scalar section endo");
    dump->add_option("--cutoff", dump_cutoff, "band limit");
    auto* load = app.add_subcommand("load", "read a field dump and summarize it");
    load->add_option("file", path)->required();
    load->add_option("--redump", redump, "write the loaded field back out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kError;
    }

    try {
        if (*topo) return run_topology(rc);
        if (*ident) return run_identities(rc, cutoff, rank, fibers);
        if (*solve) return run_solve(rc, tm, dump_u);
        if (*sweep) return run_sweep(rc, sweep_values);
        if (*div) return run_divisors(rc, H0, n, box);
        if (*dump) return run_dump(rc, path, form, fiber, dump_cutoff);
        if (*load) return run_load(rc, path, redump);
    } catch (const std::exception& e) {
        std::cerr << "swlab: error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
