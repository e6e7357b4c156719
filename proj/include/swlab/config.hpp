#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "swlab/grid.hpp"
#include "swlab/rational.hpp"
#include "swlab/surface_topology.hpp"

// Plain-text configuration: `key = value` lines grouped under `[section]`
// headers, `#` starts a comment, matrix rows are separated by `;`.
namespace swlab::config {

class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<input>");
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;

    long long get_int(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    Rational get_rational(const std::string& section, const std::string& key) const;
    std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<Rational> get_rationals(const std::string& section, const std::string& key) const;
    std::vector<std::vector<std::int64_t>> get_matrix(const std::string& section, const std::string& key) const;
    std::vector<std::vector<double>> get_rows(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    const std::map<std::string, std::map<std::string, std::string>>& sections() const { return data_; }

private:
    std::string where(const std::string& section, const std::string& key) const;
    std::string source_;
    std::map<std::string, std::map<std::string, std::string>> data_;
};

/// [surface]: either `preset = NAME` (other keys override) or the full
/// lattice data b2, Q, torsion, sigma, euler, K, omega, volume, chiO, kahler.
topology::SurfacePresentation surface_from_config(const Config& c);
/// [bundle]: rank, c1, c2.
topology::BundleTopology bundle_from_config(const Config& c, int b2);
/// [grid]: N, a1, a2, backend, bidegree, rank.
GridSpec grid_from_config(const Config& c);

std::vector<std::int64_t> parse_ints(const std::string& text);
std::vector<double> parse_doubles(const std::string& text);

}  // namespace swlab::config
