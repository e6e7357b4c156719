#include "swlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swlab::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::vector<std::string> tokens(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

template <class T, class Fn>
std::vector<T> convert_all(const std::string& text, Fn fn) {
    std::vector<T> out;
    for (const auto& w : tokens(text)) out.push_back(fn(w));
    return out;
}

std::int64_t to_int(const std::string& w) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(w, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected an integer, got '" + w + "'");
    }
    if (pos != w.size()) throw std::invalid_argument("expected an integer, got '" + w + "'");
    return v;
}

double to_double(const std::string& w) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(w, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number, got '" + w + "'");
    }
    if (pos != w.size()) throw std::invalid_argument("expected a number, got '" + w + "'");
    return v;
}

}  // namespace

std::vector<std::int64_t> parse_ints(const std::string& text) { return convert_all<std::int64_t>(text, to_int); }
std::vector<double> parse_doubles(const std::string& text) { return convert_all<double>(text, to_double); }

Config Config::parse(std::istream& in, const std::string& source) {
    Config c;
    c.source_ = source;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            c.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": empty key");
        c.data_[section][key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    return parse(in, path);
}

std::string Config::where(const std::string& section, const std::string& key) const {
    return source_ + ": [" + section + "] " + key;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

std::string Config::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw std::invalid_argument(where(section, key) + ": missing required field");
    return data_.at(section).at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    data_[section][key] = value;
}

#define SWLAB_CONFIG_WRAP(expr)                                                   \
    try {                                                                         \
        return expr;                                                              \
    } catch (const std::invalid_argument& e) {                                    \
        throw std::invalid_argument(where(section, key) + ": " + e.what());       \
    } catch (const std::domain_error& e) {                                        \
        throw std::invalid_argument(where(section, key) + ": " + e.what());       \
    }

long long Config::get_int(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(to_int(get(section, key)))
}

double Config::get_double(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(to_double(get(section, key)))
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(where(section, key) + ": expected true/false, got '" + v + "'");
}

Rational Config::get_rational(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(Rational::parse(get(section, key)))
}

std::vector<std::int64_t> Config::get_ints(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(parse_ints(get(section, key)))
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(parse_doubles(get(section, key)))
}

std::vector<Rational> Config::get_rationals(const std::string& section, const std::string& key) const {
    SWLAB_CONFIG_WRAP(convert_all<Rational>(get(section, key), [](const std::string& w) { return Rational::parse(w); }))
}

std::vector<std::vector<std::int64_t>> Config::get_matrix(const std::string& section, const std::string& key) const {
    std::vector<std::vector<std::int64_t>> rows;
    try {
        for (const auto& row : split(get(section, key), ';'))
            if (!row.empty()) rows.push_back(parse_ints(row));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where(section, key) + ": " + e.what());
    }
    return rows;
}

std::vector<std::vector<double>> Config::get_rows(const std::string& section, const std::string& key) const {
    std::vector<std::vector<double>> rows;
    try {
        for (const auto& row : split(get(section, key), ';'))
            if (!row.empty()) rows.push_back(parse_doubles(row));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where(section, key) + ": " + e.what());
    }
    return rows;
}

#undef SWLAB_CONFIG_WRAP

topology::SurfacePresentation surface_from_config(const Config& c) {
    const std::string S = "surface";
    if (!c.has_section(S)) throw std::invalid_argument("config: missing [surface] section");
    const bool from_preset = c.has(S, "preset");
    topology::SurfacePresentation s;
    if (from_preset) s = topology::preset(c.get(S, "preset"));
    // Without a preset the lattice data are required; with one they override.
    const auto wanted = [&](const char* key) { return !from_preset || c.has(S, key); };
    if (c.has(S, "name")) s.name = c.get(S, "name");
    else if (!from_preset) s.name = "custom";
    if (wanted("Q")) {
        s.Q = c.get_matrix(S, "Q");
        s.b2 = static_cast<int>(s.Q.size());
    }
    if (wanted("sigma")) s.sigma = c.get_int(S, "sigma");
    if (wanted("euler")) s.euler = c.get_int(S, "euler");
    if (wanted("K")) s.K = c.get_ints(S, "K");
    if (c.has(S, "b2")) s.b2 = static_cast<int>(c.get_int(S, "b2"));
    if (c.has(S, "torsion")) s.torsion = c.get_ints(S, "torsion");
    if (c.has(S, "kahler")) s.kahler = c.get_bool(S, "kahler");
    if (c.has(S, "omega")) s.omega = c.get_rationals(S, "omega");
    if (c.has(S, "volume")) s.volume = c.get_rational(S, "volume");
    if (c.has(S, "chiO")) {
        s.chiO = c.get_int(S, "chiO");
    } else if (!from_preset && s.kahler && s.K.size() == s.Q.size()) {
        s.chiO = (s.pair(s.K, s.K) + s.euler) / 12;
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: [surface]: " + std::string(e.what()));
    }
    return s;
}

topology::BundleTopology bundle_from_config(const Config& c, int b2) {
    const std::string S = "bundle";
    topology::BundleTopology b;
    b.rank = static_cast<int>(c.get_int(S, "rank"));
    b.c1 = c.has(S, "c1") ? c.get_ints(S, "c1") : std::vector<std::int64_t>(static_cast<std::size_t>(b2), 0);
    if (static_cast<int>(b.c1.size()) != b2)
        throw std::invalid_argument("config: [bundle] c1: expected " + std::to_string(b2) + " entries");
    b.c2 = c.has(S, "c2") ? c.get_int(S, "c2") : 0;
    if (b.rank < 1) throw std::invalid_argument("config: [bundle] rank: must be >= 1");
    return b;
}

GridSpec grid_from_config(const Config& c) {
    const std::string S = "grid";
    GridSpec g;
    if (c.has(S, "N")) g.N = static_cast<int>(c.get_int(S, "N"));
    if (c.has(S, "a1")) g.a1 = c.get_double(S, "a1");
    if (c.has(S, "a2")) g.a2 = c.get_double(S, "a2");
    if (c.has(S, "backend")) {
        try {
            g.backend = parse_backend(c.get(S, "backend"));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config: [grid] backend: " + std::string(e.what()));
        }
    }
    if (c.has(S, "bidegree")) {
        const auto d = c.get_ints(S, "bidegree");
        if (d.size() != 2) throw std::invalid_argument("config: [grid] bidegree: expected two integers");
        g.d1 = static_cast<int>(d[0]);
        g.d2 = static_cast<int>(d[1]);
    }
    if (c.has(S, "rank")) g.rank = static_cast<int>(c.get_int(S, "rank"));
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: [grid]: " + std::string(e.what()));
    }
    return g;
}

}  // namespace swlab::config
