#include "swlab/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swlab::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_double(std::ostream& out, double v) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_double(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("field dump: truncated payload");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    double v;
    std::memcpy(&v, b, 8);
    return v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void dump(const Field& f, std::ostream& out) {
    const auto& g = f.grid;
    out << "swlab-field 1\n"
        << "kind = " << to_string(f.kind) << "\n"
        << "fiber = " << to_string(f.fiber) << "\n"
        << "N = " << g.N << "\n"
        << "areas = " << format_double(g.a1) << " " << format_double(g.a2) << "\n"
        << "bidegree = " << g.d1 << " " << g.d2 << "\n"
        << "rank = " << g.rank << "\n"
        << "backend = " << to_string(g.backend) << "\n"
        << "endianness = little\n"
        << "components = " << f.components() << "\n"
        << "fiber_dim = " << f.fiber_dim() << "\n"
        << "end\n";
    for (const auto& grid : f.data)
        for (auto v : grid) {
            put_double(out, v.real());
            put_double(out, v.imag());
        }
}

Field load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "swlab-field 1") throw std::runtime_error("field dump: bad magic line");
    std::map<std::string, std::string> h;
    for (;;) {
        if (!std::getline(in, line)) throw std::runtime_error("field dump: header not terminated by 'end'");
        if (line == "end") break;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw std::runtime_error("field dump: malformed header line '" + line + "'");
        h[line.substr(0, eq)] = line.substr(eq + 3);
    }
    const auto need = [&](const std::string& k) {
        auto it = h.find(k);
        if (it == h.end()) throw std::runtime_error("field dump: header lacks '" + k + "'");
        return it->second;
    };
    if (need("endianness") != "little") throw std::runtime_error("field dump: only little-endian payloads are supported");
    GridSpec g;
    g.N = std::stoi(need("N"));
    {
        std::istringstream a(need("areas"));
        a >> g.a1 >> g.a2;
        std::istringstream d(need("bidegree"));
        d >> g.d1 >> g.d2;
    }
    g.rank = std::stoi(need("rank"));
    g.backend = parse_backend(need("backend"));
    g.validate();
    Field f(g, parse_form_type(need("kind")), parse_fiber(need("fiber")));
    if (std::stoi(need("components")) != f.components() || std::stoi(need("fiber_dim")) != f.fiber_dim())
        throw std::runtime_error("field dump: component counts disagree with kind/fiber");
    for (auto& grid : f.data)
        for (auto& v : grid) {
            const double re = get_double(in);
            const double im = get_double(in);
            v = {re, im};
        }
    return f;
}

void dump_file(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    dump(f, out);
}

Field load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return load(in);
}

}  // namespace swlab::io
