#pragma once

#include <iosfwd>
#include <string>

#include "swlab/field_calculus.hpp"

// Field dump: a plain-text header terminated by a line `end`, followed by
// little-endian float64 (re, im) pairs, component-major, then fiber entry,
// then grid points in (x1, y1, x2, y2) row-major order.
namespace swlab::io {

void dump(const Field& f, std::ostream& out);
Field load(std::istream& in);
void dump_file(const Field& f, const std::string& path);
Field load_file(const std::string& path);

}  // namespace swlab::io
