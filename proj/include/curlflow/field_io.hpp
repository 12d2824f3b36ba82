#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "curlflow/grid.hpp"

namespace curlflow {

/// Text dump of one or more sample blocks over a grid.
///
///     CURLFLOW <kind> <nx> <ny> [<nz>] <h> <ox> <oy> [<oz>]
///     [# ghost 1]
///     # <block>
///     <sample per line>
///
/// Values are written with shortest round-trip formatting, so reading a dump
/// back reproduces every double bit for bit.
struct Dump {
    std::string kind;  // NODAL2, NODAL3, MAC2, MAC3, EDGE3
    int dim = 2;
    int nx = 0, ny = 0, nz = 0;
    double h = 1.0;
    double origin[3] = {0.0, 0.0, 0.0};
    int ghost = 0;
    std::vector<std::pair<std::string, std::vector<double>>> blocks;

    const std::vector<double>& block(const std::string& name) const;
};

std::string format_double(double v);
double parse_double(const std::string& s);

void write_dump(std::ostream& os, const Dump& d);
Dump read_dump(std::istream& is);
void save_dump(const std::string& path, const Dump& d);
Dump load_dump(const std::string& path);

Dump to_dump(const MacField2& f);
Dump to_dump(const MacField3& f);
Dump to_dump(const NodalField2& f);
Dump to_dump(const NodalField3& f);
Dump to_dump(const EdgeField3& f);

MacField2 mac2_from_dump(const Dump& d);
MacField3 mac3_from_dump(const Dump& d);
NodalField2 nodal2_from_dump(const Dump& d);
NodalField3 nodal3_from_dump(const Dump& d);
EdgeField3 edge3_from_dump(const Dump& d);

GridDesc2 grid2_of(const Dump& d);
GridDesc3 grid3_of(const Dump& d);

}  // namespace curlflow
