#include "curlflow/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "curlflow/error.hpp"

namespace curlflow {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr == b)
        throw ConfigError("cannot parse number '" + s + "'");
    return v;
}

const std::vector<double>& Dump::block(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.first == name) return b.second;
    throw ConfigError("dump has no block '" + name + "'");
}

void write_dump(std::ostream& os, const Dump& d) {
    os << "CURLFLOW " << d.kind << ' ' << d.nx << ' ' << d.ny;
    if (d.dim == 3) os << ' ' << d.nz;
    os << ' ' << format_double(d.h);
    for (int a = 0; a < d.dim; ++a) os << ' ' << format_double(d.origin[a]);
    os << '\n';
    if (d.ghost) os << "# ghost " << d.ghost << '\n';
    const bool named = d.blocks.size() > 1 || (!d.blocks.empty() && !d.blocks[0].first.empty());
    for (const auto& [name, values] : d.blocks) {
        if (named) os << "# " << name << '\n';
        for (double v : values) os << format_double(v) << '\n';
    }
}

Dump read_dump(std::istream& is) {
    Dump d;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty dump");
    {
        std::istringstream hs(line);
        std::string magic;
        hs >> magic >> d.kind;
        if (magic != "CURLFLOW") throw ConfigError("not a CURLFLOW dump");
        d.dim = d.kind.back() == '3' ? 3 : 2;
        hs >> d.nx >> d.ny;
        if (d.dim == 3) hs >> d.nz;
        std::string tok;
        hs >> tok;
        d.h = parse_double(tok);
        for (int a = 0; a < d.dim; ++a) {
            hs >> tok;
            d.origin[a] = parse_double(tok);
        }
        if (!hs) throw ConfigError("truncated dump header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(line.find_first_not_of("# "));
            if (body.rfind("ghost", 0) == 0) {
                d.ghost = std::stoi(body.substr(5));
            } else {
                d.blocks.emplace_back(body, std::vector<double>{});
            }
            continue;
        }
        if (d.blocks.empty()) d.blocks.emplace_back("", std::vector<double>{});
        d.blocks.back().second.push_back(parse_double(line));
    }
    return d;
}

void save_dump(const std::string& path, const Dump& d) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_dump(os, d);
}

Dump load_dump(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return read_dump(is);
}

namespace {

Dump header2(const char* kind, const GridDesc2& g) {
    Dump d;
    d.kind = kind;
    d.dim = 2;
    d.nx = g.nx;
    d.ny = g.ny;
    d.h = g.h;
    d.origin[0] = g.origin.x;
    d.origin[1] = g.origin.y;
    return d;
}

Dump header3(const char* kind, const GridDesc3& g) {
    Dump d;
    d.kind = kind;
    d.dim = 3;
    d.nx = g.nx;
    d.ny = g.ny;
    d.nz = g.nz;
    d.h = g.h;
    for (int a = 0; a < 3; ++a) d.origin[a] = g.origin[a];
    return d;
}

void expect_kind(const Dump& d, const char* kind) {
    if (d.kind != kind) throw ConfigError("expected " + std::string(kind) + " dump, got " + d.kind);
}

template <class A>
void load_block(const Dump& d, const std::string& name, A& dst) {
    const auto& src = name.empty() && d.blocks.size() == 1 ? d.blocks[0].second : d.block(name);
    if (src.size() != dst.size())
        throw DimensionError("block '" + name + "' has " + std::to_string(src.size()) +
                             " samples, expected " + std::to_string(dst.size()));
    dst.data() = src;
}

}  // namespace

GridDesc2 grid2_of(const Dump& d) {
    GridDesc2 g{d.nx, d.ny, d.h, {d.origin[0], d.origin[1]}};
    g.validate();
    return g;
}

GridDesc3 grid3_of(const Dump& d) {
    GridDesc3 g{d.nx, d.ny, d.nz, d.h, {d.origin[0], d.origin[1], d.origin[2]}};
    g.validate();
    return g;
}

Dump to_dump(const MacField2& f) {
    Dump d = header2("MAC2", f.desc);
    d.blocks = {{"u", f.u.data()}, {"v", f.v.data()}};
    return d;
}

Dump to_dump(const MacField3& f) {
    Dump d = header3("MAC3", f.desc);
    d.blocks = {{"u", f.u.data()}, {"v", f.v.data()}, {"w", f.w.data()}};
    return d;
}

Dump to_dump(const NodalField2& f) {
    Dump d = header2("NODAL2", f.desc);
    d.blocks = {{"", f.values.data()}};
    return d;
}

Dump to_dump(const NodalField3& f) {
    Dump d = header3("NODAL3", f.desc);
    d.blocks = {{"", f.values.data()}};
    return d;
}

Dump to_dump(const EdgeField3& f) {
    Dump d = header3("EDGE3", f.desc);
    d.blocks = {{"ex", f.ex.data()}, {"ey", f.ey.data()}, {"ez", f.ez.data()}};
    return d;
}

MacField2 mac2_from_dump(const Dump& d) {
    expect_kind(d, "MAC2");
    MacField2 f(grid2_of(d));
    load_block(d, "u", f.u);
    load_block(d, "v", f.v);
    return f;
}

MacField3 mac3_from_dump(const Dump& d) {
    expect_kind(d, "MAC3");
    MacField3 f(grid3_of(d));
    load_block(d, "u", f.u);
    load_block(d, "v", f.v);
    load_block(d, "w", f.w);
    return f;
}

NodalField2 nodal2_from_dump(const Dump& d) {
    expect_kind(d, "NODAL2");
    if (d.ghost) throw ConfigError("NODAL2 dump with ghost ring is a stream field dump");
    NodalField2 f(grid2_of(d));
    load_block(d, "", f.values);
    return f;
}

NodalField3 nodal3_from_dump(const Dump& d) {
    expect_kind(d, "NODAL3");
    NodalField3 f(grid3_of(d));
    load_block(d, "", f.values);
    return f;
}

EdgeField3 edge3_from_dump(const Dump& d) {
    expect_kind(d, "EDGE3");
    EdgeField3 f(grid3_of(d));
    load_block(d, "ex", f.ex);
    load_block(d, "ey", f.ey);
    load_block(d, "ez", f.ez);
    return f;
}

}  // namespace curlflow
