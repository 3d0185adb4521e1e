#include "edpd/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace edpd {

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

FieldOutput collect_fields(const NodeSet& nodes, std::span<const Vec3> u,
                           std::span<const Sym3> sigma, std::span<const double> theta) {
    FieldOutput f;
    const std::size_t n = nodes.interior_count();
    f.ids.reserve(n);
    f.positions.reserve(n);
    f.displacements.reserve(n);
    f.stress.reserve(n);
    f.dilatation.reserve(n);
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        if (!nodes.is_interior(id)) continue;
        f.ids.push_back(id);
        f.positions.push_back(nodes.positions[id]);
        f.displacements.push_back(u[id]);
        f.stress.push_back(sigma.empty() ? Sym3{} : sigma[id]);
        f.dilatation.push_back(theta.empty() ? 0.0 : theta[id]);
    }
    return f;
}

namespace {

constexpr const char* kCsvHeader = "id,x,y,z,ux,uy,uz,sxx,syy,szz,sxy,sxz,syz,theta";

void append_row(std::string& out, std::size_t id, const Vec3& p, const Vec3& u, const Sym3& s,
                double theta) {
    out += std::to_string(id);
    for (double v : {p.x, p.y, p.z, u.x, u.y, u.z, s.xx, s.yy, s.zz, s.xy, s.xz, s.yz, theta}) {
        out += ',';
        out += format_double(v);
    }
    out += '\n';
}

} // namespace

void write_fields_csv(const FieldOutput& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    std::string buf;
    buf.reserve(f.rows() * 160 + 64);
    buf += kCsvHeader;
    buf += '\n';
    for (std::size_t r = 0; r < f.rows(); ++r)
        append_row(buf, f.ids[r], f.positions[r], f.displacements[r], f.stress[r],
                   f.dilatation[r]);
    out << buf;
}

FieldOutput read_fields_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error(path + ": unexpected CSV header");
    FieldOutput f;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 13> v{};
        const char* p = line.c_str();
        char* end = nullptr;
        const std::size_t id = std::strtoull(p, &end, 10);
        p = end;
        for (auto& x : v) {
            if (*p != ',') throw std::runtime_error(path + ": malformed row");
            x = std::strtod(p + 1, &end);
            p = end;
        }
        f.ids.push_back(id);
        f.positions.push_back({v[0], v[1], v[2]});
        f.displacements.push_back({v[3], v[4], v[5]});
        f.stress.push_back({v[6], v[7], v[8], v[9], v[10], v[11]});
        f.dilatation.push_back(v[12]);
    }
    return f;
}

void write_fields_vtk(const FieldOutput& f, const NodeSet& nodes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const auto& bn = nodes.box_n;
    const Vec3 first{nodes.origin.x + nodes.layer * nodes.dx, nodes.origin.y + nodes.layer * nodes.dx,
                     nodes.dim == 3 ? nodes.origin.z + nodes.layer * nodes.dx : 0.0};
    out << "# vtk DataFile Version 3.0\n";
    out << "peridynamic dislocation fields\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << bn[0] << ' ' << bn[1] << ' ' << bn[2] << '\n';
    out << "ORIGIN " << format_double(first.x) << ' ' << format_double(first.y) << ' '
        << format_double(first.z) << '\n';
    out << "SPACING " << format_double(nodes.dx) << ' ' << format_double(nodes.dx) << ' '
        << format_double(nodes.dx) << '\n';
    out << "POINT_DATA " << f.rows() << '\n';

    out << "VECTORS displacement double\n";
    for (const auto& u : f.displacements)
        out << format_double(u.x) << ' ' << format_double(u.y) << ' ' << format_double(u.z) << '\n';

    out << "TENSORS stress double\n";
    for (const auto& s : f.stress) {
        out << format_double(s.xx) << ' ' << format_double(s.xy) << ' ' << format_double(s.xz)
            << '\n';
        out << format_double(s.xy) << ' ' << format_double(s.yy) << ' ' << format_double(s.yz)
            << '\n';
        out << format_double(s.xz) << ' ' << format_double(s.yz) << ' ' << format_double(s.zz)
            << "\n\n";
    }

    out << "SCALARS dilatation double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double t : f.dilatation) out << format_double(t) << '\n';
}

std::size_t nearest_interior_node(const NodeSet& nodes, const Vec3& p) {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < nodes.dim; ++a) {
        const double rel = (p[a] - nodes.origin[a]) / nodes.dx;
        int i = static_cast<int>(std::floor(rel + 0.5)); // half-ties go to the upper node
        i = std::max(nodes.layer, std::min(nodes.layer + nodes.box_n[a] - 1, i));
        c[a] = i;
    }
    return nodes.id_of(c[0], c[1], c[2]);
}

std::vector<ProbeRow> probe_line(const NodeSet& nodes, const FieldOutput& f, const Vec3& from,
                                 const Vec3& to, int samples) {
    std::unordered_map<std::size_t, std::size_t> row_of;
    row_of.reserve(f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) row_of.emplace(f.ids[r], r);

    std::vector<ProbeRow> rows;
    rows.reserve(samples);
    const Vec3 d = to - from;
    const double len = norm(d);
    for (int k = 0; k < samples; ++k) {
        const double t = samples == 1 ? 0.0 : static_cast<double>(k) / (samples - 1);
        ProbeRow row;
        row.requested = from + d * t;
        row.s = t * len;
        row.node_id = nearest_interior_node(nodes, row.requested);
        const auto it = row_of.find(row.node_id);
        if (it == row_of.end()) throw std::runtime_error("probe: node missing from field table");
        const std::size_t r = it->second;
        row.position = f.positions[r];
        row.displacement = f.displacements[r];
        row.stress = f.stress[r];
        row.dilatation = f.dilatation[r];
        rows.push_back(row);
    }
    return rows;
}

void write_probe_csv(const std::vector<ProbeRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "s,xq,yq,zq," << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.s) << ',' << format_double(r.requested.x) << ','
            << format_double(r.requested.y) << ',' << format_double(r.requested.z) << ',';
        std::string buf;
        append_row(buf, r.node_id, r.position, r.displacement, r.stress, r.dilatation);
        out << buf;
    }
}

} // namespace edpd
