#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "edpd/grid.hpp"
#include "edpd/vec.hpp"

namespace edpd {

/// Interior-node field table; fictitious nodes never appear in outputs.
struct FieldOutput {
    std::vector<std::size_t> ids; // padded-lattice node ids
    std::vector<Vec3> positions;
    std::vector<Vec3> displacements;
    std::vector<Sym3> stress;
    std::vector<double> dilatation;

    std::size_t rows() const { return ids.size(); }
};

FieldOutput collect_fields(const NodeSet& nodes, std::span<const Vec3> u,
                           std::span<const Sym3> sigma, std::span<const double> theta);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_fields_csv(const FieldOutput& f, const std::string& path);
FieldOutput read_fields_csv(const std::string& path);

/// Legacy ASCII STRUCTURED_POINTS over the interior lattice with point data
/// "displacement" (vectors), "stress" (tensors) and "dilatation" (scalars).
void write_fields_vtk(const FieldOutput& f, const NodeSet& nodes, const std::string& path);

/// Nearest interior node to p (ties resolve toward the lower cell index).
std::size_t nearest_interior_node(const NodeSet& nodes, const Vec3& p);

struct ProbeRow {
    double s = 0.0; // arclength parameter of the requested sample
    Vec3 requested;
    std::size_t node_id = 0;
    Vec3 position;
    Vec3 displacement;
    Sym3 stress;
    double dilatation = 0.0;
};

/// Samples a segment at `samples` evenly spaced points by nearest-node lookup.
std::vector<ProbeRow> probe_line(const NodeSet& nodes, const FieldOutput& f, const Vec3& from,
                                 const Vec3& to, int samples);

void write_probe_csv(const std::vector<ProbeRow>& rows, const std::string& path);

} // namespace edpd
