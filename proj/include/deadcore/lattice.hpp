#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "deadcore/errors.hpp"
#include "deadcore/potential.hpp"

namespace deadcore {

enum class NodeMask : uint8_t { Outside = 0, Boundary = 1, Interior = 2 };

enum class DomainShape { Interval, Rectangle, Disk };

inline const char* to_string(DomainShape s) {
    switch (s) {
        case DomainShape::Interval: return "interval";
        case DomainShape::Rectangle: return "rectangle";
        case DomainShape::Disk: return "disk";
    }
    return "?";
}

// Uniform lattice in n = 1 or 2 with a per-node Interior/Boundary/Outside
// mask.  Interval and rectangle domains use the outermost node layer as
// the boundary; disk domains rasterize the boundary as the first node
// layer outside the circle.
struct LatticeDomain {
    int n = 1;
    std::array<int, 2> shape{1, 1};
    double h = 1.0;
    std::array<double, 2> origin{0.0, 0.0};
    DomainShape domain = DomainShape::Interval;
    double disk_radius = 0.0; // Disk only
    std::vector<NodeMask> mask;

    int num_nodes() const { return shape[0] * shape[1]; }
    int idx(int i, int j = 0) const { return j * shape[0] + i; }
    double x(int i) const { return origin[0] + h * i; }
    double y(int j) const { return origin[1] + h * j; }

    static LatticeDomain interval(double length, int nx) {
        if (nx < 3) throw precondition_error("interval: need at least 3 nodes");
        LatticeDomain d;
        d.n = 1;
        d.shape = {nx, 1};
        d.h = length / (nx - 1);
        d.origin = {0.0, 0.0};
        d.domain = DomainShape::Interval;
        d.mask.assign(nx, NodeMask::Interior);
        d.mask.front() = d.mask.back() = NodeMask::Boundary;
        return d;
    }

    static LatticeDomain interval(double a, double b, int nx) {
        LatticeDomain d = interval(b - a, nx);
        d.origin = {a, 0.0};
        return d;
    }

    static LatticeDomain rectangle(double lx, double ly, int nx, int ny) {
        if (nx < 3 || ny < 3) throw precondition_error("rectangle: need at least 3 nodes per axis");
        LatticeDomain d;
        d.n = 2;
        d.shape = {nx, ny};
        d.h = lx / (nx - 1);
        const double hy = ly / (ny - 1);
        if (std::abs(d.h - hy) > 1e-9 * d.h)
            throw precondition_error("rectangle: extents must give a uniform spacing");
        d.origin = {0.0, 0.0};
        d.domain = DomainShape::Rectangle;
        d.mask.assign(d.num_nodes(), NodeMask::Interior);
        for (int i = 0; i < nx; ++i) {
            d.mask[d.idx(i, 0)] = NodeMask::Boundary;
            d.mask[d.idx(i, ny - 1)] = NodeMask::Boundary;
        }
        for (int j = 0; j < ny; ++j) {
            d.mask[d.idx(0, j)] = NodeMask::Boundary;
            d.mask[d.idx(nx - 1, j)] = NodeMask::Boundary;
        }
        return d;
    }

    // Square grid of nx*nx nodes centered on the disk, with a two-node
    // margin outside the circle.
    static LatticeDomain disk(double radius, int nx) {
        if (nx < 9) throw precondition_error("disk: need at least 9 nodes per axis");
        LatticeDomain d;
        d.n = 2;
        d.shape = {nx, nx};
        d.h = 2.0 * radius / (nx - 5);
        const double half = 0.5 * d.h * (nx - 1);
        d.origin = {-half, -half};
        d.domain = DomainShape::Disk;
        d.disk_radius = radius;
        d.mask.assign(d.num_nodes(), NodeMask::Outside);
        auto inside = [&](int i, int j) {
            const double px = d.x(i), py = d.y(j);
            return std::sqrt(px * px + py * py) < radius;
        };
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i)
                if (inside(i, j)) d.mask[d.idx(i, j)] = NodeMask::Interior;
        for (int j = 0; j < nx; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (d.mask[d.idx(i, j)] != NodeMask::Outside) continue;
                const bool adj =
                    (i > 0 && d.mask[d.idx(i - 1, j)] == NodeMask::Interior) ||
                    (i + 1 < nx && d.mask[d.idx(i + 1, j)] == NodeMask::Interior) ||
                    (j > 0 && d.mask[d.idx(i, j - 1)] == NodeMask::Interior) ||
                    (j + 1 < nx && d.mask[d.idx(i, j + 1)] == NodeMask::Interior);
                if (adj) d.mask[d.idx(i, j)] = NodeMask::Boundary;
            }
        }
        return d;
    }
};

// m-component field on a lattice with frozen Dirichlet data on Boundary
// nodes and the pointwise constraint |u| <= q.
struct GridField {
    LatticeDomain dom;
    int m = 1;
    double q = 1.0;
    std::vector<double> values;        // node-major, m components per node
    std::vector<double> boundary_data; // same layout; meaningful on Boundary nodes

    static GridField zeros(LatticeDomain d, int m, double q) {
        GridField f;
        f.dom = std::move(d);
        f.m = m;
        f.q = q;
        f.values.assign(static_cast<size_t>(f.dom.num_nodes()) * m, 0.0);
        f.boundary_data = f.values;
        return f;
    }

    double* at(int node) { return values.data() + static_cast<size_t>(node) * m; }
    const double* at(int node) const { return values.data() + static_cast<size_t>(node) * m; }
    const double* bc(int node) const { return boundary_data.data() + static_cast<size_t>(node) * m; }

    double norm_at(int node) const {
        const double* u = at(node);
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += u[c] * u[c];
        return std::sqrt(s);
    }

    // Copies boundary_data onto Boundary nodes (they are frozen during
    // minimization).
    void apply_boundary() {
        for (int node = 0; node < dom.num_nodes(); ++node)
            if (dom.mask[node] == NodeMask::Boundary)
                for (int c = 0; c < m; ++c) at(node)[c] = bc(node)[c];
    }

    double max_norm() const {
        double mx = 0.0;
        for (int node = 0; node < dom.num_nodes(); ++node)
            if (dom.mask[node] != NodeMask::Outside) mx = std::max(mx, norm_at(node));
        return mx;
    }
};

inline std::vector<double> modulus_field(const GridField& f) {
    std::vector<double> out(f.dom.num_nodes(), 0.0);
    for (int node = 0; node < f.dom.num_nodes(); ++node)
        if (f.dom.mask[node] != NodeMask::Outside) out[node] = f.norm_at(node);
    return out;
}

// Boundary data builders ----------------------------------------------------

inline void set_boundary_constant(GridField& f, const std::vector<double>& value) {
    if (static_cast<int>(value.size()) != f.m)
        throw precondition_error("set_boundary_constant: component count mismatch");
    for (int node = 0; node < f.dom.num_nodes(); ++node)
        if (f.dom.mask[node] == NodeMask::Boundary)
            for (int c = 0; c < f.m; ++c)
                f.boundary_data[static_cast<size_t>(node) * f.m + c] = value[c];
    f.apply_boundary();
}

// Radial hedgehog q * x/|x| on a disk, optionally zeroed on the arc
// |angle - arc_center| <= arc_halfwidth (needed to exercise the boundary
// version of the comparison bound, which requires vanishing data on the
// arc the test ball cuts).
inline void set_boundary_hedgehog(GridField& f, double arc_center = 0.0,
                                  double arc_halfwidth = -1.0) {
    if (f.m != 2 || f.dom.domain != DomainShape::Disk)
        throw precondition_error("set_boundary_hedgehog: requires m=2 on a disk");
    for (int j = 0; j < f.dom.shape[1]; ++j) {
        for (int i = 0; i < f.dom.shape[0]; ++i) {
            const int node = f.dom.idx(i, j);
            if (f.dom.mask[node] != NodeMask::Boundary) continue;
            const double px = f.dom.x(i), py = f.dom.y(j);
            const double r = std::hypot(px, py);
            double ux = 0.0, uy = 0.0;
            if (r > 0.0) {
                ux = f.q * px / r;
                uy = f.q * py / r;
            }
            if (arc_halfwidth >= 0.0) {
                double dtheta = std::atan2(py, px) - arc_center;
                while (dtheta > std::numbers::pi) dtheta -= 2.0 * std::numbers::pi;
                while (dtheta < -std::numbers::pi) dtheta += 2.0 * std::numbers::pi;
                if (std::abs(dtheta) <= arc_halfwidth) ux = uy = 0.0;
            }
            f.boundary_data[static_cast<size_t>(node) * f.m + 0] = ux;
            f.boundary_data[static_cast<size_t>(node) * f.m + 1] = uy;
        }
    }
    f.apply_boundary();
}

// Per-edge constants on a rectangle (scalar fields): left, right, bottom, top.
inline void set_boundary_edges(GridField& f, double left, double right,
                               double bottom, double top) {
    if (f.m != 1 || f.dom.domain != DomainShape::Rectangle)
        throw precondition_error("set_boundary_edges: requires m=1 on a rectangle");
    const int nx = f.dom.shape[0], ny = f.dom.shape[1];
    for (int i = 0; i < nx; ++i) {
        f.boundary_data[f.dom.idx(i, 0)] = bottom;
        f.boundary_data[f.dom.idx(i, ny - 1)] = top;
    }
    for (int j = 0; j < ny; ++j) {
        f.boundary_data[f.dom.idx(0, j)] = left;
        f.boundary_data[f.dom.idx(nx - 1, j)] = right;
    }
    f.apply_boundary();
}

} // namespace deadcore
