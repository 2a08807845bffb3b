#pragma once

// Linear Lagrange elements on triangulated rectangles: mass/stiffness
// assembly, homogeneous Dirichlet elimination, and the observation-curve
// operators (nodal trace and arc-length weighted surface load).

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "fracwave/types.hpp"

namespace fracwave {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Box {
    double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;
    double area() const noexcept { return (x1 - x0) * (y1 - y0); }
};

using Triangle = std::array<int, 3>;

/// Plain node/triangle lists; every triangle counter-clockwise.
struct Triangulation {
    std::vector<Point> nodes;
    std::vector<Triangle> triangles;

    std::size_t node_count() const noexcept { return nodes.size(); }
    /// Signed area of triangle e; throws on a degenerate element.
    double area(std::size_t e) const;
};

/// nx x ny cells on a box, two triangles per cell with the diagonal
/// alternating between neighbouring cells. Nodes are numbered row-major:
/// index = j * (nx + 1) + i.
class StructuredMesh {
public:
    StructuredMesh(Box box, int nx, int ny);

    const Box& box() const noexcept { return box_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double hx() const noexcept { return (box_.x1 - box_.x0) / nx_; }
    double hy() const noexcept { return (box_.y1 - box_.y0) / ny_; }

    const Triangulation& triangulation() const noexcept { return tri_; }
    std::size_t node_count() const noexcept { return tri_.nodes.size(); }
    const Point& node(std::size_t i) const { return tri_.nodes[i]; }
    int node_index(int i, int j) const noexcept { return j * (nx_ + 1) + i; }

    bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
    const std::vector<int>& interior_nodes() const noexcept { return interior_nodes_; }

    /// Node closest to p (ties broken towards lower index).
    int nearest_node(Point p) const;

private:
    Box box_;
    int nx_, ny_;
    Triangulation tri_;
    std::vector<char> boundary_;
    std::vector<int> boundary_nodes_;
    std::vector<int> interior_nodes_;
};

/// Observation curve: closed polygon through the mesh nodes nearest to a
/// circle, ordered by angle, weighted by the arc length of the circle that snaps to each node.
class SurfaceSampler {
public:
    static SurfaceSampler circle(const StructuredMesh& mesh, Point center, double radius);

    const std::vector<int>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<Point>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double perimeter() const noexcept { return perimeter_; }

private:
    std::vector<int> nodes_;
    std::vector<Point> points_;
    std::vector<double> weights_;
    double perimeter_ = 0.0;
};

/// Exact P1 mass matrix, assembled row-wise in parallel.
SparseMatrix assemble_mass(const Triangulation& mesh);
/// P1 stiffness (Dirichlet Laplacian without boundary conditions).
SparseMatrix assemble_stiffness(const Triangulation& mesh);

inline SparseMatrix assemble_mass(const StructuredMesh& m) { return assemble_mass(m.triangulation()); }
inline SparseMatrix assemble_stiffness(const StructuredMesh& m) {
    return assemble_stiffness(m.triangulation());
}

namespace serial {
/// Element-loop reference assembly (triplet accumulation).
SparseMatrix assemble_mass(const Triangulation& mesh);
SparseMatrix assemble_stiffness(const Triangulation& mesh);
}  // namespace serial

/// Symmetric homogeneous elimination: zero rows and columns of the listed
/// nodes, put 1 on their diagonal.
SparseMatrix apply_dirichlet(const SparseMatrix& matrix, const std::vector<int>& boundary_nodes);

struct DirichletSystem {
    SparseMatrix matrix;
    Vector rhs;
};

/// Matrix elimination plus zeroed right-hand side at the boundary nodes.
DirichletSystem apply_dirichlet(const SparseMatrix& matrix, const Vector& rhs,
                                const std::vector<int>& boundary_nodes);

/// Load vector int_Sigma w N_i dS by the arc-length node quadrature.
Vector surface_load(const StructuredMesh& mesh, const SurfaceSampler& sampler,
                    const Vector& w_at_sigma);

/// Nodal values of field at the Sigma nodes.
Vector trace_on_sigma(const StructuredMesh& mesh, const SurfaceSampler& sampler,
                      const Vector& field);

/// Nodal interpolant of f.
Vector interpolate(const StructuredMesh& mesh, const std::function<double(double, double)>& f);

/// CSV with header x,y,value, one node per line in node order.
void write_field_csv(const std::filesystem::path& path, const StructuredMesh& mesh,
                     const Vector& field);

/// Legacy-VTK ASCII unstructured grid with one point-data scalar.
void write_field_vtk(const std::filesystem::path& path, const StructuredMesh& mesh,
                     const Vector& field, const std::string& name = "u");

}  // namespace fracwave
