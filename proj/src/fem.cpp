#include "fracwave/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "fracwave/io.hpp"

namespace fracwave {

namespace {

using Local = std::array<std::array<double, 3>, 3>;

Local element_mass(const Triangulation& mesh, std::size_t e) {
    const double a = mesh.area(e) / 12.0;
    Local m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? 2.0 : 1.0) * a;
    return m;
}

Local element_stiffness(const Triangulation& mesh, std::size_t e) {
    const auto& t = mesh.triangles[e];
    const double area = mesh.area(e);
    std::array<double, 3> gx{}, gy{};
    for (int i = 0; i < 3; ++i) {
        const Point& pj = mesh.nodes[t[(i + 1) % 3]];
        const Point& pk = mesh.nodes[t[(i + 2) % 3]];
        gx[i] = pj.y - pk.y;
        gy[i] = pk.x - pj.x;
    }
    Local k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[i][j] = (gx[i] * gx[j] + gy[i] * gy[j]) / (4.0 * area);
    return k;
}

template <class LocalFn>
SparseMatrix assemble_triplets(const Triangulation& mesh, LocalFn local) {
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(9 * mesh.triangles.size());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        const Local m = local(mesh, e);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) triplets.emplace_back(t[i], t[j], m[i][j]);
    }
    SparseMatrix A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    return A;
}

// Each thread owns whole rows: row i collects contributions from the
// elements incident to node i, in element order.
template <class LocalFn>
SparseMatrix assemble_rows(const Triangulation& mesh, LocalFn local) {
    const std::size_t n = mesh.node_count();
    const std::size_t ne = mesh.triangles.size();
    std::vector<Local> locals(ne);
    // exceptions must not escape the parallel region
    for (std::size_t e = 0; e < ne; ++e) (void)mesh.area(e);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(ne); ++e)
        locals[static_cast<std::size_t>(e)] = local(mesh, static_cast<std::size_t>(e));

    std::vector<int> start(n + 1, 0);
    for (const auto& t : mesh.triangles)
        for (int v : t) ++start[static_cast<std::size_t>(v) + 1];
    for (std::size_t i = 0; i < n; ++i) start[i + 1] += start[i];
    std::vector<int> incident(static_cast<std::size_t>(start[n]));
    std::vector<int> fill(start.begin(), start.end() - 1);
    for (std::size_t e = 0; e < ne; ++e)
        for (int v : mesh.triangles[e]) incident[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = static_cast<int>(e);

    std::vector<std::vector<std::pair<int, double>>> rows(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        auto& row = rows[i];
        for (int k = start[i]; k < start[i + 1]; ++k) {
            const auto e = static_cast<std::size_t>(incident[static_cast<std::size_t>(k)]);
            const auto& t = mesh.triangles[e];
            int li = 0;
            while (t[li] != static_cast<int>(i)) ++li;
            for (int lj = 0; lj < 3; ++lj) row.emplace_back(t[lj], locals[e][li][lj]);
        }
        std::stable_sort(row.begin(), row.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (out > 0 && row[out - 1].first == row[k].first)
                row[out - 1].second += row[k].second;
            else
                row[out++] = row[k];
        }
        row.resize(out);
    }

    const auto dim = static_cast<Eigen::Index>(n);
    SparseMatrix A(dim, dim);
    Eigen::VectorXi per_row(dim);
    for (std::size_t i = 0; i < n; ++i) per_row[static_cast<Eigen::Index>(i)] = static_cast<int>(rows[i].size());
    A.reserve(per_row);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, v] : rows[i]) A.insert(static_cast<Eigen::Index>(i), j) = v;
    A.makeCompressed();
    return A;
}

}  // namespace

double Triangulation::area(std::size_t e) const {
    const auto& t = triangles.at(e);
    const Point& a = nodes[t[0]];
    const Point& b = nodes[t[1]];
    const Point& c = nodes[t[2]];
    const double s = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    if (!(std::abs(s) > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("degenerate triangle " + std::to_string(e));
    return s;
}

StructuredMesh::StructuredMesh(Box box, int nx, int ny) : box_(box), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("mesh needs at least one cell per direction");
    if (!(box.x1 > box.x0 && box.y1 > box.y0)) throw std::invalid_argument("empty mesh box");
    const double dx = hx(), dy = hy();
    tri_.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            tri_.nodes.push_back({i == nx ? box.x1 : box.x0 + i * dx, j == ny ? box.y1 : box.y0 + j * dy});
    tri_.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int n00 = node_index(i, j), n10 = node_index(i + 1, j);
            const int n01 = node_index(i, j + 1), n11 = node_index(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                tri_.triangles.push_back({n00, n10, n11});
                tri_.triangles.push_back({n00, n11, n01});
            } else {
                tri_.triangles.push_back({n00, n10, n01});
                tri_.triangles.push_back({n10, n11, n01});
            }
        }
    boundary_.assign(tri_.nodes.size(), 0);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const int k = node_index(i, j);
            if (i == 0 || j == 0 || i == nx || j == ny) {
                boundary_[static_cast<std::size_t>(k)] = 1;
                boundary_nodes_.push_back(k);
            } else {
                interior_nodes_.push_back(k);
            }
        }
}

int StructuredMesh::nearest_node(Point p) const {
    auto axis = [](double v, double lo, double h, int cells) {
        const double s = (v - lo) / h;
        int k = static_cast<int>(std::floor(s));
        k = std::clamp(k, 0, cells);
        if (k < cells && (s - k) > 0.5) ++k;
        return k;
    };
    return node_index(axis(p.x, box_.x0, hx(), nx_), axis(p.y, box_.y0, hy(), ny_));
}

SurfaceSampler SurfaceSampler::circle(const StructuredMesh& mesh, Point center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("observation circle needs a positive radius");
    const std::size_t samples = std::max<std::size_t>(4096, 64 * static_cast<std::size_t>(mesh.nx() + mesh.ny()));
    SurfaceSampler s;
    std::vector<int> slot(mesh.node_count(), -1);
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < samples; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
        const int node = mesh.nearest_node({center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)});
        auto& at = slot[static_cast<std::size_t>(node)];
        if (at < 0) {
            at = static_cast<int>(s.nodes_.size());
            s.nodes_.push_back(node);
            s.points_.push_back(mesh.node(static_cast<std::size_t>(node)));
            hits.push_back(0);
        }
        ++hits[static_cast<std::size_t>(at)];
    }
    if (s.nodes_.size() < 3)
        throw std::invalid_argument("observation circle resolves to fewer than 3 mesh nodes");
    for (int node : s.nodes_)
        if (mesh.is_boundary(static_cast<std::size_t>(node)))
            throw std::invalid_argument("observation circle touches the domain boundary");
    // each node carries the arc length that snaps to it
    const double arc = 2.0 * std::numbers::pi * radius / static_cast<double>(samples);
    s.weights_.resize(s.nodes_.size());
    for (std::size_t k = 0; k < s.nodes_.size(); ++k) {
        s.weights_[k] = arc * static_cast<double>(hits[k]);
        s.perimeter_ += s.weights_[k];
    }
    return s;
}

SparseMatrix assemble_mass(const Triangulation& mesh) { return assemble_rows(mesh, element_mass); }
SparseMatrix assemble_stiffness(const Triangulation& mesh) { return assemble_rows(mesh, element_stiffness); }

namespace serial {
SparseMatrix assemble_mass(const Triangulation& mesh) { return assemble_triplets(mesh, element_mass); }
SparseMatrix assemble_stiffness(const Triangulation& mesh) {
    return assemble_triplets(mesh, element_stiffness);
}
}  // namespace serial

SparseMatrix apply_dirichlet(const SparseMatrix& matrix, const std::vector<int>& boundary_nodes) {
    std::vector<char> fixed(static_cast<std::size_t>(matrix.rows()), 0);
    for (int b : boundary_nodes) fixed.at(static_cast<std::size_t>(b)) = 1;
    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(static_cast<std::size_t>(matrix.nonZeros()));
    for (Eigen::Index r = 0; r < matrix.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(matrix, r); it; ++it)
            if (!fixed[static_cast<std::size_t>(it.row())] && !fixed[static_cast<std::size_t>(it.col())])
                triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int b : boundary_nodes) triplets.emplace_back(b, b, 1.0);
    SparseMatrix out(matrix.rows(), matrix.cols());
    out.setFromTriplets(triplets.begin(), triplets.end(), [](double, double b) { return b; });
    out.makeCompressed();
    return out;
}

DirichletSystem apply_dirichlet(const SparseMatrix& matrix, const Vector& rhs,
                                const std::vector<int>& boundary_nodes) {
    DirichletSystem sys{apply_dirichlet(matrix, boundary_nodes), rhs};
    for (int b : boundary_nodes) sys.rhs[b] = 0.0;
    return sys;
}

Vector surface_load(const StructuredMesh& mesh, const SurfaceSampler& sampler, const Vector& w_at_sigma) {
    if (sampler.size() == 0) throw std::invalid_argument("surface_load: empty observation set");
    if (static_cast<std::size_t>(w_at_sigma.size()) != sampler.size())
        throw std::invalid_argument("surface_load: one value per Sigma node expected");
    Vector load = Vector::Zero(static_cast<Eigen::Index>(mesh.node_count()));
    for (std::size_t k = 0; k < sampler.size(); ++k)
        load[sampler.nodes()[k]] += sampler.weights()[k] * w_at_sigma[static_cast<Eigen::Index>(k)];
    return load;
}

Vector trace_on_sigma(const StructuredMesh& mesh, const SurfaceSampler& sampler, const Vector& field) {
    if (static_cast<std::size_t>(field.size()) != mesh.node_count())
        throw std::invalid_argument("trace_on_sigma: field size does not match the mesh");
    Vector out(static_cast<Eigen::Index>(sampler.size()));
    for (std::size_t k = 0; k < sampler.size(); ++k) out[static_cast<Eigen::Index>(k)] = field[sampler.nodes()[k]];
    return out;
}

Vector interpolate(const StructuredMesh& mesh, const std::function<double(double, double)>& f) {
    Vector out(static_cast<Eigen::Index>(mesh.node_count()));
    for (std::size_t i = 0; i < mesh.node_count(); ++i) out[static_cast<Eigen::Index>(i)] = f(mesh.node(i).x, mesh.node(i).y);
    return out;
}

void write_field_csv(const std::filesystem::path& path, const StructuredMesh& mesh, const Vector& field) {
    if (static_cast<std::size_t>(field.size()) != mesh.node_count())
        throw std::invalid_argument("write_field_csv: field size does not match the mesh");
    auto os = io::open_output(path);
    os << "x,y,value\n";
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        os << io::format_number(mesh.node(i).x) << ',' << io::format_number(mesh.node(i).y) << ','
           << io::format_number(field[static_cast<Eigen::Index>(i)]) << '\n';
}

void write_field_vtk(const std::filesystem::path& path, const StructuredMesh& mesh, const Vector& field,
                     const std::string& name) {
    const auto& tri = mesh.triangulation();
    auto os = io::open_output(path);
    os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << tri.nodes.size() << " double\n";
    for (const auto& p : tri.nodes) os << io::format_number(p.x) << ' ' << io::format_number(p.y) << " 0\n";
    os << "CELLS " << tri.triangles.size() << ' ' << 4 * tri.triangles.size() << '\n';
    for (const auto& t : tri.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << tri.triangles.size() << '\n';
    for (std::size_t e = 0; e < tri.triangles.size(); ++e) os << "5\n";
    os << "POINT_DATA " << tri.nodes.size() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < field.size(); ++i) os << io::format_number(field[i]) << '\n';
}

}  // namespace fracwave
