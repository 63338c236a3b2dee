#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nlbvp {

/// Points and vectors are stored with two components; 1D data keeps the
/// second component at zero, so the generic arithmetic below is valid in
/// both dimensions.
using Point = std::array<double, 2>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

enum class DomainKind { Interval, Rectangle, Disk, Polygon };

/// Bounded Lipschitz regions: an interval, an axis-aligned rectangle, a
/// disk, or a simple polygon with counterclockwise vertices.
class Domain {
public:
  static Domain interval(double a, double b);
  static Domain rectangle(double x0, double y0, double x1, double y1);
  static Domain disk(Point center, double radius);
  static Domain polygon(std::vector<Point> vertices);

  DomainKind kind() const { return kind_; }
  int dim() const { return kind_ == DomainKind::Interval ? 1 : 2; }
  double diameter() const;
  double measure() const;
  double boundary_measure() const;

  bool contains(const Point& x, double tol = 1e-12) const;

  double interval_a() const { return a_; }
  double interval_b() const { return b_; }
  Point rect_lo() const { return {a_, c_}; }
  Point rect_hi() const { return {b_, d_}; }
  Point disk_center() const { return center_; }
  double disk_radius() const { return radius_; }
  const std::vector<Point>& vertices() const { return verts_; }

private:
  DomainKind kind_ = DomainKind::Interval;
  double a_ = 0, b_ = 1, c_ = 0, d_ = 1;
  Point center_{0, 0};
  double radius_ = 1;
  std::vector<Point> verts_;
};

/// Exact Euclidean distance to the boundary. Throws std::domain_error for
/// points outside the closure.
double distance_to_boundary(const Domain& dom, const Point& x);

/// Nearest point on the boundary.
Point boundary_projection(const Domain& dom, const Point& x);

/// Outward unit normal at a boundary point. Polygon/rectangle corners are
/// ambiguous and throw std::domain_error naming the adjacent facets.
Point outward_normal(const Domain& dom, const Point& s);

struct Facet {
  std::array<int, 2> n{-1, -1}; ///< node ids; 1D facets use n[0] only
  Point normal{0, 0};           ///< outward unit normal
  double measure = 0;           ///< length; 1 for a 1D endpoint
  Point midpoint{0, 0};
};

/// Conforming mesh: segments in 1D, triangles in 2D, boundary facets with
/// outward unit normals.
struct Mesh {
  Domain domain;
  int dim = 1;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> cells; ///< 1D cells use entries 0,1
  std::vector<Facet> facets;
  std::vector<char> node_on_boundary;
  double h = 0; ///< max cell diameter

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int nodes_per_cell() const { return dim == 1 ? 2 : 3; }
  double cell_measure(int c) const;
  double cell_diameter(int c) const;

  /// Cell containing x (within tol), or -1.
  int locate(const Point& x) const;

  /// P1 barycentric coordinates of x in cell c.
  std::array<double, 3> barycentric(int c, const Point& x) const;

  void build_locator();

private:
  // uniform background grid over the bounding box
  double lo_[2] = {0, 0}, cell_w_[2] = {1, 1};
  int grid_n_[2] = {1, 1};
  std::vector<std::vector<int>> bins_;
};

/// Conforming mesh with max cell diameter <= 1.5*h; boundary facets tagged.
/// Disk boundaries are polygonal with nodes snapped onto the circle.
Mesh build_mesh(const Domain& dom, double h);

/// Writes nodes.csv, cells.csv, facets.csv into dir.
void export_mesh_csv(const Mesh& mesh, const std::string& dir);

/// A generalized distance: comparable to dist(.,boundary), vanishing exactly
/// on the boundary.
struct DistanceField {
  int dim = 1;
  double kappa0 = 1.0; ///< comparability constant
  double kappa1 = 1.0; ///< Lipschitz constant
  bool smoothed = false;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient; ///< defined a.e.
};

/// The distance function itself (kappa0 = kappa1 = 1).
DistanceField exact_distance(const Domain& dom);

} // namespace nlbvp
