#include "nlbvp/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace nlbvp {

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b, Point* closest = nullptr) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(x - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point c = a + t * ab;
  if (closest) *closest = c;
  return norm(x - c);
}

double cross2(const Point& a, const Point& b) { return a[0] * b[1] - a[1] * b[0]; }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool point_in_polygon(const std::vector<Point>& v, const Point& x) {
  // crossing-number test
  bool inside = false;
  const int n = static_cast<int>(v.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    if (((v[i][1] > x[1]) != (v[j][1] > x[1])) &&
        (x[0] < (v[j][0] - v[i][0]) * (x[1] - v[i][1]) / (v[j][1] - v[i][1]) + v[i][0]))
      inside = !inside;
  }
  return inside;
}

} // namespace

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval requires a < b");
  Domain d;
  d.kind_ = DomainKind::Interval;
  d.a_ = a;
  d.b_ = b;
  return d;
}

Domain Domain::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x0 < x1 && y0 < y1)) throw std::invalid_argument("rectangle requires x0<x1 and y0<y1");
  Domain d;
  d.kind_ = DomainKind::Rectangle;
  d.a_ = x0;
  d.b_ = x1;
  d.c_ = y0;
  d.d_ = y1;
  return d;
}

Domain Domain::disk(Point center, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("disk requires radius > 0");
  Domain d;
  d.kind_ = DomainKind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::polygon(std::vector<Point> vertices) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) throw std::invalid_argument("polygon requires at least 3 vertices");
  double area2 = 0;
  for (int i = 0; i < n; ++i) area2 += cross2(vertices[i], vertices[(i + 1) % n]);
  if (!(area2 > 0)) throw std::invalid_argument("polygon vertices must be counterclockwise");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
        throw std::invalid_argument("polygon must be simple (non-self-intersecting)");
    }
  }
  Domain d;
  d.kind_ = DomainKind::Polygon;
  d.verts_ = std::move(vertices);
  return d;
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::Interval: return b_ - a_;
    case DomainKind::Rectangle: return norm(Point{b_ - a_, d_ - c_});
    case DomainKind::Disk: return 2 * radius_;
    case DomainKind::Polygon: {
      double m = 0;
      for (size_t i = 0; i < verts_.size(); ++i)
        for (size_t j = i + 1; j < verts_.size(); ++j) m = std::max(m, norm(verts_[i] - verts_[j]));
      return m;
    }
  }
  return 0;
}

double Domain::measure() const {
  switch (kind_) {
    case DomainKind::Interval: return b_ - a_;
    case DomainKind::Rectangle: return (b_ - a_) * (d_ - c_);
    case DomainKind::Disk: return M_PI * radius_ * radius_;
    case DomainKind::Polygon: {
      double area2 = 0;
      const int n = static_cast<int>(verts_.size());
      for (int i = 0; i < n; ++i) area2 += cross2(verts_[i], verts_[(i + 1) % n]);
      return 0.5 * area2;
    }
  }
  return 0;
}

double Domain::boundary_measure() const {
  switch (kind_) {
    case DomainKind::Interval: return 2.0; // endpoint count
    case DomainKind::Rectangle: return 2 * ((b_ - a_) + (d_ - c_));
    case DomainKind::Disk: return 2 * M_PI * radius_;
    case DomainKind::Polygon: {
      double s = 0;
      const int n = static_cast<int>(verts_.size());
      for (int i = 0; i < n; ++i) s += norm(verts_[(i + 1) % n] - verts_[i]);
      return s;
    }
  }
  return 0;
}

bool Domain::contains(const Point& x, double tol) const {
  switch (kind_) {
    case DomainKind::Interval: return x[0] >= a_ - tol && x[0] <= b_ + tol;
    case DomainKind::Rectangle:
      return x[0] >= a_ - tol && x[0] <= b_ + tol && x[1] >= c_ - tol && x[1] <= d_ + tol;
    case DomainKind::Disk: return norm(x - center_) <= radius_ + tol;
    case DomainKind::Polygon: {
      if (point_in_polygon(verts_, x)) return true;
      const int n = static_cast<int>(verts_.size());
      for (int i = 0; i < n; ++i)
        if (point_segment_distance(x, verts_[i], verts_[(i + 1) % n]) <= tol) return true;
      return false;
    }
  }
  return false;
}

double distance_to_boundary(const Domain& dom, const Point& x) {
  if (!dom.contains(x)) throw std::domain_error("point outside closure of the domain");
  switch (dom.kind()) {
    case DomainKind::Interval:
      return std::max(0.0, std::min(x[0] - dom.interval_a(), dom.interval_b() - x[0]));
    case DomainKind::Rectangle: {
      const Point lo = dom.rect_lo(), hi = dom.rect_hi();
      return std::max(0.0, std::min({x[0] - lo[0], hi[0] - x[0], x[1] - lo[1], hi[1] - x[1]}));
    }
    case DomainKind::Disk: return std::max(0.0, dom.disk_radius() - norm(x - dom.disk_center()));
    case DomainKind::Polygon: {
      const auto& v = dom.vertices();
      const int n = static_cast<int>(v.size());
      double d = std::numeric_limits<double>::max();
      for (int i = 0; i < n; ++i) d = std::min(d, point_segment_distance(x, v[i], v[(i + 1) % n]));
      return d;
    }
  }
  return 0;
}

Point boundary_projection(const Domain& dom, const Point& x) {
  switch (dom.kind()) {
    case DomainKind::Interval: {
      const double da = x[0] - dom.interval_a(), db = dom.interval_b() - x[0];
      return da <= db ? Point{dom.interval_a(), 0} : Point{dom.interval_b(), 0};
    }
    case DomainKind::Rectangle: {
      const Point lo = dom.rect_lo(), hi = dom.rect_hi();
      const std::array<double, 4> d = {x[0] - lo[0], hi[0] - x[0], x[1] - lo[1], hi[1] - x[1]};
      const int k = static_cast<int>(std::min_element(d.begin(), d.end()) - d.begin());
      switch (k) {
        case 0: return {lo[0], x[1]};
        case 1: return {hi[0], x[1]};
        case 2: return {x[0], lo[1]};
        default: return {x[0], hi[1]};
      }
    }
    case DomainKind::Disk: {
      Point r = x - dom.disk_center();
      double n = norm(r);
      if (n < 1e-300) r = {1, 0}, n = 1; // center: any direction
      return dom.disk_center() + (dom.disk_radius() / n) * r;
    }
    case DomainKind::Polygon: {
      const auto& v = dom.vertices();
      const int n = static_cast<int>(v.size());
      double best = std::numeric_limits<double>::max();
      Point bp = v[0];
      for (int i = 0; i < n; ++i) {
        Point c;
        const double d = point_segment_distance(x, v[i], v[(i + 1) % n], &c);
        if (d < best) {
          best = d;
          bp = c;
        }
      }
      return bp;
    }
  }
  return x;
}

Point outward_normal(const Domain& dom, const Point& s) {
  const double tol = 1e-10 * std::max(1.0, dom.diameter());
  switch (dom.kind()) {
    case DomainKind::Interval: {
      if (std::abs(s[0] - dom.interval_a()) <= tol) return {-1, 0};
      if (std::abs(s[0] - dom.interval_b()) <= tol) return {1, 0};
      throw std::domain_error("point is not on the interval boundary");
    }
    case DomainKind::Disk: {
      const Point r = s - dom.disk_center();
      const double n = norm(r);
      if (std::abs(n - dom.disk_radius()) > tol) throw std::domain_error("point is not on the circle");
      return (1.0 / n) * r;
    }
    case DomainKind::Rectangle: {
      const Point lo = dom.rect_lo(), hi = dom.rect_hi();
      std::vector<Point> hits;
      if (std::abs(s[0] - lo[0]) <= tol) hits.push_back({-1, 0});
      if (std::abs(s[0] - hi[0]) <= tol) hits.push_back({1, 0});
      if (std::abs(s[1] - lo[1]) <= tol) hits.push_back({0, -1});
      if (std::abs(s[1] - hi[1]) <= tol) hits.push_back({0, 1});
      if (hits.empty()) throw std::domain_error("point is not on the rectangle boundary");
      if (hits.size() > 1) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "corner point: ambiguous normal, adjacent facet normals (%g,%g) and (%g,%g)",
                      hits[0][0], hits[0][1], hits[1][0], hits[1][1]);
        throw std::domain_error(buf);
      }
      return hits[0];
    }
    case DomainKind::Polygon: {
      const auto& v = dom.vertices();
      const int n = static_cast<int>(v.size());
      std::vector<Point> hits;
      for (int i = 0; i < n; ++i) {
        const Point a = v[i], b = v[(i + 1) % n];
        if (point_segment_distance(s, a, b) <= tol) {
          const Point t = b - a;
          const double len = norm(t);
          hits.push_back({t[1] / len, -t[0] / len});
        }
      }
      if (hits.empty()) throw std::domain_error("point is not on the polygon boundary");
      if (hits.size() > 1) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "corner point: ambiguous normal, adjacent facet normals (%g,%g) and (%g,%g)",
                      hits[0][0], hits[0][1], hits[1][0], hits[1][1]);
        throw std::domain_error(buf);
      }
      return hits[0];
    }
  }
  throw std::domain_error("unknown domain kind");
}

double Mesh::cell_measure(int c) const {
  if (dim == 1) return std::abs(nodes[cells[c][1]][0] - nodes[cells[c][0]][0]);
  const Point a = nodes[cells[c][0]], b = nodes[cells[c][1]], d = nodes[cells[c][2]];
  return 0.5 * std::abs(cross2(b - a, d - a));
}

double Mesh::cell_diameter(int c) const {
  if (dim == 1) return cell_measure(c);
  const Point a = nodes[cells[c][0]], b = nodes[cells[c][1]], d = nodes[cells[c][2]];
  return std::max({norm(b - a), norm(d - b), norm(a - d)});
}

std::array<double, 3> Mesh::barycentric(int c, const Point& x) const {
  if (dim == 1) {
    const double x0 = nodes[cells[c][0]][0], x1 = nodes[cells[c][1]][0];
    const double t = (x[0] - x0) / (x1 - x0);
    return {1 - t, t, 0};
  }
  const Point a = nodes[cells[c][0]], b = nodes[cells[c][1]], d = nodes[cells[c][2]];
  const double det = cross2(b - a, d - a);
  const double l1 = cross2(x - a, d - a) / det;
  const double l2 = cross2(b - a, x - a) / det;
  return {1 - l1 - l2, l1, l2};
}

void Mesh::build_locator() {
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto& p : nodes)
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  for (int k = 0; k < 2; ++k) {
    lo_[k] = lo[k];
    const double w = std::max(hi[k] - lo[k], 1e-30);
    grid_n_[k] = (dim == 1 && k == 1) ? 1 : std::max(1, static_cast<int>(std::sqrt(double(n_cells()))));
    cell_w_[k] = w / grid_n_[k];
  }
  bins_.assign(static_cast<size_t>(grid_n_[0]) * grid_n_[1], {});
  auto bin_index = [&](double v, int k) {
    int i = static_cast<int>((v - lo_[k]) / cell_w_[k]);
    return std::clamp(i, 0, grid_n_[k] - 1);
  };
  for (int c = 0; c < n_cells(); ++c) {
    double clo[2] = {1e300, 1e300}, chi[2] = {-1e300, -1e300};
    for (int j = 0; j < nodes_per_cell(); ++j) {
      const Point& p = nodes[cells[c][j]];
      for (int k = 0; k < 2; ++k) {
        clo[k] = std::min(clo[k], p[k]);
        chi[k] = std::max(chi[k], p[k]);
      }
    }
    const int i0 = bin_index(clo[0], 0), i1 = bin_index(chi[0], 0);
    const int j0 = bin_index(clo[1], 1), j1 = bin_index(chi[1], 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) bins_[static_cast<size_t>(j) * grid_n_[0] + i].push_back(c);
  }
}

int Mesh::locate(const Point& x) const {
  if (bins_.empty()) return -1;
  auto bin_index = [&](double v, int k) {
    int i = static_cast<int>((v - lo_[k]) / cell_w_[k]);
    return std::clamp(i, 0, grid_n_[k] - 1);
  };
  const auto& cand = bins_[static_cast<size_t>(bin_index(x[1], 1)) * grid_n_[0] + bin_index(x[0], 0)];
  constexpr double tol = 1e-11;
  int best = -1;
  double best_violation = tol;
  for (int c : cand) {
    const auto l = barycentric(c, x);
    const double viol = -std::min({l[0], l[1], dim == 1 ? 1.0 : l[2]});
    if (viol < best_violation) {
      best_violation = viol;
      best = c;
      if (viol <= 0) break;
    }
  }
  return best;
}

namespace {

struct MeshBuilder {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> boundary_edges; // indices into nodes

  int midpoint(std::map<std::pair<int, int>, int>& cache, int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    nodes.push_back(0.5 * (nodes[a] + nodes[b]));
    const int id = static_cast<int>(nodes.size()) - 1;
    cache.emplace(key, id);
    return id;
  }

  void refine_once() {
    std::map<std::pair<int, int>, int> cache;
    std::vector<std::array<int, 3>> out;
    out.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int m01 = midpoint(cache, t[0], t[1]);
      const int m12 = midpoint(cache, t[1], t[2]);
      const int m20 = midpoint(cache, t[2], t[0]);
      out.push_back({t[0], m01, m20});
      out.push_back({t[1], m12, m01});
      out.push_back({t[2], m20, m12});
      out.push_back({m01, m12, m20});
    }
    tris = std::move(out);
    std::vector<std::array<int, 2>> bout;
    bout.reserve(boundary_edges.size() * 2);
    for (const auto& e : boundary_edges) {
      const auto key = std::minmax(e[0], e[1]);
      const int m = cache.at(key);
      bout.push_back({e[0], m});
      bout.push_back({m, e[1]});
    }
    boundary_edges = std::move(bout);
  }
};

// Ear-clipping triangulation of a simple CCW polygon.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  auto is_ear = [&](int a, int b, int c) {
    const Point pa = v[a], pb = v[b], pc = v[c];
    if (cross2(pb - pa, pc - pa) <= 1e-14) return false;
    for (int j : idx) {
      if (j == a || j == b || j == c) continue;
      const Point p = v[j];
      const double d1 = cross2(pb - pa, p - pa), d2 = cross2(pc - pb, p - pb), d3 = cross2(pa - pc, p - pc);
      if (d1 >= -1e-14 && d2 >= -1e-14 && d3 >= -1e-14) return false;
    }
    return true;
  };
  int guard = 0;
  while (idx.size() > 3 && guard++ < n * n + 16) {
    const int m = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < m; ++i) {
      const int a = idx[(i + m - 1) % m], b = idx[i], c = idx[(i + 1) % m];
      if (is_ear(a, b, c)) {
        tris.push_back({a, b, c});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped) throw std::runtime_error("ear clipping failed (degenerate polygon?)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

} // namespace

Mesh build_mesh(const Domain& dom, double h) {
  if (!(h > 0)) throw std::invalid_argument("mesh size h must be positive");
  if (h > dom.diameter()) throw std::invalid_argument("mesh size h exceeds the domain diameter");
  Mesh mesh;
  mesh.domain = dom;
  mesh.dim = dom.dim();

  if (dom.kind() == DomainKind::Interval) {
    const double a = dom.interval_a(), b = dom.interval_b();
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    for (int i = 0; i <= n; ++i) mesh.nodes.push_back({a + (b - a) * i / n, 0});
    for (int i = 0; i < n; ++i) mesh.cells.push_back({i, i + 1, -1});
    Facet fa;
    fa.n = {0, -1};
    fa.normal = {-1, 0};
    fa.measure = 1;
    fa.midpoint = mesh.nodes.front();
    Facet fb;
    fb.n = {n, -1};
    fb.normal = {1, 0};
    fb.measure = 1;
    fb.midpoint = mesh.nodes.back();
    mesh.facets = {fa, fb};
    mesh.node_on_boundary.assign(mesh.nodes.size(), 0);
    mesh.node_on_boundary.front() = 1;
    mesh.node_on_boundary.back() = 1;
    mesh.h = (b - a) / n;
    mesh.build_locator();
    return mesh;
  }

  MeshBuilder mb;
  if (dom.kind() == DomainKind::Rectangle) {
    const Point lo = dom.rect_lo(), hi = dom.rect_hi();
    const int nx = std::max(1, static_cast<int>(std::ceil((hi[0] - lo[0]) / h)));
    const int ny = std::max(1, static_cast<int>(std::ceil((hi[1] - lo[1]) / h)));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mb.nodes.push_back({lo[0] + (hi[0] - lo[0]) * i / nx, lo[1] + (hi[1] - lo[1]) * j / ny});
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        mb.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        mb.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    for (int i = 0; i < nx; ++i) {
      mb.boundary_edges.push_back({id(i, 0), id(i + 1, 0)});
      mb.boundary_edges.push_back({id(i + 1, ny), id(i, ny)});
    }
    for (int j = 0; j < ny; ++j) {
      mb.boundary_edges.push_back({id(nx, j), id(nx, j + 1)});
      mb.boundary_edges.push_back({id(0, j + 1), id(0, j)});
    }
  } else {
    // disk and polygon: triangulate a polygonal outline, then refine
    std::vector<Point> outline;
    if (dom.kind() == DomainKind::Disk) {
      const int nseg = std::max(12, static_cast<int>(std::ceil(2 * M_PI * dom.disk_radius() / h)));
      for (int i = 0; i < nseg; ++i) {
        const double a = 2 * M_PI * i / nseg;
        outline.push_back(dom.disk_center() + dom.disk_radius() * Point{std::cos(a), std::sin(a)});
      }
    } else {
      outline = dom.vertices();
    }
    mb.nodes = outline;
    mb.tris = ear_clip(outline);
    const int n = static_cast<int>(outline.size());
    for (int i = 0; i < n; ++i) mb.boundary_edges.push_back({i, (i + 1) % n});
    double dmax = 0;
    for (const auto& t : mb.tris)
      dmax = std::max({dmax, norm(mb.nodes[t[1]] - mb.nodes[t[0]]), norm(mb.nodes[t[2]] - mb.nodes[t[1]]),
                       norm(mb.nodes[t[0]] - mb.nodes[t[2]])});
    while (dmax > 1.45 * h) {
      mb.refine_once();
      if (dom.kind() == DomainKind::Disk) {
        for (const auto& e : mb.boundary_edges)
          for (int k = 0; k < 2; ++k) mb.nodes[e[k]] = boundary_projection(dom, mb.nodes[e[k]]);
      }
      dmax /= 2;
    }
  }

  mesh.nodes = mb.nodes;
  for (const auto& t : mb.tris) mesh.cells.push_back({t[0], t[1], t[2]});
  mesh.node_on_boundary.assign(mesh.nodes.size(), 0);
  for (const auto& e : mb.boundary_edges) {
    Facet f;
    f.n = {e[0], e[1]};
    f.midpoint = 0.5 * (mesh.nodes[e[0]] + mesh.nodes[e[1]]);
    f.measure = norm(mesh.nodes[e[1]] - mesh.nodes[e[0]]);
    if (dom.kind() == DomainKind::Disk) {
      // exact circle normal at the facet midpoint
      Point r = f.midpoint - dom.disk_center();
      f.normal = (1.0 / norm(r)) * r;
    } else {
      const Point t = mesh.nodes[e[1]] - mesh.nodes[e[0]];
      f.normal = {t[1] / f.measure, -t[0] / f.measure};
    }
    mesh.facets.push_back(f);
    mesh.node_on_boundary[e[0]] = 1;
    mesh.node_on_boundary[e[1]] = 1;
  }
  mesh.h = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) mesh.h = std::max(mesh.h, mesh.cell_diameter(c));
  mesh.build_locator();
  return mesh;
}

void export_mesh_csv(const Mesh& mesh, const std::string& dir) {
  auto open = [&](const std::string& name) {
    std::ofstream f(dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + dir + "/" + name);
    return f;
  };
  char buf[160];
  {
    auto f = open("nodes.csv");
    f << (mesh.dim == 1 ? "id,x\n" : "id,x,y\n");
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      if (mesh.dim == 1)
        std::snprintf(buf, sizeof buf, "%d,%.12e\n", i, mesh.nodes[i][0]);
      else
        std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e\n", i, mesh.nodes[i][0], mesh.nodes[i][1]);
      f << buf;
    }
  }
  {
    auto f = open("cells.csv");
    f << (mesh.dim == 1 ? "id,n0,n1\n" : "id,n0,n1,n2\n");
    for (int c = 0; c < mesh.n_cells(); ++c) {
      if (mesh.dim == 1)
        std::snprintf(buf, sizeof buf, "%d,%d,%d\n", c, mesh.cells[c][0], mesh.cells[c][1]);
      else
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d\n", c, mesh.cells[c][0], mesh.cells[c][1], mesh.cells[c][2]);
      f << buf;
    }
  }
  {
    auto f = open("facets.csv");
    f << (mesh.dim == 1 ? "id,n0,nx\n" : "id,n0,n1,nx,ny\n");
    for (size_t i = 0; i < mesh.facets.size(); ++i) {
      const auto& ft = mesh.facets[i];
      if (mesh.dim == 1)
        std::snprintf(buf, sizeof buf, "%zu,%d,%.12e\n", i, ft.n[0], ft.normal[0]);
      else
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.12e,%.12e\n", i, ft.n[0], ft.n[1], ft.normal[0], ft.normal[1]);
      f << buf;
    }
  }
}

DistanceField exact_distance(const Domain& dom) {
  DistanceField df;
  df.dim = dom.dim();
  df.kappa0 = 1.0;
  df.kappa1 = 1.0;
  df.smoothed = false;
  df.value = [dom](const Point& x) { return distance_to_boundary(dom, x); };
  df.gradient = [dom](const Point& x) {
    const Point xi = boundary_projection(dom, x);
    Point g = x - xi;
    const double n = norm(g);
    if (n < 1e-14) {
      // on the boundary: gradient is the inward normal
      const Point nu = outward_normal(dom, x);
      return Point{-nu[0], -nu[1]};
    }
    return (1.0 / n) * g;
  };
  return df;
}

} // namespace nlbvp
