#include "dualq/delaunay2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dualq/errors.hpp"

namespace dualq {
namespace {

using Vec2 = Eigen::Vector2d;

struct Tri {
  std::array<Index, 3> v;
  std::array<int, 3> n;
};

int index_of(const Tri& t, Index vertex) {
  for (int k = 0; k < 3; ++k) {
    if (t.v[k] == vertex) return k;
  }
  return -1;
}

int neighbor_slot(const Tri& t, int other) {
  for (int k = 0; k < 3; ++k) {
    if (t.n[k] == other) return k;
  }
  return -1;
}

class Builder {
 public:
  Builder(const std::vector<Vec2>& pts, double scale)
      : pts_(pts), eps_orient_(1e-12 * scale * scale), eps_circle_(1e-12 * std::pow(scale, 4)) {}

  void start(Index a, Index b, Index c) {
    if (orient2d(pts_[a], pts_[b], pts_[c]) < 0.0) std::swap(b, c);
    tris_.push_back({{a, b, c}, {-1, -1, -1}});
  }

  void insert(Index p) {
    const Vec2& xp = pts_[p];
    int t = last_;
    int outside_edge = -1;
    bool found = false;
    const int max_steps = static_cast<int>(tris_.size()) + 16;
    for (int step = 0; step < max_steps; ++step) {
      int worst = -1;
      double worst_val = -eps_orient_;
      for (int k = 0; k < 3; ++k) {
        const auto& tr = tris_[t];
        const double o = orient2d(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], xp);
        if (o < worst_val) {
          worst_val = o;
          worst = k;
        }
      }
      if (worst < 0) {
        found = true;
        break;
      }
      if (tris_[t].n[worst] < 0) {
        outside_edge = worst;
        break;
      }
      t = tris_[t].n[worst];
    }
    if (!found && outside_edge < 0) {
      // Walk did not settle; scan.
      t = -1;
      for (int s = 0; s < static_cast<int>(tris_.size()) && t < 0; ++s) {
        if (inside(s, xp)) t = s;
      }
      found = t >= 0;
    }
    if (found) {
      insert_inside(t, p);
    } else {
      insert_outside(p);
    }
  }

  void canonical_tiebreak() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        for (int k = 0; k < 3; ++k) {
          const int nb = tris_[t].n[k];
          if (nb < t) continue;
          const Index p = tris_[t].v[k];
          const Index a = tris_[t].v[(k + 1) % 3];
          const Index b = tris_[t].v[(k + 2) % 3];
          const int kk = neighbor_slot(tris_[nb], t);
          const Index q = tris_[nb].v[kk];
          const double ic = incircle(pts_[p], pts_[a], pts_[b], pts_[q]);
          if (std::abs(ic) > eps_circle_) continue;
          if (orient2d(pts_[p], pts_[a], pts_[q]) <= eps_orient_) continue;
          if (orient2d(pts_[p], pts_[q], pts_[b]) <= eps_orient_) continue;
          const std::array<Index, 2> current{std::min(a, b), std::max(a, b)};
          const std::array<Index, 2> other{std::min(p, q), std::max(p, q)};
          if (other < current) {
            flip(t, k);
            changed = true;
          }
        }
      }
    }
  }

  std::vector<Tri> take() { return std::move(tris_); }

 private:
  bool inside(int t, const Vec2& x) const {
    const auto& tr = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (orient2d(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], x) < -eps_orient_) return false;
    }
    return true;
  }

  void set_back(int nb, int old_t, int new_t) {
    if (nb < 0) return;
    const int s = neighbor_slot(tris_[nb], old_t);
    tris_[nb].n[s] = new_t;
  }

  void insert_inside(int t, Index p) {
    const Vec2& xp = pts_[p];
    const Tri tr = tris_[t];
    std::array<double, 3> o{};
    int zeros = 0;
    int zero_k = -1;
    for (int k = 0; k < 3; ++k) {
      o[k] = orient2d(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], xp);
      if (std::abs(o[k]) <= eps_orient_) {
        ++zeros;
        zero_k = k;
      }
    }
    if (zeros >= 2) throw std::invalid_argument("triangulate: duplicate (or coincident) points");
    if (zeros == 1) {
      split_edge(t, zero_k, p);
    } else {
      split_triangle(t, p);
    }
  }

  void split_triangle(int t, Index p) {
    const Tri tr = tris_[t];
    const Index a = tr.v[0], b = tr.v[1], c = tr.v[2];
    const int na = tr.n[0], nb = tr.n[1], nc = tr.n[2];
    const int t0 = t;
    const int t1 = static_cast<int>(tris_.size());
    const int t2 = t1 + 1;
    tris_[t0] = {{a, b, p}, {t1, t2, nc}};
    tris_.push_back({{b, c, p}, {t2, t0, na}});
    tris_.push_back({{c, a, p}, {t0, t1, nb}});
    set_back(na, t, t1);
    set_back(nb, t, t2);
    last_ = t0;
    legalize({{t0, p}, {t1, p}, {t2, p}});
  }

  void split_edge(int t, int k, Index p) {
    const Tri tr = tris_[t];
    const Index c = tr.v[k];
    const Index a = tr.v[(k + 1) % 3];
    const Index b = tr.v[(k + 2) % 3];
    const int nb = tr.n[k];
    const int t_bc = tr.n[(k + 1) % 3];  // opposite a: edge (b, c)
    const int t_ca = tr.n[(k + 2) % 3];  // opposite b: edge (c, a)
    const int t_new = static_cast<int>(tris_.size());
    if (nb < 0) {
      tris_[t] = {{c, a, p}, {-1, t_new, t_ca}};
      tris_.push_back({{c, p, b}, {-1, t_bc, t}});
      set_back(t_bc, t, t_new);
      last_ = t;
      legalize({{t, p}, {t_new, p}});
      return;
    }
    const Tri ntr = tris_[nb];
    const int kd = neighbor_slot(ntr, t);
    const Index d = ntr.v[kd];
    // nb = (d, b, a) counterclockwise.
    const int t_ad = ntr.n[index_of(ntr, b)];
    const int t_db = ntr.n[index_of(ntr, a)];
    const int nb_new = t_new + 1;
    tris_[t] = {{c, a, p}, {nb_new, t_new, t_ca}};
    tris_.push_back({{c, p, b}, {nb, t_bc, t}});
    tris_[nb] = {{d, b, p}, {t_new, nb_new, t_db}};
    tris_.push_back({{d, p, a}, {t, t_ad, nb}});
    set_back(t_bc, t, t_new);
    set_back(t_ad, nb, nb_new);
    last_ = t;
    legalize({{t, p}, {t_new, p}, {nb, p}, {nb_new, p}});
  }

  void insert_outside(Index p) {
    const Vec2& xp = pts_[p];
    struct NewTri {
      int id;
      Index a, b;  // edge as it appears in the old triangle (a -> b)
    };
    std::vector<NewTri> added;
    const int count = static_cast<int>(tris_.size());
    for (int t = 0; t < count; ++t) {
      for (int k = 0; k < 3; ++k) {
        if (tris_[t].n[k] >= 0) continue;
        const Index a = tris_[t].v[(k + 1) % 3];
        const Index b = tris_[t].v[(k + 2) % 3];
        if (orient2d(pts_[a], pts_[b], xp) < -eps_orient_) {
          const int id = static_cast<int>(tris_.size());
          tris_.push_back({{b, a, p}, {-1, -1, t}});
          tris_[t].n[k] = id;
          added.push_back({id, a, b});
        }
      }
    }
    if (added.empty()) throw DegenerateError("triangulate: point could not be inserted");
    for (const auto& x : added) {
      for (const auto& y : added) {
        if (x.id == y.id) continue;
        // x = (b1, a1, p): edge (a1, p) is opposite b1 (slot 0); y = (b2, a2, p): edge (p, b2) is slot 1.
        if (x.a == y.b) {
          tris_[x.id].n[0] = y.id;
          tris_[y.id].n[1] = x.id;
        }
      }
    }
    last_ = added.front().id;
    std::vector<std::pair<int, Index>> work;
    for (const auto& x : added) work.push_back({x.id, p});
    legalize(std::move(work));
  }

  // Flips the edge opposite slot k of triangle t.
  void flip(int t, int k) {
    const Tri tr = tris_[t];
    const Index p = tr.v[k];
    const Index a = tr.v[(k + 1) % 3];
    const Index b = tr.v[(k + 2) % 3];
    const int nb = tr.n[k];
    const Tri ntr = tris_[nb];
    const Index q = ntr.v[neighbor_slot(ntr, t)];
    const int n_pa = tr.n[(k + 2) % 3];
    const int n_bp = tr.n[(k + 1) % 3];
    const int n_aq = ntr.n[index_of(ntr, b)];
    const int n_qb = ntr.n[index_of(ntr, a)];
    tris_[t] = {{p, a, q}, {n_aq, nb, n_pa}};
    tris_[nb] = {{p, q, b}, {n_qb, n_bp, t}};
    set_back(n_aq, nb, t);
    set_back(n_bp, t, nb);
  }

  void legalize(std::vector<std::pair<int, Index>> work) {
    while (!work.empty()) {
      const auto [t, p] = work.back();
      work.pop_back();
      const int k = index_of(tris_[t], p);
      if (k < 0) continue;
      const int nb = tris_[t].n[k];
      if (nb < 0) continue;
      const Index q = tris_[nb].v[neighbor_slot(tris_[nb], t)];
      const auto& tr = tris_[t];
      if (incircle(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]], pts_[q]) > eps_circle_) {
        flip(t, k);
        work.push_back({t, p});
        work.push_back({nb, p});
      }
    }
  }

  const std::vector<Vec2>& pts_;
  double eps_orient_;
  double eps_circle_;
  std::vector<Tri> tris_;
  int last_ = 0;
};

}  // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
         clift * (adx * bdy - bdx * ady);
}

std::vector<std::array<Index, 2>> Triangulation::edges() const {
  std::vector<std::array<Index, 2>> out;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const Index a = t[k], b = t[(k + 1) % 3];
      out.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::Vector3d Triangulation::barycentric(Index t, const Eigen::Vector2d& xi) const {
  const auto& tr = triangles_[t];
  const Vec2& a = vertices_[tr[0]];
  const Vec2& b = vertices_[tr[1]];
  const Vec2& c = vertices_[tr[2]];
  const double area = orient2d(a, b, c);
  return {orient2d(xi, b, c) / area, orient2d(a, xi, c) / area, orient2d(a, b, xi) / area};
}

Triangulation triangulate(const Grid& grid) {
  if (grid.dim() != 2) throw std::invalid_argument("triangulate requires a 2D grid");
  const Index n = grid.size();
  if (n < 3) throw DegenerateError("triangulate needs at least 3 points");
  grid.validate();

  Triangulation out;
  out.vertices_.reserve(n);
  Vec2 lo = grid[0], hi = grid[0];
  for (Index i = 0; i < n; ++i) {
    out.vertices_.emplace_back(grid[i](0), grid[i](1));
    lo = lo.cwiseMin(out.vertices_.back());
    hi = hi.cwiseMax(out.vertices_.back());
  }
  out.scale_ = std::max((hi - lo).maxCoeff(), 1e-300);
  const auto& pts = out.vertices_;

  const double eps_orient = 1e-12 * out.scale_ * out.scale_;
  Index third = n;
  for (Index k = 2; k < n; ++k) {
    if (std::abs(orient2d(pts[0], pts[1], pts[k])) > eps_orient) {
      third = k;
      break;
    }
  }
  if (third == n) throw DegenerateError("triangulate: all points are collinear");

  Builder builder(pts, out.scale_);
  builder.start(0, 1, third);
  for (Index k = 2; k < n; ++k) {
    if (k != third) builder.insert(k);
  }
  builder.canonical_tiebreak();
  std::vector<Tri> tris = builder.take();

  // Canonical form: smallest vertex first (rotation keeps orientation), sorted list.
  for (auto& t : tris) {
    const int r = static_cast<int>(std::min_element(t.v.begin(), t.v.end()) - t.v.begin());
    std::rotate(t.v.begin(), t.v.begin() + r, t.v.end());
  }
  std::sort(tris.begin(), tris.end(), [](const Tri& x, const Tri& y) { return x.v < y.v; });
  out.triangles_.reserve(tris.size());
  std::map<std::pair<Index, Index>, int> directed;
  for (Index t = 0; t < tris.size(); ++t) {
    out.triangles_.push_back(tris[t].v);
    for (int k = 0; k < 3; ++k) {
      directed[{tris[t].v[(k + 1) % 3], tris[t].v[(k + 2) % 3]}] = static_cast<int>(t);
    }
  }
  out.neighbors_.resize(tris.size());
  for (Index t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto it = directed.find({tris[t].v[(k + 2) % 3], tris[t].v[(k + 1) % 3]});
      out.neighbors_[t][k] = it == directed.end() ? Triangulation::kBoundary : it->second;
    }
  }
  return out;
}

bool Locator::contains(Index t, const Eigen::Vector2d& xi) const {
  return tri_->barycentric(t, xi).minCoeff() >= -1e-10;
}

std::optional<Index> Locator::walk(const Eigen::Vector2d& xi, Index start) const {
  Index t = start;
  const Index max_steps = tri_->size() + 16;
  for (Index step = 0; step < max_steps; ++step) {
    const Eigen::Vector3d lambda = tri_->barycentric(t, xi);
    Eigen::Index k = 0;
    const double worst = lambda.minCoeff(&k);
    if (worst >= -1e-10) return t;
    const int nb = tri_->neighbors()[t][static_cast<std::size_t>(k)];
    if (nb == Triangulation::kBoundary) return std::nullopt;
    t = static_cast<Index>(nb);
  }
  for (Index s = 0; s < tri_->size(); ++s) {
    if (contains(s, xi)) return s;
  }
  return std::nullopt;
}

std::optional<Index> Locator::locate(const Eigen::Vector2d& xi) {
  if (tri_->size() == 0) return std::nullopt;
  if (cursor_ >= tri_->size()) cursor_ = 0;
  std::optional<Index> hit = walk(xi, cursor_);
  if (!hit) return std::nullopt;
  // Boundary convention: lowest-indexed triangle among all that contain xi.
  Index best = *hit;
  std::vector<Index> stack{*hit};
  std::vector<Index> seen{*hit};
  while (!stack.empty()) {
    const Index t = stack.back();
    stack.pop_back();
    best = std::min(best, t);
    for (int nb : tri_->neighbors()[t]) {
      if (nb < 0) continue;
      const auto u = static_cast<Index>(nb);
      if (std::find(seen.begin(), seen.end(), u) != seen.end()) continue;
      seen.push_back(u);
      if (contains(u, xi)) stack.push_back(u);
    }
  }
  cursor_ = best;
  return best;
}

std::optional<Index> locate(const Triangulation& tri, const Point& xi) {
  if (xi.size() != 2) throw std::invalid_argument("locate requires a 2D point");
  Locator loc(tri);
  return loc.locate(Eigen::Vector2d(xi(0), xi(1)));
}

LocalSolution dq_solve_in_triangle(const Grid& grid, const Triangulation& tri, Index t,
                                   const Point& xi) {
  std::array<Index, 3> v = tri.triangles()[t];
  std::sort(v.begin(), v.end());
  const std::array<Point, 3> verts{grid[v[0]], grid[v[1]], grid[v[2]]};
  const Sphere s = circumcenter(verts);
  const Vec2 a = verts[0], b = verts[1], c = verts[2];
  const Vec2 x(xi(0), xi(1));
  const double area = orient2d(a, b, c);

  LocalSolution sol;
  sol.basis.assign(v.begin(), v.end());
  sol.weights.resize(3);
  sol.weights << orient2d(x, b, c) / area, orient2d(a, x, c) / area, orient2d(a, b, x) / area;
  sol.u1 = 2.0 * (s.center - xi);
  const double c0 = (xi - verts[0]).squaredNorm();
  sol.u2 = c0 - verts[0].dot(sol.u1);
  sol.value = 0.0;
  for (int k = 0; k < 3; ++k) sol.value += sol.weights(k) * (xi - verts[static_cast<Index>(k)]).squaredNorm();
  return sol;
}

LocalSolution dq_solve_delaunay(const Grid& grid, const Triangulation& tri, const Point& xi) {
  const auto t = locate(tri, xi);
  if (!t) throw InfeasibleError("query point lies outside conv(grid)");
  LocalSolution sol = dq_solve_in_triangle(grid, tri, *t, xi);
  sol.weights = sol.weights.cwiseMax(0.0);
  sol.weights /= sol.weights.sum();
  sol.value = 0.0;
  for (Index k = 0; k < 3; ++k) {
    sol.value += sol.weights(static_cast<Eigen::Index>(k)) * (xi - grid[sol.basis[k]]).squaredNorm();
  }
  return sol;
}

}  // namespace dualq
