#include "dofde/laplacian.hpp"

#include <stdexcept>
#include <vector>

namespace dofde::fd {

static void check(const GridSpec& g) {
  if (g.dimension != 1 && g.dimension != 2)
    throw std::invalid_argument("grid: dimension must be 1 or 2");
  if (g.cells < 2) throw std::invalid_argument("grid: need at least 2 cells per axis");
}

int grid_ndof(const GridSpec& g) {
  check(g);
  const int n = g.cells - 1;
  return g.dimension == 1 ? n : n * n;
}

double grid_dx(const GridSpec& g) {
  check(g);
  return 1.0 / g.cells;
}

void grid_coords(const GridSpec& g, int idx, double& x, double& y) {
  const int n = g.cells - 1;
  const double dx = grid_dx(g);
  if (g.dimension == 1) {
    x = (idx + 1) * dx;
    y = 0.0;
  } else {
    x = (idx % n + 1) * dx;
    y = (idx / n + 1) * dx;
  }
}

Eigen::VectorXd grid_sample(const GridSpec& g,
                            const std::function<double(double, double)>& f) {
  const int nd = grid_ndof(g);
  Eigen::VectorXd v(nd);
  double x, y;
  for (int i = 0; i < nd; ++i) {
    grid_coords(g, i, x, y);
    v[i] = f(x, y);
  }
  return v;
}

double grid_l2_norm(const GridSpec& g, const Eigen::VectorXd& v) {
  return v.norm() * std::pow(grid_dx(g), g.dimension / 2.0);
}

Eigen::SparseMatrix<double> assemble_laplacian(const GridSpec& g) {
  const int nd = grid_ndof(g);
  const double dx = grid_dx(g);
  const double w = 1.0 / (dx * dx);
  std::vector<Eigen::Triplet<double>> trip;

  if (g.dimension == 1) {
    trip.reserve(3 * static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) {
      trip.emplace_back(i, i, -2.0 * w);
      if (i > 0) trip.emplace_back(i, i - 1, w);
      if (i < nd - 1) trip.emplace_back(i, i + 1, w);
    }
  } else {
    const int n = g.cells - 1;
    trip.reserve(5 * static_cast<std::size_t>(nd));
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = ix + iy * n;
        trip.emplace_back(i, i, -4.0 * w);
        if (ix > 0) trip.emplace_back(i, i - 1, w);
        if (ix < n - 1) trip.emplace_back(i, i + 1, w);
        if (iy > 0) trip.emplace_back(i, i - n, w);
        if (iy < n - 1) trip.emplace_back(i, i + n, w);
      }
  }

  Eigen::SparseMatrix<double> L(nd, nd);
  L.setFromTriplets(trip.begin(), trip.end());
  L.makeCompressed();
  return L;
}

}  // namespace dofde::fd
