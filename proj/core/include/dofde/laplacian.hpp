#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

namespace dofde::fd {

// Tensor grid on (0,1)^d with homogeneous Dirichlet boundary; only interior
// nodes carry unknowns. 2D nodes are numbered x-fastest.
struct GridSpec {
  int dimension = 2;
  int cells = 64;  // per axis; interior nodes per axis = cells - 1
};

int grid_ndof(const GridSpec& g);
double grid_dx(const GridSpec& g);

// Coordinates of interior node `idx`; y is 0 in 1D.
void grid_coords(const GridSpec& g, int idx, double& x, double& y);

Eigen::VectorXd grid_sample(const GridSpec& g,
                            const std::function<double(double, double)>& f);

// Euclidean norm scaled by dx^(d/2); the grid analogue of the L2(Omega) norm.
double grid_l2_norm(const GridSpec& g, const Eigen::VectorXd& v);

// Second-order 3-point (1D) / 5-point (2D) Laplacian with the boundary rows
// eliminated. Symmetric, negative definite.
Eigen::SparseMatrix<double> assemble_laplacian(const GridSpec& g);

}  // namespace dofde::fd
