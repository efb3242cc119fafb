#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dofde::rk {

struct TimeMesh {
  std::vector<double> t;  // t[0] = 0 < ... < t[N] = T
  int N = 0;
  double gamma = 1.0;
  double T = 0.0;

  double step(int n) const { return t[static_cast<std::size_t>(n) + 1] - t[n]; }
};

// t_n = (n/N)^gamma * T. gamma = 1 is the uniform mesh; larger gamma piles
// nodes toward t = 0 where solutions of the mode system lose regularity.
inline TimeMesh graded_mesh(int N, double gamma, double T) {
  if (N < 1) throw std::invalid_argument("graded_mesh: N must be >= 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("graded_mesh: gamma must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("graded_mesh: T must be positive");
  TimeMesh m;
  m.N = N;
  m.gamma = gamma;
  m.T = T;
  m.t.resize(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n)
    m.t[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n) / N, gamma) * T;
  m.t[0] = 0.0;
  m.t[static_cast<std::size_t>(N)] = T;
  for (int n = 0; n < N; ++n)
    if (!(m.t[static_cast<std::size_t>(n)] < m.t[static_cast<std::size_t>(n) + 1]))
      throw std::invalid_argument("graded_mesh: nodes collapsed (N or gamma too large)");
  return m;
}

inline TimeMesh uniform_mesh(int N, double T) { return graded_mesh(N, 1.0, T); }

}  // namespace dofde::rk
