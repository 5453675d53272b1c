#include "telegraph/random.hpp"

#include <cmath>

#include <Eigen/QR>

namespace telegraph {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

RealMatrix random_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  RealMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

RealMatrix random_symmetric(int n, Rng& rng, double lo, double hi, bool log_uniform) {
  Eigen::VectorXd values(n);
  if (log_uniform) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    for (int i = 0; i < n; ++i) values(i) = std::exp(u(rng));
  } else {
    std::uniform_real_distribution<double> u(lo, hi);
    for (int i = 0; i < n; ++i) values(i) = u(rng);
  }
  const RealMatrix q = random_orthogonal(n, rng);
  RealMatrix m = q * values.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

LineConstants random_line(int n, Rng& rng, const RandomLineOptions& o) {
  LineMatrices m;
  m.L = random_symmetric(n, rng, o.lc_min, o.lc_max, true);
  m.C = random_symmetric(n, rng, o.lc_min, o.lc_max, true);
  m.R = random_symmetric(n, rng, o.loss_min, o.loss_max, false);
  m.G = random_symmetric(n, rng, o.loss_min, o.loss_max, false);
  return LineConstants::from(m);
}

ComplexMatrix random_complex(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

ComplexMatrix random_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(n, n, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace telegraph
