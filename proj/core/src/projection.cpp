#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "collrates/worst.hpp"

namespace collrates {
namespace {

constexpr int kAngleNodes = 256;

// Gauss-Legendre on [0, pi/2] in phi with p = sin^2(phi). The integrands of
// this file are smooth in phi, while q_conv has a square-root cusp in p.
template <class F>
double integrate_angle(F&& g) {
  static const auto rule = [] {
    std::vector<double> x, w;
    gauss_legendre(kAngleNodes, x, w);
    return std::pair{x, w};
  }();
  const double half = 0.25 * std::numbers::pi;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.first.size(); ++i) {
    const double phi = half * (rule.first[i] + 1.0);
    const double s = std::sin(phi);
    const double jac = 2.0 * s * std::cos(phi);
    sum += rule.second[i] * g(s * s) * jac;
  }
  return sum * half;
}

// int_0^1 B_{c,a}(p) B_{c,b}(p) dp
double gram(int c, int a, int b) {
  return binomial(c, a) * binomial(c, b) / ((2.0 * c + 1.0) * binomial(2 * c, a + b));
}

}  // namespace

double q_conv(double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return 2.0 * std::asin(std::sqrt(p)) / std::numbers::pi;
}

std::vector<double> conv_projection_attack(int c) {
  if (c < 2 || c > kMaxJointSolverC) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  const int n = c - 1;
  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const int s = i + 1;
    for (int j = 0; j < n; ++j) g(i, j) = gram(c, s, j + 1);
    rhs(i) = integrate_angle([&](double p) { return q_conv(p) * bernstein(c, s, p); }) - gram(c, s, c);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::logic_error("Bernstein Gram matrix is not positive definite");
  }
  const Eigen::VectorXd x = ldlt.solve(rhs);
  std::vector<double> theta(static_cast<std::size_t>(c + 1), 0.0);
  theta.back() = 1.0;
  for (int i = 0; i < n; ++i) theta[static_cast<std::size_t>(i + 1)] = x(i);
  return theta;
}

double conv_l2_distance(std::span<const double> theta) {
  const int c = static_cast<int>(theta.size()) - 1;
  if (c < 1) throw InvalidArgument("theta needs at least two entries");
  const double sq = integrate_angle([&](double p) {
    double q = 0.0;
    for (int s = 0; s <= c; ++s) q += theta[static_cast<std::size_t>(s)] * bernstein(c, s, p);
    const double d = q - q_conv(p);
    return d * d;
  });
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace collrates
