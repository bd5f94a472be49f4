#pragma once

#include <cstddef>
#include <vector>

#include "collrates/collusion.hpp"
#include "collrates/timeshare.hpp"

namespace collrates::detail {

// Quadrature nodes with the Bernstein rows of degree c and c - 1 cached, so
// the solvers only do multiply-adds in their inner loops.
struct NodeTable {
  int c = 0;
  std::vector<double> p;
  std::vector<double> w;
  std::vector<double> b;   // n x (c + 1), B_{c, sigma}(p_k)
  std::vector<double> b1;  // n x c, B_{c-1, k}(p_k)

  NodeTable(int c_, const TimeSharingDist& dist, const QuadratureConfig& cfg) : c(c_) {
    Quadrature quad(dist, cfg);
    const std::size_t n = quad.size();
    p.reserve(n);
    w.reserve(n);
    b.reserve(n * static_cast<std::size_t>(c + 1));
    b1.reserve(n * static_cast<std::size_t>(c));
    for (const QuadratureNode& node : quad.nodes()) {
      p.push_back(node.p);
      w.push_back(node.weight);
      for (int s = 0; s <= c; ++s) b.push_back(bernstein(c, s, node.p));
      for (int s = 0; s < c; ++s) b1.push_back(bernstein(c - 1, s, node.p));
    }
  }

  std::size_t size() const noexcept { return p.size(); }
  const double* row(std::size_t k) const noexcept { return &b[k * static_cast<std::size_t>(c + 1)]; }
  const double* row1(std::size_t k) const noexcept { return &b1[k * static_cast<std::size_t>(c)]; }

  double q(std::size_t k, const std::vector<double>& theta) const noexcept {
    const double* r = row(k);
    double sum = 0.0;
    for (int s = 1; s <= c; ++s) sum += theta[static_cast<std::size_t>(s)] * r[s];
    return sum;
  }
};

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double term) noexcept {
    const double t = sum_ + term;
    carry_ += (sum_ >= 0 ? sum_ : -sum_) >= (term >= 0 ? term : -term) ? (sum_ - t) + term
                                                                          : (term - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace collrates::detail
