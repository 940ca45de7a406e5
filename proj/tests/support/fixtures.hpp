#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "adaptmt/cer.hpp"
#include "adaptmt/combo.hpp"
#include "adaptmt/graph.hpp"
#include "adaptmt/mvn.hpp"
#include "adaptmt/stagewise.hpp"

namespace fixtures {

using namespace adaptmt;

// Two doses, primary and secondary endpoint each; H1,H2 primaries, H3,H4 secondaries.
inline WeightingGraph schizophrenia_graph() {
  return WeightingGraph({0.5, 0.5, 0, 0}, {0, .5, .5, 0, .5, 0, 0, .5, 0, 1, 0, 0, 1, 0, 0, 0});
}

inline CorrelationKnowledge schizophrenia_knowledge() {
  const auto R = CorrelationMatrix::equicorrelated(2, 0.5);
  return CorrelationKnowledge(4, {{IndexSet::of1({1, 2}), R}, {IndexSet::of1({3, 4}), R}});
}

inline const std::vector<double>& schizophrenia_p1() {
  static const std::vector<double> p{0.00045, 0.0952, 0.0225, 0.1104};
  return p;
}

// Eight-hypothesis graph from the simulation study, entered as printed.
inline WeightingGraph appendix_graph() {
  const double a = 1.0 / 12, b = 0.75, c = 1.0 / 3;
  std::vector<double> G = {
      0, a, a, a, b, 0, 0, 0,  //
      a, 0, a, a, 0, b, 0, 0,  //
      a, a, 0, a, 0, 0, b, 0,  //
      a, a, a, 0, 0, 0, 0, b,  //
      0, c, c, c, 0, 0, 0, 0,  //
      c, 0, c, c, 0, 0, 0, 0,  //
      c, c, 0, c, 0, 0, 0, 0,  //
      c, c, c, 0, 0, 0, 0, 0,
  };
  return WeightingGraph({0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0}, G);
}

// Random graph with row sums one and weights summing to one.
inline WeightingGraph random_graph(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(k), G(k * k, 0.0);
  double s = 0.0;
  for (auto& x : w) s += (x = u(rng) < 0.25 ? 0.0 : u(rng));
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  for (int i = 0; i < k && k > 1; ++i) {
    double r = 0.0;
    for (int j = 0; j < k; ++j)
      if (i != j) r += (G[i * k + j] = u(rng) < 0.3 ? 0.0 : u(rng));
    if (r == 0.0) {
      G[i * k + (i + 1) % k] = 1.0;
      r = 1.0;
    }
    for (int j = 0; j < k; ++j) G[i * k + j] /= r;
  }
  return WeightingGraph(w, G);
}

// Random partition into blocks with one-factor or equicorrelated structure.
inline CorrelationKnowledge random_knowledge(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> label(k);
  for (auto& l : label) l = static_cast<int>(u(rng) * std::min(k, 3));
  std::vector<CorrelationBlock> blocks;
  for (int b = 0; b < 3; ++b) {
    IndexSet m;
    for (int j = 0; j < k; ++j)
      if (label[j] == b) m = m.with(j);
    if (m.size() < 2) continue;
    std::vector<double> l;
    for (int i = 0; i < m.size(); ++i) l.push_back(0.2 + 0.7 * u(rng));
    blocks.push_back({m, CorrelationMatrix::one_factor(l)});
  }
  return CorrelationKnowledge(k, blocks);
}

// Standard normals with correlation R via a Cholesky factor.
class CorrelatedNormals {
 public:
  explicit CorrelatedNormals(const CorrelationMatrix& R) : d_(R.size()) {
    Eigen::MatrixXd M(d_, d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) M(i, j) = R(i, j);
    L_ = Eigen::LLT<Eigen::MatrixXd>(M).matrixL();
  }
  template <class Rng>
  void draw(Rng& rng, std::vector<double>& out) {
    std::normal_distribution<double> n;
    Eigen::VectorXd e(d_);
    for (std::size_t i = 0; i < d_; ++i) e[i] = n(rng);
    const Eigen::VectorXd z = L_ * e;
    out.assign(z.data(), z.data() + d_);
  }

 private:
  std::size_t d_;
  Eigen::MatrixXd L_;
};

// Full-length z statistics for a knowledge partition: correlated within
// blocks, independent across.
template <class Rng>
std::vector<double> draw_z(const CorrelationKnowledge& kn, Rng& rng) {
  std::vector<double> z(kn.size());
  std::normal_distribution<double> n;
  for (auto& x : z) x = n(rng);
  std::vector<double> v;
  for (const auto& b : kn.blocks()) {
    CorrelatedNormals cn(b.corr);
    cn.draw(rng, v);
    std::size_t i = 0;
    for (int j : b.members) z[j] = v[i++];
  }
  return z;
}

inline double upper_p(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace fixtures
