#include "mbtl/decomposition.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mbtl {

Decomposition decompose(const Matrix& trial) {
  if (trial.rows() != trial.cols()) throw std::invalid_argument("decompose: non-square matrix");
  if (!trial.allFinite()) throw std::invalid_argument("decompose: non-finite entry");
  const auto n = trial.rows();
  Decomposition d;
  d.C = trial.mean();
  d.g = trial.colwise().mean().transpose().array() - d.C;
  d.f = trial.diagonal() - d.g - Vector::Constant(n, d.C);
  d.h = trial;
  d.h.colwise() -= d.f;
  d.h.rowwise() -= d.g.transpose();
  d.h.array() -= d.C;
  return d;
}

namespace {

double population_std(const Vector& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().mean());
}

}  // namespace

ComponentSummary component_summary(const TaskGrid& grid, const Decomposition& d) {
  const int n = grid.num_tasks();
  if (d.f.size() != n || d.g.size() != n || d.h.rows() != n || d.h.cols() != n)
    throw std::invalid_argument("component_summary: size mismatch with grid");
  ComponentSummary s;
  s.std_f = population_std(d.f);
  s.std_g = population_std(d.g);
  s.row_std_h.resize(n);
  for (int i = 0; i < n; ++i) s.row_std_h[i] = population_std(d.h.row(i).transpose());

  const int dims = grid.num_dims();
  s.f_marginal.assign(static_cast<std::size_t>(dims), Vector());
  s.g_marginal.assign(static_cast<std::size_t>(dims), Vector());
  s.h_marginal.assign(static_cast<std::size_t>(dims), Matrix());
  for (int dd = 0; dd < dims; ++dd) {
    const int m = grid.dims[static_cast<std::size_t>(dd)];
    Vector fm = Vector::Zero(m), gm = Vector::Zero(m), cnt = Vector::Zero(m);
    for (int i = 0; i < n; ++i) {
      const int p = task_multi_index(grid, i)[static_cast<std::size_t>(dd)];
      fm[p] += d.f[i];
      gm[p] += d.g[i];
      cnt[p] += 1.0;
    }
    s.f_marginal[static_cast<std::size_t>(dd)] = fm.cwiseQuotient(cnt);
    s.g_marginal[static_cast<std::size_t>(dd)] = gm.cwiseQuotient(cnt);

    Matrix hm = Matrix::Zero(m, m), hc = Matrix::Zero(m, m);
    for (int i = 0; i < n; ++i) {
      const int p = task_multi_index(grid, i)[static_cast<std::size_t>(dd)];
      for (int j = 0; j < n; ++j) {
        const int q = task_multi_index(grid, j)[static_cast<std::size_t>(dd)];
        hm(p, q) += d.h(i, j);
        hc(p, q) += 1.0;
      }
    }
    s.h_marginal[static_cast<std::size_t>(dd)] = hm.cwiseQuotient(hc);
  }
  return s;
}

void write_decomposition_csv(const Decomposition& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  out << "component,i,j,value\n";
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const auto n = d.f.size();
  for (Eigen::Index i = 0; i < n; ++i) out << "f," << i << ",," << fmt(d.f[i]) << "\n";
  for (Eigen::Index j = 0; j < n; ++j) out << "g,," << j << "," << fmt(d.g[j]) << "\n";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out << "h," << i << "," << j << "," << fmt(d.h(i, j)) << "\n";
}

}  // namespace mbtl
