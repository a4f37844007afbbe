#pragma once

// String operators O_ij(g) = X_i^(A) (x)_{l in C} u_l(g) (x) Y_j^(B), tables of their
// expectation values, and the Fourier reconstruction of Omega^(AB|C) from such a table.
//
// Convention: p_kappa rho_kappa has matrix elements
//   <b,d| p_kappa rho_kappa |a,c> = (1/|G|) sum_g conj(chi_kappa(g)) <O_{(a,b),(c,d)}(g)>
// with X_(a,b) = |a><b| on A and Y_(c,d) = |c><d| on B.

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sptent/spt_core.hpp"

namespace sptent {

/// Matrix units E_ab = |a><b|, ordered by a * dim + b.
inline std::vector<Matrix> local_operator_basis(Eigen::Index dim) {
  require(dim >= 1, ErrorCode::DimensionMismatch, "operator basis needs dim >= 1");
  std::vector<Matrix> out;
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      Matrix e = Matrix::Zero(dim, dim);
      e(a, b) = 1.0;
      out.push_back(std::move(e));
    }
  return out;
}

/// Hermitian basis: E_aa, (E_ab + E_ba)/sqrt2 and i(E_ab - E_ba)/sqrt2 for a < b.
inline std::vector<Matrix> hermitian_operator_basis(Eigen::Index dim) {
  std::vector<Matrix> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index a = 0; a < dim; ++a) {
    Matrix e = Matrix::Zero(dim, dim);
    e(a, a) = 1.0;
    out.push_back(e);
    for (Eigen::Index b = a + 1; b < dim; ++b) {
      Matrix s = Matrix::Zero(dim, dim), t = Matrix::Zero(dim, dim);
      s(a, b) = s(b, a) = r;
      t(a, b) = Complex(0, r);
      t(b, a) = Complex(0, -r);
      out.push_back(s);
      out.push_back(t);
    }
  }
  return out;
}

namespace detail {

inline Eigen::Index region_dim(const Chain& chain, const std::vector<std::size_t>& sites) {
  Eigen::Index d = 1;
  for (auto s : sites) d *= chain.dim(s);
  return d;
}

}  // namespace detail

/// <psi| X (x) U_C(g) (x) Y (x) 1_D |psi>, X on A (sites ascending), Y on B.
inline Complex string_expectation(const PureState& state, const Regions& regions, const GroupElement& g, const Matrix& X, const Matrix& Y) {
  const auto& chain = *state.chain;
  const auto da = detail::region_dim(chain, regions.A), db = detail::region_dim(chain, regions.B);
  require(X.rows() == da && X.cols() == da && Y.rows() == db && Y.cols() == db, ErrorCode::DimensionMismatch,
          "string end operators do not match the dimensions of A and B");
  detail::require_linear_region(chain, regions.C);
  Vector phi = state.amplitudes;
  apply_symmetry(phi, chain, regions.C, chain.group().index(g));
  apply_operator(phi, chain.dims(), regions.A, X);
  apply_operator(phi, chain.dims(), regions.B, Y);
  return state.amplitudes.dot(phi);
}

/// entries[g](i, j) = <O_ij(g)> with i = a * dim_a + b and j = c * dim_b + d in the
/// matrix-unit basis. Missing entries are NaN.
struct StringExpectationTable {
  FiniteAbelianGroup group;
  Regions regions;
  Eigen::Index dim_a = 1;
  Eigen::Index dim_b = 1;
  std::vector<Matrix> entries;

  static StringExpectationTable empty(FiniteAbelianGroup G, Regions r, Eigen::Index da, Eigen::Index db) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<Matrix> e(G.order(), Matrix::Constant(da * da, db * db, Complex(nan, nan)));
    return {std::move(G), std::move(r), da, db, std::move(e)};
  }

  std::size_t missing() const {
    std::size_t n = 0;
    for (const auto& m : entries)
      for (Eigen::Index i = 0; i < m.size(); ++i) n += std::isnan(m.data()[i].real()) || std::isnan(m.data()[i].imag());
    return n;
  }
};

/// Every entry of the table: for each g one pass of U_C(g), then
///   T(g, (a,b), (c,d)) = sum_r conj(psi(a,c,r)) phi_g(b,d,r).
inline StringExpectationTable build_table(const PureState& state, const Regions& regions) {
  const auto& chain = *state.chain;
  detail::require_linear_region(chain, regions.C);
  const auto da = detail::region_dim(chain, regions.A), db = detail::region_dim(chain, regions.B);
  require(da * db <= 4096, ErrorCode::CapExceeded, "A u B too large for a dense string table");
  std::vector<std::size_t> ab = regions.A;
  ab.insert(ab.end(), regions.B.begin(), regions.B.end());
  const auto off = detail::split_offsets(chain.dims(), ab);
  const auto n = static_cast<Eigen::Index>(off.inner.size());
  const auto r = static_cast<Eigen::Index>(off.outer.size());
  auto reshape = [&](const Vector& v) {
    Matrix m(n, r);
    for (Eigen::Index j = 0; j < r; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = v(static_cast<Eigen::Index>(off.outer[static_cast<std::size_t>(j)] + off.inner[static_cast<std::size_t>(i)]));
    return m;
  };
  const Matrix psi = reshape(state.amplitudes);
  auto table = StringExpectationTable::empty(chain.group(), regions, da, db);
  for (std::size_t g = 0; g < chain.group().order(); ++g) {
    Vector phi = state.amplitudes;
    apply_symmetry(phi, chain, regions.C, g);
    // k[(a,c), (b,d)] = sum_r conj(psi[(a,c), r]) phi[(b,d), r]
    const Matrix k = psi.conjugate() * reshape(phi).transpose();
    Matrix& t = table.entries[g];
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index b = 0; b < da; ++b)
        for (Eigen::Index c = 0; c < db; ++c)
          for (Eigen::Index d = 0; d < db; ++d) t(a * da + b, c * db + d) = k(a * db + c, b * db + d);
  }
  return table;
}

/// Table built from known ensemble blocks: T(g) = sum_kappa chi_kappa(g) tr(sigma_kappa E_ab (x) E_cd).
inline StringExpectationTable table_from_ensemble(const BlockEnsemble& omega) {
  auto table = StringExpectationTable::empty(omega.group, omega.regions, omega.dim_a, omega.dim_b);
  const auto da = omega.dim_a, db = omega.dim_b;
  for (std::size_t g = 0; g < omega.group.order(); ++g) {
    Matrix t = Matrix::Zero(da * da, db * db);
    for (const auto& blk : omega.blocks) {
      const Complex chi = omega.group.character_index(omega.group.index(blk.kappa), g);
      for (Eigen::Index a = 0; a < da; ++a)
        for (Eigen::Index b = 0; b < da; ++b)
          for (Eigen::Index c = 0; c < db; ++c)
            for (Eigen::Index d = 0; d < db; ++d) t(a * da + b, c * db + d) += chi * blk.p * blk.rho(b * db + d, a * db + c);
    }
    table.entries[g] = std::move(t);
  }
  return table;
}

/// Inverts the character sum charge by charge. Eigenvalues of a reconstructed rho_kappa in
/// [-1e-8, 0) are clipped; anything more negative means the table is inconsistent.
inline BlockEnsemble fourier_reconstruct(const StringExpectationTable& table) {
  const auto& G = table.group;
  require(table.entries.size() == G.order(), ErrorCode::IncompleteTable, "table lacks some group elements");
  const auto miss = table.missing();
  require(miss == 0, ErrorCode::IncompleteTable, "table is missing " + std::to_string(miss) + " entries");
  const auto da = table.dim_a, db = table.dim_b;
  BlockEnsemble out{G, table.regions, da, db, {}};
  for (std::size_t k = 0; k < G.order(); ++k) {
    Matrix f = Matrix::Zero(da * da, db * db);
    for (std::size_t g = 0; g < G.order(); ++g) f += std::conj(G.character_index(k, g)) * table.entries[g];
    f /= static_cast<double>(G.order());
    Matrix sigma(da * db, da * db);
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index b = 0; b < da; ++b)
        for (Eigen::Index c = 0; c < db; ++c)
          for (Eigen::Index d = 0; d < db; ++d) sigma(b * db + d, a * db + c) = f(a * da + b, c * db + d);
    sigma = (sigma + sigma.adjoint()).eval() * 0.5;
    const double p = sigma.trace().real();
    if (p < kDropProbability) {
      require(min_eigenvalue_hermitian(sigma) >= -1e-8, ErrorCode::NonPhysicalReconstruction,
              "reconstructed block " + to_string(G.charge(k).dual_residues) + " has a negative eigenvalue");
      continue;
    }
    Matrix rho = sigma / p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double low = es.eigenvalues().minCoeff();
    require(low >= -1e-8, ErrorCode::NonPhysicalReconstruction,
            "reconstructed block " + to_string(G.charge(k).dual_residues) + " has eigenvalue " + std::to_string(low));
    if (low < 0.0) {
      RealVector ev = es.eigenvalues().cwiseMax(0.0);
      ev /= ev.sum();
      rho = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    }
    out.blocks.push_back({G.charge(k), p, std::move(rho)});
  }
  double total = 0.0;
  for (const auto& b : out.blocks) total += b.p;
  require(std::abs(total - 1.0) <= 1e-8, ErrorCode::NonPhysicalReconstruction, "reconstructed probabilities sum to " + std::to_string(total));
  for (auto& b : out.blocks) b.p /= total;
  validate_ensemble(out);
  return out;
}

struct PhaseEstimate {
  double order_parameter = 0.0;
  int d_estimate = 1;
};

/// d_estimate = nearest integer to the order parameter, plus one.
inline PhaseEstimate detect_phase(const StringExpectationTable& table) {
  const double op = order_parameter(fourier_reconstruct(table));
  return {op, static_cast<int>(std::lround(op)) + 1};
}

/// Converts a table measured in arbitrary operator bases {P_i} on A and {Q_j} on B into
/// the matrix-unit basis by expanding E_ab = sum_i c_i P_i (the bases must span).
inline StringExpectationTable from_operator_basis(const FiniteAbelianGroup& G, const Regions& regions, const std::vector<Matrix>& basis_a,
                                                  const std::vector<Matrix>& basis_b, const std::vector<Matrix>& entries) {
  require(!basis_a.empty() && !basis_b.empty(), ErrorCode::DimensionMismatch, "empty operator basis");
  const auto da = basis_a.front().rows(), db = basis_b.front().rows();
  require(static_cast<Eigen::Index>(basis_a.size()) == da * da && static_cast<Eigen::Index>(basis_b.size()) == db * db,
          ErrorCode::DimensionMismatch, "operator bases must have dim^2 elements");
  require(entries.size() == G.order(), ErrorCode::IncompleteTable, "need one table slice per group element");
  // Column i holds P_i in row-major order; E_ab is the unit vector at a * d + b.
  auto coeffs = [](const std::vector<Matrix>& basis, Eigen::Index d) {
    Matrix m(d * d, d * d);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) m(a * d + b, static_cast<Eigen::Index>(i)) = basis[i](a, b);
    Eigen::FullPivLU<Matrix> lu(m);
    require(lu.isInvertible(), ErrorCode::DimensionMismatch, "operator basis does not span");
    return Matrix(lu.inverse());  // row i, column (a,b): coefficient of P_i in E_ab
  };
  const Matrix ca = coeffs(basis_a, da), cb = coeffs(basis_b, db);
  auto table = StringExpectationTable::empty(G, regions, da, db);
  for (std::size_t g = 0; g < G.order(); ++g) {
    require(entries[g].rows() == da * da && entries[g].cols() == db * db, ErrorCode::DimensionMismatch, "table slice has the wrong shape");
    table.entries[g] = ca.transpose() * entries[g] * cb;
  }
  return table;
}

// CSV exchange format: g,i_row,i_col,j_row,j_col,re,im with g as space-separated residues.

inline void write_table_csv(std::ostream& os, const StringExpectationTable& table) {
  os << "g,i_row,i_col,j_row,j_col,re,im\n";
  char buf[64];
  for (std::size_t g = 0; g < table.group.order(); ++g) {
    std::string gs;
    for (auto r : table.group.digits(g)) gs += (gs.empty() ? "" : " ") + std::to_string(r);
    for (Eigen::Index a = 0; a < table.dim_a; ++a)
      for (Eigen::Index b = 0; b < table.dim_a; ++b)
        for (Eigen::Index c = 0; c < table.dim_b; ++c)
          for (Eigen::Index d = 0; d < table.dim_b; ++d) {
            const Complex v = table.entries[g](a * table.dim_a + b, c * table.dim_b + d);
            os << gs << ',' << a << ',' << b << ',' << c << ',' << d << ',';
            std::snprintf(buf, sizeof buf, "%.17g", v.real());
            os << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", v.imag());
            os << buf << '\n';
          }
  }
}

inline StringExpectationTable read_table_csv(std::istream& is, const FiniteAbelianGroup& G, const Regions& regions, Eigen::Index da,
                                             Eigen::Index db) {
  auto table = StringExpectationTable::empty(G, regions, da, db);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("g,", 0) == 0)) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    require(cols.size() == 7, ErrorCode::ConfigError, "table line " + std::to_string(lineno) + ": expected 7 columns");
    std::vector<int> res;
    std::stringstream gs(cols[0]);
    int x;
    while (gs >> x) res.push_back(x);
    try {
      const auto g = G.flat(res);
      const int a = std::stoi(cols[1]), b = std::stoi(cols[2]), c = std::stoi(cols[3]), d = std::stoi(cols[4]);
      require(a >= 0 && b >= 0 && c >= 0 && d >= 0 && a < da && b < da && c < db && d < db, ErrorCode::ConfigError, "index out of range");
      table.entries[g](a * da + b, c * db + d) = Complex(std::stod(cols[5]), std::stod(cols[6]));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "table line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "table line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return table;
}

}  // namespace sptent
