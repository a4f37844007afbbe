#pragma once

// Projective unitary representations of finite Abelian groups.
//
// A representation stores one matrix per group element (flat index order). Inputs are
// gauge-normalized so that V(identity) = I, which makes the extracted factor system
// normalized and unique. Cohomology classes are compared through the commutator
// bicharacter beta(g,h) = omega(g,h) / omega(h,g), which is invariant under gauge changes.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sptent/abelian_group.hpp"
#include "sptent/linalg.hpp"

namespace sptent {

namespace tol {
inline constexpr double unitarity = 1e-10;
inline constexpr double closure = 1e-9;
inline constexpr double validation = 1e-9;
inline constexpr double reconstruction = 1e-8;
inline constexpr double exact = 1e-10;
}  // namespace tol

class UnitaryRep {
 public:
  UnitaryRep(FiniteAbelianGroup group, std::vector<Matrix> matrices) : group_(std::move(group)), matrices_(std::move(matrices)) {
    require(matrices_.size() == group_.order(), ErrorCode::DimensionMismatch,
            "representation needs one matrix per group element (" + std::to_string(group_.order()) + "), got " +
                std::to_string(matrices_.size()));
    require(!matrices_.empty() && matrices_[0].rows() >= 1, ErrorCode::DimensionMismatch, "representation dimension must be >= 1");
    const auto d = matrices_[0].rows();
    for (const auto& m : matrices_) {
      require(m.rows() == d && m.cols() == d, ErrorCode::DimensionMismatch, "representation matrices must be square and equal-sized");
      require(unitarity_residual(m) <= tol::unitarity, ErrorCode::ClosureViolation, "representation matrix is not unitary");
    }
    // Gauge: V(e) must be a scalar phase; divide it out.
    const Complex c = matrices_[0].trace() / static_cast<double>(d);
    require(max_abs(matrices_[0] - c * Matrix::Identity(d, d)) <= tol::closure, ErrorCode::ClosureViolation,
            "V(identity) is not proportional to the identity");
    const Complex phase = std::conj(c) / std::abs(c);
    if (std::abs(phase - Complex(1.0)) > 0.0)
      for (auto& m : matrices_) m *= phase;
    matrices_[0] = Matrix::Identity(d, d);
  }

  const FiniteAbelianGroup& group() const { return group_; }
  Eigen::Index dim() const { return matrices_[0].rows(); }
  const Matrix& operator[](std::size_t g) const { return matrices_[g]; }
  const Matrix& at(const GroupElement& g) const { return matrices_[group_.index(g)]; }
  const std::vector<Matrix>& matrices() const { return matrices_; }

 private:
  FiniteAbelianGroup group_;
  std::vector<Matrix> matrices_;
};

/// Table omega(g,h) indexed by flat element indices.
struct FactorSystem {
  FiniteAbelianGroup group;
  Matrix omega;

  Complex operator()(std::size_t g, std::size_t h) const { return omega(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)); }

  /// max |omega(g,h) omega(gh,k) - omega(h,k) omega(g,hk)| over all triples.
  double cocycle_residual() const {
    const auto n = group.order();
    double worst = 0.0;
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h)
        for (std::size_t k = 0; k < n; ++k) {
          const auto gh = group.compose_index(g, h), hk = group.compose_index(h, k);
          worst = std::max(worst, std::abs((*this)(g, h) * (*this)(gh, k) - (*this)(h, k) * (*this)(g, hk)));
        }
    return worst;
  }

  double normalization_residual() const {
    double worst = 0.0;
    for (std::size_t g = 0; g < group.order(); ++g)
      worst = std::max({worst, std::abs((*this)(0, g) - 1.0), std::abs((*this)(g, 0) - 1.0)});
    return worst;
  }
};

struct Bicharacter {
  FiniteAbelianGroup group;
  Matrix beta;

  Complex operator()(std::size_t g, std::size_t h) const { return beta(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)); }

  bool trivial(double tolerance = tol::validation) const { return max_abs(beta - Matrix::Ones(beta.rows(), beta.cols())) <= tolerance; }
};

/// Phases theta(g) in [0, 2 pi), indexed by flat element index.
struct GaugePhases {
  std::vector<double> theta;
};

inline FactorSystem factor_system(const UnitaryRep& rep) {
  const auto& G = rep.group();
  const auto n = G.order();
  const auto d = static_cast<double>(rep.dim());
  Matrix omega(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      const Matrix prod = rep[g] * rep[h];
      const Matrix& target = rep[G.compose_index(g, h)];
      Complex w = (target.adjoint() * prod).trace() / d;
      const double a = std::abs(w);
      require(a > 0.5, ErrorCode::ClosureViolation, "V(g)V(h) is not proportional to V(gh)");
      w /= a;
      require(max_abs(prod - w * target) <= tol::closure, ErrorCode::ClosureViolation,
              "no unit scalar fits V(g)V(h) = omega V(gh) for g=" + std::to_string(g) + ", h=" + std::to_string(h));
      omega(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) = w;
    }
  return {G, std::move(omega)};
}

inline Bicharacter commutator_bicharacter(const FactorSystem& omega) {
  Matrix beta = omega.omega.cwiseQuotient(omega.omega.transpose());
  return {omega.group, std::move(beta)};
}

inline FactorSystem trivial_factor_system(const FiniteAbelianGroup& G) {
  const auto n = static_cast<Eigen::Index>(G.order());
  return {G, Matrix::Ones(n, n)};
}

/// exp(i(theta(gh) - theta(g) - theta(h))).
inline FactorSystem coboundary(const FiniteAbelianGroup& G, const GaugePhases& phases) {
  const auto n = G.order();
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h)
      out(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) =
          std::polar(1.0, phases.theta[G.compose_index(g, h)] - phases.theta[g] - phases.theta[h]);
  return {G, std::move(out)};
}

inline FactorSystem pointwise_product(const FactorSystem& a, const FactorSystem& b) {
  require(a.group == b.group, ErrorCode::GroupMismatch, "factor systems over different groups");
  return {a.group, a.omega.cwiseProduct(b.omega)};
}

inline FactorSystem conjugate(const FactorSystem& a) { return {a.group, a.omega.conjugate()}; }

/// Bilinear cocycle exp(2 pi i sum_{i<j} c_ij g_i h_j / gcd(n_i, n_j)); `coefficients` lists
/// c_ij in (i,j) lexicographic order. Every cohomology class of a finite Abelian group has
/// such a representative.
inline FactorSystem bilinear_cocycle(const FiniteAbelianGroup& G, const std::vector<int>& coefficients) {
  const auto& ord = G.cyclic_orders();
  const auto r = G.rank();
  require(coefficients.size() == r * (r - (r > 0 ? 1 : 0)) / 2, ErrorCode::DimensionMismatch, "wrong number of cocycle coefficients");
  const auto n = G.order();
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g) {
    auto gd = G.digits(g);
    for (std::size_t h = 0; h < n; ++h) {
      auto hd = G.digits(h);
      double phase = 0.0;
      std::size_t c = 0;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j, ++c) {
          const int q = std::gcd(ord[i], ord[j]);
          const long long num = (static_cast<long long>(coefficients[c]) * gd[i] * hd[j]) % q;
          phase += static_cast<double>(num) / q;
        }
      out(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) = std::polar(1.0, 2.0 * std::numbers::pi * (phase - std::floor(phase)));
    }
  }
  return {G, std::move(out)};
}

/// A cocycle in a random class, dressed with a random normalized coboundary.
inline FactorSystem random_cocycle(const FiniteAbelianGroup& G, Rng& rng) {
  const auto& ord = G.cyclic_orders();
  std::vector<int> coeffs;
  for (std::size_t i = 0; i < G.rank(); ++i)
    for (std::size_t j = i + 1; j < G.rank(); ++j) {
      std::uniform_int_distribution<int> pick(0, std::gcd(ord[i], ord[j]) - 1);
      coeffs.push_back(pick(rng));
    }
  GaugePhases theta{std::vector<double>(G.order(), 0.0)};
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (std::size_t g = 1; g < G.order(); ++g) theta.theta[g] = angle(rng);
  return pointwise_product(bilinear_cocycle(G, coeffs), coboundary(G, theta));
}

namespace detail {

inline double wrap_phase(double x) {
  x = std::fmod(x, 2.0 * std::numbers::pi);
  if (x < 0) x += 2.0 * std::numbers::pi;
  return x;
}

/// Solves ratio(g,h) = f(gh) / (f(g) f(h)) for a symmetric normalized cocycle `ratio`, walking
/// the generator presentation: f(x + e_j) = f(x) f(e_j) ratio(x, e_j), with f(e_j) an n_j-th
/// root fixed by closing the cycle of e_j.
inline GaugePhases solve_symmetric_coboundary(const FactorSystem& ratio) {
  const auto& G = ratio.group;
  const auto& ord = G.cyclic_orders();
  std::vector<Complex> f(G.order(), Complex(0.0));
  f[0] = 1.0;
  std::vector<Complex> fgen(G.rank());
  std::vector<std::size_t> gen(G.rank());
  for (std::size_t j = 0; j < G.rank(); ++j) {
    std::vector<int> e(G.rank(), 0);
    if (ord[j] == 1) {
      fgen[j] = 1.0;
      gen[j] = 0;
      continue;
    }
    e[j] = 1;
    gen[j] = G.flat(e);
    Complex prod = 1.0;
    std::size_t x = 0;
    for (int k = 0; k < ord[j]; ++k) {
      prod *= ratio(x, gen[j]);
      x = G.compose_index(x, gen[j]);
    }
    fgen[j] = std::polar(1.0, std::arg(1.0 / prod) / ord[j]);
  }
  for (std::size_t idx = 1; idx < G.order(); ++idx) {
    // Predecessor: decrement the last nonzero digit.
    auto dg = G.digits(idx);
    std::size_t j = G.rank();
    while (j-- > 0)
      if (dg[j] != 0) break;
    dg[j] -= 1;
    const auto prev = G.flat(dg);
    f[idx] = f[prev] * fgen[j] * ratio(prev, gen[j]);
  }
  GaugePhases out{std::vector<double>(G.order())};
  for (std::size_t g = 0; g < G.order(); ++g) out.theta[g] = wrap_phase(std::arg(f[g]));
  return out;
}

}  // namespace detail

struct CohomologyComparison {
  bool equivalent = false;
  /// When equivalent: omega1(g,h) / omega2(g,h) = exp(i(theta(gh) - theta(g) - theta(h))).
  std::optional<GaugePhases> gauge;
};

inline CohomologyComparison cohomology_equivalent(const FactorSystem& omega1, const FactorSystem& omega2) {
  require(omega1.group == omega2.group, ErrorCode::GroupMismatch, "factor systems over different groups");
  const auto b1 = commutator_bicharacter(omega1);
  const auto b2 = commutator_bicharacter(omega2);
  if (max_abs(b1.beta - b2.beta) > tol::validation) return {false, std::nullopt};
  FactorSystem ratio{omega1.group, omega1.omega.cwiseQuotient(omega2.omega)};
  auto theta = detail::solve_symmetric_coboundary(ratio);
  const double residual = max_abs(coboundary(omega1.group, theta).omega - ratio.omega);
  require(residual <= tol::validation, ErrorCode::InvariantViolation,
          "bicharacters agree but the gauge witness fails (residual " + std::to_string(residual) + ")");
  return {true, std::move(theta)};
}

/// Elements g with beta(g, h) = 1 for every h.
inline std::vector<std::size_t> radical(const Bicharacter& beta, double tolerance = tol::validation) {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < beta.group.order(); ++g) {
    bool in = true;
    for (std::size_t h = 0; h < beta.group.order() && in; ++h) in = std::abs(beta(g, h) - 1.0) <= tolerance;
    if (in) out.push_back(g);
  }
  return out;
}

/// Common dimension of the projective irreps in the class of omega: sqrt(|G| / |Rad(beta)|).
inline int irrep_dimension(const FactorSystem& omega) {
  const auto rad = radical(commutator_bicharacter(omega)).size();
  const auto n = omega.group.order();
  require(rad > 0 && n % rad == 0, ErrorCode::NonIntegerDimension, "radical size does not divide the group order");
  const auto q = n / rad;
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(q))));
  require(d * d == q, ErrorCode::NonIntegerDimension, "|G|/|Rad| = " + std::to_string(q) + " is not a perfect square");
  return static_cast<int>(d);
}

inline UnitaryRep character_rep(const FiniteAbelianGroup& G, const Charge& kappa) {
  const auto k = G.index(kappa);
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) mats.push_back(Matrix::Constant(1, 1, G.character_index(k, g)));
  return {G, std::move(mats)};
}

/// Direct sum of characters, diagonal in the given order.
inline UnitaryRep diagonal_rep(const FiniteAbelianGroup& G, const std::vector<Charge>& charges) {
  require(!charges.empty(), ErrorCode::DimensionMismatch, "diagonal representation needs at least one charge");
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(charges.size()), static_cast<Eigen::Index>(charges.size()));
    for (std::size_t k = 0; k < charges.size(); ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = G.character_index(G.index(charges[k]), g);
    mats.push_back(std::move(m));
  }
  return {G, std::move(mats)};
}

inline UnitaryRep conjugate_rep(const UnitaryRep& rep) {
  std::vector<Matrix> mats;
  for (const auto& m : rep.matrices()) mats.push_back(m.conjugate());
  return {rep.group(), std::move(mats)};
}

inline UnitaryRep tensor_rep(const UnitaryRep& a, const UnitaryRep& b) {
  require(a.group() == b.group(), ErrorCode::GroupMismatch, "tensor product of representations of different groups");
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < a.group().order(); ++g) mats.push_back(kron(a[g], b[g]));
  return {a.group(), std::move(mats)};
}

/// Conjugates every matrix by a unitary: g -> W V(g) W^dagger.
inline UnitaryRep conjugate_by(const UnitaryRep& rep, const Matrix& w) {
  std::vector<Matrix> mats;
  for (const auto& m : rep.matrices()) mats.push_back(w * m * w.adjoint());
  return {rep.group(), std::move(mats)};
}

/// g -> exp(i theta(g)) V(g).
inline UnitaryRep regauge(const UnitaryRep& rep, const GaugePhases& phases) {
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < rep.group().order(); ++g) mats.push_back(std::polar(1.0, phases.theta[g]) * rep[g]);
  return {rep.group(), std::move(mats)};
}

/// L(g) e_h = omega(g,h) e_{gh}; its factor system is omega itself.
inline UnitaryRep twisted_regular_rep(const FactorSystem& omega) {
  require(omega.normalization_residual() <= tol::exact, ErrorCode::ClosureViolation, "factor system is not normalized");
  const auto& G = omega.group;
  const auto n = static_cast<Eigen::Index>(G.order());
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) {
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t h = 0; h < G.order(); ++h) m(static_cast<Eigen::Index>(G.compose_index(g, h)), static_cast<Eigen::Index>(h)) = omega(g, h);
    mats.push_back(std::move(m));
  }
  return {G, std::move(mats)};
}

/// Dimension of {X : X V(g) = V(g) X for all g}.
inline Eigen::Index commutant_dimension(const UnitaryRep& rep) {
  const auto d = rep.dim();
  const auto n = static_cast<Eigen::Index>(rep.group().order());
  Matrix stacked(n * d * d, d * d);
  const Matrix id = Matrix::Identity(d, d);
  for (Eigen::Index g = 0; g < n; ++g) {
    const auto& v = rep[static_cast<std::size_t>(g)];
    // Column-major vec: vec(VX - XV) = (I (x) V - V^T (x) I) vec(X).
    stacked.block(g * d * d, 0, d * d, d * d) = kron(id, v) - kron(v.transpose(), id);
  }
  return null_space(stacked, 1e-9).cols();
}

/// Restriction P^dagger V(g) P of a representation to an invariant subspace with isometry P.
inline UnitaryRep restrict_rep(const UnitaryRep& rep, const Matrix& isometry) {
  std::vector<Matrix> mats;
  for (const auto& m : rep.matrices()) mats.push_back(isometry.adjoint() * m * isometry);
  return {rep.group(), std::move(mats)};
}

/// Splits a representation into irreducible invariant subspaces (returned as isometries)
/// by eigen-decomposing the group average of a random Hermitian matrix, which lies in the
/// commutant. Each block is certified irreducible by a trivial commutant.
inline std::vector<Matrix> irreducible_blocks(const UnitaryRep& rep, std::uint64_t seed = 7) {
  const auto d = rep.dim();
  const auto n = static_cast<double>(rep.group().order());
  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng rng(seed + 7919ULL * static_cast<std::uint64_t>(attempt));
    const Matrix h = random_hermitian(d, rng);
    Matrix avg = Matrix::Zero(d, d);
    for (const auto& m : rep.matrices()) avg += m * h * m.adjoint();
    avg /= n;
    avg = (avg + avg.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> es(avg);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<Matrix> blocks;
    Eigen::Index start = 0;
    bool ok = true;
    while (start < d && ok) {
      Eigen::Index stop = start + 1;
      while (stop < d && ev(stop) - ev(stop - 1) < 1e-8 * scale) ++stop;
      Matrix p = es.eigenvectors().middleCols(start, stop - start);
      ok = commutant_dimension(restrict_rep(rep, p)) == 1;
      blocks.push_back(std::move(p));
      start = stop;
    }
    if (ok) return blocks;
  }
  fail(ErrorCode::InvariantViolation, "could not split representation into irreducible blocks");
}

/// An irreducible projective representation whose factor system equals omega exactly.
inline UnitaryRep canonical_irrep(const FactorSystem& omega, std::uint64_t seed = 7) {
  const auto regular = twisted_regular_rep(omega);
  const auto blocks = irreducible_blocks(regular, seed);
  auto t = restrict_rep(regular, blocks.front());
  const auto cmp = cohomology_equivalent(omega, factor_system(t));
  require(cmp.equivalent, ErrorCode::InvariantViolation, "extracted irrep left the cohomology class");
  GaugePhases fix{cmp.gauge->theta};
  for (auto& x : fix.theta) x = detail::wrap_phase(-x);
  t = regauge(t, fix);
  require(max_abs(factor_system(t).omega - omega.omega) <= tol::validation, ErrorCode::InvariantViolation,
          "gauge-fixed irrep does not reproduce the factor system");
  return t;
}

inline double max_rep_distance(const UnitaryRep& a, const UnitaryRep& b) {
  require(a.group() == b.group() && a.dim() == b.dim(), ErrorCode::DimensionMismatch, "representations are not comparable");
  double worst = 0.0;
  for (std::size_t g = 0; g < a.group().order(); ++g) worst = std::max(worst, max_abs(a[g] - b[g]));
  return worst;
}

/// T(g) = W [t(g) (x) t'(g)] W^dagger with t irreducible and t' = diag(characters).
struct ProjectiveDecomposition {
  Matrix W;
  UnitaryRep irrep;
  UnitaryRep linear;
  std::vector<Charge> linear_charges;
};

/// Splits a projective representation into a fixed irrep of its class tensored with a
/// linear representation. If `irrep` is supplied it must lie in T's class; it is re-gauged
/// to T's factor system when needed.
///
/// Multiplicity copies are found in the charge sectors of the linear representation
/// T (x) conj(t): a vector there reshapes to an intertwiner X with T(g) X = chi(g) X t(g).
inline ProjectiveDecomposition decompose_projective_rep(const UnitaryRep& T, std::optional<UnitaryRep> irrep = std::nullopt,
                                                        std::uint64_t seed = 7) {
  const auto& G = T.group();
  const auto omega = factor_system(T);
  UnitaryRep t = irrep ? *irrep : canonical_irrep(omega, seed);
  require(t.group() == G, ErrorCode::GroupMismatch, "irrep and representation use different groups");
  const auto cmp = cohomology_equivalent(omega, factor_system(t));
  require(cmp.equivalent, ErrorCode::ClassMismatch, "supplied irrep is not in the class of the representation");
  {
    // omega / omega_t = d(theta); rescaling t by exp(i theta) makes its factor system omega.
    t = regauge(t, *cmp.gauge);
  }
  const auto D = T.dim();
  const auto d = t.dim();
  require(D % d == 0, ErrorCode::DimensionMismatch,
          "dim(T) = " + std::to_string(D) + " is not divisible by the irrep dimension " + std::to_string(d));
  const auto m = D / d;

  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) mats.push_back(kron(T[g], t[g].conjugate()));

  Matrix W(D, 0);
  std::vector<Matrix> copies;
  std::vector<Charge> charges;
  const double inv_order = 1.0 / static_cast<double>(G.order());
  for (std::size_t k = 0; k < G.order() && static_cast<Eigen::Index>(copies.size()) < m; ++k) {
    Matrix proj = Matrix::Zero(D * d, D * d);
    for (std::size_t g = 0; g < G.order(); ++g) proj += std::conj(G.character_index(k, g)) * mats[g];
    proj *= inv_order;
    proj = (proj + proj.adjoint()).eval() * 0.5;
    const Matrix range = projector_range(proj);
    for (Eigen::Index c = 0; c < range.cols() && static_cast<Eigen::Index>(copies.size()) < m; ++c) {
      Matrix x(D, d);
      for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = range(i * d + j, c);
      if (W.cols() > 0) x -= W * (W.adjoint() * x);
      const double scale = x.squaredNorm() / static_cast<double>(d);
      if (scale < 1e-8) continue;
      x /= std::sqrt(scale);
      Matrix grown(D, W.cols() + d);
      grown << W, x;
      W = std::move(grown);
      copies.push_back(std::move(x));
      charges.push_back(G.charge(k));
    }
  }
  require(static_cast<Eigen::Index>(copies.size()) == m, ErrorCode::InvariantViolation, "could not find all multiplicity copies");

  // Column (i, k) of t (x) t' ordering is column i of copy k.
  Matrix Wt(D, D);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < m; ++k) Wt.col(i * m + k) = copies[static_cast<std::size_t>(k)].col(i);

  auto linear = diagonal_rep(G, charges);
  ProjectiveDecomposition out{std::move(Wt), std::move(t), std::move(linear), std::move(charges)};
  double residual = unitarity_residual(out.W);
  for (std::size_t g = 0; g < G.order(); ++g)
    residual = std::max(residual, max_abs(T[g] - out.W * kron(out.irrep[g], out.linear[g]) * out.W.adjoint()));
  require(residual <= tol::reconstruction, ErrorCode::InvariantViolation,
          "decomposition reconstruction residual " + std::to_string(residual));
  return out;
}

/// u(g) = exp(i gauge(g)) chi_kappa(g) W v(g) W^dagger. `gauge` vanishes when u and v
/// share the same factor system; otherwise it absorbs the coboundary between them.
struct CharacterEquivalence {
  Matrix W;
  Charge kappa;
  GaugePhases gauge;
};

inline std::optional<CharacterEquivalence> equal_up_to_character(const UnitaryRep& u, const UnitaryRep& v) {
  if (!(u.group() == v.group()) || u.dim() != v.dim()) return std::nullopt;
  const auto& G = u.group();
  const auto cmp = cohomology_equivalent(factor_system(u), factor_system(v));
  if (!cmp.equivalent) return std::nullopt;
  const auto shifted = regauge(u, *cmp.gauge);
  const auto d = u.dim();
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) mats.push_back(kron(shifted[g], v[g].conjugate()));
  for (std::size_t k = 0; k < G.order(); ++k) {
    Matrix proj = Matrix::Zero(d * d, d * d);
    for (std::size_t g = 0; g < G.order(); ++g) proj += std::conj(G.character_index(k, g)) * mats[g];
    proj /= static_cast<double>(G.order());
    proj = (proj + proj.adjoint()).eval() * 0.5;
    const Matrix range = projector_range(proj);
    if (range.cols() == 0) continue;
    Matrix w(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) w(i, j) = range(i * d + j, 0) * std::sqrt(static_cast<double>(d));
    GaugePhases back{cmp.gauge->theta};
    for (auto& x : back.theta) x = detail::wrap_phase(-x);
    CharacterEquivalence out{w, G.charge(k), back};
    double residual = unitarity_residual(w);
    for (std::size_t g = 0; g < G.order(); ++g)
      residual = std::max(residual, max_abs(u[g] - std::polar(1.0, out.gauge.theta[g]) * G.character_index(k, g) * w * v[g] * w.adjoint()));
    if (residual > tol::reconstruction) return std::nullopt;
    return out;
  }
  return std::nullopt;
}

// Presets.

/// Z2 x Z2 acting as V(a,b) = Z^a X^b (Haldane class).
inline UnitaryRep pauli_z2z2() {
  FiniteAbelianGroup G({2, 2});
  Matrix Z(2, 2), X(2, 2);
  Z << 1, 0, 0, -1;
  X << 0, 1, 1, 0;
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < 4; ++g) {
    auto r = G.digits(g);
    Matrix m = Matrix::Identity(2, 2);
    if (r[0]) m = m * Z;
    if (r[1]) m = m * X;
    mats.push_back(m);
  }
  return {G, std::move(mats)};
}

/// Z_n x Z_n clock and shift matrices V(a,b) = Z^a X^b.
inline UnitaryRep clock_shift(int n) {
  FiniteAbelianGroup G({n, n});
  Matrix Z = Matrix::Zero(n, n), X = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Z(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    X((k + 1) % n, k) = 1.0;
  }
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < G.order(); ++g) {
    auto r = G.digits(g);
    Matrix m = Matrix::Identity(n, n);
    for (int i = 0; i < r[0]; ++i) m = m * Z;
    for (int i = 0; i < r[1]; ++i) m = m * X;
    mats.push_back(m);
  }
  return {G, std::move(mats)};
}

inline UnitaryRep heisenberg_z3z3() { return clock_shift(3); }

namespace detail {
inline std::vector<int> parse_int_list(const std::string& s, char sep) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(sep, pos);
    if (next == std::string::npos) next = s.size();
    const auto tok = s.substr(pos, next - pos);
    require(!tok.empty(), ErrorCode::ConfigError, "empty entry in '" + s + "'");
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "not an integer: '" + tok + "'");
    }
    pos = next + 1;
  }
  return out;
}
}  // namespace detail

/// Named representations: "pauli-z2z2", "heisenberg-z3z3", "char:<residues>" (one
/// character) and "diag:<residues>|<residues>|..." (direct sum of characters). The last
/// two need the group from context. "a*b" is the tensor product of presets a and b.
inline UnitaryRep rep_from_preset(const std::string& name, const std::optional<FiniteAbelianGroup>& group = std::nullopt) {
  if (const auto star = name.find('*'); star != std::string::npos) {
    auto left = rep_from_preset(name.substr(0, star), group);
    return tensor_rep(left, rep_from_preset(name.substr(star + 1), left.group()));
  }
  auto check_group = [&](const UnitaryRep& r) {
    if (group) require(*group == r.group(), ErrorCode::GroupMismatch, "preset '" + name + "' acts on " + r.group().to_string());
    return r;
  };
  if (name == "pauli-z2z2") return check_group(pauli_z2z2());
  if (name == "heisenberg-z3z3") return check_group(heisenberg_z3z3());
  auto charge_of = [&](const std::string& body) {
    require(group.has_value(), ErrorCode::ConfigError, "preset '" + name + "' needs a group");
    Charge k{detail::parse_int_list(body, ',')};
    try {
      group->check(k.dual_residues);
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, e.what());
    }
    return k;
  };
  if (name.rfind("char:", 0) == 0) return character_rep(*group, charge_of(name.substr(5)));
  if (name.rfind("diag:", 0) == 0) {
    std::vector<Charge> charges;
    std::string body = name.substr(5);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto next = body.find('|', pos);
      if (next == std::string::npos) next = body.size();
      charges.push_back(charge_of(body.substr(pos, next - pos)));
      pos = next + 1;
    }
    return diagonal_rep(*group, charges);
  }
  fail(ErrorCode::ConfigError, "unknown representation preset '" + name + "'");
}

}  // namespace sptent
