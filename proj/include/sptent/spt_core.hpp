#pragma once

// Charge projectors, the block ensemble Omega^(AB|C), and the entanglement measures
// evaluated on it.
//
// Omega^(AB|C) = sum_kappa p_kappa |kappa><kappa| (x) rho_kappa with
//   rho_kappa = tr_{C u D}(Pi_kappa |psi><psi| Pi_kappa) / p_kappa,
// where Pi_kappa is the charge-kappa projector of region C. rho_kappa lives on
// (A sites ascending) (x) (B sites ascending).

#include <algorithm>
#include <vector>

#include "sptent/chain.hpp"

namespace sptent {

inline constexpr double kDropProbability = 1e-12;

namespace detail {

inline void require_linear_region(const Chain& chain, const std::vector<std::size_t>& sites) {
  for (auto s : sites) {
    require(s < chain.size(), ErrorCode::RegionInvalid, "site " + std::to_string(s) + " outside the chain");
    require(chain.linear(s), ErrorCode::ClassMismatch,
            "site " + std::to_string(s) + " carries a projective representation; its charge is not defined");
  }
}

}  // namespace detail

/// Pi_kappa = (1/|H|) sum_h conj(chi_kappa(h)) (x)_{l in C} u_l(image(h)) as a dense
/// matrix over the region (sites ascending). `kappa` labels a character of the subgroup.
inline Matrix charge_projector(const Chain& chain, std::vector<std::size_t> C, const SubgroupEmbedding& emb, const Charge& kappa) {
  std::sort(C.begin(), C.end());
  detail::require_linear_region(chain, C);
  require(emb.parent == chain.group(), ErrorCode::GroupMismatch, "subgroup embedding belongs to a different group");
  const auto& H = emb.subgroup;
  const auto k = H.index(kappa);
  Eigen::Index dim = 1;
  for (auto s : C) dim *= chain.dim(s);
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t h = 0; h < H.order(); ++h) {
    Matrix u = Matrix::Ones(1, 1);
    for (auto s : C) u = kron(u, chain.rep(s)[emb.image[h]]);
    out += std::conj(H.character_index(k, h)) * u;
  }
  return out / static_cast<double>(H.order());
}

inline Matrix charge_projector(const Chain& chain, const std::vector<std::size_t>& C, const Charge& kappa) {
  return charge_projector(chain, C, identity_embedding(chain.group()), kappa);
}

/// Pi_kappa |psi> for every subgroup charge kappa (indexed by flat charge index).
/// Projected vectors are produced one at a time through `sink(k, vec)`.
template <class Sink>
void for_each_charge_sector(const PureState& state, const std::vector<std::size_t>& C, const SubgroupEmbedding& emb, Sink&& sink) {
  const auto& chain = *state.chain;
  detail::require_linear_region(chain, C);
  require(emb.parent == chain.group(), ErrorCode::GroupMismatch, "subgroup embedding belongs to a different group");
  const auto& H = emb.subgroup;
  const double inv = 1.0 / static_cast<double>(H.order());
  const auto n = state.amplitudes.size();
  auto rotated = [&](std::size_t h) {
    Vector v = state.amplitudes;
    apply_symmetry(v, chain, C, emb.image[h]);
    return v;
  };
  if (static_cast<std::size_t>(n) * H.order() <= (std::size_t{1} << 24)) {
    std::vector<Vector> images;
    images.reserve(H.order());
    for (std::size_t h = 0; h < H.order(); ++h) images.push_back(h == 0 ? state.amplitudes : rotated(h));
    for (std::size_t k = 0; k < H.order(); ++k) {
      Vector acc = Vector::Zero(n);
      for (std::size_t h = 0; h < H.order(); ++h) acc += std::conj(H.character_index(k, h)) * images[h];
      sink(k, Vector(acc * inv));
    }
  } else {
    // Large states: recompute the images per sector to keep memory at a few vectors.
    for (std::size_t k = 0; k < H.order(); ++k) {
      Vector acc = state.amplitudes;
      for (std::size_t h = 1; h < H.order(); ++h) acc += std::conj(H.character_index(k, h)) * rotated(h);
      sink(k, Vector(acc * inv));
    }
  }
}

struct ChargeProbability {
  Charge kappa;
  double p;
};

inline std::vector<ChargeProbability> charge_distribution(const PureState& state, const std::vector<std::size_t>& C, const SubgroupEmbedding& emb) {
  std::vector<ChargeProbability> out;
  for_each_charge_sector(state, C, emb, [&](std::size_t k, const Vector& v) { out.push_back({emb.subgroup.charge(k), v.squaredNorm()}); });
  return out;
}

inline std::vector<ChargeProbability> charge_distribution(const PureState& state, const std::vector<std::size_t>& C) {
  return charge_distribution(state, C, identity_embedding(state.chain->group()));
}

/// Reduced density matrix of an (unnormalized) vector on the listed sites, in listed order.
inline Matrix reduced_density(const Vector& psi, const std::vector<Eigen::Index>& dims, const std::vector<std::size_t>& keep) {
  const auto off = detail::split_offsets(dims, keep);
  const auto a = static_cast<Eigen::Index>(off.inner.size());
  const auto r = static_cast<Eigen::Index>(off.outer.size());
  Matrix m(a, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < a; ++i) m(i, j) = psi(static_cast<Eigen::Index>(off.outer[static_cast<std::size_t>(j)] + off.inner[static_cast<std::size_t>(i)]));
  return m * m.adjoint();
}

struct EnsembleBlock {
  Charge kappa;
  double p = 0.0;
  Matrix rho;
};

struct BlockEnsemble {
  FiniteAbelianGroup group;
  Regions regions;
  Eigen::Index dim_a = 1;
  Eigen::Index dim_b = 1;
  std::vector<EnsembleBlock> blocks;
};

/// Checks the ensemble invariants; returns the worst residual found and throws
/// InvariantViolation past tolerance.
inline double validate_ensemble(const BlockEnsemble& omega) {
  double total = 0.0, worst = 0.0;
  for (const auto& b : omega.blocks) {
    require(b.p >= -1e-12, ErrorCode::InvariantViolation, "negative block probability");
    require(b.rho.rows() == omega.dim_a * omega.dim_b && b.rho.cols() == b.rho.rows(), ErrorCode::InvariantViolation, "block has the wrong shape");
    total += b.p;
    const double herm = hermiticity_residual(b.rho);
    const double tr = std::abs(b.rho.trace() - 1.0);
    const double mine = min_eigenvalue_hermitian((b.rho + b.rho.adjoint()) * 0.5);
    require(herm <= 1e-10, ErrorCode::InvariantViolation, "block density matrix is not Hermitian");
    require(tr <= 1e-10, ErrorCode::InvariantViolation, "block density matrix does not have unit trace");
    require(mine >= -1e-10, ErrorCode::InvariantViolation, "block density matrix is not positive semidefinite");
    worst = std::max({worst, herm, tr, std::max(0.0, -mine)});
  }
  require(std::abs(total - 1.0) <= 1e-10, ErrorCode::InvariantViolation, "block probabilities do not sum to 1");
  return std::max(worst, std::abs(total - 1.0));
}

/// Omega^(AB|C) with charges of the subgroup described by `emb`.
inline BlockEnsemble generalized_omega(const PureState& state, const Regions& regions, const SubgroupEmbedding& emb) {
  const auto& chain = *state.chain;
  std::vector<std::size_t> ab = regions.A;
  ab.insert(ab.end(), regions.B.begin(), regions.B.end());
  BlockEnsemble out{emb.subgroup, regions, 1, 1, {}};
  for (auto s : regions.A) out.dim_a *= chain.dim(s);
  for (auto s : regions.B) out.dim_b *= chain.dim(s);
  require(out.dim_a * out.dim_b <= 4096, ErrorCode::CapExceeded, "A u B too large for a dense block density matrix");
  for_each_charge_sector(state, regions.C, emb, [&](std::size_t k, const Vector& v) {
    const double p = v.squaredNorm();
    if (p < kDropProbability) return;
    Matrix rho = reduced_density(v, chain.dims(), ab) / p;
    rho = (rho + rho.adjoint()).eval() * 0.5;
    out.blocks.push_back({emb.subgroup.charge(k), p, std::move(rho)});
  });
  // Renormalize away the dropped mass so the probabilities sum to one exactly.
  double total = 0.0;
  for (const auto& b : out.blocks) total += b.p;
  for (auto& b : out.blocks) b.p /= total;
  validate_ensemble(out);
  return out;
}

inline BlockEnsemble omega_state(const PureState& state, const Regions& regions) {
  return generalized_omega(state, regions, identity_embedding(state.chain->group()));
}

/// (sum_kappa p_kappa ||rho_kappa^{T_A}||_1 - 1) / 2.
inline double negativity(const BlockEnsemble& omega) {
  double s = 0.0;
  for (const auto& b : omega.blocks) s += b.p * trace_norm_hermitian(partial_transpose_first(b.rho, omega.dim_a, omega.dim_b));
  return (s - 1.0) / 2.0;
}

/// sum_kappa ||(p_kappa rho_kappa)^{T_A}||_1 - 1 = 2 N(Omega).
inline double order_parameter(const BlockEnsemble& omega) { return 2.0 * negativity(omega); }

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

/// sum_kappa p_kappa S(tr_B rho_kappa) in bits; every block must be pure.
inline double block_entropy(const BlockEnsemble& omega) {
  double s = 0.0;
  for (const auto& b : omega.blocks) {
    const double pur = purity(b.rho);
    require(pur >= 1.0 - 1e-8, ErrorCode::MixedBlocks,
            "block " + to_string(b.kappa.dual_residues) + " is mixed (purity " + std::to_string(pur) + "); block entropy needs pure blocks");
    s += b.p * entropy_bits(trace_out_second(b.rho, omega.dim_a, omega.dim_b));
  }
  return s;
}

/// Largest entrywise difference between p_kappa rho_kappa of two ensembles over the union
/// of their charge labels.
inline double ensemble_distance(const BlockEnsemble& x, const BlockEnsemble& y) {
  require(x.dim_a == y.dim_a && x.dim_b == y.dim_b, ErrorCode::DimensionMismatch, "ensembles live on different spaces");
  double worst = 0.0;
  auto find = [](const BlockEnsemble& e, const Charge& k) -> const EnsembleBlock* {
    for (const auto& b : e.blocks)
      if (b.kappa == k) return &b;
    return nullptr;
  };
  for (const auto* e : {&x, &y})
    for (const auto& b : e->blocks) {
      const auto* bx = find(x, b.kappa);
      const auto* by = find(y, b.kappa);
      const Matrix zero = Matrix::Zero(b.rho.rows(), b.rho.cols());
      const Matrix sx = bx ? Matrix(bx->p * bx->rho) : zero;
      const Matrix sy = by ? Matrix(by->p * by->rho) : zero;
      worst = std::max(worst, max_abs(sx - sy));
    }
  return worst;
}

/// Negativity of a pure state across the bipartition (sites) | (rest), from its Schmidt
/// coefficients: ((sum_i s_i)^2 - 1) / 2.
inline double pure_bipartite_negativity(const PureState& state, const std::vector<std::size_t>& sites) {
  const auto& dims = state.chain->dims();
  const auto off = detail::split_offsets(dims, sites);
  const auto a = static_cast<Eigen::Index>(off.inner.size());
  const auto r = static_cast<Eigen::Index>(off.outer.size());
  Matrix m(a, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < a; ++i)
      m(i, j) = state.amplitudes(static_cast<Eigen::Index>(off.outer[static_cast<std::size_t>(j)] + off.inner[static_cast<std::size_t>(i)]));
  const Matrix gram = a <= r ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return (s * s - 1.0) / 2.0;
}

/// Negativity of Omega^(AB|C); when C and D are both empty the ensemble is the pure state
/// itself and the Schmidt route avoids forming rho_AB.
inline double omega_negativity(const PureState& state, const Regions& regions) {
  if (regions.C.empty() && regions.D.empty()) return pure_bipartite_negativity(state, regions.A);
  return negativity(omega_state(state, regions));
}

}  // namespace sptent
