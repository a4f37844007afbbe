#pragma once

// Branch-by-branch simulation of two LOCC protocols on a bipartite system R | Rbar whose
// representations T_R and T_Rbar have conjugate factor systems:
//  - measuring the joint charge with local measurements plus a catalyst pair;
//  - distilling a maximally entangled d-pair from a state of definite joint charge.
//
// Joint vectors are ordered R (x) Rbar.

#include <optional>
#include <vector>

#include "sptent/chain.hpp"
#include "sptent/rep_theory.hpp"

namespace sptent {

inline constexpr double kBranchDrop = 1e-12;

namespace detail {

inline Matrix charge_projector_of(const UnitaryRep& rep, std::size_t k) {
  const auto& G = rep.group();
  Matrix p = Matrix::Zero(rep.dim(), rep.dim());
  for (std::size_t g = 0; g < G.order(); ++g) p += std::conj(G.character_index(k, g)) * rep[g];
  p /= static_cast<double>(G.order());
  return (p + p.adjoint()) * 0.5;
}

inline bool exactly_linear(const UnitaryRep& rep, double tolerance = tol::exact) {
  const auto w = factor_system(rep);
  return max_abs(w.omega - Matrix::Ones(w.omega.rows(), w.omega.cols())) <= tolerance;
}

/// Permutes the tensor factors of a vector: `dims` lists the current factor dimensions,
/// `order[k]` names the current factor placed at position k.
inline Vector permute_factors(const Vector& v, const std::vector<Eigen::Index>& dims, const std::vector<std::size_t>& order) {
  const auto st = strides(dims);
  std::vector<Eigen::Index> nd;
  for (auto o : order) nd.push_back(dims[o]);
  const auto nst = strides(nd);
  Vector out(v.size());
  std::vector<std::size_t> digit(dims.size());
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    auto x = static_cast<std::size_t>(idx);
    for (std::size_t k = 0; k < dims.size(); ++k) {
      digit[k] = x / st[k];
      x %= st[k];
    }
    std::size_t target = 0;
    for (std::size_t k = 0; k < order.size(); ++k) target += digit[order[k]] * nst[k];
    out(static_cast<Eigen::Index>(target)) = v(idx);
  }
  return out;
}

}  // namespace detail

/// The unique (up to phase) vector with [t*(g) (x) t(g)]|Theta> = e^{i eta(g)} |Theta>;
/// phase fixed so the first nonzero amplitude is real positive.
inline Vector trivial_charge_state(const UnitaryRep& t, const Charge& eta) {
  const auto joint = tensor_rep(conjugate_rep(t), t);
  const auto k = t.group().index(eta);
  const Matrix range = projector_range(detail::charge_projector_of(joint, k));
  require(range.cols() > 0, ErrorCode::NoSuchCharge, "charge " + to_string(eta.dual_residues) + " does not occur in t* (x) t");
  require(range.cols() == 1, ErrorCode::InvariantViolation, "charge sector of t* (x) t is degenerate; t is not irreducible");
  Vector v = range.col(0);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-8) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  return v;
}

inline Vector trivial_charge_state(const UnitaryRep& t) { return trivial_charge_state(t, t.group().trivial_charge()); }

/// kappa if [T_R(g) (x) T_Rbar(g)] psi = e^{i kappa(g)} psi for all g (within 1e-9).
inline std::optional<Charge> charge_eigenstate_check(const Vector& psi, const UnitaryRep& TR, const UnitaryRep& TRbar) {
  const auto joint = tensor_rep(TR, TRbar);
  require(psi.size() == joint.dim(), ErrorCode::DimensionMismatch, "state does not match the joint representation");
  const auto& G = joint.group();
  std::size_t best = 0;
  double best_w = -1.0;
  for (std::size_t k = 0; k < G.order(); ++k) {
    const double w = (detail::charge_projector_of(joint, k) * psi).squaredNorm();
    if (w > best_w) {
      best_w = w;
      best = k;
    }
  }
  for (std::size_t g = 0; g < G.order(); ++g)
    if ((joint[g] * psi - G.character_index(best, g) * psi).cwiseAbs().maxCoeff() > tol::validation) return std::nullopt;
  return G.charge(best);
}

struct BipartiteRepState {
  UnitaryRep TR;
  UnitaryRep TRbar;
  Vector psi;
};

struct ProtocolBranch {
  std::vector<Charge> labels;  // (kappa_A, kappa_B) or (lambda_a, lambda_b)
  Charge outcome;              // kappa_A + kappa_B, or eta = kappa - lambda_a - lambda_b
  double probability = 0.0;
  double fidelity = 1.0;
  Vector post_state;
};

struct ProtocolTranscript {
  std::string protocol;
  std::vector<ProtocolBranch> branches;
  /// Outcome distribution over the group's charges (flat charge index).
  std::vector<double> outcome_distribution;
  /// Branch drawn for demonstration output.
  std::size_t sampled_branch = 0;
  double min_fidelity = 1.0;
};

namespace detail {

inline void require_conjugate_classes(const UnitaryRep& TR, const UnitaryRep& TRbar) {
  require(TR.group() == TRbar.group(), ErrorCode::GroupMismatch, "R and Rbar carry different groups");
  const auto bR = commutator_bicharacter(factor_system(TR));
  const auto bRb = commutator_bicharacter(factor_system(TRbar));
  require(max_abs(bR.beta - bRb.beta.conjugate()) <= tol::validation, ErrorCode::ClassMismatch, "R and Rbar do not carry conjugate classes");
  require(exactly_linear(tensor_rep(TR, TRbar)), ErrorCode::ClassMismatch,
          "T_R (x) T_Rbar is not linear; fix the gauge so the factor systems are exact conjugates");
}

inline std::size_t sample_branch(const std::vector<ProtocolBranch>& branches, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng), acc = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    acc += branches[i].probability;
    if (x < acc) return i;
  }
  return branches.empty() ? 0 : branches.size() - 1;
}

}  // namespace detail

/// Direct nonlocal measurement: p(kappa) = <psi| Pi_kappa^{R Rbar} |psi>.
inline std::vector<double> direct_charge_distribution(const BipartiteRepState& s) {
  const auto joint = tensor_rep(s.TR, s.TRbar);
  std::vector<double> out;
  for (std::size_t k = 0; k < joint.group().order(); ++k) out.push_back((detail::charge_projector_of(joint, k) * s.psi).squaredNorm());
  return out;
}

/// Catalyst |Theta(0)> on (rbar, r) with representations t*, t where t is the canonical
/// irrep of R's class. Alice holds (R, rbar), Bob holds (Rbar, r); both composite
/// representations are linear, so each party measures its own charge.
inline ProtocolTranscript measure_total_charge_locc(const BipartiteRepState& s, std::uint64_t seed) {
  detail::require_conjugate_classes(s.TR, s.TRbar);
  const auto& G = s.TR.group();
  require(s.psi.size() == s.TR.dim() * s.TRbar.dim(), ErrorCode::DimensionMismatch, "state does not match R (x) Rbar");
  require(std::abs(s.psi.norm() - 1.0) <= 1e-12, ErrorCode::InvariantViolation, "input state is not normalized");
  const auto t = canonical_irrep(factor_system(s.TR));
  const Vector theta = trivial_charge_state(t);

  const auto alice = tensor_rep(s.TR, conjugate_rep(t));
  const auto bob = tensor_rep(s.TRbar, t);
  require(detail::exactly_linear(alice) && detail::exactly_linear(bob), ErrorCode::ClassMismatch,
          "catalyst does not make the local representations linear");

  // (R, Rbar, rbar, r) -> (R, rbar, Rbar, r)
  const std::vector<Eigen::Index> dims{s.TR.dim(), s.TRbar.dim(), t.dim(), t.dim()};
  const Vector full = detail::permute_factors(kron(s.psi, theta), dims, {0, 2, 1, 3});

  ProtocolTranscript out;
  out.protocol = "charge-measurement";
  out.outcome_distribution.assign(G.order(), 0.0);
  std::vector<Matrix> pa, pb;
  for (std::size_t k = 0; k < G.order(); ++k) {
    pa.push_back(detail::charge_projector_of(alice, k));
    pb.push_back(detail::charge_projector_of(bob, k));
  }
  const auto da = alice.dim(), db = bob.dim();
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(full.data(), da, db);
  for (std::size_t ka = 0; ka < G.order(); ++ka) {
    const Matrix left = pa[ka] * m;
    if (left.squaredNorm() < kBranchDrop) continue;
    for (std::size_t kb = 0; kb < G.order(); ++kb) {
      const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> branch = left * pb[kb].transpose();
      const double p = branch.squaredNorm();
      if (p < kBranchDrop) continue;
      const auto k = G.compose_index(ka, kb);
      out.outcome_distribution[k] += p;
      Vector post = Eigen::Map<const Vector>(branch.data(), branch.size()) / std::sqrt(p);
      out.branches.push_back({{G.charge(ka), G.charge(kb)}, G.charge(k), p, 1.0, std::move(post)});
    }
  }
  out.sampled_branch = detail::sample_branch(out.branches, seed);
  return out;
}

struct DistillationResult {
  /// Maximally entangled pair on (t, t*) factors after correction.
  Vector output;
  double fidelity = 0.0;
  ProtocolTranscript transcript;
};

/// From a state of definite joint charge kappa: decompose T_R = W_R (t (x) t'_R) W_R^dagger
/// and T_Rbar = W_Rbar (t* (x) t'_Rbar) W_Rbar^dagger, measure the characters lambda_a and
/// lambda_b of the multiplicity factors, and rotate the irrep factors from
/// |Theta'(kappa - lambda_a - lambda_b)> to the standard pair sum_i |ii>/sqrt(d).
inline DistillationResult distill_max_entangled(const BipartiteRepState& s, std::uint64_t seed) {
  detail::require_conjugate_classes(s.TR, s.TRbar);
  const auto& G = s.TR.group();
  const auto kappa = charge_eigenstate_check(s.psi, s.TR, s.TRbar);
  require(kappa.has_value(), ErrorCode::NotChargeEigenstate, "input is not an eigenstate of the joint charge");
  const auto decR = decompose_projective_rep(s.TR);
  const auto& t = decR.irrep;
  const auto decRb = decompose_projective_rep(s.TRbar, conjugate_rep(t));
  require(max_rep_distance(decRb.irrep, conjugate_rep(t)) <= tol::validation, ErrorCode::InvariantViolation,
          "Rbar irrep factor is not the conjugate of R's");
  const auto d = t.dim();
  const auto mR = decR.linear.dim(), mRb = decRb.linear.dim();

  // Coordinates (i, k | j, m): i, j irrep indices, k, m multiplicity indices.
  const Vector local = kron(Matrix(decR.W.adjoint()), Matrix(decRb.W.adjoint())) * s.psi;
  const std::vector<Eigen::Index> dims{d, mR, d, mRb};
  const Vector split = detail::permute_factors(local, dims, {0, 2, 1, 3});  // (i, j, k, m)
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(split.data(), d * d, mR * mRb);

  Vector phi_plus = Vector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) phi_plus(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));

  DistillationResult res;
  res.transcript.protocol = "distillation";
  res.transcript.outcome_distribution.assign(G.order(), 0.0);
  res.fidelity = 1.0;
  for (std::size_t la = 0; la < G.order(); ++la)
    for (std::size_t lb = 0; lb < G.order(); ++lb) {
      // Columns (k, m) whose multiplicity charges are (la, lb).
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> branch = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(d * d, mR * mRb);
      bool any = false;
      for (Eigen::Index k = 0; k < mR; ++k)
        for (Eigen::Index mm = 0; mm < mRb; ++mm)
          if (G.index(decR.linear_charges[static_cast<std::size_t>(k)]) == la && G.index(decRb.linear_charges[static_cast<std::size_t>(mm)]) == lb) {
            branch.col(k * mRb + mm) = m.col(k * mRb + mm);
            any = true;
          }
      if (!any) continue;
      const double p = branch.squaredNorm();
      if (p < kBranchDrop) continue;
      const auto eta_idx = G.compose_index(G.index(*kappa), G.inverse_index(G.compose_index(la, lb)));
      const Charge eta = G.charge(eta_idx);
      // Expected irrep-factor state in (t, t*) order and its correction X_eta^dagger on Alice.
      const Vector theta = swap_factors(trivial_charge_state(t, eta), d, d);
      Matrix x(d, d);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = theta(i * d + j) * std::sqrt(static_cast<double>(d));
      const Matrix correction = kron(Matrix(x.adjoint()), Matrix(Matrix::Identity(d, d)));
      const Matrix corrected = correction * Matrix(branch) / std::sqrt(p);
      // Reduced state of the irrep factors after discarding the multiplicity registers.
      const Matrix rho = corrected * corrected.adjoint();
      const double f = phi_plus.dot(rho * phi_plus).real();
      res.transcript.outcome_distribution[eta_idx] += p;
      res.transcript.branches.push_back({{G.charge(la), G.charge(lb)}, eta, p, f, Eigen::Map<const Vector>(corrected.data(), corrected.size())});
      res.fidelity = std::min(res.fidelity, f);
    }
  res.transcript.min_fidelity = res.fidelity;
  res.transcript.sampled_branch = detail::sample_branch(res.transcript.branches, seed);
  res.output = phi_plus;
  return res;
}

}  // namespace sptent
