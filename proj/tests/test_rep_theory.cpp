#include <gtest/gtest.h>

#include "sptent/rep_theory.hpp"

using namespace sptent;

namespace {

std::size_t idx(const FiniteAbelianGroup& G, std::vector<int> r) { return G.flat(r); }

FactorSystem random_coboundary_shift(const FactorSystem& w, Rng& rng) {
  GaugePhases th{std::vector<double>(w.group.order(), 0.0)};
  std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi);
  for (std::size_t g = 1; g < w.group.order(); ++g) th.theta[g] = a(rng);
  return pointwise_product(w, coboundary(w.group, th));
}

const std::vector<std::vector<int>> kGroups = {{2, 2}, {2, 2, 2}, {3, 3}, {4, 2}};

}  // namespace

TEST(RepTheory, PauliFactorSystem) {
  auto V = pauli_z2z2();
  auto w = factor_system(V);
  const auto& G = V.group();
  EXPECT_NEAR(std::abs(w(idx(G, {0, 1}), idx(G, {1, 0})) - Complex(-1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w(idx(G, {1, 0}), idx(G, {0, 1})) - Complex(1.0)), 0.0, 1e-12);
  auto b = commutator_bicharacter(w);
  EXPECT_NEAR(std::abs(b(idx(G, {0, 1}), idx(G, {1, 0})) - Complex(-1.0)), 0.0, 1e-12);
  for (std::size_t g = 0; g < 4; ++g) EXPECT_NEAR(std::abs(b(g, g) - 1.0), 0.0, 1e-12);
  EXPECT_LT(w.cocycle_residual(), 1e-10);
  EXPECT_LT(w.normalization_residual(), 1e-12);
}

TEST(RepTheory, LinearRepHasTrivialFactorSystem) {
  FiniteAbelianGroup G({4, 2});
  auto r = diagonal_rep(G, {Charge({1, 0}), Charge({3, 1}), Charge({0, 0})});
  EXPECT_LT(max_abs(factor_system(r).omega - trivial_factor_system(G).omega), 1e-12);
  EXPECT_TRUE(commutator_bicharacter(factor_system(r)).trivial());
}

TEST(RepTheory, ClosureViolation) {
  FiniteAbelianGroup G({2});
  Matrix a = Matrix::Identity(2, 2), b(2, 2);
  b << 0, 1, 1, 0;
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  // {I, H}: H*H = I, fine. {I, X}, then replace by an element that does not close.
  UnitaryRep ok(G, {a, b});
  EXPECT_NO_THROW(factor_system(ok));
  FiniteAbelianGroup z3({3});
  UnitaryRep bad(z3, {a, b, h});
  try {
    factor_system(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClosureViolation);
  }
}

TEST(RepTheory, GaugeNormalization) {
  auto V = pauli_z2z2();
  std::vector<Matrix> mats;
  for (const auto& m : V.matrices()) mats.push_back(std::polar(1.0, 0.7) * m);
  UnitaryRep shifted(V.group(), mats);
  EXPECT_LT(max_abs(shifted[0] - Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_abs(factor_system(shifted).omega - factor_system(V).omega), 1e-12);
}

TEST(RepTheory, CohomologyEquivalenceWitness) {
  Rng rng(11);
  auto w = factor_system(pauli_z2z2());
  for (int rep = 0; rep < 10; ++rep) {
    auto shifted = random_coboundary_shift(w, rng);
    auto cmp = cohomology_equivalent(shifted, w);
    ASSERT_TRUE(cmp.equivalent);
    EXPECT_LT(max_abs(coboundary(w.group, *cmp.gauge).omega - shifted.omega.cwiseQuotient(w.omega)), 1e-9);
  }
  auto trivial = trivial_factor_system(w.group);
  EXPECT_FALSE(cohomology_equivalent(w, trivial).equivalent);
  auto self = cohomology_equivalent(w, w);
  ASSERT_TRUE(self.equivalent);
  for (double t : self.gauge->theta) EXPECT_LT(std::min(t, 2.0 * std::numbers::pi - t), 1e-12);
  EXPECT_THROW(cohomology_equivalent(w, trivial_factor_system(FiniteAbelianGroup({4}))), Error);
}

TEST(RepTheory, BicharacterIsCoboundaryInvariant) {
  Rng rng(5);
  for (const auto& orders : kGroups) {
    FiniteAbelianGroup G(orders);
    auto w = random_cocycle(G, rng);
    auto b = commutator_bicharacter(w);
    for (int k = 0; k < 50; ++k) {
      auto b2 = commutator_bicharacter(random_coboundary_shift(w, rng));
      EXPECT_LT(max_abs(b.beta - b2.beta), 1e-12);
    }
    // Bimultiplicative and antisymmetric.
    double worst = 0.0;
    for (std::size_t g1 = 0; g1 < G.order(); ++g1)
      for (std::size_t g2 = 0; g2 < G.order(); ++g2)
        for (std::size_t h = 0; h < G.order(); ++h) worst = std::max(worst, std::abs(b(G.compose_index(g1, g2), h) - b(g1, h) * b(g2, h)));
    EXPECT_LT(worst, 1e-10);
    EXPECT_LT(max_abs(b.beta - b.beta.transpose().conjugate()), 1e-12);
  }
}

TEST(RepTheory, IrrepDimension) {
  EXPECT_EQ(irrep_dimension(factor_system(pauli_z2z2())), 2);
  EXPECT_EQ(irrep_dimension(factor_system(heisenberg_z3z3())), 3);
  for (const auto& orders : kGroups) EXPECT_EQ(irrep_dimension(trivial_factor_system(FiniteAbelianGroup(orders))), 1);
}

TEST(RepTheory, HeisenbergDimensionFromRegularRep) {
  // Oracle: block sizes of the twisted regular representation.
  auto w = factor_system(heisenberg_z3z3());
  auto blocks = irreducible_blocks(twisted_regular_rep(w));
  ASSERT_EQ(blocks.size(), 3u);
  for (const auto& b : blocks) EXPECT_EQ(b.cols(), 3);
}

TEST(RepTheory, RadicalFormulaMatchesRegularRepBlocks) {
  Rng rng(2024);
  for (const auto& orders : kGroups) {
    FiniteAbelianGroup G(orders);
    for (int trial = 0; trial < 20; ++trial) {
      auto w = random_cocycle(G, rng);
      EXPECT_LT(w.cocycle_residual(), 1e-10);
      const int d = irrep_dimension(w);
      auto blocks = irreducible_blocks(twisted_regular_rep(w), 100 + static_cast<std::uint64_t>(trial));
      for (const auto& b : blocks) EXPECT_EQ(b.cols(), d) << G.to_string();
      EXPECT_EQ(static_cast<int>(blocks.size()) * d, static_cast<int>(G.order()));
      EXPECT_EQ(irrep_dimension(conjugate(w)), d);
    }
  }
}

TEST(RepTheory, CanonicalIrrep) {
  FiniteAbelianGroup z22({2, 2});
  auto t0 = canonical_irrep(trivial_factor_system(z22));
  EXPECT_EQ(t0.dim(), 1);
  for (std::size_t g = 0; g < 4; ++g) EXPECT_NEAR(std::abs(t0[g](0, 0) - 1.0), 0.0, 1e-10);

  for (const auto& V : {pauli_z2z2(), heisenberg_z3z3()}) {
    auto w = factor_system(V);
    auto t = canonical_irrep(w);
    EXPECT_EQ(t.dim(), V.dim());
    EXPECT_LT(max_abs(factor_system(t).omega - w.omega), 1e-9);
    EXPECT_EQ(commutant_dimension(t), 1);
  }
  Rng rng(3);
  for (const auto& orders : kGroups) {
    auto w = random_cocycle(FiniteAbelianGroup(orders), rng);
    auto t = canonical_irrep(w);
    EXPECT_EQ(t.dim(), irrep_dimension(w));
    EXPECT_LT(max_abs(factor_system(t).omega - w.omega), 1e-9);
    EXPECT_EQ(commutant_dimension(t), 1);
  }
}

TEST(RepTheory, ConjugateAndTensor) {
  auto V = pauli_z2z2();
  auto w = factor_system(V);
  auto wc = factor_system(conjugate_rep(V));
  EXPECT_LT(max_abs(wc.omega - w.omega.conjugate()), 1e-12);
  EXPECT_LT(max_abs(commutator_bicharacter(wc).beta - commutator_bicharacter(w).beta.conjugate()), 1e-12);
  auto H = heisenberg_z3z3();
  EXPECT_TRUE(commutator_bicharacter(factor_system(tensor_rep(H, conjugate_rep(H)))).trivial());
  EXPECT_LT(max_abs(factor_system(tensor_rep(H, conjugate_rep(H))).omega - Matrix::Ones(9, 9)), 1e-10);
  FiniteAbelianGroup G({3, 3});
  auto prod = tensor_rep(character_rep(G, Charge({1, 2})), character_rep(G, Charge({2, 2})));
  EXPECT_LT(max_rep_distance(prod, character_rep(G, Charge({0, 1}))), 1e-12);
  EXPECT_THROW(tensor_rep(V, H), Error);
}

TEST(RepTheory, DecomposeScrambledInput) {
  Rng rng(17);
  auto V = pauli_z2z2();
  const auto& G = V.group();
  auto tp = diagonal_rep(G, {Charge({1, 0}), Charge({0, 1}), Charge({1, 0})});
  auto built = tensor_rep(V, tp);
  Matrix W0 = random_unitary(built.dim(), rng);
  auto T = conjugate_by(built, W0);
  auto dec = decompose_projective_rep(T);
  EXPECT_EQ(dec.irrep.dim(), 2);
  EXPECT_EQ(dec.linear.dim(), 3);
  EXPECT_TRUE(commutator_bicharacter(factor_system(dec.linear)).trivial());
  double res = 0.0;
  for (std::size_t g = 0; g < G.order(); ++g) res = std::max(res, max_abs(T[g] - dec.W * kron(dec.irrep[g], dec.linear[g]) * dec.W.adjoint()));
  EXPECT_LT(res, 1e-8);
}

TEST(RepTheory, DecomposeRandomizedInputs) {
  Rng rng(99);
  for (const auto& orders : kGroups) {
    FiniteAbelianGroup G(orders);
    for (int trial = 0; trial < 5; ++trial) {
      auto w = random_cocycle(G, rng);
      auto t = canonical_irrep(w, 1000 + static_cast<std::uint64_t>(trial));
      std::uniform_int_distribution<std::size_t> pick(0, G.order() - 1);
      std::vector<Charge> ch;
      for (int k = 0; k < 3; ++k) ch.push_back(G.charge(pick(rng)));
      auto T = conjugate_by(tensor_rep(t, diagonal_rep(G, ch)), random_unitary(t.dim() * 3, rng));
      auto dec = decompose_projective_rep(T);
      double res = 0.0;
      for (std::size_t g = 0; g < G.order(); ++g)
        res = std::max(res, max_abs(T[g] - dec.W * kron(dec.irrep[g], dec.linear[g]) * dec.W.adjoint()));
      EXPECT_LT(res, 1e-8);
    }
  }
}

TEST(RepTheory, DecomposeEdgeCases) {
  auto V = pauli_z2z2();
  auto dec = decompose_projective_rep(V);
  EXPECT_EQ(dec.linear.dim(), 1);
  FiniteAbelianGroup G({4});
  auto lin = diagonal_rep(G, {Charge({1}), Charge({3})});
  auto d2 = decompose_projective_rep(lin);
  EXPECT_EQ(d2.irrep.dim(), 1);
  EXPECT_EQ(d2.linear.dim(), 2);
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < 4; ++g) {
    Matrix m = Matrix::Zero(3, 3);
    m.topLeftCorner(2, 2) = V[g];
    m(2, 2) = 1.0;
    mats.push_back(m);
  }
  try {
    decompose_projective_rep(UnitaryRep(V.group(), mats));
    FAIL();
  } catch (const Error& e) {
    // Mixed classes already break closure up to phase.
    EXPECT_EQ(e.code(), ErrorCode::ClosureViolation);
  }
}

TEST(RepTheory, DecomposeWithFixedIrrep) {
  auto V = pauli_z2z2();
  FiniteAbelianGroup G({2, 2});
  try {
    decompose_projective_rep(V, character_rep(G, Charge({0, 0})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClassMismatch);
  }
  auto wide = tensor_rep(V, diagonal_rep(G, {Charge({0, 0}), Charge({1, 1})}));
  try {
    decompose_projective_rep(V, wide);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  // A conjugated copy of the irrep is accepted and reproduced exactly.
  Rng rng(4);
  auto t = conjugate_by(V, random_unitary(2, rng));
  auto T = tensor_rep(V, diagonal_rep(G, {Charge({1, 0}), Charge({1, 1})}));
  auto dec = decompose_projective_rep(T, t);
  EXPECT_LT(max_rep_distance(dec.irrep, t), 1e-9);
}

TEST(RepTheory, EqualUpToCharacter) {
  Rng rng(8);
  auto v = pauli_z2z2();
  const auto& G = v.group();
  Matrix W0 = random_unitary(2, rng);
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < 4; ++g) mats.push_back(G.character_index(G.index(Charge({1, 0})), g) * W0 * v[g] * W0.adjoint());
  UnitaryRep u(G, mats);
  auto eq = equal_up_to_character(u, v);
  ASSERT_TRUE(eq.has_value());
  double res = 0.0;
  for (std::size_t g = 0; g < 4; ++g)
    res = std::max(res, max_abs(u[g] - std::polar(1.0, eq->gauge.theta[g]) * G.character_index(G.index(eq->kappa), g) * eq->W * v[g] * eq->W.adjoint()));
  EXPECT_LT(res, 1e-8);
  for (double t : eq->gauge.theta) EXPECT_LT(std::min(t, 2.0 * std::numbers::pi - t), 1e-9);

  auto self = equal_up_to_character(v, v);
  ASSERT_TRUE(self.has_value());
  EXPECT_EQ(self->kappa, G.trivial_charge());
  // W commutes with every v(g), so it is a phase times the identity.
  EXPECT_LT(max_abs(self->W - self->W(0, 0) * Matrix::Identity(2, 2)), 1e-8);

  EXPECT_FALSE(equal_up_to_character(v, character_rep(G, Charge({0, 0}))).has_value());
}

TEST(RepTheory, EqualUpToCharacterAcrossGauges) {
  Rng rng(21);
  auto v = heisenberg_z3z3();
  GaugePhases th{std::vector<double>(9, 0.0)};
  std::uniform_real_distribution<double> a(0.0, 6.0);
  for (std::size_t g = 1; g < 9; ++g) th.theta[g] = a(rng);
  auto u = conjugate_by(regauge(v, th), random_unitary(3, rng));
  auto eq = equal_up_to_character(u, v);
  ASSERT_TRUE(eq.has_value());
  const auto& G = v.group();
  double res = 0.0;
  for (std::size_t g = 0; g < 9; ++g)
    res = std::max(res, max_abs(u[g] - std::polar(1.0, eq->gauge.theta[g]) * G.character_index(G.index(eq->kappa), g) * eq->W * v[g] * eq->W.adjoint()));
  EXPECT_LT(res, 1e-8);
}

TEST(RepTheory, Presets) {
  FiniteAbelianGroup G({2, 2});
  auto c = rep_from_preset("char:1,1", G);
  EXPECT_EQ(c.dim(), 1);
  EXPECT_NEAR(std::abs(c.at(GroupElement({1, 0}))(0, 0) + 1.0), 0.0, 1e-15);
  auto d = rep_from_preset("diag:0,0|1,0", G);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_EQ(rep_from_preset("heisenberg-z3z3").dim(), 3);
  EXPECT_THROW(rep_from_preset("pauli-z2z2", FiniteAbelianGroup({3, 3})), Error);
  EXPECT_THROW(rep_from_preset("nope"), Error);
  EXPECT_THROW(rep_from_preset("char:2,0", G), Error);
  auto t = rep_from_preset("pauli-z2z2*diag:0,0|1,0", G);
  EXPECT_EQ(t.dim(), 4);
  EXPECT_EQ(irrep_dimension(factor_system(t)), 2);
}
