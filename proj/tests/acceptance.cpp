// Acceptance run: one PASS/FAIL line per criterion 1-12, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "sptent/sptent.hpp"

using namespace sptent;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<std::size_t> range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> v;
  for (std::size_t s = first; s <= last; ++s) v.push_back(s);
  return v;
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

UnitaryRep z2_qubit() {
  const FiniteAbelianGroup G({2});
  return UnitaryRep(G, {Matrix::Identity(2, 2), pauli_z()});
}

UnitaryRep random_linear_rep(const FiniteAbelianGroup& G, Eigen::Index dim, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, G.order() - 1);
  std::vector<Charge> ch;
  for (Eigen::Index i = 0; i < dim; ++i) ch.push_back(G.charge(pick(rng)));
  return conjugate_by(diagonal_rep(G, ch), random_unitary(dim, rng));
}

/// Random state of definite total charge (random sector among the occupied ones).
PureState random_symmetric_state(ChainPtr chain, Rng& rng) {
  PureState seed(chain, random_state(static_cast<Eigen::Index>(chain->total_dim()), rng));
  std::vector<Vector> sectors;
  for_each_charge_sector(seed, range(0, chain->size() - 1), identity_embedding(chain->group()), [&](std::size_t, const Vector& v) {
    if (v.squaredNorm() > 1e-6) sectors.push_back(v);
  });
  std::uniform_int_distribution<std::size_t> pick(0, sectors.size() - 1);
  const Vector v = sectors[pick(rng)];
  return {chain, v / v.norm()};
}

ChainPtr uniform_chain(const UnitaryRep& r, std::size_t n, Boundary b) { return std::make_shared<const Chain>(std::vector<UnitaryRep>(n, r), b); }

std::vector<double> uniform_lambda(Eigen::Index d) { return std::vector<double>(static_cast<std::size_t>(d), 1.0 / std::sqrt(static_cast<double>(d))); }

Circuit brickwork(const Chain& chain, const std::vector<std::size_t>& stretch, std::size_t depth, std::size_t width, std::uint64_t seed) {
  Circuit c;
  for (std::size_t k = 0; k < depth; ++k) c.layers.push_back(brickwork_layer(chain, stretch, width, (seed + k) % width, seed * 31 + k));
  return c;
}

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const char* cli = std::getenv("SPTENT_CLI");
  if (!cli) return {};
  CliResult r;
  FILE* p = popen((std::string(cli) + " " + args + " 2>&1").c_str(), "r");
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// ---------------------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto psi = fixed_point_state({pauli_z2z2(), uniform_lambda(2), std::nullopt, std::nullopt, 6});
  const auto om = omega_state(psi, make_regions(*psi.chain, {0}, {3}, {1, 2}));
  const double op = order_parameter(om);
  const double secs = seconds_since(t0);
  o.pass = psi.amplitudes.size() == 4096 && om.regions.D == std::vector<std::size_t>{4, 5} && std::abs(op - 1.0) <= 1e-9 && secs < 5.0;
  o.detail = "uniform: op=" + fmt17(op) + " in " + sci(secs) + " s";

  // A Pauli V admits only uniform lambda; the skewed Schmidt spectrum (0.8, 0.6) lives on
  // V = Pauli (x) diag(chars), same class, whose lambda-invariance allows it.
  bool literal_rejected = false;
  try {
    fixed_point_state({pauli_z2z2(), {0.8, 0.6}, std::nullopt, std::nullopt, 6});
  } catch (const Error& e) {
    literal_rejected = e.code() == ErrorCode::LambdaNotInvariant;
  }
  const auto V = rep_from_preset("pauli-z2z2*diag:0,0|1,1", FiniteAbelianGroup({2, 2}));
  const double s = std::sqrt(0.5);
  const auto skew = fixed_point_state({V, {0.8 * s, 0.6 * s, 0.8 * s, 0.6 * s}, std::nullopt, std::nullopt, 4});
  const double op2 = order_parameter(omega_state(skew, make_regions(*skew.chain, {0}, {2}, {1})));
  o.pass = o.pass && literal_rejected && std::abs(op2 - 1.0) <= 1e-9;
  o.detail += "; lambda=(0.8,0.6) on Pauli(x)diag: op=" + fmt17(op2) + (literal_rejected ? "; bare Pauli rejects it (LambdaNotInvariant)" : "");
  return o;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(2);
  double worst = 0.0;
  // Fixed points with linear V.
  const FiniteAbelianGroup Z2Z2({2, 2});
  for (const char* preset : {"diag:0,0|1,1", "diag:0,1|1,0", "char:1,1*diag:0,0|0,1"}) {
    const auto V = rep_from_preset(preset, Z2Z2);
    for (const auto& lam : {uniform_lambda(2), std::vector<double>{0.8, 0.6}}) {
      const auto psi = fixed_point_state({V, lam, std::nullopt, std::nullopt, 6});
      worst = std::max(worst, std::abs(order_parameter(omega_state(psi, make_regions(*psi.chain, {0}, {3}, {1, 2})))));
    }
  }
  // Product states: Pauli-singlet sites and random symmetric qubit/qutrit products.
  {
    const auto ev = evaluate(parse_config(Json{{"rep", "pauli-z2z2"},
                                               {"model", {{"type", "product"}, {"N", 6}}},
                                               {"regions", {{"A", {0}}, {"B", {3}}, {"C", {1, 2}}}},
                                               {"tasks", {"order-parameter"}}}));
    worst = std::max(worst, std::abs(*ev.row.order_parameter));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteAbelianGroup G({3});
    std::vector<UnitaryRep> reps;
    std::vector<Vector> local;
    for (int s = 0; s < 7; ++s) {
      reps.push_back(random_linear_rep(G, 3, rng));
      // Symmetric local vector: a random vector inside one charge sector of the site.
      const auto& r = reps.back();
      std::vector<std::size_t> occ;
      std::vector<Matrix> ranges;
      for (std::size_t k = 0; k < G.order(); ++k) {
        Matrix p = Matrix::Zero(3, 3);
        for (std::size_t g = 0; g < G.order(); ++g) p += std::conj(G.character_index(k, g)) * r[g];
        p /= 3.0;
        const Matrix basis = projector_range((p + p.adjoint()) * 0.5);
        if (basis.cols() > 0) ranges.push_back(basis);
      }
      const Matrix& b = ranges[static_cast<std::size_t>(trial + s) % ranges.size()];
      Vector v = b * random_state(b.cols(), rng);
      local.push_back(v / v.norm());
    }
    auto chain = std::make_shared<const Chain>(reps, trial % 2 ? Boundary::Ring : Boundary::Open);
    const auto psi = product_state(chain, local);
    const auto regions = trial % 2 ? make_regions(*chain, {0, 6}, {3}, {1, 2}) : make_regions(*chain, {0}, {4}, {1, 2, 3});
    worst = std::max(worst, std::abs(order_parameter(omega_state(psi, regions))));
  }
  o.pass = worst <= 1e-9;
  o.detail = "max |op| = " + sci(worst) + " over linear-V fixed points and symmetric product states";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto H = heisenberg_z3z3();
  // Oracle: d from the twisted regular representation, before any chain is built.
  const auto omega = factor_system(H);
  const auto blocks = irreducible_blocks(twisted_regular_rep(omega));
  bool oracle = blocks.size() == 3 && irrep_dimension(omega) == 3;
  for (const auto& b : blocks) oracle = oracle && b.cols() == 3;
  const auto lam = uniform_lambda(3);
  const auto psi = fixed_point_state({H, lam, std::nullopt, std::nullopt, 4});
  const double op = order_parameter(omega_state(psi, make_regions(*psi.chain, {0}, {2}, {1})));
  const auto seg = virtual_segment_state(H, lam, 2);
  const auto seg_om = omega_state(seg, make_regions(*seg.chain, {0}, {3}, {1, 2}));
  const double ent = block_entropy(seg_om);
  const double seg_op = order_parameter(seg_om);
  o.pass = oracle && psi.amplitudes.size() == 6561 && std::abs(op - 2.0) <= 1e-9 && std::abs(ent - std::log2(3.0)) <= 1e-9 &&
           std::abs(seg_op - 2.0) <= 1e-9;
  o.detail = std::string("d oracle ") + (oracle ? "3" : "mismatch") + "; op=" + fmt17(op) + "; block entropy=" + fmt17(ent) +
             " (segment op=" + fmt17(seg_op) + ")";
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(4);
  double identity_dev = 0.0;
  auto chain = uniform_chain(z2_qubit(), 8, Boundary::Open);
  const auto& G = chain->group();
  for (int trial = 0; trial < 6; ++trial) {
    const auto psi = random_symmetric_state(chain, rng);
    const auto regions = trial % 2 ? make_regions(*chain, {1}, {6}, {2, 3, 4, 5}) : make_regions(*chain, {0, 1}, {5, 6}, {2, 3, 4});
    const auto om = omega_state(psi, regions);
    const auto da = om.dim_a, db = om.dim_b;
    const auto basis_a = local_operator_basis(da), basis_b = local_operator_basis(db);
    for (std::size_t k = 0; k < G.order(); ++k) {
      const EnsembleBlock* blk = nullptr;
      for (const auto& b : om.blocks)
        if (G.index(b.kappa) == k) blk = &b;
      for (const auto& X : basis_a)
        for (const auto& Y : basis_b) {
          Complex lhs = 0.0;
          for (std::size_t g = 0; g < G.order(); ++g) lhs += std::conj(G.character_index(k, g)) * string_expectation(psi, regions, G.element(g), X, Y);
          lhs /= static_cast<double>(G.order());
          const Complex rhs = blk ? blk->p * (blk->rho * kron(X, Y)).trace() : Complex(0.0);
          identity_dev = std::max(identity_dev, std::abs(lhs - rhs));
        }
    }
  }
  // Round trip on fixed points of every representation preset kind.
  double roundtrip = 0.0;
  const FiniteAbelianGroup Z2Z2({2, 2});
  const std::vector<std::pair<UnitaryRep, std::vector<double>>> models{
      {pauli_z2z2(), uniform_lambda(2)},
      {heisenberg_z3z3(), uniform_lambda(3)},
      {rep_from_preset("diag:0,0|1,1", Z2Z2), {0.8, 0.6}},
      {rep_from_preset("char:1,0", Z2Z2), {1.0}},
      {rep_from_preset("pauli-z2z2*diag:0,0|1,1", Z2Z2), {0.8 * std::sqrt(0.5), 0.6 * std::sqrt(0.5), 0.8 * std::sqrt(0.5), 0.6 * std::sqrt(0.5)}}};
  for (const auto& [V, lam] : models) {
    const auto psi = fixed_point_state({V, lam, std::nullopt, std::nullopt, 4});
    const auto regions = make_regions(*psi.chain, {0}, {2}, {1});
    roundtrip = std::max(roundtrip, ensemble_distance(fourier_reconstruct(build_table(psi, regions)), omega_state(psi, regions)));
  }
  o.pass = identity_dev < 1e-10 && roundtrip <= 1e-10;
  o.detail = "Fourier identity max dev " + sci(identity_dev) + "; round trip max dev " + sci(roundtrip);
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5);
  std::size_t states = 0, comparisons = 0, violations = 0;
  double worst = 0.0;
  const std::vector<FiniteAbelianGroup> groups{FiniteAbelianGroup({2}), FiniteAbelianGroup({3}), FiniteAbelianGroup({2, 2})};
  while (states < 120) {
    const auto n = 8 + states % 3;
    const auto& G = groups[states % groups.size()];
    std::vector<UnitaryRep> reps;
    for (std::size_t s = 0; s < n; ++s) reps.push_back(states % 2 ? random_linear_rep(G, 2, rng) : diagonal_rep(G, {G.charge(0), G.charge(1 % G.order())}));
    auto chain = std::make_shared<const Chain>(reps, Boundary::Open);
    const auto psi = random_symmetric_state(chain, rng);
    ++states;
    // Layout D_left A C B D_right with |A|, |B| in {1, 2} and |C| >= 2.
    std::uniform_int_distribution<std::size_t> one_two(1, 2);
    const std::size_t a = one_two(rng), b = one_two(rng);
    const std::size_t left = states % 2;
    const std::size_t c = n - left - a - b - 1;
    const auto A = range(left, left + a - 1);
    const auto C = range(left + a, left + a + c - 1);
    const auto B = range(left + a + c, left + a + c + b - 1);
    const auto base = make_regions(*chain, A, B, C);
    const double n0 = negativity(omega_state(psi, base));
    std::vector<Regions> bigger;
    auto grow_a_into_c = [&](std::size_t k) {
      auto A2 = range(left, left + a + k - 1);
      auto C2 = range(left + a + k, left + a + c - 1);
      return make_regions(*chain, A2, B, C2);
    };
    auto grow_b_into_c = [&](std::size_t k) {
      auto B2 = range(left + a + c - k, left + a + c + b - 1);
      auto C2 = range(left + a, left + a + c - k - 1);
      return make_regions(*chain, A, B2, C2);
    };
    bigger.push_back(grow_a_into_c(1));
    bigger.push_back(grow_b_into_c(1));
    if (c >= 3) bigger.push_back(grow_a_into_c(2));
    if (!base.D.empty()) {
      // Grow into D: B takes the site to its right, or A the site to its left.
      if (base.D.back() > base.B.back()) {
        auto B2 = B;
        B2.push_back(B.back() + 1);
        bigger.push_back(make_regions(*chain, A, B2, C));
      }
      if (base.D.front() < base.A.front()) {
        auto A2 = A;
        A2.insert(A2.begin(), A.front() - 1);
        bigger.push_back(make_regions(*chain, A2, B, C));
      }
    }
    for (const auto& r : bigger) {
      if (r.A.size() + r.B.size() > 6) continue;
      const double n1 = negativity(omega_state(psi, r));
      ++comparisons;
      worst = std::max(worst, n0 - n1);
      if (n1 < n0 - 1e-10) ++violations;
    }
  }
  o.pass = violations == 0 && states >= 100;
  o.detail = std::to_string(states) + " states, " + std::to_string(comparisons) + " enlargements, " + std::to_string(violations) +
             " violations (largest decrease " + sci(std::max(0.0, worst)) + ")";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(6);
  double worst = 0.0;
  std::size_t seeds = 0;
  auto chain = uniform_chain(z2_qubit(), 12, Boundary::Open);
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    std::vector<Vector> local;
    std::bernoulli_distribution coin(0.5);
    for (int s = 0; s < 12; ++s) local.push_back(coin(rng) ? Vector::Unit(2, 1) : Vector::Unit(2, 0));
    const auto psi0 = product_state(chain, local);
    const auto circuit = brickwork(*chain, range(0, 11), 1, 2, seed);
    const auto psi = apply_circuit(psi0, circuit);
    const auto regions = make_regions(*chain, {0}, {9}, range(1, 8));
    if (circuit.range() != 2 || chain->distance(0, 9) != 9) return {false, "circuit or layout is not the stated one"};
    worst = std::max(worst, std::abs(negativity(omega_state(psi, regions))));
    ++seeds;
  }
  o.pass = worst <= 1e-10;
  o.detail = std::to_string(seeds) + " seeds, R=2, dist(A,B)=9: max |N| = " + sci(worst);
  return o;
}

Outcome criterion7() {
  Outcome o;
  // Pauli fixed point with S = CNOT, each block split into linear qubits X^b (x) Z^a.
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const auto V = pauli_z2z2();
  const auto& G = V.group();
  std::vector<Matrix> xs, zs;
  for (std::size_t g = 0; g < G.order(); ++g) {
    const auto r = G.digits(g);
    xs.push_back(r[1] ? pauli_x() : Matrix::Identity(2, 2));
    zs.push_back(r[0] ? pauli_z() : Matrix::Identity(2, 2));
  }
  const UnitaryRep even(G, xs), odd(G, zs);
  auto split_ring = [&](std::size_t blocks) {
    const auto fp = fixed_point_state({V, uniform_lambda(2), cnot, std::nullopt, blocks});
    return refine_sites(fp, std::vector<std::vector<UnitaryRep>>(blocks, {even, odd}));
  };

  // (a) l = 5 > 2R on 22 qubits (the dense cap): A_5, B_5 cover the ring.
  std::size_t seeds = 0, violations = 0;
  double margin = std::numeric_limits<double>::infinity();
  {
    const auto rho = split_ring(11);
    const auto& chain = *rho.chain;
    const auto r0 = make_regions(chain, {0}, {11}, range(1, 10));
    const double before = omega_negativity(rho, r0);
    const auto rl = ball_regions(chain, r0, 5);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto circuit = brickwork(chain, range(0, 21), 1, 2, seed);
      if (circuit.range() != 2) return {false, "circuit range is not 2"};
      const double after = omega_negativity(apply_circuit(rho, circuit), rl);
      margin = std::min(margin, after - before);
      violations += after < before - 1e-10;
      ++seeds;
    }
    o.detail = "22 qubits, l=5: " + std::to_string(seeds) + " seeds, min margin " + sci(margin);
  }
  // (b) nonempty C~ on 16 qubits, l = 1 (the largest radius leaving C~ nonempty).
  std::size_t seeds_b = 0, violations_b = 0;
  double margin_b = std::numeric_limits<double>::infinity();
  {
    const auto rho = split_ring(8);
    const auto& chain = *rho.chain;
    const auto r0 = make_regions(chain, {0, 1}, {8, 9}, range(2, 7));
    const double before = omega_negativity(rho, r0);
    const auto rl = ball_regions(chain, r0, 1);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto circuit = brickwork(chain, range(0, 15), 1, 2, seed);
      const double after = omega_negativity(apply_circuit(rho, circuit), rl);
      margin_b = std::min(margin_b, after - before);
      violations_b += after < before - 1e-10;
      ++seeds_b;
    }
    o.detail += "; 16 qubits, l=1, |C~|=" + std::to_string(rl.C.size()) + ": " + std::to_string(seeds_b) + " seeds, min margin " + sci(margin_b);
  }
  o.pass = violations == 0 && violations_b == 0;
  return o;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(8);
  double worst = 0.0;
  std::size_t seeds = 0;
  const auto fp = fixed_point_state({pauli_z2z2(), uniform_lambda(2), std::nullopt, std::nullopt, 6});
  auto qubits = uniform_chain(z2_qubit(), 10, Boundary::Open);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const bool use_fp = seed % 3 == 0;
    const auto psi = use_fp ? fp : random_symmetric_state(qubits, rng);
    const auto& chain = *psi.chain;
    const auto regions = use_fp ? make_regions(chain, {0}, {5}, {1, 2, 3, 4}) : make_regions(chain, {1}, {8}, range(2, 7));
    std::uniform_int_distribution<std::size_t> width(1, std::min<std::size_t>(3, regions.C.size()));
    const auto w = width(rng);
    std::uniform_int_distribution<std::size_t> start(0, regions.C.size() - w);
    const auto s0 = start(rng);
    std::vector<std::size_t> support(regions.C.begin() + static_cast<std::ptrdiff_t>(s0), regions.C.begin() + static_cast<std::ptrdiff_t>(s0 + w));
    Circuit c;
    c.layers.push_back({random_symmetric_gate(chain, support, seed)});
    worst = std::max(worst, ensemble_distance(omega_state(psi, regions), omega_state(apply_circuit(psi, c), regions)));
    ++seeds;
  }
  o.pass = worst <= 1e-12;
  o.detail = std::to_string(seeds) + " seeds: max entrywise change " + sci(worst);
  return o;
}

Outcome criterion9() {
  Outcome o;
  Rng rng(9);
  std::size_t cocycles = 0, mismatches = 0;
  double decomp = 0.0;
  for (const auto& orders : {std::vector<int>{2, 2}, {2, 2, 2}, {3, 3}, {4, 2}}) {
    const FiniteAbelianGroup G(orders);
    for (int k = 0; k < 20; ++k) {
      const auto w = random_cocycle(G, rng);
      const int d = irrep_dimension(w);
      const int d_conj = irrep_dimension(conjugate(w));
      bool ok = d == d_conj;
      for (const auto* f : {&w}) {
        const auto blocks = irreducible_blocks(twisted_regular_rep(*f), 7 + static_cast<std::uint64_t>(k));
        for (const auto& b : blocks) ok = ok && b.cols() == d;
      }
      for (const auto& b : irreducible_blocks(twisted_regular_rep(conjugate(w)))) ok = ok && b.cols() == d_conj;
      mismatches += !ok;
      ++cocycles;
      // Randomized decomposition input: t (x) diag(random characters), random basis.
      const auto t = canonical_irrep(w);
      std::uniform_int_distribution<std::size_t> pick(0, G.order() - 1);
      std::vector<Charge> ch;
      for (int m = 0; m < 1 + k % 3; ++m) ch.push_back(G.charge(pick(rng)));
      const auto T = conjugate_by(tensor_rep(t, diagonal_rep(G, ch)), random_unitary(t.dim() * static_cast<Eigen::Index>(ch.size()), rng));
      const auto dec = decompose_projective_rep(T);
      for (std::size_t g = 0; g < G.order(); ++g) decomp = std::max(decomp, max_abs(T[g] - dec.W * kron(dec.irrep[g], dec.linear[g]) * dec.W.adjoint()));
    }
  }
  o.pass = mismatches == 0 && decomp < 1e-8;
  o.detail = std::to_string(cocycles) + " cocycles, " + std::to_string(mismatches) + " dimension mismatches; decomposition residual " + sci(decomp);
  return o;
}

Outcome criterion10() {
  Outcome o;
  Rng rng(10);
  double dist_dev = 0.0, min_fid = 1.0;
  std::size_t branches = 0;
  for (const auto& t : {pauli_z2z2(), heisenberg_z3z3()}) {
    const auto& G = t.group();
    std::uniform_int_distribution<std::size_t> pick(0, G.order() - 1);
    for (int trial = 0; trial < 8; ++trial) {
      const auto TR = conjugate_by(tensor_rep(t, diagonal_rep(G, {G.charge(pick(rng)), G.charge(pick(rng))})), random_unitary(2 * t.dim(), rng));
      const auto TRbar = conjugate_by(tensor_rep(conjugate_rep(t), diagonal_rep(G, {G.charge(pick(rng))})), random_unitary(t.dim(), rng));
      const BipartiteRepState s{TR, TRbar, random_state(TR.dim() * TRbar.dim(), rng)};
      const auto tr = measure_total_charge_locc(s, static_cast<std::uint64_t>(trial));
      const auto direct = direct_charge_distribution(s);
      for (std::size_t k = 0; k < direct.size(); ++k) dist_dev = std::max(dist_dev, std::abs(tr.outcome_distribution[k] - direct[k]));
      // Definite-charge input for distillation.
      const auto joint = tensor_rep(TR, TRbar);
      const auto k = pick(rng);
      Matrix p = Matrix::Zero(joint.dim(), joint.dim());
      for (std::size_t g = 0; g < G.order(); ++g) p += std::conj(G.character_index(k, g)) * joint[g];
      Vector v = p * random_state(joint.dim(), rng);
      if (v.norm() < 1e-6) continue;
      const auto res = distill_max_entangled({TR, TRbar, v / v.norm()}, 1);
      for (const auto& b : res.transcript.branches) {
        min_fid = std::min(min_fid, b.fidelity);
        ++branches;
      }
    }
  }
  o.pass = dist_dev <= 1e-10 && min_fid >= 1.0 - 1e-9 && branches > 0;
  o.detail = "distribution dev " + sci(dist_dev) + "; " + std::to_string(branches) + " distillation branches, min fidelity " + fmt17(min_fid);
  return o;
}

Outcome criterion11() {
  Outcome o;
  Rng rng(11);
  double worst = 0.0;
  std::size_t cases = 0;
  const std::vector<std::vector<int>> groups{{2}, {3}, {4}, {5}, {6}, {7}, {8}, {2, 2}, {4, 2}, {2, 2, 2}};
  for (const auto& orders : groups) {
    const FiniteAbelianGroup G(orders);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<UnitaryRep> reps;
      for (int s = 0; s < 5; ++s) reps.push_back(random_linear_rep(G, 1 + (s + trial) % 2, rng));
      const Chain chain(reps, Boundary::Open);
      std::uniform_int_distribution<std::size_t> len(1, 4), first(0, 1);
      const auto n = len(rng);
      const auto f = first(rng);
      const auto C = range(f, f + n - 1);
      std::vector<Matrix> P;
      for (std::size_t k = 0; k < G.order(); ++k) P.push_back(charge_projector(chain, C, G.charge(k)));
      Matrix sum = Matrix::Zero(P[0].rows(), P[0].cols());
      for (std::size_t a = 0; a < P.size(); ++a) {
        worst = std::max({worst, max_abs(P[a] * P[a] - P[a]), max_abs(P[a] - P[a].adjoint())});
        for (std::size_t b = 0; b < P.size(); ++b)
          if (a != b) worst = std::max(worst, max_abs(P[a] * P[b]));
        sum += P[a];
      }
      worst = std::max(worst, max_abs(sum - Matrix::Identity(sum.rows(), sum.cols())));
      ++cases;
    }
  }
  o.pass = worst <= 1e-12;
  o.detail = std::to_string(cases) + " group/region cases: max residual " + sci(worst);
  return o;
}

Outcome criterion12() {
  Outcome o;
  if (!std::getenv("SPTENT_CLI")) return {false, "SPTENT_CLI not set"};
  const auto dir = fs::temp_directory_path() / ("sptent_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  const Json cfg{{"rep", "pauli-z2z2"},
                 {"model", {{"type", "perturbed"}, {"N", 6}, {"depth", 2}}},
                 {"regions", {{"A", {0}}, {"B", {4}}, {"C", {1, 2, 3}}}},
                 {"tasks", {"order-parameter", "omega", "string-table", "detect", "repinfo"}},
                 {"seed", 17}};
  const auto cfg_path = dir / "config.json";
  write_text(cfg_path.string(), cfg.dump(2));
  bool same = true;
  std::string which;
  for (const auto& [cmd, files] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"compute", {".csv", ".json", ".table.csv"}}, {"sweep --axis circuit-depth --values 0,1,2,3", {".csv", ".json"}}}) {
    const auto r1 = run_cli("--seed 3 " + cmd.substr(0, cmd.find(' ')) + " " + cfg_path.string() + cmd.substr(std::min(cmd.size(), cmd.find(' '))) + " -o " + (dir / "a").string());
    setenv("SPTENT_THREADS", "4", 1);
    const auto r2 = run_cli("--seed 3 " + cmd.substr(0, cmd.find(' ')) + " " + cfg_path.string() + cmd.substr(std::min(cmd.size(), cmd.find(' '))) + " -o " + (dir / "b").string());
    unsetenv("SPTENT_THREADS");
    if (r1.code != 0 || r2.code != 0) return {false, cmd + " failed: " + r1.output + r2.output};
    for (const auto& ext : files) {
      const auto a = slurp(dir / ("a" + ext)), b = slurp(dir / ("b" + ext));
      if (a.empty() || a != b) {
        same = false;
        which += " " + cmd.substr(0, cmd.find(' ')) + ext;
      }
    }
  }
  const auto t0 = Clock::now();
  const auto st = run_cli("selftest");
  const double secs = seconds_since(t0);
  fs::remove_all(dir);
  o.pass = same && st.code == 0 && secs < 120.0;
  o.detail = std::string(same ? "outputs byte-identical" : "outputs differ:" + which) + "; selftest exit " + std::to_string(st.code) + " in " +
             sci(secs) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fixed-point exactness, nontrivial phase", criterion1},
      {"trivial phase", criterion2},
      {"higher class (Z3xZ3)", criterion3},
      {"Fourier identity", criterion4},
      {"monotonicity under region growth", criterion5},
      {"trivial phase under low-depth circuits", criterion6},
      {"circuit inequality", criterion7},
      {"C-interior invariance", criterion8},
      {"representation theory", criterion9},
      {"LOCC protocols", criterion10},
      {"projector algebra", criterion11},
      {"determinism and selftest budget", criterion12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu  %s: %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
