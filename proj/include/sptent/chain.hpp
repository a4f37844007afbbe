#pragma once

// Chains of sites carrying on-site symmetry representations, dense pure states on them,
// the fixed-point builder, and layered symmetric circuits.
//
// Amplitude layout: site 0 is the most significant digit (row-major tensor order).

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sptent/rep_theory.hpp"

namespace sptent {

enum class Boundary { Open, Ring };

inline constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 22;

class Chain {
 public:
  Chain(std::vector<UnitaryRep> site_reps, Boundary boundary) : reps_(std::move(site_reps)), boundary_(boundary) {
    require(!reps_.empty(), ErrorCode::ConfigError, "a chain needs at least one site");
    total_ = 1;
    for (const auto& r : reps_) {
      require(r.group() == reps_.front().group(), ErrorCode::GroupMismatch, "all site representations must share one group");
      dims_.push_back(r.dim());
      const auto d = static_cast<std::size_t>(r.dim());
      require(total_ <= kMaxAmplitudes / d, ErrorCode::CapExceeded,
              "chain dimension exceeds the dense cap of 2^22 amplitudes");
      total_ *= d;
      const auto w = factor_system(r);
      linear_.push_back(max_abs(w.omega - Matrix::Ones(w.omega.rows(), w.omega.cols())) <= tol::exact);
    }
  }

  std::size_t size() const { return reps_.size(); }
  Boundary boundary() const { return boundary_; }
  const FiniteAbelianGroup& group() const { return reps_.front().group(); }
  const UnitaryRep& rep(std::size_t site) const { return reps_.at(site); }
  const std::vector<UnitaryRep>& reps() const { return reps_; }
  Eigen::Index dim(std::size_t site) const { return dims_.at(site); }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  std::size_t total_dim() const { return total_; }
  /// True when the site representation is linear (factor system identically 1).
  bool linear(std::size_t site) const { return linear_.at(site); }

  /// Lattice distance, cyclic on a ring.
  std::size_t distance(std::size_t a, std::size_t b) const {
    const std::size_t d = a > b ? a - b : b - a;
    return boundary_ == Boundary::Ring ? std::min(d, size() - d) : d;
  }

 private:
  std::vector<UnitaryRep> reps_;
  Boundary boundary_;
  std::vector<Eigen::Index> dims_;
  std::vector<bool> linear_;
  std::size_t total_ = 1;
};

using ChainPtr = std::shared_ptr<const Chain>;

struct PureState {
  ChainPtr chain;
  Vector amplitudes;

  PureState(ChainPtr c, Vector amps) : chain(std::move(c)), amplitudes(std::move(amps)) {
    require(static_cast<std::size_t>(amplitudes.size()) == chain->total_dim(), ErrorCode::DimensionMismatch,
            "amplitude vector length does not match the chain dimension");
    require(std::abs(amplitudes.norm() - 1.0) <= 1e-12, ErrorCode::InvariantViolation, "state is not unit-normalized");
  }
};

// ---------------------------------------------------------------------------------------
// Operator application on a subset of sites.

namespace detail {

inline std::vector<std::size_t> strides(const std::vector<Eigen::Index>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * static_cast<std::size_t>(dims[k]);
  return s;
}

/// Flat offsets of every basis state of `sites` (listed order, first most significant)
/// with all other sites at digit 0, plus the offsets of every configuration of the other
/// sites with the listed sites at digit 0.
struct SplitOffsets {
  std::vector<std::size_t> inner, outer;
};

inline SplitOffsets split_offsets(const std::vector<Eigen::Index>& dims, const std::vector<std::size_t>& sites) {
  const auto st = strides(dims);
  std::vector<char> marked(dims.size(), 0);
  for (auto s : sites) {
    require(s < dims.size(), ErrorCode::RegionInvalid, "site index " + std::to_string(s) + " outside the chain");
    require(!marked[s], ErrorCode::RegionInvalid, "site " + std::to_string(s) + " listed twice");
    marked[s] = 1;
  }
  SplitOffsets out;
  out.inner = {0};
  for (auto s : sites) {
    std::vector<std::size_t> next;
    next.reserve(out.inner.size() * static_cast<std::size_t>(dims[s]));
    for (auto base : out.inner)
      for (Eigen::Index k = 0; k < dims[s]; ++k) next.push_back(base + static_cast<std::size_t>(k) * st[s]);
    out.inner = std::move(next);
  }
  out.outer = {0};
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (marked[s]) continue;
    std::vector<std::size_t> next;
    next.reserve(out.outer.size() * static_cast<std::size_t>(dims[s]));
    for (auto base : out.outer)
      for (Eigen::Index k = 0; k < dims[s]; ++k) next.push_back(base + static_cast<std::size_t>(k) * st[s]);
    out.outer = std::move(next);
  }
  return out;
}

}  // namespace detail

/// psi <- (M on `sites`, identity elsewhere) psi. M is indexed in the listed site order.
inline void apply_operator(Vector& psi, const std::vector<Eigen::Index>& dims, const std::vector<std::size_t>& sites, const Matrix& m) {
  const auto off = detail::split_offsets(dims, sites);
  const auto n = static_cast<Eigen::Index>(off.inner.size());
  require(m.rows() == n && m.cols() == n, ErrorCode::DimensionMismatch, "operator does not match the dimension of its support");
  Vector buf(n), res(n);
  for (auto base : off.outer) {
    for (Eigen::Index i = 0; i < n; ++i) buf(i) = psi(static_cast<Eigen::Index>(base + off.inner[static_cast<std::size_t>(i)]));
    res.noalias() = m * buf;
    for (Eigen::Index i = 0; i < n; ++i) psi(static_cast<Eigen::Index>(base + off.inner[static_cast<std::size_t>(i)])) = res(i);
  }
}

/// Applies a (possibly non-square) map to one site; dims[site] becomes m.rows().
inline Vector apply_local_map(const Vector& psi, std::vector<Eigen::Index>& dims, std::size_t site, const Matrix& m) {
  require(site < dims.size() && m.cols() == dims[site], ErrorCode::DimensionMismatch, "local map does not match the site dimension");
  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < site; ++k) left *= static_cast<std::size_t>(dims[k]);
  for (std::size_t k = site + 1; k < dims.size(); ++k) right *= static_cast<std::size_t>(dims[k]);
  const auto din = static_cast<std::size_t>(m.cols()), dout = static_cast<std::size_t>(m.rows());
  Vector out = Vector::Zero(static_cast<Eigen::Index>(left * dout * right));
  for (std::size_t l = 0; l < left; ++l) {
    // Block of shape din x right, row-major in psi.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> in(
        psi.data() + l * din * right, static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(right));
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> o(
        out.data() + l * dout * right, static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(right));
    o.noalias() = m * in;
  }
  dims[site] = m.rows();
  return out;
}

/// Applies V_{s}(g) on every listed site.
inline void apply_symmetry(Vector& psi, const Chain& chain, const std::vector<std::size_t>& sites, std::size_t g) {
  for (auto s : sites) apply_operator(psi, chain.dims(), {s}, chain.rep(s)[g]);
}

/// Tensor product of the site representations over `sites`, in the listed order.
inline UnitaryRep restricted_rep(const Chain& chain, const std::vector<std::size_t>& sites) {
  require(!sites.empty(), ErrorCode::RegionInvalid, "empty support");
  UnitaryRep out = chain.rep(sites.front());
  for (std::size_t k = 1; k < sites.size(); ++k) out = tensor_rep(out, chain.rep(sites[k]));
  return out;
}

// ---------------------------------------------------------------------------------------
// States.

inline PureState product_state(ChainPtr chain, const std::vector<Vector>& local) {
  require(local.size() == chain->size(), ErrorCode::DimensionMismatch, "product state needs one vector per site");
  Vector psi = Vector::Ones(1);
  for (std::size_t s = 0; s < local.size(); ++s) {
    require(local[s].size() == chain->dim(s), ErrorCode::DimensionMismatch, "local vector dimension mismatch at site " + std::to_string(s));
    require(std::abs(local[s].norm() - 1.0) <= 1e-12, ErrorCode::InvariantViolation, "local vector at site " + std::to_string(s) + " is not normalized");
    psi = kron(psi, local[s]);
  }
  return {std::move(chain), std::move(psi)};
}

struct FixedPointSpec {
  UnitaryRep V;
  std::vector<double> lambda;
  /// Isometry from virtual L (x) virtual R to the physical site; identity when absent.
  std::optional<Matrix> S;
  /// Physical on-site representation; derived as S (V (x) V*) S^dagger when S is square.
  std::optional<UnitaryRep> U;
  std::size_t N = 4;
};

namespace detail {

inline Vector lambda_vector(const std::vector<double>& lambda) {
  const auto d = static_cast<Eigen::Index>(lambda.size());
  Vector v = Vector::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) v(j * d + j) = lambda[static_cast<std::size_t>(j)];
  return v;
}

inline void validate_lambda(const UnitaryRep& V, const std::vector<double>& lambda) {
  require(static_cast<Eigen::Index>(lambda.size()) == V.dim(), ErrorCode::DimensionMismatch, "lambda length must equal dim V");
  double norm2 = 0.0;
  for (double x : lambda) {
    require(std::isfinite(x) && x > 0.0, ErrorCode::NonPositiveSchmidt, "Schmidt coefficients must be positive");
    norm2 += x * x;
  }
  require(std::abs(norm2 - 1.0) <= 1e-9, ErrorCode::NonPositiveSchmidt, "Schmidt coefficients must have unit 2-norm");
  const Vector lam = lambda_vector(lambda);
  double worst = 0.0;
  for (const auto& m : V.matrices()) worst = std::max(worst, max_abs(kron(m.conjugate(), m) * lam - lam));
  require(worst <= tol::validation, ErrorCode::LambdaNotInvariant,
          "[V*(g) (x) V(g)]|lambda> != |lambda> (residual " + std::to_string(worst) + ")");
}

}  // namespace detail

/// The physical on-site representation of a fixed-point spec.
inline UnitaryRep fixed_point_site_rep(const FixedPointSpec& spec) {
  const auto virt = tensor_rep(spec.V, conjugate_rep(spec.V));
  if (!spec.S) return spec.U ? *spec.U : virt;
  const Matrix& S = *spec.S;
  require(S.cols() == virt.dim() && S.rows() >= S.cols(), ErrorCode::DimensionMismatch, "S must map dim(V)^2 into the physical site");
  require(isometry_residual(S) <= tol::validation, ErrorCode::IntertwinerViolation, "S is not an isometry");
  UnitaryRep U = spec.U ? *spec.U : [&] {
    require(S.rows() == S.cols(), ErrorCode::ConfigError, "a non-square S needs an explicit physical representation");
    return conjugate_by(virt, S);
  }();
  require(U.dim() == S.rows(), ErrorCode::DimensionMismatch, "physical representation does not match S");
  double worst = 0.0;
  for (std::size_t g = 0; g < U.group().order(); ++g) worst = std::max(worst, max_abs(U[g] * S - S * virt[g]));
  require(worst <= tol::validation, ErrorCode::IntertwinerViolation, "U(g) S != S [V(g) (x) V*(g)] (residual " + std::to_string(worst) + ")");
  return U;
}

/// |Psi> = S^{(x)N} |lambda>^{(x)N} on a ring; the pair |lambda> joins site i's right
/// virtual leg with site (i+1)'s left leg.
inline PureState fixed_point_state(const FixedPointSpec& spec) {
  require(spec.N >= 2, ErrorCode::ConfigError, "fixed point needs N >= 2 blocks");
  detail::validate_lambda(spec.V, spec.lambda);
  const auto U = fixed_point_site_rep(spec);
  if (!spec.S) {
    double worst = 0.0;
    for (std::size_t g = 0; g < U.group().order(); ++g)
      worst = std::max(worst, max_abs(U[g] - kron(spec.V[g], spec.V[g].conjugate())));
    require(worst <= tol::validation, ErrorCode::IntertwinerViolation, "physical representation differs from V (x) V* for canonical S");
  }
  const auto d = static_cast<std::size_t>(spec.V.dim());
  const auto dd = d * d;
  // Virtual ring with physical dim d^2 per site, then S site by site.
  std::size_t total = 1;
  for (std::size_t i = 0; i < spec.N; ++i) {
    require(total <= kMaxAmplitudes / dd, ErrorCode::CapExceeded, "fixed point exceeds the dense cap of 2^22 amplitudes");
    total *= dd;
  }
  Vector psi(static_cast<Eigen::Index>(total));
  std::vector<std::size_t> digit(spec.N);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t x = idx;
    for (std::size_t i = spec.N; i-- > 0;) {
      digit[i] = x % dd;
      x /= dd;
    }
    double amp = 1.0;
    for (std::size_t i = 0; i < spec.N && amp != 0.0; ++i) {
      const auto r = digit[i] % d;
      const auto l_next = digit[(i + 1) % spec.N] / d;
      amp = r == l_next ? amp * spec.lambda[r] : 0.0;
    }
    psi(static_cast<Eigen::Index>(idx)) = amp;
  }
  std::vector<Eigen::Index> dims(spec.N, static_cast<Eigen::Index>(dd));
  if (spec.S)
    for (std::size_t i = 0; i < spec.N; ++i) psi = apply_local_map(psi, dims, i, *spec.S);
  psi /= psi.norm();
  auto chain = std::make_shared<const Chain>(std::vector<UnitaryRep>(spec.N, U), Boundary::Ring);
  PureState out(chain, std::move(psi));
  // Global symmetry check.
  std::vector<std::size_t> all(spec.N);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t g = 1; g < U.group().order(); ++g) {
    Vector phi = out.amplitudes;
    apply_symmetry(phi, *chain, all, g);
    require(max_abs(phi - out.amplitudes) <= tol::validation, ErrorCode::InvariantViolation, "fixed point is not globally symmetric");
  }
  return out;
}

/// Virtual boundary segment of a canonical fixed point around a region of `blocks`
/// physical blocks: sites [a_R, (l, r) x blocks, b_L] with representations
/// [V*, V (x) V* ..., V] and |lambda> pairs between consecutive virtual legs.
inline PureState virtual_segment_state(const UnitaryRep& V, const std::vector<double>& lambda, std::size_t blocks) {
  detail::validate_lambda(V, lambda);
  std::vector<UnitaryRep> reps{conjugate_rep(V)};
  for (std::size_t k = 0; k < blocks; ++k) reps.push_back(tensor_rep(V, conjugate_rep(V)));
  reps.push_back(V);
  auto chain = std::make_shared<const Chain>(std::move(reps), Boundary::Open);
  // Virtual legs in order: a_R, l_1, r_1, ..., l_n, r_n, b_L; pairs (0,1), (2,3), ...
  Vector psi = Vector::Ones(1);
  const Vector pair = detail::lambda_vector(lambda);
  for (std::size_t k = 0; k <= blocks; ++k) psi = kron(psi, pair);
  return {chain, psi / psi.norm()};
}

/// Reinterprets each site as a tensor product of finer sites; the representation on site
/// s must equal the Kronecker product of parts[s].
inline PureState refine_sites(const PureState& state, const std::vector<std::vector<UnitaryRep>>& parts) {
  const auto& chain = *state.chain;
  require(parts.size() == chain.size(), ErrorCode::DimensionMismatch, "need a factorization for every site");
  std::vector<UnitaryRep> reps;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    require(!parts[s].empty(), ErrorCode::DimensionMismatch, "empty factorization");
    UnitaryRep prod = parts[s].front();
    for (std::size_t k = 1; k < parts[s].size(); ++k) prod = tensor_rep(prod, parts[s][k]);
    require(prod.dim() == chain.dim(s) && max_rep_distance(prod, chain.rep(s)) <= tol::exact, ErrorCode::InvariantViolation,
            "site " + std::to_string(s) + " representation does not factor as given");
    for (const auto& p : parts[s]) reps.push_back(p);
  }
  return {std::make_shared<const Chain>(std::move(reps), chain.boundary()), state.amplitudes};
}

// ---------------------------------------------------------------------------------------
// Regions.

struct Regions {
  std::vector<std::size_t> A, B, C, D;
};

namespace detail {

inline std::string list_string(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s + "}";
}

inline std::vector<std::size_t> intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// Validates A, B, C against the chain and sets D to the complement.
///
/// Rules: A and B non-empty; A, B, C pairwise disjoint; C contiguous (cyclically on a
/// ring). With C non-empty, on an open chain A lies entirely before C and B entirely
/// after it (or mirrored); on a ring the two neighbours of C are one in A, one in B.
inline Regions make_regions(const Chain& chain, std::vector<std::size_t> A, std::vector<std::size_t> B, std::vector<std::size_t> C) {
  const auto n = chain.size();
  for (auto* v : {&A, &B, &C}) {
    std::sort(v->begin(), v->end());
    require(std::adjacent_find(v->begin(), v->end()) == v->end(), ErrorCode::RegionInvalid, "repeated site in a region");
    for (auto s : *v) require(s < n, ErrorCode::RegionInvalid, "site " + std::to_string(s) + " outside the chain of " + std::to_string(n));
  }
  require(!A.empty() && !B.empty(), ErrorCode::RegionInvalid, "regions A and B must be non-empty");
  const std::pair<const char*, std::pair<const std::vector<std::size_t>*, const std::vector<std::size_t>*>> pairs[] = {
      {"A∩B", {&A, &B}}, {"A∩C", {&A, &C}}, {"B∩C", {&B, &C}}};
  for (const auto& [name, p] : pairs) {
    const auto common = detail::intersect(*p.first, *p.second);
    require(common.empty(), ErrorCode::RegionInvalid, std::string("regions overlap: ") + name + " = " + detail::list_string(common));
  }
  if (!C.empty()) {
    std::vector<char> inC(n, 0);
    for (auto s : C) inC[s] = 1;
    // Count runs (cyclic on a ring).
    std::size_t starts = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const bool prev = chain.boundary() == Boundary::Ring ? inC[(s + n - 1) % n] : (s > 0 && inC[s - 1]);
      if (inC[s] && !prev) ++starts;
    }
    require(starts == 1, ErrorCode::RegionInvalid, "region C must be contiguous");
    if (chain.boundary() == Boundary::Open) {
      const bool forward = A.back() < C.front() && C.back() < B.front();
      const bool backward = B.back() < C.front() && C.back() < A.front();
      require(forward || backward, ErrorCode::RegionInvalid, "on an open chain A and B must lie on opposite sides of C");
    } else {
      require(C.size() < n, ErrorCode::RegionInvalid, "C covers the ring");
      std::size_t first = C.front(), last = C.back();
      if (C.size() > 1 && inC[0] && inC[n - 1]) {
        // Run wraps around: find its true endpoints.
        first = 0;
        while (inC[(first + n - 1) % n]) first = (first + n - 1) % n;
        last = first;
        while (inC[(last + 1) % n]) last = (last + 1) % n;
      }
      const auto left = (first + n - 1) % n, right = (last + 1) % n;
      auto in = [](const std::vector<std::size_t>& v, std::size_t s) { return std::binary_search(v.begin(), v.end(), s); };
      const bool ok = (in(A, left) && in(B, right)) || (in(B, left) && in(A, right));
      require(ok, ErrorCode::RegionInvalid, "on a ring the neighbours of C must be one site of A and one of B");
    }
  }
  std::vector<std::size_t> D;
  for (std::size_t s = 0; s < n; ++s)
    if (!std::binary_search(A.begin(), A.end(), s) && !std::binary_search(B.begin(), B.end(), s) && !std::binary_search(C.begin(), C.end(), s))
      D.push_back(s);
  return {std::move(A), std::move(B), std::move(C), std::move(D)};
}

/// All sites within distance l of the region (clipped on open chains).
inline std::vector<std::size_t> region_ball(const Chain& chain, const std::vector<std::size_t>& region, std::size_t l) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < chain.size(); ++s)
    for (auto r : region)
      if (chain.distance(s, r) <= l) {
        out.push_back(s);
        break;
      }
  return out;
}

/// (A_l, B_l, C minus both balls); D becomes the remaining complement.
inline Regions ball_regions(const Chain& chain, const Regions& r, std::size_t l) {
  auto A = region_ball(chain, r.A, l);
  auto B = region_ball(chain, r.B, l);
  const auto common = detail::intersect(A, B);
  require(common.empty(), ErrorCode::RegionInvalid, "balls of radius " + std::to_string(l) + " collide: A_l∩B_l = " + detail::list_string(common));
  std::vector<std::size_t> C;
  for (auto s : r.C)
    if (!std::binary_search(A.begin(), A.end(), s) && !std::binary_search(B.begin(), B.end(), s)) C.push_back(s);
  return make_regions(chain, std::move(A), std::move(B), std::move(C));
}

// ---------------------------------------------------------------------------------------
// Circuits.

struct Gate {
  std::vector<std::size_t> support;
  Matrix unitary;
  bool symmetric = true;
};

struct Circuit {
  std::vector<std::vector<Gate>> layers;

  std::size_t depth() const { return layers.size(); }
  std::size_t max_width() const {
    std::size_t w = 0;
    for (const auto& layer : layers)
      for (const auto& g : layer) w = std::max(w, g.support.size());
    return w;
  }
  /// Depth times the widest gate support.
  std::size_t range() const { return depth() * max_width(); }
};

namespace detail {

inline void require_contiguous(const Chain& chain, const std::vector<std::size_t>& support) {
  require(!support.empty(), ErrorCode::RegionInvalid, "gate support is empty");
  for (std::size_t k = 0; k < support.size(); ++k) {
    require(support[k] < chain.size(), ErrorCode::RegionInvalid, "gate support outside the chain");
    if (k > 0) {
      const bool step = support[k] == support[k - 1] + 1 ||
                        (chain.boundary() == Boundary::Ring && support[k - 1] + 1 == chain.size() && support[k] == 0);
      require(step, ErrorCode::RegionInvalid, "gate support must be contiguous, listed left to right");
    }
  }
  require(support.size() <= chain.size(), ErrorCode::RegionInvalid, "gate support wraps onto itself");
}

}  // namespace detail

/// Haar-random unitary within each charge sector of the support's total representation.
inline Gate random_symmetric_gate(const Chain& chain, const std::vector<std::size_t>& support, std::uint64_t seed) {
  detail::require_contiguous(chain, support);
  const auto rep = restricted_rep(chain, support);
  require(max_abs(factor_system(rep).omega - Matrix::Ones(static_cast<Eigen::Index>(rep.group().order()), static_cast<Eigen::Index>(rep.group().order()))) <= tol::exact,
          ErrorCode::ClassMismatch, "symmetric gates need a linear representation on their support");
  Rng rng(seed);
  const auto& G = rep.group();
  const auto n = rep.dim();
  Matrix u = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < G.order(); ++k) {
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t g = 0; g < G.order(); ++g) p += std::conj(G.character_index(k, g)) * rep[g];
    p /= static_cast<double>(G.order());
    p = (p + p.adjoint()).eval() * 0.5;
    const Matrix basis = projector_range(p);
    if (basis.cols() == 0) continue;
    u += basis * random_unitary(basis.cols(), rng) * basis.adjoint();
  }
  return {support, std::move(u), true};
}

/// Layer of width-w symmetric gates tiling the listed contiguous stretch, starting at
/// `offset` within it; leftover sites at the edge are skipped.
inline std::vector<Gate> brickwork_layer(const Chain& chain, const std::vector<std::size_t>& stretch, std::size_t width, std::size_t offset,
                                         std::uint64_t seed) {
  std::vector<Gate> layer;
  for (std::size_t k = offset; k + width <= stretch.size(); k += width) {
    std::vector<std::size_t> support(stretch.begin() + static_cast<std::ptrdiff_t>(k), stretch.begin() + static_cast<std::ptrdiff_t>(k + width));
    layer.push_back(random_symmetric_gate(chain, support, seed * 1000003ULL + k));
  }
  return layer;
}

inline PureState apply_circuit(const PureState& state, const Circuit& circuit) {
  const auto& chain = *state.chain;
  Vector psi = state.amplitudes;
  for (std::size_t li = 0; li < circuit.layers.size(); ++li) {
    std::vector<char> used(chain.size(), 0);
    for (const auto& gate : circuit.layers[li]) {
      detail::require_contiguous(chain, gate.support);
      for (auto s : gate.support) {
        require(!used[s], ErrorCode::LayerOverlap, "gates overlap on site " + std::to_string(s) + " in layer " + std::to_string(li));
        used[s] = 1;
      }
      require(unitarity_residual(gate.unitary) <= tol::unitarity, ErrorCode::InvariantViolation, "gate is not unitary");
      if (gate.symmetric) {
        const auto rep = restricted_rep(chain, gate.support);
        require(gate.unitary.rows() == rep.dim(), ErrorCode::DimensionMismatch, "gate does not match its support");
        double worst = 0.0;
        for (const auto& m : rep.matrices()) worst = std::max(worst, max_abs(gate.unitary * m - m * gate.unitary));
        require(worst <= tol::unitarity, ErrorCode::NotSymmetric, "gate flagged symmetric does not commute with the symmetry");
      }
      apply_operator(psi, chain.dims(), gate.support, gate.unitary);
    }
  }
  const double nrm = psi.norm();
  require(std::abs(nrm - 1.0) <= 1e-12, ErrorCode::InvariantViolation, "circuit changed the norm");
  return {state.chain, psi / nrm};
}

}  // namespace sptent
