#pragma once

// Parameter-plane work: L(lambda) sweeps under common random numbers, the
// five-point Laplacian, and Misiurewicz parameters built from the g-preimage
// tree of x_0 or z_0 on the invariant line Y.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "desboves/critical_locus.hpp"
#include "desboves/desboves_map.hpp"
#include "desboves/measures.hpp"
#include "desboves/parallel.hpp"
#include "desboves/preimage.hpp"

namespace desboves {

class FailedCondition : public Error {
 public:
  FailedCondition(int clause, const std::string& what) : Error(what), clause_(clause) {}
  int clause() const { return clause_; }

 private:
  int clause_;
};

class NotFound : public Error {
 public:
  NotFound(int depth, Real closest) : Error("no verified candidate within the radius"), depth_(depth), closest_(closest) {}
  int depth_searched() const { return depth_; }
  Real closest_miss() const { return closest_; }

 private:
  int depth_;
  Real closest_;
};

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

inline constexpr Real kDefaultRMin = 0.05;

struct Rect {
  Real re_min = 0, re_max = 0, im_min = 0, im_max = 0;
};

struct SweepSpec {
  Rect rect;
  Real step = 0.125;
  std::size_t samples = 4000;
  int depth = 20;
  std::uint64_t seed = 1;
  Real r_min = kDefaultRMin;

  int nx() const { return static_cast<int>(std::lround((rect.re_max - rect.re_min) / step)) + 1; }
  int ny() const { return static_cast<int>(std::lround((rect.im_max - rect.im_min) / step)) + 1; }
  Complex node(int i, int j) const { return {rect.re_min + i * step, rect.im_min + j * step}; }

  void validate() const {
    if (!(step > 0)) throw InvalidArgument("step must be positive");
    if (!(rect.re_max >= rect.re_min) || !(rect.im_max >= rect.im_min)) throw InvalidArgument("empty rectangle");
    if (samples < 1000) throw InvalidArgument("at least 1000 samples per node");
    if (depth < 2) throw InvalidArgument("depth must be at least 2");
  }
};

struct GridNode {
  Complex lambda{};
  bool masked = false;  // within r_min of 0
  bool done = false;
  LyapunovEstimate estimate;
};

struct LaplacianNode {
  bool defined = false;
  Real value = 0;
  Real std_error = 0;
  bool positive = false;  // value > 3 std_error
};

struct BifurcationGrid {
  SweepSpec spec;
  int nx = 0, ny = 0;
  std::vector<GridNode> nodes;  // index j * nx + i, i along Re, j along Im
  std::vector<LaplacianNode> laplacian;

  explicit BifurcationGrid(const SweepSpec& s) : spec(s), nx(s.nx()), ny(s.ny()) {
    spec.validate();
    nodes.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        GridNode& n = at(i, j);
        n.lambda = spec.node(i, j);
        n.masked = std::abs(n.lambda) < spec.r_min;
        n.estimate.lambda = n.lambda;
      }
    laplacian.assign(nodes.size(), LaplacianNode{});
  }

  GridNode& at(int i, int j) { return nodes[static_cast<std::size_t>(j) * nx + i]; }
  const GridNode& at(int i, int j) const { return nodes[static_cast<std::size_t>(j) * nx + i]; }
  const LaplacianNode& lap(int i, int j) const { return laplacian[static_cast<std::size_t>(j) * nx + i]; }
  bool complete() const {
    return std::all_of(nodes.begin(), nodes.end(), [](const GridNode& n) { return n.masked || n.done; });
  }
};

/// Five-point stencil; value_at(i, j) must be defined on the stencil.
inline Real five_point_laplacian(const std::function<Real(int, int)>& value_at, int i, int j, Real h) {
  return (value_at(i + 1, j) + value_at(i - 1, j) + value_at(i, j + 1) + value_at(i, j - 1) - 4.0 * value_at(i, j)) /
         (h * h);
}

inline LaplacianNode laplacian_from_batches(Real value, const std::array<Real, kBatches>& per_batch) {
  LaplacianNode n;
  n.defined = true;
  n.value = value;
  Real mean = 0;
  for (Real v : per_batch) mean += v / kBatches;
  Real ss = 0;
  for (Real v : per_batch) ss += (v - mean) * (v - mean);
  n.std_error = std::sqrt(ss / (kBatches - 1) / kBatches);
  n.positive = n.value > 3.0 * n.std_error;
  return n;
}

namespace detail {

/// Per-walk values at each parameter: walk i runs depth - 1 coupled steps
/// from a Fermat-curve start drawn from make_rng(seed, {i}); its value is the
/// fiber average of the log-Jacobian at the last point.
inline std::vector<std::vector<Real>> walk_values(const SweepSpec& spec, const std::vector<DesbovesMap>& maps,
                                                  unsigned threads) {
  std::vector<std::vector<Real>> v(maps.size(), std::vector<Real>(spec.samples));
  parallel_for(spec.samples, threads, [&](std::size_t i) {
    Rng rng = make_rng(spec.seed, {i});
    const ProjPoint start = random_fermat_point(rng);
    const auto ends = coupled_backward_orbits(maps, start, spec.depth - 1, rng);
    for (std::size_t k = 0; k < maps.size(); ++k) v[k][i] = fiber_average_log_jacobian(maps[k], ends[k]);
  });
  return v;
}

inline LyapunovEstimate estimate_from(const std::vector<Real>& values, Complex lambda) {
  LyapunovEstimate e = batch_mean_estimate(values, std::vector<Real>(values.size(), 1.0 / Real(values.size())));
  e.lambda = lambda;
  return e;
}

}  // namespace detail

/// L at one node. Every node uses the master seed unchanged (common random
/// numbers), and the final walk step is averaged over the whole fiber.
inline LyapunovEstimate sweep_node(const SweepSpec& spec, Complex lambda, unsigned threads = 1) {
  const std::vector<DesbovesMap> maps{DesbovesMap(lambda)};
  return detail::estimate_from(detail::walk_values(spec, maps, threads)[0], lambda);
}

struct StencilResult {
  LyapunovEstimate center;
  LaplacianNode laplacian;
};

/// L at `center` and Delta_h L from walks at the five stencil parameters
/// that follow the same inverse branches (coupled_backward_orbits). The
/// centre walks are those of sweep_node, so `center` equals its result.
/// Walks with a non-finite value at any stencil point are discarded from the
/// Laplacian.
inline StencilResult coupled_stencil(const SweepSpec& spec, Complex center, unsigned threads = 1) {
  const Real h = spec.step;
  const std::vector<DesbovesMap> maps{DesbovesMap(center), DesbovesMap(center + h), DesbovesMap(center - h),
                                      DesbovesMap(center + Complex(0, h)), DesbovesMap(center - Complex(0, h))};
  const auto v = detail::walk_values(spec, maps, threads);
  std::vector<Real> lap(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) lap[i] = (v[1][i] + v[2][i] + v[3][i] + v[4][i] - 4.0 * v[0][i]) / (h * h);
  StencilResult r;
  r.center = detail::estimate_from(v[0], center);
  const LyapunovEstimate l = detail::estimate_from(lap, center);
  r.laplacian = laplacian_from_batches(l.value, l.batch_means);
  return r;
}

namespace detail {

inline bool stencil_available(const BifurcationGrid& grid, int i, int j) {
  if (i < 1 || j < 1 || i + 1 >= grid.nx || j + 1 >= grid.ny) return false;
  return !(grid.at(i, j).masked || grid.at(i + 1, j).masked || grid.at(i - 1, j).masked ||
           grid.at(i, j + 1).masked || grid.at(i, j - 1).masked);
}

inline void run_node(BifurcationGrid& grid, int i, int j) {
  GridNode& n = grid.at(i, j);
  if (n.masked) return;
  LaplacianNode& lap = grid.laplacian[static_cast<std::size_t>(j) * grid.nx + i];
  if (stencil_available(grid, i, j)) {
    auto r = coupled_stencil(grid.spec, n.lambda);
    n.estimate = r.center;
    lap = r.laplacian;
  } else {
    n.estimate = sweep_node(grid.spec, n.lambda);
  }
  n.done = true;
}

}  // namespace detail

/// Computes row j (node estimates and, at interior nodes, the coupled
/// Laplacian). Rows are independent, which is what checkpointing relies on.
inline void sweep_row(BifurcationGrid& grid, int j, unsigned threads = 1) {
  parallel_for(static_cast<std::size_t>(grid.nx), threads,
               [&](std::size_t i) { detail::run_node(grid, static_cast<int>(i), j); });
}

/// Laplacian of an arbitrary field sampled on the grid nodes (for injected
/// test fields). Interior, unmasked stencils only.
inline std::vector<LaplacianNode> laplacian_of_field(const BifurcationGrid& grid,
                                                     const std::function<Real(Complex)>& field) {
  std::vector<LaplacianNode> out(grid.nodes.size());
  auto value = [&](int i, int j) { return field(grid.at(i, j).lambda); };
  for (int j = 1; j + 1 < grid.ny; ++j)
    for (int i = 1; i + 1 < grid.nx; ++i) {
      if (!detail::stencil_available(grid, i, j)) continue;
      LaplacianNode& n = out[static_cast<std::size_t>(j) * grid.nx + i];
      n.defined = true;
      n.value = five_point_laplacian(value, i, j, grid.spec.step);
    }
  return out;
}

/// Delta_h L from the node estimates alone. The standard error comes from
/// the 16 per-batch Laplacians; batches hold the same walk indices at every
/// node, so their spread includes the common-random-number correlation.
inline std::vector<LaplacianNode> discrete_laplacian(const BifurcationGrid& grid) {
  if (!grid.complete()) throw InvalidArgument("grid incomplete");
  std::vector<LaplacianNode> out(grid.nodes.size());
  const Real h = grid.spec.step;
  for (int j = 1; j + 1 < grid.ny; ++j)
    for (int i = 1; i + 1 < grid.nx; ++i) {
      if (!detail::stencil_available(grid, i, j)) continue;
      const Real value = five_point_laplacian([&](int a, int b) { return grid.at(a, b).estimate.value; }, i, j, h);
      std::array<Real, kBatches> per_batch;
      for (int b = 0; b < kBatches; ++b)
        per_batch[b] = five_point_laplacian([&](int a, int c) { return grid.at(a, c).estimate.batch_means[b]; }, i, j, h);
      out[static_cast<std::size_t>(j) * grid.nx + i] = laplacian_from_batches(value, per_batch);
    }
  return out;
}

/// Full sweep. Node estimates use common random numbers (one master seed for
/// every node); interior Laplacians come from branch-coupled stencils.
inline BifurcationGrid lyapunov_sweep(const SweepSpec& spec, unsigned threads = 1) {
  BifurcationGrid grid(spec);
  parallel_for(grid.nodes.size(), threads, [&](std::size_t k) {
    detail::run_node(grid, static_cast<int>(k % grid.nx), static_cast<int>(k / grid.nx));
  });
  return grid;
}

// ---------------------------------------------------------------------------
// Misiurewicz parameters
// ---------------------------------------------------------------------------

enum class Target { X0, Z0 };

inline const char* to_string(Target t) { return t == Target::X0 ? "x0" : "z0"; }

inline ProjPoint target_point(Target t) { return t == Target::X0 ? x0() : z0(); }
inline ExtComplex target_w(Target t) { return t == Target::X0 ? ExtComplex::finite(0) : ExtComplex::infinity(); }

/// Modulus of the transverse multiplier at the target, minus 1.
inline Real repelling_margin(Target t, Complex lambda) {
  return std::abs(t == Target::X0 ? 1.0 + lambda : 1.0 - lambda) - 1.0;
}

struct MisiurewiczCandidate {
  Complex lambda{};
  ExtComplex critical_w;
  int n = 1;
  Target target = Target::X0;
  Real cubic_residual = 0;
  Real landing_residual = 0;
  Real repelling_margin = 0;
  Real transversality = 0;
};

struct MisiurewiczReport {
  std::array<bool, 4> passed{};
  Real cubic_residual = 0;
  Real landing_residual = 0;
  std::array<Complex, 2> eigenvalues{};
  Real transversality = 0;

  bool all() const { return passed[0] && passed[1] && passed[2] && passed[3]; }
  /// 1-based index of the first failed clause, 0 if none.
  int first_failure() const {
    for (int k = 0; k < 4; ++k)
      if (!passed[k]) return k + 1;
    return 0;
  }
};

namespace detail {

inline Triple critical_point_lift(const ExtComplex& w) {
  const auto [x, z] = w.homogeneous();
  return {x, Complex(0), z};
}

/// Position of a point of Y seen from the target: w near x_0, 1/w near z_0.
inline Complex position_near(Target t, const ExtComplex& w) {
  const auto [x, z] = w.homogeneous();
  return t == Target::X0 ? x / z : z / x;
}

/// The critical trace point of f_lambda on Y nearest to `seed`.
inline ExtComplex critical_trace_near(Complex lambda, const ExtComplex& seed) {
  const auto trace = critical_cubic_on_Y(lambda);
  ExtComplex best = trace.w[0];
  for (const auto& w : trace.w)
    if (sphere_distance(w, seed) < sphere_distance(best, seed)) best = w;
  return best;
}

inline ExtComplex iterate_g(ExtComplex w, int n) {
  for (int k = 0; k < n; ++k) w = lattes_g(w);
  return w;
}

}  // namespace detail

inline constexpr Real kTransversalityStep = 1e-5;

/// Checks, in order: (i) [w:0:1] lies on the critical cubic of f_lambda;
/// (ii) n iterates of f_lambda take it to the target; (iii) the target is a
/// repelling fixed point; (iv) the critical orbit moves with lambda.
inline MisiurewiczReport verify_misiurewicz(const MisiurewiczCandidate& c, Real tol = 1e-9) {
  MisiurewiczReport r;
  const Complex lambda = c.lambda;
  if (lambda == Complex(0)) throw DegenerateLambda();
  const Triple lift = detail::critical_point_lift(c.critical_w);
  const Complex x3 = lift[0] * lift[0] * lift[0];
  const Complex z3 = lift[2] * lift[2] * lift[2];
  r.cubic_residual =
      std::abs((1.0 + lambda) * z3 + (lambda - 1.0) * x3) / std::max(std::abs(1.0 + lambda), std::abs(lambda - 1.0));
  r.passed[0] = r.cubic_residual < tol;

  const DesbovesMap f(lambda);
  const ProjPoint N = target_point(c.target);
  r.landing_residual = chordal_distance(f.iterate(ProjPoint::normalize(lift), c.n), N);
  r.passed[1] = r.landing_residual < tol;

  const Mat2 D = f.multiplier_matrix(N);
  r.eigenvalues = eigenvalues(D);
  r.passed[2] = std::abs(r.eigenvalues[0]) > 1.0 && std::abs(r.eigenvalues[1]) > 1.0;

  const Real h = kTransversalityStep;
  auto pos = [&](Complex l) {
    return detail::position_near(c.target, detail::iterate_g(detail::critical_trace_near(l, c.critical_w), c.n));
  };
  r.transversality = std::abs((pos(lambda + h) - pos(lambda - h)) / (2.0 * h));
  r.passed[3] = std::isfinite(r.transversality) && r.transversality > 10.0 * tol;
  return r;
}

/// Throws FailedCondition naming the first failed clause.
inline MisiurewiczReport require_misiurewicz(const MisiurewiczCandidate& c, Real tol = 1e-9) {
  const MisiurewiczReport r = verify_misiurewicz(c, tol);
  static const char* names[] = {"", "(i) critical point off the cubic", "(ii) orbit misses the target",
                                "(iii) target not repelling", "(iv) orbit does not move with lambda"};
  if (const int k = r.first_failure()) throw FailedCondition(k, names[k]);
  return r;
}

/// Iterated g-preimages of w(target). Level n holds the nodes first reaching
/// the target after exactly n steps, with multiplicity; the target itself is
/// level 0. The full preimage g^{-n}(target) is the union of levels 0..n.
class PreimageTree {
 public:
  struct Node {
    ExtComplex w;
    int multiplicity = 1;
  };

  explicit PreimageTree(Target t) : target_(t) { levels_.push_back({{target_w(t), 1}}); }

  Target target() const { return target_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }

  const std::vector<Node>& level(int n) {
    while (depth() < n) grow();
    return levels_[n];
  }

  /// Multiplicity-weighted size of g^{-n}(target); 4^n.
  long long full_preimage_count(int n) {
    long long total = 0;
    for (int k = 0; k <= n; ++k)
      for (const auto& node : level(k)) total += node.multiplicity;
    return total;
  }

 private:
  void grow() {
    const auto& last = levels_.back();
    std::vector<Node> next;
    next.reserve(last.size() * 4);
    const bool from_root = levels_.size() == 1;
    for (const auto& parent : last)
      for (const auto& [w, m] : g_preimages(parent.w)) {
        // The target is fixed by g: drop its self-preimage.
        if (from_root && sphere_distance(w, parent.w) < 1e-12) continue;
        next.push_back({w, parent.multiplicity * m});
      }
    levels_.push_back(std::move(next));
  }

  Target target_;
  std::vector<std::vector<Node>> levels_;
};

/// Candidate for a tree node, or nullopt when the node gives no usable
/// parameter (lambda = 0, a pole, or a non-repelling target).
inline std::optional<MisiurewiczCandidate> candidate_from_node(Target t, const ExtComplex& w, int n) {
  Complex lambda;
  try {
    lambda = lambda_for_critical_w(w);
  } catch (const PoleInput&) {
    return std::nullopt;
  } catch (const DegenerateLambda&) {
    return std::nullopt;
  }
  if (std::abs(lambda) < 1e-12 || repelling_margin(t, lambda) <= 0) return std::nullopt;
  MisiurewiczCandidate c;
  c.lambda = lambda;
  c.critical_w = w;
  c.n = n;
  c.target = t;
  c.repelling_margin = repelling_margin(t, lambda);
  return c;
}

inline void record_verification(MisiurewiczCandidate& c, const MisiurewiczReport& r) {
  c.cubic_residual = r.cubic_residual;
  c.landing_residual = r.landing_residual;
  c.transversality = r.transversality;
}

namespace detail {

/// Merges candidates whose lambdas agree to `tol`, keeping minimal n.
inline std::vector<MisiurewiczCandidate> merge_duplicates(std::vector<MisiurewiczCandidate> cands, Real tol) {
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
    return a.n < b.n;
  });
  std::vector<MisiurewiczCandidate> out;
  std::vector<bool> taken(cands.size(), false);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (taken[i]) continue;
    MisiurewiczCandidate best = cands[i];
    for (std::size_t k = i + 1; k < cands.size() && cands[k].lambda.real() - cands[i].lambda.real() <= tol; ++k) {
      if (taken[k] || std::abs(cands[k].lambda - cands[i].lambda) > tol) continue;
      taken[k] = true;
      if (cands[k].n < best.n) best = cands[k];
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace detail

inline constexpr int kMaxTreeDepth = 12;

/// Finder with trees cached per target.
class MisiurewiczFinder {
 public:
  MisiurewiczFinder() : trees_{PreimageTree(Target::X0), PreimageTree(Target::Z0)} {}

  PreimageTree& tree(Target t) { return trees_[static_cast<int>(t)]; }

  /// Verified candidates up to max_depth, duplicates merged.
  std::vector<MisiurewiczCandidate> candidates(Target t, int max_depth, Real tol = 1e-9) {
    check_depth(max_depth);
    std::vector<MisiurewiczCandidate> out;
    for (int n = 1; n <= max_depth; ++n)
      for (const auto& node : tree(t).level(n)) {
        auto c = candidate_from_node(t, node.w, n);
        if (!c) continue;
        const auto r = verify_misiurewicz(*c, tol);
        record_verification(*c, r);
        if (r.passed[0] && r.passed[1]) out.push_back(*c);
      }
    return detail::merge_duplicates(std::move(out), 1e-10);
  }

  struct ProbeResult {
    std::optional<MisiurewiczCandidate> found;
    int depth_searched = 0;
    Real closest_miss = std::numeric_limits<Real>::infinity();
  };

  /// Nearest fully verified candidate within `radius` of lambda0 at the
  /// shallowest depth where one exists.
  ProbeResult density_probe(Complex lambda0, Real radius, int max_depth, Real tol = 1e-9) {
    if (lambda0 == Complex(0)) throw DegenerateLambda();
    check_depth(max_depth);
    ProbeResult res;
    for (int n = 1; n <= max_depth; ++n) {
      res.depth_searched = n;
      std::vector<MisiurewiczCandidate> hits;
      for (Target t : {Target::X0, Target::Z0})
        for (const auto& node : tree(t).level(n)) {
          auto c = candidate_from_node(t, node.w, n);
          if (!c) continue;
          const Real d = std::abs(c->lambda - lambda0);
          if (d >= radius) {
            res.closest_miss = std::min(res.closest_miss, d);
            continue;
          }
          hits.push_back(*c);
        }
      std::sort(hits.begin(), hits.end(),
                [&](const auto& a, const auto& b) { return std::abs(a.lambda - lambda0) < std::abs(b.lambda - lambda0); });
      for (auto& c : hits) {
        const auto r = verify_misiurewicz(c, tol);
        record_verification(c, r);
        if (r.all()) {
          res.found = c;
          return res;
        }
        res.closest_miss = std::min(res.closest_miss, std::abs(c.lambda - lambda0));
      }
    }
    return res;
  }

 private:
  static void check_depth(int d) {
    if (d < 1 || d > kMaxTreeDepth) throw InvalidArgument("depth must be between 1 and 12");
  }
  std::array<PreimageTree, 2> trees_;
};

inline std::vector<MisiurewiczCandidate> misiurewicz_candidates(Target t, int max_depth, Real tol = 1e-9) {
  MisiurewiczFinder finder;
  return finder.candidates(t, max_depth, tol);
}

/// Throwing form of the probe.
inline MisiurewiczCandidate density_probe(Complex lambda0, Real radius, int max_depth, Real tol = 1e-9) {
  MisiurewiczFinder finder;
  auto r = finder.density_probe(lambda0, radius, max_depth, tol);
  if (!r.found) throw NotFound(r.depth_searched, r.closest_miss);
  return *r.found;
}

}  // namespace desboves
