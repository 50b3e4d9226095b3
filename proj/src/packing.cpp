#include "metent/packing.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cfloat>
#include <cmath>
#include <limits>

#include "metent/errors.hpp"
#include "metent/kernels.hpp"
#include "metent/random.hpp"

namespace metent::packing {

std::size_t IntervalSystem::cell_count() const {
  std::size_t c = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (c > std::numeric_limits<std::size_t>::max() / k) return std::numeric_limits<std::size_t>::max();
    c *= k;
  }
  return c;
}

double eta_upper_limit(std::size_t d) {
  const double t = 2.0 + std::sqrt(static_cast<double>(d) - 1.0);
  return 4.0 / (t * t);
}

namespace {

// k * sqrt(eta) * (2 + sqrt(d-1)) <= 2, squared out so that only the single
// irrational sqrt(d-1) remains, then isolated and squared again.
bool fits(const Rational& eta, std::size_t d, std::size_t k) {
  const Rational kk = Rational(BigInt(k) * BigInt(k));
  const Rational a = Rational(4) - kk * eta * Rational(static_cast<long>(d) + 3);
  if (d == 1) return a >= 0;
  const Rational b = Rational(4) * kk * eta;
  return a >= 0 && b * b * Rational(static_cast<long>(d) - 1) <= a * a;
}

}  // namespace

std::size_t interval_count(const Rational& eta, std::size_t d) {
  if (d == 0 || d > kMaxDim) throw ParameterError("interval system: dimension must be in [1, 8]");
  if (eta <= 0) throw ParameterError("interval system: eta must be positive");
  if (!fits(eta, d, 1)) return 0;
  const double approx = 2.0 / (std::sqrt(static_cast<double>(eta)) * (2.0 + std::sqrt(static_cast<double>(d) - 1.0)));
  if (!(approx < 1e15)) throw ParameterError("interval system: eta too small");
  std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(approx));
  while (k > 1 && !fits(eta, d, k)) --k;
  while (fits(eta, d, k + 1)) ++k;
  return k;
}

IntervalSystem build_interval_system(const Rational& eta, std::size_t d) {
  const std::size_t k = interval_count(eta, d);
  if (k == 0)
    throw ParameterError("interval system: eta must lie in (0, 4 (2 + sqrt(d-1))^-2] = (0, " +
                         std::to_string(eta_upper_limit(d)) + "]");
  if (k > 1'000'000) throw ParameterError("interval system: more than 10^6 intervals");

  IntervalSystem sys;
  sys.eta_exact = eta;
  sys.eta = static_cast<double>(eta);
  sys.d = d;
  sys.k = k;
  const double s = std::sqrt(sys.eta);
  const double gap = std::sqrt(sys.eta * static_cast<double>(d - 1)) / 2.0;
  const double step = s + gap;
  sys.intervals.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double u = static_cast<double>(i) * step;
    sys.intervals.emplace_back(u, u + s);
  }
  double& last = sys.intervals.back().second;
  if (last > 1.0) {
    if (last > 1.0 + 4.0 * DBL_EPSILON)
      throw InvariantViolation("interval system spans past 1: " + std::to_string(last));
    last = 1.0;
  }
  return sys;
}

IntervalSystem build_interval_system(double eta, std::size_t d) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("interval system: eta must be positive");
  return build_interval_system(exact_from_double(eta), d);
}

CellIndex cell_from_flat(const IntervalSystem& sys, std::size_t flat) {
  CellIndex c{std::vector<std::size_t>(sys.d)};
  for (std::size_t j = sys.d; j-- > 0;) {
    c.idx[j] = flat % sys.k;
    flat /= sys.k;
  }
  return c;
}

std::size_t flat_from_cell(const IntervalSystem& sys, const CellIndex& cell) {
  std::size_t f = 0;
  for (std::size_t j = 0; j < sys.d; ++j) f = f * sys.k + cell.idx[j];
  return f;
}

bool cell_contains(const IntervalSystem& sys, const CellIndex& cell, const double* x) {
  for (std::size_t j = 0; j < sys.d; ++j) {
    const auto [u, v] = sys.intervals[cell.idx[j]];
    if (x[j] < u || x[j] > v) return false;
  }
  return true;
}

ConvexFunction base_quadratic(std::size_t d) { return ConvexFunction::separable_quadratic(Rect::unit(d)); }

ConvexFunction perturbation_hS(const IntervalSystem& sys, const CellIndex& cell) {
  if (cell.idx.size() != sys.d) throw ParameterError("perturbation_hS: cell has wrong dimension");
  const double inv_d = 1.0 / static_cast<double>(sys.d);
  std::vector<double> coeffs(sys.d);
  double intercept = 0.0;
  for (std::size_t j = 0; j < sys.d; ++j) {
    if (cell.idx[j] >= sys.k) throw ParameterError("perturbation_hS: cell index out of range");
    const auto [u, v] = sys.intervals[cell.idx[j]];
    coeffs[j] = (u + v) * inv_d;
    intercept -= u * v * inv_d;
  }
  return ConvexFunction::affine(Rect::unit(sys.d), std::move(coeffs), intercept);
}

BumpPropertyReport check_bump_properties(const IntervalSystem& sys, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = sys.d;
  const std::size_t ncells = sys.cell_count();
  const ConvexFunction f0 = base_quadratic(d);
  Rng rng(seed);
  BumpPropertyReport rep;
  rep.samples = samples;
  rep.allowance = 64.0 * DBL_EPSILON;
  const double tol = rep.allowance;

  std::array<double, kMaxDim> x{}, y{}, z{};
  const std::vector<double> ones(d, 1.0);
  auto point_in = [&](const CellIndex& c, double* out) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto [u, v] = sys.intervals[c.idx[j]];
      out[j] = u + (v - u) * rng.open01();
    }
  };

  for (std::size_t s = 0; s < samples; ++s) {
    const CellIndex cell = cell_from_flat(sys, static_cast<std::size_t>(rng.bits() % ncells));
    const ConvexFunction h = perturbation_hS(sys, cell);

    // Affinity along a random chord.
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.uniform01();
      y[j] = rng.uniform01();
    }
    const double t = rng.uniform01();
    for (std::size_t j = 0; j < d; ++j) z[j] = t * x[j] + (1.0 - t) * y[j];
    const double chord = t * h.eval_unchecked(x.data()) + (1.0 - t) * h.eval_unchecked(y.data());
    if (std::abs(h.eval_unchecked(z.data()) - chord) > tol) ++rep.affinity_violations;

    // Bounded by the value at the all-ones corner, which is at most 1.
    const double corner = h.eval_unchecked(ones.data());
    if (h.eval_unchecked(x.data()) > corner + tol || corner > 1.0 + tol) ++rep.bound_violations;

    point_in(cell, x.data());
    if (h.eval_unchecked(x.data()) < f0.eval_unchecked(x.data()) - tol) ++rep.own_cell_violations;

    if (ncells > 1) {
      std::size_t other = static_cast<std::size_t>(rng.bits() % (ncells - 1));
      if (other >= flat_from_cell(sys, cell)) ++other;
      point_in(cell_from_flat(sys, other), x.data());
      if (h.eval_unchecked(x.data()) > f0.eval_unchecked(x.data()) + tol) ++rep.other_cell_violations;
    }
  }
  return rep;
}

double zeta_exact(double eta, std::size_t d) {
  if (!(eta > 0.0)) throw ParameterError("zeta_exact: eta must be positive");
  return std::pow(eta, static_cast<double>(d) / 2.0 + 1.0) * kGamma;
}

double packing_constant(std::size_t d) {
  return kGamma / 4.0 * std::pow(2.0 + std::sqrt(static_cast<double>(d) - 1.0), -static_cast<double>(d));
}

void BinaryWord::set(std::size_t i, bool v) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (v)
    blocks_[i / 64] |= mask;
  else
    blocks_[i / 64] &= ~mask;
}

std::size_t BinaryWord::popcount() const {
  std::size_t c = 0;
  for (auto b : blocks_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

std::size_t BinaryWord::hamming(const BinaryWord& other) const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) c += static_cast<std::size_t>(std::popcount(blocks_[i] ^ other.blocks_[i]));
  return c;
}

std::string BinaryWord::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = std::max<std::size_t>(1, (n_ + 3) / 4);
  std::string out;
  out.reserve(digits);
  for (std::size_t p = digits; p-- > 0;) {
    unsigned nib = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = 4 * p + b;
      if (i < n_ && bit(i)) nib |= 1U << b;
    }
    out.push_back(kDigits[nib]);
  }
  return out;
}

BinaryWord BinaryWord::from_hex(const std::string& hex, std::size_t n) {
  BinaryWord w(n);
  const std::size_t digits = hex.size();
  for (std::size_t p = 0; p < digits; ++p) {
    const char c = hex[digits - 1 - p];
    unsigned nib;
    if (c >= '0' && c <= '9')
      nib = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f')
      nib = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      nib = static_cast<unsigned>(c - 'A' + 10);
    else
      throw ParameterError("bad hex digit in code word");
    for (std::size_t b = 0; b < 4; ++b) {
      if (!((nib >> b) & 1U)) continue;
      const std::size_t i = 4 * p + b;
      if (i >= n) throw ParameterError("code word has bits beyond its length");
      w.set(i, true);
    }
  }
  return w;
}

std::size_t exhaustive_min_distance(const BinaryCode& code) {
  std::size_t best = code.n + 1;
  for (std::size_t i = 0; i < code.words.size(); ++i)
    for (std::size_t j = i + 1; j < code.words.size(); ++j) best = std::min(best, code.words[i].hamming(code.words[j]));
  return best;
}

std::size_t vg_target(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::exp(static_cast<double>(n) / 8.0)));
}

std::size_t vg_min_distance(std::size_t n) { return (n + 3) / 4; }

VgResult vg_code(std::size_t n, std::size_t min_dist, std::size_t target, std::uint64_t seed, std::size_t budget) {
  if (n == 0) throw ParameterError("vg_code: n must be positive");
  if (min_dist == 0 || min_dist > n) throw ParameterError("vg_code: need 0 < min_dist <= n");
  if (target == 0) throw ParameterError("vg_code: target must be >= 1");
  VgResult r;
  r.code.n = n;
  r.code.min_distance = min_dist;
  r.target = target;
  r.seed = seed;
  r.budget = budget;
  Rng rng(seed);
  const std::size_t tail = n % 64;
  const std::uint64_t tail_mask = tail == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;

  while (r.code.words.size() < target && r.attempts < budget) {
    ++r.attempts;
    BinaryWord w(n);
    for (auto& b : w.blocks()) b = rng.bits();
    w.blocks().back() &= tail_mask;
    const bool ok = std::all_of(r.code.words.begin(), r.code.words.end(),
                                [&](const BinaryWord& v) { return v.hamming(w) >= min_dist; });
    if (ok) r.code.words.push_back(std::move(w));
  }
  r.shortfall = r.code.words.size() < target;
  r.observed_min_distance = exhaustive_min_distance(r.code);
  if (r.observed_min_distance < min_dist) throw InvariantViolation("vg_code: admitted words closer than min_dist");
  return r;
}

ConvexFunction packing_member(const IntervalSystem& sys, const BinaryWord& theta) {
  if (theta.size() != sys.cell_count()) throw ParameterError("packing_member: word length differs from cell count");
  std::vector<form::Affine> pieces;
  for (std::size_t s = 0; s < theta.size(); ++s) {
    if (!theta.bit(s)) continue;
    const auto h = perturbation_hS(sys, cell_from_flat(sys, s));
    pieces.push_back(std::get<form::Affine>(h.form()));
  }
  if (pieces.empty()) return base_quadratic(sys.d);
  return ConvexFunction::max_with({ConvexFunction::max_affine(Rect::unit(sys.d), std::move(pieces)), base_quadratic(sys.d)});
}

PackingFamily assemble_packing_family(IntervalSystem sys, BinaryCode code) {
  if (code.n != sys.cell_count()) throw ParameterError("assemble_packing_family: code length differs from cell count");
  PackingFamily fam;
  fam.functions.reserve(code.words.size());
  for (const auto& w : code.words) fam.functions.push_back(packing_member(sys, w));
  fam.zeta = zeta_exact(sys.eta, sys.d);
  fam.guaranteed_sep = fam.zeta * static_cast<double>(code.min_distance);
  fam.c1 = packing_constant(sys.d);
  fam.epsilon = fam.c1 * sys.eta;
  fam.code_target = code.words.size();
  fam.system = std::move(sys);
  fam.code = std::move(code);
  return fam;
}

PackingFamily build_packing_family(const Rational& eta, std::size_t d, std::uint64_t seed, std::size_t vg_budget) {
  IntervalSystem sys = build_interval_system(eta, d);
  const std::size_t n = sys.cell_count();
  if (n > kMaxCells)
    throw ParameterError("build_packing_family: k^d = " + std::to_string(n) + " exceeds the cap of 64 cells");
  VgResult vg = vg_code(n, vg_min_distance(n), vg_target(n), seed, vg_budget);
  PackingFamily fam = assemble_packing_family(std::move(sys), std::move(vg.code));
  fam.seed = seed;
  fam.code_target = vg.target;
  fam.code_shortfall = vg.shortfall;
  return fam;
}

std::size_t aligned_resolution(const IntervalSystem& sys, std::size_t min_n, std::size_t max_n) {
  auto on_lattice = [](double t, std::size_t n) {
    const double s = t * static_cast<double>(n);
    return std::abs(s - std::round(s)) < 1e-7;
  };
  for (std::size_t n = std::max<std::size_t>(min_n, 2); n <= max_n; ++n) {
    bool ok = true;
    for (const auto& [u, v] : sys.intervals) {
      if (!on_lattice(u, n) || !on_lattice(v, n)) {
        ok = false;
        break;
      }
    }
    if (ok) return n;
  }
  return std::max<std::size_t>(min_n, 2);
}

GridSpec default_certificate_grid(const IntervalSystem& sys) {
  static constexpr std::array<std::size_t, kMaxDim + 1> kMinN{0, 2000, 200, 48, 16, 8, 6, 4, 4};
  const std::size_t min_n = kMinN[sys.d];
  std::size_t max_n = 4 * min_n;
  while (std::pow(static_cast<double>(max_n), static_cast<double>(sys.d)) > static_cast<double>(kMaxGridNodes) / 2.0 &&
         max_n > min_n)
    --max_n;
  return GridSpec{aligned_resolution(sys, min_n, max_n), QuadratureRule::midpoint};
}

namespace {

// Grid nodes with f0 and every bump that rises above f0 there. g_theta at a
// node is f0 raised to the largest listed bump whose cell is on in theta.
struct SparseBumps {
  std::vector<double> weight;
  std::vector<double> base;
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> cell;
  std::vector<double> value;

  SparseBumps(const IntervalSystem& sys, GridSpec spec) {
    const TensorGrid grid(Rect::unit(sys.d), spec);
    const std::size_t ncells = sys.cell_count();
    std::vector<ConvexFunction> bumps;
    bumps.reserve(ncells);
    for (std::size_t s = 0; s < ncells; ++s) bumps.push_back(perturbation_hS(sys, cell_from_flat(sys, s)));
    const ConvexFunction f0 = base_quadratic(sys.d);

    weight.resize(grid.size());
    base.resize(grid.size());
    offset.reserve(grid.size() + 1);
    offset.push_back(0);
    std::array<double, kMaxDim> x{};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      weight[k] = grid.node(k, x.data());
      base[k] = f0.eval_unchecked(x.data());
      for (std::size_t s = 0; s < ncells; ++s) {
        const double h = bumps[s].eval_unchecked(x.data());
        if (h > base[k]) {
          cell.push_back(static_cast<std::uint32_t>(s));
          value.push_back(h);
        }
      }
      offset.push_back(cell.size());
    }
  }

  double member(const BinaryWord& theta, std::size_t k) const {
    double m = base[k];
    for (std::size_t e = offset[k]; e < offset[k + 1]; ++e)
      if (theta.bit(cell[e])) m = std::max(m, value[e]);
    return m;
  }

  double l1(const BinaryWord& a, const BinaryWord& b) const {
    kernels::CompensatedSum acc;
    for (std::size_t k = 0; k < weight.size(); ++k) acc.add(weight[k] * std::abs(member(a, k) - member(b, k)));
    return acc.value();
  }
};

}  // namespace

PackingCertificate packing_certificate(const PackingFamily& family, GridSpec grid) {
  if (family.functions.empty()) throw ParameterError("packing_certificate: empty family");
  PackingCertificate cert;
  cert.grid = grid;
  cert.guaranteed_sep = family.guaranteed_sep;
  const auto& words = family.code.words;
  const std::size_t m = words.size();
  if (m < 2) {
    cert.min_observed = std::numeric_limits<double>::infinity();
    return cert;
  }

  const SparseBumps bumps(family.system, grid);
  for (const auto& w : words)
    for (std::size_t k = 0; k < bumps.weight.size(); ++k)
      if (std::abs(bumps.member(w, k)) > 1.0) ++cert.member_bound_violations;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  std::vector<double> l1(pairs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs.size()); ++p) {
    const auto [i, j] = pairs[static_cast<std::size_t>(p)];
    l1[static_cast<std::size_t>(p)] = bumps.l1(words[i], words[j]);
  }

  const std::size_t argmin = static_cast<std::size_t>(std::min_element(l1.begin(), l1.end()) - l1.begin());
  cert.min_observed = l1[argmin];
  {
    const GridSpec fine{2 * grid.n, grid.rule};
    try {
      checked_node_count(fine.n, family.system.d);
      const SparseBumps refined(family.system, fine);
      const auto [i, j] = pairs[argmin];
      cert.quadrature_error = std::abs(refined.l1(words[i], words[j]) - l1[argmin]);
    } catch (const ParameterError&) {
      const SparseBumps coarse(family.system, GridSpec{std::max<std::size_t>(2, grid.n / 2), grid.rule});
      const auto [i, j] = pairs[argmin];
      cert.quadrature_error = std::abs(coarse.l1(words[i], words[j]) - l1[argmin]);
    }
  }

  cert.rows.reserve(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    CertificateRow row;
    row.i = i;
    row.j = j;
    row.hamming = words[i].hamming(words[j]);
    row.l1 = l1[p];
    row.bound = family.zeta * static_cast<double>(row.hamming);
    row.margin = row.l1 - row.bound;
    row.pass = row.l1 >= row.bound - cert.quadrature_error;
    cert.all_pass = cert.all_pass && row.pass;
    cert.rows.push_back(row);
  }
  cert.all_pass = cert.all_pass && cert.member_bound_violations == 0;
  return cert;
}

std::vector<CurvePoint> lower_bound_curve(std::size_t d, const std::vector<Rational>& etas) {
  std::vector<CurvePoint> out;
  out.reserve(etas.size());
  const double c1 = packing_constant(d);
  for (const auto& eta : etas) {
    const std::size_t k = interval_count(eta, d);
    if (k == 0) throw ParameterError("lower_bound_curve: eta " + to_string(eta) + " outside the admissible range");
    CurvePoint pt;
    pt.eta = eta;
    pt.k = k;
    pt.epsilon = c1 * static_cast<double>(eta);
    pt.log_m = std::pow(static_cast<double>(k), static_cast<double>(d)) / 8.0;
    out.push_back(pt);
  }
  return out;
}

double loglog_slope(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 2) throw ParameterError("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& pt : curve) {
    mx += -std::log(pt.epsilon);
    my += std::log(pt.log_m);
  }
  mx /= static_cast<double>(curve.size());
  my /= static_cast<double>(curve.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& pt : curve) {
    const double dx = -std::log(pt.epsilon) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(pt.log_m) - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("loglog_slope: epsilon values must not all coincide");
  return sxy / sxx;
}

double scaled_spread(const std::vector<CurvePoint>& curve, std::size_t d) {
  if (curve.empty()) throw ParameterError("scaled_spread: empty curve");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& pt : curve) {
    const double v = pt.log_m * std::pow(pt.epsilon, static_cast<double>(d) / 2.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return (hi - lo) / hi;
}

}  // namespace metent::packing
