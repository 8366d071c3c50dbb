#include "odoforge/measures.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace odoforge {

namespace {

int xbar(const ToeplitzValue& v) { return v.exact ? v.symbol : SampleSpace::kProvisional; }

// Grows the ball sphere by sphere and stops once every coset is reached, so
// the radius cap only bites when the sample is still incomplete.
std::vector<int> reached_states(const ToeplitzSpec& spec, int radius, const BallCaps& caps,
                                std::vector<Word>* witnesses) {
  const auto& top = spec.top();
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(top.index()), 0);
  for (int r = 0; r <= radius && static_cast<int>(order.size()) < top.index(); ++r) {
    for (auto& g : sphere_enumerate(spec.group(), r, caps)) {
      const int s = top.coset_of(g);
      if (seen[static_cast<std::size_t>(s)]) continue;
      seen[static_cast<std::size_t>(s)] = 1;
      order.push_back(s);
      if (witnesses) witnesses->push_back(std::move(g));
    }
  }
  return order;
}

// point -> cell index; -1 when uncovered
std::vector<int> labels(const SampleSpace& space, const Partition& p) {
  std::vector<int> lab(static_cast<std::size_t>(space.size()), -1);
  for (std::size_t c = 0; c < p.size(); ++c)
    for (int x : p[c]) lab[static_cast<std::size_t>(x)] = static_cast<int>(c);
  return lab;
}

bool subset(const SymbolicClopen& a, const SymbolicClopen& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Partition flatten(const LabeledPartition& p) { return p.cells(); }

}  // namespace

SampleSpace sample_space(std::shared_ptr<const ToeplitzSpec> spec, std::vector<Word> window, int sample_radius,
                         const BallCaps& caps) {
  if (sample_radius < 0) throw Error(ErrorKind::SemanticError, "negative sample radius");
  for (const auto& w : window) require_same_group(w.group(), spec->group());
  SampleSpace s;
  s.spec_ = spec;
  s.window_ = std::move(window);
  s.radius_ = sample_radius;
  s.state_ = reached_states(*spec, sample_radius, caps, &s.witness_);

  const auto& top = spec->top();
  s.point_of_state_.assign(static_cast<std::size_t>(top.index()), -1);
  std::set<std::vector<int>> exact_patterns;
  for (std::size_t p = 0; p < s.state_.size(); ++p) {
    s.point_of_state_[static_cast<std::size_t>(s.state_[p])] = static_cast<int>(p);
    std::vector<int> pat;
    pat.reserve(s.window_.size());
    for (const auto& w : s.window_) pat.push_back(xbar(spec->evaluate_state(top.table().act(w, s.state_[p]))));
    if (std::find(pat.begin(), pat.end(), SampleSpace::kProvisional) != pat.end())
      ++s.provisional_;
    else
      exact_patterns.insert(pat);
    s.pattern_.push_back(std::move(pat));
  }
  s.distinct_ = exact_patterns.size();

  if (s.size() == top.index()) {
    s.stable_ = true;
  } else {
    try {
      s.stable_ = reached_states(*spec, 2 * sample_radius, caps, nullptr).size() == s.state_.size();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RadiusCap) throw;
      s.stable_ = false;
    }
  }
  return s;
}

std::optional<int> SampleSpace::try_translate(const Word& h, int p) const {
  const int t = spec_->top().table().act(h, state(p));
  const int q = point_of_state_[static_cast<std::size_t>(t)];
  if (q < 0) return std::nullopt;
  return q;
}

int SampleSpace::translate(const Word& h, int p) const {
  if (auto q = try_translate(h, p)) return *q;
  throw Error(ErrorKind::TranslateEscapesSpace,
              h.to_string() + " moves the point of " + witness(p).to_string() + " outside the sample");
}

int SampleSpace::coset(int p, int n) const { return spec_->chain().level(n).coset_of(witness(p)); }

int SampleSpace::symbol_at(int p, const Word& w) const {
  return xbar(spec_->evaluate_state(spec_->top().table().act(w, state(p))));
}

SymbolicClopen clopen_union(const SymbolicClopen& a, const SymbolicClopen& b) {
  SymbolicClopen out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

SymbolicClopen clopen_intersection(const SymbolicClopen& a, const SymbolicClopen& b) {
  SymbolicClopen out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

SymbolicClopen clopen_complement(const SampleSpace& space, const SymbolicClopen& a) {
  SymbolicClopen out;
  auto it = a.begin();
  for (int p = 0; p < space.size(); ++p) {
    if (it != a.end() && *it == p)
      ++it;
    else
      out.push_back(p);
  }
  return out;
}

SymbolicClopen clopen_translate(const SampleSpace& space, const Word& h, const SymbolicClopen& a) {
  SymbolicClopen out;
  out.reserve(a.size());
  for (int p : a) out.push_back(space.translate(h, p));
  std::sort(out.begin(), out.end());
  return out;
}

bool is_partition(const SampleSpace& space, const Partition& p) {
  std::vector<int> hits(static_cast<std::size_t>(space.size()), 0);
  for (const auto& c : p) {
    if (c.empty()) return false;
    for (int x : c) ++hits[static_cast<std::size_t>(x)];
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

bool refines(const SampleSpace& space, const Partition& fine, const Partition& coarse) {
  const auto lab = labels(space, coarse);
  for (const auto& c : fine) {
    if (c.empty()) continue;
    const int l = lab[static_cast<std::size_t>(c.front())];
    if (l < 0) return false;
    for (int x : c)
      if (lab[static_cast<std::size_t>(x)] != l) return false;
  }
  return true;
}

LabeledPartition::LabeledPartition(const SampleSpace& space, int level, std::vector<SymbolicClopen> base,
                                   std::vector<Word> transversal)
    : level_(level), base_(std::move(base)), transversal_(std::move(transversal)) {
  cells_.reserve(base_.size() * transversal_.size());
  for (const auto& w : transversal_)
    for (const auto& c : base_) cells_.push_back(clopen_translate(space, w, c));
  if (!is_partition(space, cells_))
    throw Error(ErrorKind::InvariantViolation,
                "tower at level " + std::to_string(level_) + " is not a partition of the sample");
}

SymbolicClopen LabeledPartition::base_union() const {
  SymbolicClopen out;
  for (const auto& c : base_) out = clopen_union(out, c);
  return out;
}

std::optional<std::pair<int, Word>> return_time_violation(const SampleSpace& space, const LabeledPartition& q,
                                                           int radius) {
  const auto& sub = space.spec().chain().level(q.level());
  const auto c = q.base_union();
  std::vector<char> in(static_cast<std::size_t>(space.size()), 0);
  for (int p : c) in[static_cast<std::size_t>(p)] = 1;
  for (const auto& g : ball_enumerate(space.spec().group(), radius)) {
    if (!sub.contains(g)) continue;
    for (int p : c) {
      auto t = space.try_translate(g, p);
      if (t && !in[static_cast<std::size_t>(*t)]) return std::pair{p, g};
    }
  }
  return std::nullopt;
}

LabeledPartition base_partition(const SampleSpace& space, int n) {
  const auto& spec = space.spec();
  if (n < 0 || n > spec.depth())
    throw Error(ErrorKind::SemanticError, "level " + std::to_string(n) + " outside 0.." + std::to_string(spec.depth()));
  SymbolicClopen c;
  for (int p = 0; p < space.size(); ++p)
    if (space.coset(p, n) == 0) c.push_back(p);
  return LabeledPartition(space, n, {std::move(c)}, spec.tower().d[static_cast<std::size_t>(n)]);
}

LabeledPartition kr_refine(const SampleSpace& space, const Partition& r, const LabeledPartition& q) {
  if (!is_partition(space, r)) throw Error(ErrorKind::SemanticError, "refiner is not a partition of the sample");
  const auto lab = labels(space, r);
  std::vector<SymbolicClopen> b = q.base();
  for (const auto& w : q.transversal()) {
    std::vector<SymbolicClopen> next;
    for (const auto& parent : b) {
      std::vector<SymbolicClopen> pieces(r.size());
      for (int p : parent) pieces[static_cast<std::size_t>(lab[static_cast<std::size_t>(space.translate(w, p))])].push_back(p);
      for (auto& piece : pieces)
        if (!piece.empty()) next.push_back(std::move(piece));
    }
    b = std::move(next);
  }
  LabeledPartition out(space, q.level(), std::move(b), q.transversal());
  if (!refines(space, out.cells(), r) || !refines(space, out.cells(), q.cells()))
    throw Error(ErrorKind::InvariantViolation, "refinement failed to refine its inputs");
  return out;
}

Partition pattern_partition(const SampleSpace& space, const std::vector<Word>& window) {
  std::map<std::vector<int>, std::size_t> index;
  Partition out;
  for (int p = 0; p < space.size(); ++p) {
    std::vector<int> pat;
    pat.reserve(window.size());
    for (const auto& w : window) pat.push_back(space.symbol_at(p, w));
    auto [it, fresh] = index.try_emplace(std::move(pat), out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(p);
  }
  return out;
}

Partition trivial_partition(const SampleSpace& space) {
  SymbolicClopen all(static_cast<std::size_t>(space.size()));
  for (int p = 0; p < space.size(); ++p) all[static_cast<std::size_t>(p)] = p;
  return {all};
}

std::vector<Partition> default_refiners(const SampleSpace& space, int n_max) {
  std::vector<Partition> out;
  for (int n = 0; n <= n_max; ++n)
    out.push_back(pattern_partition(space, space.spec().tower().d[static_cast<std::size_t>(n)]));
  return out;
}

TowerSequence kr_tower_sequence(const SampleSpace& space, const std::vector<Partition>& refiners, int n_max,
                                int test_radius) {
  if (n_max < 0 || n_max > space.spec().depth())
    throw Error(ErrorKind::SemanticError, "tower depth " + std::to_string(n_max) + " outside 0.." +
                                              std::to_string(space.spec().depth()));
  if (refiners.size() < static_cast<std::size_t>(n_max) + 1)
    throw Error(ErrorKind::SemanticError, "need a refiner per level");
  TowerSequence seq;
  for (int n = 0; n <= n_max; ++n) {
    auto q = kr_refine(space, refiners[static_cast<std::size_t>(n)], base_partition(space, n));
    if (n > 0) q = kr_refine(space, flatten(seq.levels.back()), q);
    if (n > 0) {
      const auto& prev = seq.levels.back();
      if (!subset(q.base_union(), prev.base_union())) seq.bases_nested = false;
      if (!refines(space, q.cells(), prev.cells())) seq.refinement_chain = false;
    }
    if (return_time_violation(space, q, test_radius)) seq.return_times_ok = false;
    seq.levels.push_back(std::move(q));
  }
  return seq;
}

std::size_t unseparated_pairs(const SampleSpace& space, const Partition& p) {
  std::size_t bad = 0;
  for (const auto& c : p)
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (space.pattern(c[i]) != space.pattern(c[j])) ++bad;
  return bad;
}

IncidenceMatrix incidence_matrix(const SampleSpace& space, const LabeledPartition& pn, const LabeledPartition& pn1) {
  const auto& d1 = pn1.transversal();
  const auto rows = pn.base().size();
  const auto cols = pn1.base().size();
  IncidenceMatrix m{IntegerMatrix(rows, cols), 0};
  if (pn.transversal().empty() || d1.size() % pn.transversal().size() != 0)
    throw Error(ErrorKind::ColumnSumViolation, "|D_{n+1}| is not a multiple of |D_n|");
  m.column_sum = static_cast<std::int64_t>(d1.size() / pn.transversal().size());
  for (std::size_t j = 0; j < cols; ++j) {
    for (const auto& w : d1) {
      SymbolicClopen img;
      for (int p : pn1.base()[j]) {
        auto t = space.try_translate(w, p);
        if (!t)
          throw Error(ErrorKind::InclusionUndecided,
                      w.to_string() + "·C_{n+1," + std::to_string(j) + "} leaves the sample");
        img.push_back(*t);
      }
      std::sort(img.begin(), img.end());
      for (std::size_t i = 0; i < rows; ++i)
        if (subset(img, pn.base()[i])) ++m.a(i, j);
    }
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < rows; ++i) sum += m.a(i, j);
    if (sum != m.column_sum)
      throw Error(ErrorKind::ColumnSumViolation, "column " + std::to_string(j) + " sums to " + std::to_string(sum) +
                                                     ", expected " + std::to_string(m.column_sum));
  }
  return m;
}

std::string matrices_csv(const std::vector<IncidenceMatrix>& ms) {
  std::ostringstream out;
  for (std::size_t n = 0; n < ms.size(); ++n) {
    const auto& a = ms[n].a;
    out << "# A_" << n << ' ' << a.rows() << 'x' << a.cols() << " column_sum=" << ms[n].column_sum << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? "," : "") << a(i, j);
      out << '\n';
    }
  }
  return out.str();
}

MeasureEstimate measure_estimate(const std::vector<IncidenceMatrix>& ms, const std::vector<std::int64_t>& d_sizes,
                                 GroupKind kind, double tolerance) {
  const std::size_t depth = ms.size();
  if (d_sizes.size() != depth + 1) throw Error(ErrorKind::SemanticError, "need |D_n| for n = 0..M");
  for (std::size_t n = 0; n < depth; ++n) {
    if (n + 1 < depth && ms[n].a.cols() != ms[n + 1].a.rows())
      throw Error(ErrorKind::SemanticError, "A_" + std::to_string(n) + " and A_" + std::to_string(n + 1) +
                                                " do not compose");
    if (d_sizes[n] <= 0 || d_sizes[n + 1] % d_sizes[n] != 0)
      throw Error(ErrorKind::ColumnSumViolation, "|D_n| do not divide");
    const auto want = d_sizes[n + 1] / d_sizes[n];
    for (std::size_t j = 0; j < ms[n].a.cols(); ++j) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < ms[n].a.rows(); ++i) sum += ms[n].a(i, j);
      if (sum != want)
        throw Error(ErrorKind::ColumnSumViolation, "A_" + std::to_string(n) + " column " + std::to_string(j) +
                                                       " sums to " + std::to_string(sum));
    }
  }

  MeasureEstimate est;
  est.tolerance = tolerance;
  est.folner = kind == GroupKind::FreeAbelian;
  est.mode_label = est.folner ? "Følner" : "inverse-limit element; invariance not guaranteed (group not amenable)";

  const std::size_t k0 = depth ? ms[0].a.rows() : 1;
  // product A_0...A_{m-1}, grown one factor at a time
  IntegerMatrix prod = IntegerMatrix::identity(k0);
  for (std::size_t m = 0; m <= depth; ++m) {
    if (m > 0) prod = prod * ms[m - 1].a;
    const Rational scale(1, d_sizes[m]);
    std::vector<Interval> hull(k0);
    for (std::size_t i = 0; i < k0; ++i) {
      Rational lo(prod(i, 0)), hi(prod(i, 0));
      for (std::size_t j = 1; j < prod.cols(); ++j) {
        const Rational v(prod(i, j));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      hull[i] = {lo * scale, hi * scale};
    }
    est.hulls.push_back(std::move(hull));
  }
  est.diameter = Rational(0);
  for (const auto& iv : est.hulls.back()) est.diameter = std::max(est.diameter, iv.hi - iv.lo);
  est.uniquely_ergodic = boost::rational_cast<double>(est.diameter) < tolerance;

  const std::size_t km = depth ? ms.back().a.cols() : 1;
  std::vector<Rational> mu(km, Rational(1, d_sizes[depth] * static_cast<std::int64_t>(km)));
  est.point.assign(depth + 1, {});
  est.point[depth] = mu;
  for (std::size_t n = depth; n-- > 0;) {
    const auto& a = ms[n].a;
    std::vector<Rational> next(a.rows(), Rational(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) next[i] += Rational(a(i, j)) * mu[j];
    Rational total(0);
    for (const auto& v : next) total += v;
    if (total != Rational(1, d_sizes[n]))
      throw Error(ErrorKind::InvariantViolation, "level " + std::to_string(n) + " mass is " + to_string(total));
    mu = next;
    est.point[n] = std::move(next);
  }
  return est;
}

Rational folner_ratio(const std::vector<Word>& d, const Word& g) {
  if (d.empty()) return Rational(0);
  std::set<Word, ShortlexLess> base(d.begin(), d.end());
  std::set<Word, ShortlexLess> moved;
  for (const auto& w : d) moved.insert(g * w);
  std::size_t diff = 0;
  for (const auto& w : moved) diff += base.count(w) ? 0 : 1;
  for (const auto& w : base) diff += moved.count(w) ? 0 : 1;
  return Rational(static_cast<std::int64_t>(diff), static_cast<std::int64_t>(d.size()));
}

}  // namespace odoforge
