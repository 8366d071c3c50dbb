#include "odoforge/dispatch.hpp"

#include "odoforge/measures.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace odoforge {

namespace {

std::string words(const std::vector<Word>& ws, std::size_t limit = 8) {
  std::string s;
  for (std::size_t i = 0; i < ws.size() && i < limit; ++i) s += (i ? ", " : "") + ws[i].to_string();
  if (ws.size() > limit) s += ", ...";
  return s;
}

std::string point_string(const TruncatedPoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.coords.size(); ++i) s += (i ? "," : "") + std::to_string(p.coords[i]);
  return s + ")";
}

std::string vec_string(const CharacterVector& chi) {
  std::string s;
  for (std::size_t i = 0; i < chi.size(); ++i) s += (i ? " " : "") + to_string(chi[i]);
  return s;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, Report& rep, std::filesystem::path out) : cfg_(cfg), rep_(rep), out_(std::move(out)) {}

  void run(std::string_view verb) {
    static const std::pair<std::string_view, void (Runner::*)()> stages[] = {
        {"validate", &Runner::validate}, {"toeplitz", &Runner::toeplitz}, {"periods", &Runner::periods},
        {"factor", &Runner::factor},     {"eigen", &Runner::eigen},       {"measure", &Runner::measure},
    };
    for (const auto& [name, fn] : stages) {
      if (verb != "all" && verb != name) continue;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (!ensure_chain(name)) return;
        (this->*fn)();
      } catch (const Error& e) {
        rep_.set_error(std::string(name), std::string(to_string(e.kind())), e.what());
        return;
      }
      rep_.add_timing(std::string(name),
                      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
  }

 private:
  bool ensure_chain(std::string_view stage) {
    if (chain_) return true;
    if (nesting_failed_) return false;
    try {
      chain_ = validate_chain(cfg_.group, cfg_.levels, cfg_.depth, cfg_.caps);
    } catch (const NestingError& e) {
      nesting_failed_ = true;
      rep_.add({std::string(stage) + ".nesting", Status::Fail,
                "level " + std::to_string(e.level()) + " does not contain level " + std::to_string(e.level() + 1),
                e.witness().to_string(), Json{{"level", e.level()}}});
      return false;
    }
    return true;
  }

  const ToeplitzSpec& spec() {
    if (!spec_) spec_ = std::make_shared<const ToeplitzSpec>(ToeplitzSpec::build(*chain_, cfg_.depth, cfg_.caps.ball));
    return *spec_;
  }

  const std::vector<Word>& window() {
    // D_{N-1}: D_N also holds v_N, which stays provisional at depth N
    if (!window_) window_ = cfg_.window ? *cfg_.window : spec().tower().d[static_cast<std::size_t>(spec().depth() - 1)];
    return *window_;
  }

  const VerifyReport& verified() {
    if (!verify_) verify_ = toeplitz_verify(spec(), window(), cfg_.radius);
    return *verify_;
  }

  void write(const std::string& name, const std::string& text) {
    rep_.add_artifact(name);
    if (out_.empty()) return;
    std::filesystem::create_directories(out_);
    std::ofstream f(out_ / name, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorKind::SemanticError, "cannot write " + (out_ / name).string());
  }

  void validate() {
    const auto& c = *chain_;
    Json levels = Json::array();
    std::string idx;
    for (int n = 0; n <= c.depth(); ++n) {
      levels.push_back({{"level", n}, {"index", c.index(n)}, {"normal", c.normal(n)},
                        {"strict", n < c.depth() ? Json(c.strict(n)) : Json(nullptr)}});
      idx += (n ? ", " : "") + std::to_string(c.index(n));
    }
    rep_.add({"validate.nesting", Status::Pass, "indices " + idx, std::nullopt, Json{{"levels", levels}}});

    const auto res = residuality_witnesses(c, cfg_.radius, cfg_.caps.ball);
    rep_.add({"validate.residuality", Status::Info,
              res.empty() ? "level " + std::to_string(c.depth()) + " meets ball(" + std::to_string(cfg_.radius) +
                                ") trivially"
                          : std::to_string(res.size()) + " nontrivial elements of level " + std::to_string(c.depth()) +
                                " within radius " + std::to_string(cfg_.radius),
              std::nullopt, Json{{"radius", cfg_.radius}, {"count", res.size()}, {"sample", words(res)}}});

    const int d = std::min(3, c.depth());
    const auto points = all_points(c, d);
    for (const auto& p : points) {
      try {
        stabilizer_ball(c, p, cfg_.radius, cfg_.caps.ball);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvariantViolation) throw;
        rep_.add({"validate.stabilizer_formula", Status::Fail, e.what(), point_string(p), {}});
        return;
      }
    }
    rep_.add({"validate.stabilizer_formula", Status::Pass,
              std::to_string(points.size()) + " points at depth " + std::to_string(d) + ", radius " +
                  std::to_string(cfg_.radius),
              std::nullopt, {}});
  }

  void toeplitz() {
    if (cfg_.array_file) {
      const auto arr = parse_pattern_file(read_file(*cfg_.array_file), cfg_.group);
      std::vector<Word> win;
      if (cfg_.window) {
        win = *cfg_.window;
      } else {
        for (const auto& [w, s] : arr.values) win.push_back(w);
        std::sort(win.begin(), win.end(), ShortlexLess{});
      }
      const auto r = verify_external(*chain_, arr, win, cfg_.radius);
      std::ostringstream dump;
      for (const auto& e : r.entries)
        dump << e.position.to_string() << ' ' << e.symbol << " sampled "
             << (e.level ? std::to_string(*e.level) : "-") << '\n';
      write("array.dump", dump.str());
      Json data{{"sampled_checks", r.sampled_checks}, {"uncertified", r.uncertified.size()}};
      if (!r.contradictions.empty())
        rep_.add({"toeplitz.verify_external", Status::Fail, "positions disagree with their sampled period",
                  r.contradictions.front().to_string(), data});
      else if (!r.uncertified.empty())
        rep_.add({"toeplitz.verify_external", Status::Fail, "positions without a sampled period",
                  r.uncertified.front().to_string(), data});
      else
        rep_.add({"toeplitz.verify_external", Status::Inconclusive,
                  "every position is sampled-periodic; nothing is certified for an external array", std::nullopt,
                  data});
      return;
    }

    const auto& s = spec();
    Json mode{{"mode", s.mode() == ToeplitzMode::Finite ? "finite" : "generic"}, {"top_level", s.top_level()}};
    std::string markers;
    for (std::size_t i = 1; i < s.markers().v.size(); ++i)
      markers += (i > 1 ? ", " : "") + s.markers().v[i].to_string();
    mode["markers"] = markers;
    rep_.add({"toeplitz.build", Status::Info,
              s.mode() == ToeplitzMode::Finite
                  ? "finite mode, chain stabilizes at level " + std::to_string(*s.stabilization_level())
                  : "generic mode, depth " + std::to_string(s.depth()),
              std::nullopt, mode});

    write("array.dump", dump_array(s, window()));
    const auto& v = verified();
    Json data{{"window", window().size()},
              {"sampled_checks", v.sampled_checks},
              {"uncertified", v.uncertified.size()},
              {"contradictions", v.contradictions.size()},
              {"recurrence_level", v.recurrence_level ? Json(*v.recurrence_level) : Json(nullptr)},
              {"recurrence_confirmed", v.recurrence_confirmed}};
    if (v.pass)
      rep_.add({"toeplitz.verify", Status::Pass, "every window position certified", std::nullopt, data});
    else
      rep_.add({"toeplitz.verify", Status::Fail,
                v.contradictions.empty() ? "uncertified positions" : "certificate contradicted",
                (v.contradictions.empty() ? v.uncertified : v.contradictions).front().to_string(), data});
  }

  void periods() {
    const auto& s = spec();
    const int levels = s.depth() - 1;
    if (levels < 1) {
      rep_.add({"periods.structure", Status::Info, "depth 1 leaves no level to check", std::nullopt, {}});
      return;
    }
    const auto r = period_structure_check(s, levels, cfg_.radius, verified().pass);
    Json per = Json::array();
    std::optional<std::string> first_open;
    for (const auto& e : r.entries) {
      if (e.result.outcome == Falsification::Outcome::Inconclusive && !first_open)
        first_open = "level " + std::to_string(e.level) + ": " + e.g.to_string();
    }
    for (int n = 1; n <= levels; ++n) {
      std::size_t count = 0;
      std::string sample;
      for (const auto& e : r.entries) {
        if (e.level != n || e.result.outcome != Falsification::Outcome::Witness) continue;
        if (count++ < 3)
          sample += (sample.empty() ? "" : "; ") + e.g.to_string() + " via w=" + e.result.w->to_string() +
                    " sigma=" + std::to_string(e.result.sigma) + " gamma=" + e.result.gamma->to_string();
      }
      per.push_back({{"level", n}, {"falsified", count}, {"sample", sample}});
    }
    Json data{{"levels", levels},     {"radius", cfg_.radius},         {"witnesses", r.witnesses},
              {"inconclusive", r.inconclusive}, {"certificate", r.certificate}, {"per_level", per}};
    if (r.inconclusive == 0)
      rep_.add({"periods.structure", Status::Pass,
                std::to_string(r.witnesses) + " non-members falsified with explicit witnesses", std::nullopt, data});
    else
      rep_.add({"periods.structure", Status::Inconclusive,
                std::to_string(r.inconclusive) + " non-members without a witness in the search ball", first_open,
                data});
  }

  void equivariance(const std::string& name, const Chain& source, const FactorMap& map) {
    const int d = map.levels().empty() ? 0 : *std::max_element(map.levels().begin(), map.levels().end());
    auto pts = all_points(source, d);
    if (pts.size() > 20) pts.resize(20);
    const auto ball = ball_enumerate(source.group(), std::min(cfg_.radius, 3), cfg_.caps.ball);
    for (const auto& p : pts)
      for (const auto& g : ball)
        if (map.apply(act_truncated(source, g, p)) != act_truncated(map_target(), g, map.apply(p))) {
          rep_.add({name, Status::Fail, "map does not commute with the action",
                    g.to_string() + " at " + point_string(p), {}});
          return;
        }
    rep_.add({name, Status::Pass,
              std::to_string(pts.size()) + " points x " + std::to_string(ball.size()) + " group elements",
              std::nullopt, {}});
  }

  const Chain& map_target() const { return *target_; }

  void factor() {
    if (cfg_.factor_target) {
      auto tcfg = load_config(*cfg_.factor_target);
      require_same_group(cfg_.group, tcfg.group);
      target_ = std::make_shared<const Chain>(validate_chain(tcfg.group, tcfg.levels, tcfg.depth, cfg_.caps));
      const auto map = factor_between(*chain_, *target_);
      if (!map.ok()) {
        rep_.add({"factor.between", Status::Fail,
                  "no source level refines target level " + std::to_string(*map.failed_level()),
                  map.witness()->to_string(), Json{{"failed_level", *map.failed_level()}}});
        return;
      }
      rep_.add({"factor.between", Status::Pass, "every target level is refined", std::nullopt,
                Json{{"k", map.levels()}}});
      equivariance("factor.equivariance", *chain_, map);
      return;
    }
    auto cover = normal_cover(*chain_, cfg_.caps.core_cap);
    std::vector<int> idx;
    for (int n = 0; n <= cover.cover.depth(); ++n) idx.push_back(cover.cover.index(n));
    if (!cover.map.ok()) {
      rep_.add({"factor.normal_cover", Status::Fail, "cover does not map onto the chain",
                cover.map.witness() ? cover.map.witness()->to_string() : std::string("-"), {}});
      return;
    }
    rep_.add({"factor.normal_cover", Status::Pass, "normal cover maps onto the chain", std::nullopt,
              Json{{"cover_indices", idx}, {"k", cover.map.levels()}}});
    target_ = std::make_shared<const Chain>(*chain_);
    equivariance("factor.equivariance", cover.cover, cover.map);
  }

  void eigen() {
    const auto& c = *chain_;
    Json per = Json::array();
    std::vector<CharacterGroup> groups;
    for (int n = 1; n <= c.depth(); ++n) {
      groups.push_back(eigenvalue_group(c, n, cfg_.caps.core_cap));
      const auto& g = groups.back();
      per.push_back({{"level", n},
                     {"quotient", g.lattice.quotient_string()},
                     {"free_rank", g.lattice.free_rank},
                     {"torsion_characters", g.characters.size()}});
    }
    const auto& top = groups.back();
    std::ostringstream csv;
    csv << "level,character";
    for (const auto& name : c.group()->names()) csv << ",q_" << name;
    csv << '\n';
    for (std::size_t i = 0; i < top.characters.size(); ++i) {
      csv << top.level << ',' << i;
      for (const auto& q : top.characters[i]) csv << ',' << to_string(q);
      csv << '\n';
    }
    write("characters.csv", csv.str());
    rep_.add({"eigen.groups", Status::Info,
              top.infinite() ? "level " + std::to_string(top.level) + " has free rank " +
                                   std::to_string(top.lattice.free_rank) + "; torsion characters listed"
                             : "level " + std::to_string(top.level) + " has " +
                                   std::to_string(top.characters.size()) + " characters",
              std::nullopt, Json{{"levels", per}}});

    const auto ball = ball_enumerate(c.group(), std::min(cfg_.radius, 3), cfg_.caps.ball);
    std::size_t checked = 0;
    for (int n = 1; n <= std::min(c.depth(), 4); ++n) {
      auto pts = all_points(c, n);
      if (pts.size() > 64) pts.resize(64);
      const auto& chars = groups[static_cast<std::size_t>(n - 1)].characters;
      for (std::size_t ci = 0; ci < chars.size() && ci < 64; ++ci)
        for (const auto& p : pts)
          for (const auto& g : ball) {
            ++checked;
            const auto lhs = eigenfunction(c, n, chars[ci], act_truncated(c, g, p));
            const auto rhs = frac(character_eval(chars[ci], g) + eigenfunction(c, n, chars[ci], p));
            if (lhs != rhs) {
              rep_.add({"eigen.eigenfunction", Status::Fail, "f(g.p) != chi(g) + f(p) mod 1",
                        "level " + std::to_string(n) + " chi=(" + vec_string(chars[ci]) + ") g=" + g.to_string() +
                            " p=" + point_string(p),
                        {}});
              return;
            }
          }
    }
    rep_.add({"eigen.eigenfunction", Status::Pass, std::to_string(checked) + " exact identities checked",
              std::nullopt, {}});
  }

  void measure() {
    const auto& s = spec();
    const auto space = sample_space(spec_, window(), cfg_.sample_radius, cfg_.caps.ball);
    Json sdata{{"points", space.size()},
               {"cosets", s.top().index()},
               {"distinct_patterns", space.distinct_patterns()},
               {"provisional_points", space.provisional_points()},
               {"stable", space.stable()}};
    if (space.size() < s.top().index()) {
      rep_.add({"measure.sample", Status::Inconclusive,
                "sample radius " + std::to_string(cfg_.sample_radius) + " reaches " + std::to_string(space.size()) +
                    " of " + std::to_string(s.top().index()) + " cosets",
                "radius " + std::to_string(cfg_.sample_radius), sdata});
      return;
    }
    rep_.add({"measure.sample", Status::Pass, "sample covers the top level", std::nullopt, sdata});

    const int n_max = s.depth();
    auto run_tower = [&](const std::vector<Partition>& refiners, std::vector<IncidenceMatrix>& ms,
                         std::vector<std::int64_t>& sizes) {
      auto seq = kr_tower_sequence(space, refiners, n_max, std::min(cfg_.radius, 4));
      for (int n = 0; n <= n_max; ++n)
        sizes.push_back(static_cast<std::int64_t>(seq.levels[static_cast<std::size_t>(n)].transversal().size()));
      for (int n = 0; n < n_max; ++n)
        ms.push_back(incidence_matrix(space, seq.levels[static_cast<std::size_t>(n)],
                                      seq.levels[static_cast<std::size_t>(n) + 1]));
      return seq;
    };

    std::vector<IncidenceMatrix> ms;
    std::vector<std::int64_t> sizes;
    TowerSequence seq;
    try {
      seq = run_tower(default_refiners(space, n_max), ms, sizes);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ColumnSumViolation) throw;
      rep_.add({"measure.column_sums", Status::Fail, "incidence column sum off", e.what(), {}});
      return;
    }
    std::vector<std::size_t> ks;
    for (const auto& l : seq.levels) ks.push_back(l.base().size());
    const bool tower_ok = seq.bases_nested && seq.refinement_chain && seq.return_times_ok;
    rep_.add({"measure.kr_tower", tower_ok ? Status::Pass : Status::Fail,
              tower_ok ? "nested bases, refining partitions, return times in the base subgroup"
                       : "tower property violated",
              tower_ok ? std::nullopt
                       : std::optional<std::string>(!seq.bases_nested       ? "bases not nested"
                                                    : !seq.refinement_chain ? "refinement chain broken"
                                                                            : "return time escapes"),
              Json{{"k", ks}}});
    rep_.add({"measure.column_sums", Status::Pass,
              std::to_string(ms.size()) + " matrices satisfy the column-sum law", std::nullopt, {}});
    write("matrices.csv", matrices_csv(ms));

    const auto est = measure_estimate(ms, sizes, cfg_.group->kind(), cfg_.tolerance);
    bool haar_ok = true;
    for (int n = 0; n <= n_max; ++n) {
      Rational total(0);
      for (const auto& v : est.point[static_cast<std::size_t>(n)]) total += v;
      haar_ok = haar_ok && total == haar_cylinder(*chain_, n);
    }
    rep_.add({"measure.haar_mass", haar_ok ? Status::Pass : Status::Fail,
              "base masses sum to 1/[G:level] at every level",
              haar_ok ? std::nullopt : std::optional<std::string>("mass mismatch"), {}});
    rep_.add({"measure.unique_ergodicity", Status::Info,
              est.uniquely_ergodic ? "interval diameter below tolerance" : "interval diameter above tolerance",
              std::nullopt, Json{{"diameter", to_string(est.diameter)}, {"mode", est.mode_label}}});
    rep_.add({"measure.separation", Status::Info, "window patterns sharing a cell of the deepest partition",
              std::nullopt, Json{{"unseparated_pairs", unseparated_pairs(space, seq.levels.back().cells())}}});

    // k = 1 towers must give the Haar values exactly
    std::vector<IncidenceMatrix> tms;
    std::vector<std::int64_t> tsizes;
    run_tower(std::vector<Partition>(static_cast<std::size_t>(n_max) + 1, trivial_partition(space)), tms, tsizes);
    const auto tri = measure_estimate(tms, tsizes, cfg_.group->kind(), cfg_.tolerance);
    std::optional<std::string> bad;
    for (int n = 0; n <= n_max && !bad; ++n)
      if (tri.point[static_cast<std::size_t>(n)].size() != 1 ||
          tri.point[static_cast<std::size_t>(n)][0] != haar_cylinder(*chain_, n))
        bad = "level " + std::to_string(n);
    rep_.add({"measure.trivial_tower", bad ? Status::Fail : Status::Pass, "single-cell towers reproduce 1/index", bad,
              {}});

    Json m;
    m["mode"] = est.mode_label;
    m["folner"] = est.folner;
    m["tolerance"] = est.tolerance;
    m["diameter"] = to_string(est.diameter);
    m["diameter_value"] = to_double(est.diameter);
    m["uniquely_ergodic"] = est.uniquely_ergodic;
    m["k"] = ks;
    m["d_sizes"] = sizes;
    Json hulls = Json::array();
    for (const auto& h : est.hulls) {
      Json level = Json::array();
      for (const auto& iv : h) level.push_back({to_string(iv.lo), to_string(iv.hi)});
      hulls.push_back(std::move(level));
    }
    m["hulls"] = std::move(hulls);
    Json point = Json::array();
    for (const auto& mu : est.point) {
      Json level = Json::array();
      for (const auto& v : mu) level.push_back(to_string(v));
      point.push_back(std::move(level));
    }
    m["point"] = std::move(point);
    if (est.folner) {
      Json ratios = Json::array();
      for (int n = 0; n <= n_max; ++n) {
        Json per = Json::object();
        for (int gi = 0; gi < cfg_.group->rank(); ++gi)
          per[cfg_.group->names()[static_cast<std::size_t>(gi)]] =
              to_string(folner_ratio(s.tower().d[static_cast<std::size_t>(n)], Word::generator(cfg_.group, gi)));
        ratios.push_back(std::move(per));
      }
      m["folner_ratios"] = std::move(ratios);
    }
    write("measures.json", m.dump(2) + "\n");
  }

  const RunConfig& cfg_;
  Report& rep_;
  std::filesystem::path out_;
  std::optional<Chain> chain_;
  bool nesting_failed_ = false;
  std::shared_ptr<const ToeplitzSpec> spec_;
  std::optional<std::vector<Word>> window_;
  std::optional<VerifyReport> verify_;
  std::shared_ptr<const Chain> target_;
};

}  // namespace

Report dispatch(const RunConfig& cfg, std::string_view verb, const std::filesystem::path& out_dir) {
  Report rep(std::string(verb), fnv1a_hex(cfg.canonical()));
  if (!is_verb(verb)) {
    rep.set_error("dispatch", "SemanticError", "unknown verb '" + std::string(verb) + "'");
    return rep;
  }
  Runner(cfg, rep, out_dir).run(verb);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "report.json", std::ios::binary) << rep.file_text();
  }
  return rep;
}

}  // namespace odoforge
