#include "odoforge/dispatch.hpp"
#include "odoforge/measures.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace odoforge;

namespace {

// GroupPtr points at a const descriptor, which pybind11 holders dislike.
struct PyGroup {
  GroupPtr g;
};

Word word(const PyGroup& g, const std::string& s) { return parse_word(s, g.g); }

std::vector<Word> words(const PyGroup& g, const std::vector<std::string>& ss) {
  std::vector<Word> out;
  for (const auto& s : ss) out.push_back(word(g, s));
  return out;
}

std::vector<std::string> strings(const std::vector<Word>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(w.to_string());
  return out;
}

py::tuple frac_pair(const Rational& r) { return py::make_tuple(r.numerator(), r.denominator()); }

struct PySpec {
  PyGroup group;
  std::shared_ptr<const ToeplitzSpec> spec;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "odometers, Toeplitz arrays and invariant measures";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<PyGroup>(m, "Group")
      .def(py::init([](const std::string& kind, std::vector<std::string> names) {
             GroupKind k;
             if (kind == "free")
               k = GroupKind::Free;
             else if (kind == "free_abelian" || kind == "abelian")
               k = GroupKind::FreeAbelian;
             else
               throw Error(ErrorKind::InvalidGroup, "kind must be free or free_abelian");
             return PyGroup{GroupDescriptor::make(k, std::move(names))};
           }),
           py::arg("kind"), py::arg("generators"))
      .def_property_readonly("kind", [](const PyGroup& g) { return std::string(to_string(g.g->kind())); })
      .def_property_readonly("generators", [](const PyGroup& g) { return g.g->names(); })
      .def("normalize", [](const PyGroup& g, const std::string& w) { return word(g, w).to_string(); })
      .def("multiply",
           [](const PyGroup& g, const std::string& a, const std::string& b) {
             return (word(g, a) * word(g, b)).to_string();
           })
      .def("inverse", [](const PyGroup& g, const std::string& a) { return invert(word(g, a)).to_string(); })
      .def("abelianize", [](const PyGroup& g, const std::string& a) { return abelianize(word(g, a)); })
      .def("ball", [](const PyGroup& g, int r) { return strings(ball_enumerate(g.g, r)); }, py::arg("radius"));

  py::class_<SubgroupHandle>(m, "Subgroup")
      .def(py::init([](const PyGroup& g, const std::vector<std::string>& gens) {
             return subgroup_from_generators(g.g, words(g, gens));
           }),
           py::arg("group"), py::arg("generators"))
      .def_property_readonly("index", &SubgroupHandle::index)
      .def("contains", [](const SubgroupHandle& h, const std::string& w) { return h.contains(parse_word(w, h.group())); })
      .def("coset", [](const SubgroupHandle& h, const std::string& w) { return h.coset_of(parse_word(w, h.group())); })
      .def("transversal", [](const SubgroupHandle& h) { return strings(h.transversal()); })
      .def("schreier_generators", [](const SubgroupHandle& h) { return strings(schreier_data(h).generators); })
      .def("normal_core", [](const SubgroupHandle& h) { return normal_core(h); })
      .def("is_normal", [](const SubgroupHandle& h) { return is_normal(h); })
      .def("contains_subgroup",
           [](const SubgroupHandle& h, const SubgroupHandle& k) { return contains_subgroup(h, k).contained; });

  py::class_<Chain>(m, "Chain")
      .def(py::init([](const PyGroup& g, const std::vector<std::vector<std::string>>& levels, std::optional<int> depth) {
             std::vector<std::vector<Word>> gens;
             for (const auto& l : levels) gens.push_back(words(g, l));
             return validate_chain(g.g, gens, depth.value_or(static_cast<int>(gens.size())));
           }),
           py::arg("group"), py::arg("levels"), py::arg("depth") = py::none())
      .def_property_readonly("depth", &Chain::depth)
      .def("index", &Chain::index)
      .def("is_normal", &Chain::normal)
      .def("level", &Chain::level, py::return_value_policy::copy)
      .def("haar_cylinder", [](const Chain& c, int n) { return frac_pair(haar_cylinder(c, n)); })
      .def("point", [](const Chain& c, const std::string& g, int depth) {
        return point_of(c, parse_word(g, c.group()), depth).coords;
      })
      .def("stabilizer", [](const Chain& c, const std::string& g, int depth, int radius) {
        return strings(stabilizer_ball(c, point_of(c, parse_word(g, c.group()), depth), radius));
      })
      .def("eigenvalues", [](const Chain& c, int n) {
        const auto grp = eigenvalue_group(c, n);
        py::list out;
        for (const auto& chi : grp.characters) {
          py::list row;
          for (const auto& q : chi) row.append(frac_pair(q));
          out.append(row);
        }
        return py::make_tuple(out, grp.lattice.free_rank);
      });

  m.def("factor_between", [](const Chain& source, const Chain& target) {
    const auto f = factor_between(source, target);
    py::dict d;
    d["ok"] = f.ok();
    d["levels"] = f.levels();
    d["failed_level"] = f.failed_level();
    d["witness"] = f.witness() ? py::cast(f.witness()->to_string()) : py::none();
    return d;
  });

  py::class_<PySpec>(m, "ToeplitzSpec")
      .def(py::init([](const Chain& chain, std::optional<int> depth) {
             auto s = std::make_shared<const ToeplitzSpec>(ToeplitzSpec::build(chain, depth.value_or(chain.depth())));
             return PySpec{PyGroup{chain.group()}, std::move(s)};
           }),
           py::arg("chain"), py::arg("depth") = py::none())
      .def_property_readonly("finite", [](const PySpec& s) { return s.spec->mode() == ToeplitzMode::Finite; })
      .def_property_readonly("markers", [](const PySpec& s) { return strings(s.spec->markers().v); })
      .def("domain", [](const PySpec& s, int n) { return strings(s.spec->tower().d.at(static_cast<std::size_t>(n))); })
      .def("evaluate",
           [](const PySpec& s, const std::string& w) {
             const auto v = s.spec->evaluate(word(s.group, w));
             return py::make_tuple(v.symbol, v.exact, v.level);
           })
      .def("dump", [](const PySpec& s, const std::vector<std::string>& window) {
        return dump_array(*s.spec, words(s.group, window));
      })
      .def("verify",
           [](const PySpec& s, const std::vector<std::string>& window, int radius) {
             const auto r = toeplitz_verify(*s.spec, words(s.group, window), radius);
             py::dict d;
             d["pass"] = r.pass;
             d["uncertified"] = strings(r.uncertified);
             d["contradictions"] = strings(r.contradictions);
             d["sampled_checks"] = r.sampled_checks;
             d["recurrence_level"] = r.recurrence_level;
             return d;
           })
      .def("periods",
           [](const PySpec& s, int levels, int radius) {
             const auto r = period_structure_check(*s.spec, levels, radius, true);
             py::dict d;
             d["witnesses"] = r.witnesses;
             d["inconclusive"] = r.inconclusive;
             return d;
           })
      .def("measure", [](const PySpec& s, const std::vector<std::string>& window, int sample_radius) {
        const auto space = sample_space(s.spec, words(s.group, window), sample_radius);
        const int n_max = s.spec->depth();
        const auto seq = kr_tower_sequence(space, default_refiners(space, n_max), n_max);
        std::vector<IncidenceMatrix> ms;
        std::vector<std::int64_t> sizes;
        for (const auto& l : seq.levels) sizes.push_back(static_cast<std::int64_t>(l.transversal().size()));
        for (int n = 0; n < n_max; ++n) ms.push_back(incidence_matrix(space, seq.levels[n], seq.levels[n + 1]));
        const auto est = measure_estimate(ms, sizes, s.group.g->kind());
        py::list mats;
        for (const auto& mm : ms) {
          py::list rows;
          for (std::size_t i = 0; i < mm.a.rows(); ++i) rows.append(mm.a.row(i));
          mats.append(rows);
        }
        py::list point;
        for (const auto& mu : est.point) {
          py::list level;
          for (const auto& v : mu) level.append(frac_pair(v));
          point.append(level);
        }
        py::dict d;
        d["matrices"] = mats;
        d["point"] = point;
        d["diameter"] = frac_pair(est.diameter);
        d["uniquely_ergodic"] = est.uniquely_ergodic;
        d["mode"] = est.mode_label;
        return d;
      });

  m.def(
      "run",
      [](const std::filesystem::path& config, const std::string& verb, const std::filesystem::path& out) {
        const auto rep = dispatch(load_config(config), verb, out);
        return py::make_tuple(rep.exit_code(), rep.body_text());
      },
      py::arg("config"), py::arg("verb") = "all", py::arg("out") = std::filesystem::path{});
}
