#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "expd/cuttings.hpp"
#include "expd/dsl.hpp"
#include "expd/errors.hpp"
#include "expd/es_pipeline.hpp"
#include "expd/generators.hpp"
#include "expd/relation_io.hpp"
#include "expd/rng.hpp"
#include "expd/scaling.hpp"
#include "expd/zarankiewicz.hpp"

namespace py = pybind11;
using namespace expd;

namespace {

Rational parse_rational(const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    throw InputError("not a rational: '" + text + "'");
  }
}

std::string rational_str(const Rational& q) {
  std::ostringstream o;
  o << q;
  return o.str();
}

py::dict params_dict(const ExponentParams& p) {
  py::dict d;
  d["D"] = p.D;
  d["t"] = p.t;
  d["s"] = p.s;
  d["epsilon"] = rational_str(p.epsilon);
  d["alpha"] = rational_str(p.alpha);
  d["beta"] = rational_str(p.beta);
  d["delta"] = p.delta ? py::object(py::str(rational_str(*p.delta))) : py::object(py::none());
  return d;
}

// json -> python via its text form; keeps the binding free of a json caster
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

FiniteRelation2 relation2_from_edges(std::size_t m, std::size_t n,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& e) {
  return build_relation2(Universe("U", m), Universe("V", n), e);
}

Instance3 instance_of(const std::string& expr, const std::string& gx, const std::string& gy,
                      const std::string& gz, std::uint64_t seed) {
  return instantiate3(parse(expr), parse_grid(gx, seed), parse_grid(gy, seed), parse_grid(gz, seed));
}

Cutter cutter_named(const std::string& name) {
  if (name == "interval") return interval_cutter();
  if (name == "greedy") return greedy_cutter(8.0, 2);
  throw InputError("unknown cutter '" + name + "' (interval, greedy)");
}

}  // namespace

PYBIND11_MODULE(_expd, m) {
  m.doc() = "Finite incidence counting, cuttings and the ternary pipeline";

  static py::exception<Error> base(m, "ExpdError", PyExc_ValueError);
  static py::exception<CapacityError> capacity(m, "CapacityError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CapacityError& e) {
      py::set_error(capacity, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<FiniteRelation2>(m, "Relation2")
      .def(py::init(&relation2_from_edges), py::arg("m"), py::arg("n"), py::arg("edges"))
      .def_property_readonly("m", [](const FiniteRelation2& r) { return r.u().size; })
      .def_property_readonly("n", [](const FiniteRelation2& r) { return r.v().size; })
      .def("edge_count", &FiniteRelation2::edge_count)
      .def("has_edge", &FiniteRelation2::has_edge)
      .def("edges", &FiniteRelation2::edges)
      .def("to_json", [](const FiniteRelation2& r) { return to_py(to_json(r)); })
      .def("__len__", &FiniteRelation2::edge_count);

  py::class_<FiniteRelation3>(m, "Relation3")
      .def_property_readonly("shape",
                             [](const FiniteRelation3& f) {
                               return py::make_tuple(f.x().size, f.y().size, f.z().size);
                             })
      .def("triples", &FiniteRelation3::triples)
      .def("to_json", [](const FiniteRelation3& f) { return to_py(to_json(f)); })
      .def("__len__", &FiniteRelation3::size);

  m.def("canonical", [](const std::string& text) { return parse(text).print(); }, py::arg("expr"),
        "Parses an expression and returns its canonical text.");

  m.def("instantiate",
        [](const std::string& expr, const std::string& gx, const std::string& gy, const std::string& gz,
           std::uint64_t seed) { return instance_of(expr, gx, gy, gz, seed).relation; },
        py::arg("expr"), py::arg("grid_x") = "range:0:16", py::arg("grid_y") = "range:0:16",
        py::arg("grid_z") = "range:0:16", py::arg("seed") = 0);

  m.def("count",
        [](const std::string& expr, const std::string& gx, const std::string& gy, const std::string& gz,
           std::uint64_t seed) { return instance_of(expr, gx, gy, gz, seed).relation.size(); },
        py::arg("expr"), py::arg("grid_x") = "range:0:16", py::arg("grid_y") = "range:0:16",
        py::arg("grid_z") = "range:0:16", py::arg("seed") = 0);

  m.def("projective_plane", &projective_plane_incidence, py::arg("q"));
  m.def("identity_matching", &identity_matching, py::arg("n"));
  m.def(
      "random_intervals",
      [](std::size_t points, std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        return random_intervals(points, count, rng);
      },
      py::arg("points"), py::arg("count"), py::arg("seed"));

  m.def("kst_bound", &kst_bound, py::arg("s"), py::arg("t"), py::arg("m"), py::arg("n"));
  m.def(
      "find_kst",
      [](const FiniteRelation2& rel, std::size_t s, std::size_t t) -> py::object {
        auto w = find_kst(rel, s, t);
        if (!w) return py::none();
        return py::make_tuple(w->s_side, w->t_side);
      },
      py::arg("rel"), py::arg("s"), py::arg("t"));
  m.def("epsilon_limit", [](int D, int t) { return rational_str(epsilon_limit(D, t)); }, py::arg("D"),
        py::arg("t"));
  m.def(
      "exponent_params",
      [](int D, int t, int s, const std::string& eps) { return params_dict(exponent_params(D, t, s, parse_rational(eps))); },
      py::arg("D"), py::arg("t"), py::arg("s"), py::arg("epsilon"));

  m.def(
      "certify",
      [](const FiniteRelation2& rel, int s, int t, int D, const std::string& eps, double r,
         const std::string& cutter) {
        auto params = exponent_params(D, t, s, parse_rational(eps));
        CertifyOptions opts;
        opts.r = r;
        auto cert = certified_count(rel, Subset::full(rel.u()), Subset::full(rel.v()), params,
                                    cutter_named(cutter), opts);
        if (!certificate_consistent(cert)) throw Error("inconsistent certificate");
        return to_py(to_json(cert));
      },
      py::arg("rel"), py::arg("s"), py::arg("t"), py::arg("D"), py::arg("epsilon"), py::arg("r") = 4.0,
      py::arg("cutter") = "interval");

  m.def(
      "interval_cutting",
      [](const FiniteRelation2& rel, double r) {
        Subset a = Subset::full(rel.u());
        auto cover = interval_cutting(rel, a, r);
        auto rep = verify_cutting(rel, a, r, cover);
        py::dict d;
        d["cells"] = rep.cell_count;
        d["max_crossing"] = rep.max_crossing;
        d["cap"] = rep.cap;
        d["valid"] = rep.valid;
        d["cover"] = to_py(to_json(cover));
        return d;
      },
      py::arg("rel"), py::arg("r"));

  m.def(
      "delta_degree",
      [](const FiniteRelation3& f, std::uint64_t threshold) { return to_py(to_json(delta_degree(f, threshold))); },
      py::arg("f"), py::arg("threshold") = 1);
  m.def(
      "derive_g_size",
      [](const FiniteRelation3& f, std::uint64_t budget) { return derive_G(f, budget).edge_count(); },
      py::arg("f"), py::arg("budget_cells") = kDefaultCellBudget);

  m.def(
      "scan",
      [](const std::string& expr, const std::vector<std::uint64_t>& sizes, unsigned threads) {
        DslFamilySpec spec;
        spec.expr = expr;
        auto fit = run_scaling(make_family(spec), sizes, threads);
        py::dict d;
        d["sizes"] = fit.sizes;
        d["counts"] = fit.counts;
        d["slope"] = fit.slope;
        d["intercept"] = fit.intercept;
        d["residual_max"] = fit.residual_max;
        return d;
      },
      py::arg("expr"), py::arg("sizes"), py::arg("threads") = 1);
}
