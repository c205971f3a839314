#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evt/bm.hpp"
#include "evt/errors.hpp"
#include "evt/experiments.hpp"
#include "evt/models.hpp"
#include "evt/pot.hpp"
#include "evt/wasserstein.hpp"

namespace py = pybind11;

namespace {

evt::GroundMetric metric_from(const std::string& s) {
    if (s == "log") return evt::GroundMetric::Log;
    if (s == "euclidean") return evt::GroundMetric::Euclidean;
    throw evt::domain_error("metric must be 'log' or 'euclidean'");
}

py::object json_to_py(const evt::json& j) {
    switch (j.type()) {
        case evt::json::value_t::object: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = json_to_py(v);
            return d;
        }
        case evt::json::value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(json_to_py(v));
            return l;
        }
        case evt::json::value_t::string: return py::str(j.get<std::string>());
        case evt::json::value_t::boolean: return py::bool_(j.get<bool>());
        case evt::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case evt::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case evt::json::value_t::number_float: return py::float_(j.get<double>());
        default: return py::none();
    }
}

evt::EmpiricalMeasure measure_from(const std::vector<double>& pts) {
    return evt::EmpiricalMeasure::uniform(pts);
}

} // namespace

PYBIND11_MODULE(evtw, m) {
    m.doc() = "heavy-tail statistics: tail models, 1-D Wasserstein distances, PoT/BM "
              "estimators and seeded Monte Carlo experiments";

    py::register_exception<evt::domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<evt::capability_error>(m, "CapabilityError", PyExc_ValueError);
    py::register_exception<evt::data_error>(m, "DataError", PyExc_ValueError);
    py::register_exception<evt::singularity_error>(m, "SingularityError", PyExc_ArithmeticError);
    py::register_exception<evt::quadrature_error>(m, "QuadratureError", PyExc_ArithmeticError);

    py::class_<evt::TailModel>(m, "TailModel")
        .def_static("parse", &evt::parse_model_spec, py::arg("spec"),
                    "build a model from 'family:key=value,...'")
        .def_property_readonly("gamma", &evt::TailModel::gamma)
        .def_property_readonly("rho",
                               [](const evt::TailModel& t) -> py::object {
                                   if (t.rho()) return py::float_(*t.rho());
                                   return py::none();
                               })
        .def_property_readonly("tag", &evt::TailModel::tag)
        .def("cdf", &evt::TailModel::cdf, py::arg("x"))
        .def("quantile", &evt::TailModel::quantile, py::arg("u"))
        .def("tail_quantile", &evt::TailModel::tail_quantile, py::arg("t"))
        .def("bm_quantile", &evt::TailModel::bm_quantile, py::arg("t"))
        .def("second_order_A", &evt::TailModel::second_order_A, py::arg("t"))
        .def("sample",
             [](const evt::TailModel& t, std::size_t n, std::uint64_t seed) {
                 return t.sample(n, seed).values;
             },
             py::arg("n"), py::arg("seed"))
        .def("__repr__", [](const evt::TailModel& t) { return "TailModel('" + t.tag() + "')"; });

    m.def("parse_model", &evt::parse_model_spec, py::arg("spec"));
    m.def(
        "coupled_sample",
        [](const evt::TailModel& a, const evt::TailModel& b, std::size_t n, std::uint64_t seed) {
            auto [sa, sb] = evt::TailModel::coupled_sample(a, b, n, seed);
            return py::make_tuple(sa.values, sb.values);
        },
        py::arg("model1"), py::arg("model2"), py::arg("n"), py::arg("seed"));

    m.def(
        "wp_empirical",
        [](const std::vector<double>& a, const std::vector<double>& b, double p,
           const std::string& metric) {
            return evt::wp_empirical(measure_from(a), measure_from(b), p, metric_from(metric));
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 1.0, py::arg("metric") = "euclidean");
    m.def(
        "winf_empirical",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& metric) {
            return evt::winf_empirical(measure_from(a), measure_from(b), metric_from(metric));
        },
        py::arg("a"), py::arg("b"), py::arg("metric") = "euclidean");
    m.def(
        "wp_between_models",
        [](const evt::TailModel& a, const evt::TailModel& b, double p, const std::string& metric) {
            return evt::wp_quantile([&a](double u) { return a.quantile(u); },
                                    [&b](double u) { return b.quantile(u); }, p,
                                    metric_from(metric));
        },
        py::arg("model1"), py::arg("model2"), py::arg("p") = 1.0, py::arg("metric") = "euclidean");

    m.def(
        "hill",
        [](std::vector<double> values, std::size_t k) {
            std::sort(values.begin(), values.end());
            evt::Sample s;
            s.values = std::move(values);
            return json_to_py(evt::hill(s, k).to_json());
        },
        py::arg("values"), py::arg("k"));
    m.def(
        "weissman",
        [](std::vector<double> values, std::size_t k, double alpha, double level) {
            std::sort(values.begin(), values.end());
            evt::Sample s;
            s.values = std::move(values);
            return json_to_py(evt::weissman(s, k, alpha, level).to_json());
        },
        py::arg("values"), py::arg("k"), py::arg("alpha"), py::arg("level") = 0.95);
    m.def(
        "pwm",
        [](std::vector<double> values, std::size_t k, double scale) {
            std::sort(values.begin(), values.end());
            evt::Sample s;
            s.values = std::move(values);
            return json_to_py(evt::pwm_gp(s, k, scale).to_json());
        },
        py::arg("values"), py::arg("k"), py::arg("scale") = 1.0);
    m.def(
        "block_maxima",
        [](const std::vector<double>& raw, std::size_t mm, double a, double b) {
            return evt::block_maxima(raw, mm, a, b).values;
        },
        py::arg("raw"), py::arg("m"), py::arg("a_m") = 1.0, py::arg("b_m") = 0.0);

    m.def("psi", &evt::psi, py::arg("gamma"), py::arg("rho"), py::arg("x"));
    m.def("bias_b", &evt::bias_b, py::arg("rho"));
    m.def(
        "c_p", [](double rho, double p) { return evt::c_p(rho, p); }, py::arg("rho"),
        py::arg("p") = 1.0);
    m.def(
        "c_p_prime", [](double g, double r, double p) { return evt::c_p_prime(g, r, p); },
        py::arg("gamma"), py::arg("rho"), py::arg("p") = 1.0);
    m.def(
        "c_p_doubleprime",
        [](double g, double r, double p) { return evt::c_p_doubleprime(g, r, p); },
        py::arg("gamma"), py::arg("rho"), py::arg("p") = 1.0);
    m.def(
        "a_p", [](const evt::TailModel& t, double tt, double p) { return evt::a_p(t, tt, p); },
        py::arg("model"), py::arg("t"), py::arg("p") = 1.0);
    m.def(
        "a_p_prime",
        [](const evt::TailModel& t, double tt, double p) { return evt::a_p_prime(t, tt, p); },
        py::arg("model"), py::arg("t"), py::arg("p") = 1.0);
    m.def(
        "a_p_doubleprime",
        [](const evt::TailModel& t, double tt, double p) {
            return evt::a_p_doubleprime(t, tt, p);
        },
        py::arg("model"), py::arg("t"), py::arg("p") = 1.0);
    m.def(
        "beta_mixture_bound",
        [](const evt::TailModel& t, std::size_t n, std::size_t k, double p) {
            return evt::beta_mixture_bound(t, n, k, p);
        },
        py::arg("model"), py::arg("n"), py::arg("k"), py::arg("p") = 1.0);

    m.def("list_experiments", []() {
        py::list out;
        for (const auto& info : evt::experiment_registry())
            out.append(py::make_tuple(info.name, info.description));
        return out;
    });
    m.def(
        "run_experiment",
        [](const std::string& name, const std::string& overrides_json) {
            evt::json overrides = evt::json::object();
            if (!overrides_json.empty()) overrides = evt::json::parse(overrides_json);
            return json_to_py(evt::run_experiment(name, overrides).to_json());
        },
        py::arg("name"), py::arg("overrides_json") = std::string(),
        "run a registered experiment; overrides_json is a JSON object string");
}
