// Python bindings. Reports cross the boundary as JSON-compatible dicts.
#include "flagmirror/crit.hpp"
#include "flagmirror/error.hpp"
#include "flagmirror/identities.hpp"
#include "flagmirror/toda.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <mutex>

namespace py = pybind11;
using namespace flagmirror;
using nlohmann::json;

namespace {

GroupPtr group(const std::string& type) {
    static std::mutex m;
    static std::map<std::string, GroupPtr> cache;
    std::lock_guard lock(m);
    auto& g = cache[type];
    if (!g) g = make_group(type);
    return g;
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

WeylWord word_or_default(const ChevalleyGroup& G, const std::optional<std::string>& w) {
    return w ? parse_word(*w) : G.w0_word();
}

template <typename Vec, typename T>
Vec to_vec(const std::vector<T>& v) {
    Vec out(static_cast<int>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<int>(k)) = v[k];
    return out;
}

void check_rank(const ChevalleyGroup& G, std::size_t n, const char* what) {
    if (static_cast<int>(n) != G.rank())
        throw DomainError(std::string(what) + " needs " + std::to_string(G.rank()) + " entries for " +
                          G.datum().name());
}

CycleSpec make_cycle(const std::string& cycle, const std::optional<std::string>& word, int nodes,
                     const std::vector<double>& radii, bool saddle_radii, bool bare, int orientation) {
    CycleSpec s;
    s.kind = parse_cycle_kind(cycle);
    if (word) s.word = parse_word(*word);
    s.nodes_per_dim = nodes;
    s.radii = radii;
    s.saddle_radii = saddle_radii;
    s.bare_form = bare;
    s.orientation = orientation;
    return s;
}

py::dict root_data(const std::string& type) {
    const auto G = group(type);
    py::dict d;
    d["type"] = G->datum().name();
    d["cartan"] = G->datum().cartan;
    d["positive_roots"] = G->roots().positive_roots;
    std::vector<int> w;
    for (int l : G->w0_word().letters) w.push_back(l + 1);
    d["w0_word"] = w;
    std::vector<int> dims;
    for (const auto& m : G->modules()) dims.push_back(m.dim);
    d["fundamental_dims"] = dims;
    return d;
}

py::dict superpotential_py(const std::string& type, const std::vector<Complex>& a, const std::vector<Complex>& h,
                           double z, const std::optional<std::string>& word) {
    const auto G = group(type);
    check_rank(*G, h.size(), "h");
    const auto p = make_point(*G, word_or_default(*G, word), to_vec<CVector>(a), to_vec<CVector>(h), z);
    const auto v = superpotential(*G, p);
    py::dict d;
    d["value"] = v.total;
    d["e_part"] = std::vector<Complex>(v.e_part.data(), v.e_part.data() + v.e_part.size());
    d["f_part"] = std::vector<Complex>(v.f_part.data(), v.f_part.data() + v.f_part.size());
    return d;
}

py::object s_gamma_py(const std::string& type, const std::vector<Complex>& h, double z, const std::string& cycle,
                      const std::optional<std::string>& word, int nodes, const std::vector<double>& radii,
                      bool saddle_radii, bool bare, int orientation, unsigned threads) {
    const auto G = group(type);
    check_rank(*G, h.size(), "h");
    const auto spec = make_cycle(cycle, word, nodes, radii, saddle_radii, bare, orientation);
    QuadratureResult r;
    {
        py::gil_scoped_release release;
        r = s_gamma(*G, spec, to_vec<CVector>(h), z, {threads, true});
    }
    return to_py(to_json(r));
}

py::object verify_toda_py(const std::string& type, const std::vector<double>& h, double z, const std::string& cycle,
                          int nodes, double fd_step, double tolerance, unsigned threads) {
    const auto G = group(type);
    check_rank(*G, h.size(), "h");
    const auto spec = make_cycle(cycle, std::nullopt, nodes, {}, false, false, 1);
    VerifyOptions o;
    o.fd_step = fd_step;
    o.tolerance = tolerance;
    o.quad.threads = threads;
    ResidualReport r;
    {
        py::gil_scoped_release release;
        r = verify(*G, spec, to_vec<Eigen::VectorXd>(h), z, o);
    }
    return to_py(to_json(r));
}

py::object braid_compare_py(const std::string& type, const std::vector<Complex>& h, double z,
                            const std::string& word1, const std::string& word2, int nodes, bool saddle_radii) {
    const auto G = group(type);
    check_rank(*G, h.size(), "h");
    CycleSpec base;
    base.nodes_per_dim = nodes;
    base.saddle_radii = saddle_radii;
    BraidComparison b;
    {
        py::gil_scoped_release release;
        b = braid_compare(*G, to_vec<CVector>(h), z, parse_word(word1), parse_word(word2), base);
    }
    return to_py(json{{"s1", {b.s1.real(), b.s1.imag()}},
                      {"s2", {b.s2.real(), b.s2.imag()}},
                      {"predicted_sign", b.predicted_sign},
                      {"relative_difference", b.relative_difference},
                      {"braid_m", b.braid_m}});
}

CriticalPoint critical(const ChevalleyGroup& G, const std::vector<double>& h, double z, const std::string& kind) {
    check_rank(G, h.size(), "h");
    const auto hv = to_vec<Eigen::VectorXd>(h);
    if (kind == "positive") return find_positive_critical(G, hv, z);
    if (kind == "negative") return find_negative_critical(G, hv, z);
    throw DomainError("kind must be 'positive' or 'negative', got '" + kind + "'");
}

py::object critical_point_py(const std::string& type, const std::vector<double>& h, double z,
                             const std::string& kind) {
    return to_py(to_json(critical(*group(type), h, z, kind)));
}

py::object peterson_py(const std::string& type, const std::vector<double>& h, double z, const std::string& kind,
                       double tolerance) {
    const auto G = group(type);
    return to_py(to_json(peterson_check(*G, critical(*G, h, z, kind), tolerance)));
}

py::object census_py(const std::string& type, const std::vector<double>& h, double z, int starts,
                     std::uint64_t seed) {
    const auto G = group(type);
    check_rank(*G, h.size(), "h");
    CensusOptions o;
    o.starts = starts;
    o.seed = seed;
    std::vector<CriticalPoint> pts;
    {
        py::gil_scoped_release release;
        pts = critical_census(*G, to_vec<Eigen::VectorXd>(h), z, {}, o);
    }
    json out = json::array();
    for (const auto& p : pts) out.push_back(to_json(p));
    return to_py(out);
}

std::vector<Complex> kim_invariants_py(const std::vector<Complex>& q, const std::vector<Complex>& hstar) {
    const CVector v = kim_invariants(to_vec<CVector>(q), to_vec<CVector>(hstar));
    return {v.data(), v.data() + v.size()};
}

py::object identities_py(const std::string& type, int samples, std::uint64_t seed) {
    const auto G = group(type);
    IdentityOptions o;
    o.samples = samples;
    o.seed = seed;
    std::vector<IdentityCheck> checks;
    {
        py::gil_scoped_release release;
        checks = run_identity_suite(*G, o);
    }
    json out = json::array();
    for (const auto& c : checks) out.push_back(to_json(c));
    return to_py(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mirror superpotentials, oscillating integrals and quantum Toda checks for full flag varieties";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<OffChartError>(m, "OffChartError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.def("root_data", &root_data, py::arg("type"),
          "Cartan matrix, positive roots, reduced word of w0 and fundamental dimensions.");
    m.def("superpotential", &superpotential_py, py::arg("type"), py::arg("a"), py::arg("h"), py::arg("z") = 1.0,
          py::arg("word") = py::none(), "F at chart coordinates a over h (coroot coordinates).");
    m.def("s_gamma", &s_gamma_py, py::arg("type"), py::arg("h"), py::arg("z") = 1.0, py::arg("cycle") = "torus",
          py::arg("word") = py::none(), py::arg("nodes") = 32, py::arg("radii") = std::vector<double>{},
          py::arg("saddle_radii") = false, py::arg("bare") = false, py::arg("orientation") = 1,
          py::arg("threads") = 0u, "Oscillating integral of e^F omega over a torus or positive cycle.");
    m.def("verify_toda", &verify_toda_py, py::arg("type"), py::arg("h"), py::arg("z") = 1.0,
          py::arg("cycle") = "torus", py::arg("nodes") = 32, py::arg("fd_step") = 1e-2, py::arg("tolerance") = 1e-6,
          py::arg("threads") = 0u, "Quantum Toda residual of S at h.");
    m.def("braid_compare", &braid_compare_py, py::arg("type"), py::arg("h"), py::arg("z"), py::arg("word1"),
          py::arg("word2"), py::arg("nodes") = 32, py::arg("saddle_radii") = false);
    m.def("critical_point", &critical_point_py, py::arg("type"), py::arg("h"), py::arg("z") = 1.0,
          py::arg("kind") = "positive", "Totally positive or negative critical point of F.");
    m.def("peterson_check", &peterson_py, py::arg("type"), py::arg("h"), py::arg("z") = 1.0,
          py::arg("kind") = "positive", py::arg("tolerance") = 1e-8);
    m.def("critical_census", &census_py, py::arg("type"), py::arg("h"), py::arg("z") = 1.0, py::arg("starts") = 64,
          py::arg("seed") = 1);
    m.def("kim_invariants", &kim_invariants_py, py::arg("q"), py::arg("hstar"));
    m.def("identities", &identities_py, py::arg("type"), py::arg("samples") = 20, py::arg("seed") = 1);
}
