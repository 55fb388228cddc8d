// Command-line front end: roots, integrate, verify-toda, crit, braid-check, identities.
#include "flagmirror/crit.hpp"
#include "flagmirror/error.hpp"
#include "flagmirror/identities.hpp"
#include "flagmirror/parallel.hpp"
#include "flagmirror/toda.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace flagmirror;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitError = 2;

struct RunConfig {
    std::string type;
    std::string word;
    std::vector<double> h;
    double z = 1.0;
    std::string out;
    int threads = -1;  // -1: FLAGMIRROR_THREADS or hardware

    // cycle and quadrature
    std::string cycle = "torus";
    int nodes = 0;  // 0: module default for the cycle kind
    int reference_nodes = 0;
    std::vector<double> radii;
    bool saddle_radii = false;
    double window_margin = 40.0;
    int orientation = 1;
    bool bare = false;
    std::string csv;
    long long csv_rows = 100000;

    double fd_step = 1e-2;
    double tolerance = -1;  // -1: per-command default

    std::string kind = "positive";
    int starts = 64;
    std::uint64_t seed = 1;
    bool peterson = true;

    std::string word1, word2;
    int samples = 20;
    int jacobian_samples = 3;
};

unsigned thread_count(const RunConfig& c) {
    if (c.threads >= 0) return static_cast<unsigned>(c.threads);
    if (const char* env = std::getenv("FLAGMIRROR_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        throw DomainError(std::string("FLAGMIRROR_THREADS must be a non-negative integer, got '") + env + "'");
    }
    return 0;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct Context {
    GroupPtr G;
    Eigen::VectorXd h;
    WeylWord word;
    unsigned threads = 0;
};

Context prepare(const RunConfig& c) {
    Context ctx;
    ctx.G = make_group(c.type);
    const int n = ctx.G->rank();
    if (c.h.empty())
        ctx.h = Eigen::VectorXd::Zero(n);
    else if (static_cast<int>(c.h.size()) != n)
        throw DomainError("--h needs " + std::to_string(n) + " coroot coordinates for " + c.type);
    else
        ctx.h = Eigen::Map<const Eigen::VectorXd>(c.h.data(), n);
    ctx.word = c.word.empty() ? ctx.G->w0_word() : parse_word(c.word);
    if (!(c.z > 0)) throw DomainError("--z must be positive");
    ctx.threads = resolve_threads(thread_count(c));
    return ctx;
}

json base_config(const RunConfig& c, const Context& ctx) {
    const InvariantForm f = invariant_form_h(ctx.G->datum());
    const Eigen::VectorXd s = f.basis.fullPivLu().solve(ctx.h);
    return {{"type", ctx.G->datum().name()},
            {"rank", ctx.G->rank()},
            {"word", ctx.word.str()},
            {"h", {{"coroot", to_vec(ctx.h)}, {"orthonormal", to_vec(s)}}},
            {"z", c.z},
            {"threads", ctx.threads}};
}

CycleSpec cycle_spec(const RunConfig& c, const Context& ctx) {
    CycleSpec s;
    s.kind = parse_cycle_kind(c.cycle);
    s.word = ctx.word;
    s.radii = c.radii;
    s.saddle_radii = c.saddle_radii;
    if (c.nodes > 0) (s.kind == CycleKind::Torus ? s.nodes_per_dim : s.positive_nodes) = c.nodes;
    s.reference_nodes = c.reference_nodes;
    s.window_margin = c.window_margin;
    s.orientation = c.orientation;
    s.bare_form = c.bare;
    return s;
}

struct Outcome {
    json report;
    bool pass = true;
    std::string summary;
};

Outcome run_roots(const RunConfig& c) {
    const Context ctx = prepare(c);
    const auto& d = ctx.G->datum();
    json roots = json::array();
    for (const auto& r : ctx.G->roots().positive_roots) roots.push_back(r);
    json dims = json::array();
    for (const auto& m : ctx.G->modules()) dims.push_back(m.dim);
    const InvariantForm f = invariant_form_h(d);
    json gram = json::array(), basis = json::array();
    for (int i = 0; i < d.rank; ++i) {
        gram.push_back(to_vec(f.gram_coroot.row(i).transpose()));
        basis.push_back(to_vec(f.basis.col(i)));
    }
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["result"] = {{"cartan", d.cartan},
                          {"symmetrizer", d.d},
                          {"positive_roots", roots},
                          {"N", ctx.G->N()},
                          {"w0_word", ctx.G->w0_word().str()},
                          {"fundamental_dimensions", dims},
                          {"gram_coroot", gram},
                          {"orthonormal_basis", basis}};
    o.summary = d.name() + ": " + std::to_string(ctx.G->N()) + " positive roots, w0 = " + ctx.G->w0_word().str();
    return o;
}

Outcome run_integrate(const RunConfig& c) {
    const Context ctx = prepare(c);
    const CVector h = ctx.h.cast<Complex>();
    const auto r = s_gamma(*ctx.G, cycle_spec(c, ctx), h, c.z, {ctx.threads, true});
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["config"]["cycle"] = to_json(r.resolved);
    o.report["result"] = to_json(r);
    if (!c.csv.empty()) {
        std::ofstream os(c.csv);
        if (!os) throw Error("cannot open " + c.csv);
        const int n = r.resolved.kind == CycleKind::Torus ? r.resolved.nodes_per_dim : r.resolved.positive_nodes;
        write_integrand_csv(os, *ctx.G, r.resolved, h, c.z, n, c.csv_rows);
        o.report["config"]["csv"] = c.csv;
    }
    o.pass = r.failures == 0;
    std::ostringstream s;
    s << "S = " << r.value.real() << (r.value.imag() < 0 ? " - " : " + ") << std::abs(r.value.imag())
      << "i, refinement_delta " << r.refinement_delta;
    o.summary = s.str();
    return o;
}

Outcome run_verify(const RunConfig& c) {
    const Context ctx = prepare(c);
    VerifyOptions vo;
    vo.fd_step = c.fd_step;
    vo.tolerance = c.tolerance > 0 ? c.tolerance : 1e-6;
    vo.quad.threads = ctx.threads;
    const auto r = verify(*ctx.G, cycle_spec(c, ctx), ctx.h, c.z, vo);
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["config"]["cycle"] = to_json(r.cycle);
    o.report["config"]["fd_step"] = vo.fd_step;
    o.report["config"]["tolerance"] = vo.tolerance;
    o.report["result"] = to_json(r);
    o.pass = r.pass;
    std::ostringstream s;
    s << "residual_rel " << r.residual_rel << " (tolerance " << vo.tolerance << ", richardson ratio "
      << r.richardson_ratio << ")";
    o.summary = s.str();
    return o;
}

Outcome run_crit(const RunConfig& c) {
    const Context ctx = prepare(c);
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["config"]["kind"] = c.kind;
    const WeylWord word = c.word.empty() ? WeylWord{} : ctx.word;
    if (c.kind == "census") {
        CensusOptions co;
        co.starts = c.starts;
        co.seed = c.seed;
        co.threads = ctx.threads;
        o.report["config"]["starts"] = c.starts;
        o.report["config"]["seed"] = c.seed;
        const auto pts = critical_census(*ctx.G, ctx.h, c.z, word, co);
        json arr = json::array();
        for (const auto& p : pts) arr.push_back(to_json(p));
        o.report["result"] = {{"count", pts.size()}, {"points", arr}};
        o.summary = std::to_string(pts.size()) + " distinct critical points from " + std::to_string(c.starts) + " starts";
        return o;
    }
    CriticalPoint cp;
    if (c.kind == "positive")
        cp = find_positive_critical(*ctx.G, ctx.h, c.z, word);
    else if (c.kind == "negative")
        cp = find_negative_critical(*ctx.G, ctx.h, c.z, word);
    else
        throw DomainError("--kind must be positive, negative or census");
    o.report["result"] = to_json(cp);
    const double tol = c.tolerance > 0 ? c.tolerance : 1e-8;
    o.report["config"]["tolerance"] = tol;
    o.pass = cp.hessian_definite && cp.gradient_norm <= tol * std::max(1.0, std::abs(cp.value));
    std::ostringstream s;
    s << c.kind << " critical value F = " << cp.value.real() << ", gradient " << cp.gradient_norm;
    if (c.peterson && ctx.G->datum().series == Series::A) {
        const auto pr = peterson_check(*ctx.G, cp, tol);
        o.report["result"]["peterson"] = to_json(pr);
        o.pass = o.pass && pr.pass();
        s << ", peterson " << (pr.pass() ? "pass" : "fail");
    }
    o.summary = s.str();
    return o;
}

Outcome run_braid(const RunConfig& c) {
    const Context ctx = prepare(c);
    const WeylWord w1 = c.word1.empty() ? ctx.G->w0_word() : parse_word(c.word1);
    WeylWord w2;
    if (!c.word2.empty()) {
        w2 = parse_word(c.word2);
    } else {
        const auto pos = braid_positions(ctx.G->datum(), w1);
        if (pos.empty()) throw DomainError("no braid move applies to " + w1.str() + "; pass --word2");
        w2 = braid_move(ctx.G->datum(), w1, pos.front()).word;
    }
    CycleSpec base = cycle_spec(c, ctx);
    base.kind = CycleKind::Torus;
    const auto r = braid_compare(*ctx.G, ctx.h.cast<Complex>(), c.z, w1, w2, base, {ctx.threads, false});
    const double tol = c.tolerance > 0 ? c.tolerance : 1e-10;
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["config"]["word1"] = w1.str();
    o.report["config"]["word2"] = w2.str();
    o.report["config"]["cycle"] = to_json(resolve_cycle(*ctx.G, base, ctx.h.cast<Complex>(), c.z));
    o.report["config"]["tolerance"] = tol;
    o.report["result"] = {{"S1", {{"re", r.s1.real()}, {"im", r.s1.imag()}}},
                          {"S2", {{"re", r.s2.real()}, {"im", r.s2.imag()}}},
                          {"predicted_sign", r.predicted_sign},
                          {"braid_m", r.braid_m},
                          {"relative_difference", r.relative_difference}};
    o.pass = r.relative_difference <= tol;
    std::ostringstream s;
    s << w1.str() << " vs " << w2.str() << ": relative difference " << r.relative_difference;
    o.summary = s.str();
    return o;
}

Outcome run_identities(const RunConfig& c) {
    const Context ctx = prepare(c);
    IdentityOptions io;
    io.samples = c.samples;
    io.seed = c.seed;
    io.jacobian_samples = c.jacobian_samples;
    const auto checks = run_identity_suite(*ctx.G, io);
    Outcome o;
    o.report["config"] = base_config(c, ctx);
    o.report["config"]["samples"] = c.samples;
    o.report["config"]["jacobian_samples"] = c.jacobian_samples;
    o.report["config"]["seed"] = c.seed;
    json arr = json::array();
    int failed = 0;
    for (const auto& k : checks) {
        arr.push_back(to_json(k));
        if (!k.pass) ++failed;
    }
    o.report["result"] = {{"checks", arr}};
    o.pass = failed == 0;
    o.summary = std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " identities hold";
    return o;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--type", c.type, "Cartan type: A1, A2, A3, B2, C2, G2")->required();
    sub->add_option("--h", c.h, "h in coroot coordinates, comma separated (default 0)")->delimiter(',');
    sub->add_option("--z", c.z, "z > 0")->capture_default_str();
    sub->add_option("--word", c.word, "reduced word of w0, 1-based, e.g. 1,2,1");
    sub->add_option("--out", c.out, "write the JSON report here instead of stdout");
    sub->add_option("--threads", c.threads, "worker threads (0 = all; default FLAGMIRROR_THREADS or all)");
}

void add_cycle(CLI::App* sub, RunConfig& c) {
    sub->add_option("--cycle", c.cycle, "torus | positive")->capture_default_str();
    sub->add_option("--nodes", c.nodes, "nodes per dimension (default 32 torus, 200 positive)");
    sub->add_option("--ref-nodes", c.reference_nodes, "node count for refinement_delta (default half)");
    sub->add_option("--radii", c.radii, "torus radii, comma separated")->delimiter(',');
    sub->add_flag("--saddle-radii", c.saddle_radii, "torus through the real critical point");
    sub->add_option("--margin", c.window_margin, "decay margin for the positive window")->capture_default_str();
    sub->add_option("--orientation", c.orientation, "+1 or -1")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for the flag-variety mirror and quantum Toda"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    RunConfig c;

    auto* roots = app.add_subcommand("roots", "root system, w0 word and fundamental representations");
    add_common(roots, c);

    auto* integ = app.add_subcommand("integrate", "S over a torus or positive cycle");
    add_common(integ, c);
    add_cycle(integ, c);
    integ->add_flag("--bare", c.bare, "integrate the volume form alone");
    integ->add_option("--csv", c.csv, "write integrand samples to this CSV file");
    integ->add_option("--csv-rows", c.csv_rows, "row limit for the CSV")->capture_default_str();

    auto* toda = app.add_subcommand("verify-toda", "quantum Toda residual of S");
    add_common(toda, c);
    add_cycle(toda, c);
    toda->add_option("--fd-step", c.fd_step, "finite-difference step")->capture_default_str();
    toda->add_option("--tol", c.tolerance, "relative residual tolerance (default 1e-6)");

    auto* crit = app.add_subcommand("crit", "critical points of the superpotential");
    add_common(crit, c);
    crit->add_option("--kind", c.kind, "positive | negative | census")->capture_default_str();
    crit->add_option("--starts", c.starts, "census starts")->capture_default_str();
    crit->add_option("--seed", c.seed, "census seed")->capture_default_str();
    crit->add_option("--tol", c.tolerance, "gradient and Peterson tolerance (default 1e-8)");
    crit->add_flag("!--no-peterson", c.peterson, "skip the Peterson/Kim cross-check");

    auto* braid = app.add_subcommand("braid-check", "word independence of S under a braid move");
    add_common(braid, c);
    add_cycle(braid, c);
    braid->add_option("--word1", c.word1, "first word (default: pinned w0 word)");
    braid->add_option("--word2", c.word2, "second word (default: first braid move of word1)");
    braid->add_option("--tol", c.tolerance, "relative tolerance (default 1e-10)");

    auto* ident = app.add_subcommand("identities", "property-based identity suite");
    add_common(ident, c);
    ident->add_option("--samples", c.samples, "random samples per identity")->capture_default_str();
    ident->add_option("--jacobian-samples", c.jacobian_samples, "samples for Jacobian checks")->capture_default_str();
    ident->add_option("--seed", c.seed, "seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    Outcome o;
    try {
        if (cmd == "roots") o = run_roots(c);
        else if (cmd == "integrate") o = run_integrate(c);
        else if (cmd == "verify-toda") o = run_verify(c);
        else if (cmd == "crit") o = run_crit(c);
        else if (cmd == "braid-check") o = run_braid(c);
        else o = run_identities(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }

    o.report["command"] = cmd;
    o.report["verdict"] = o.pass ? "pass" : "fail";
    const std::string line = std::string(o.pass ? "PASS " : "FAIL ") + cmd + " " + c.type + ": " + o.summary;
    if (c.out.empty()) {
        std::cout << o.report.dump(2) << '\n';
        std::cerr << line << '\n';
    } else {
        std::ofstream os(c.out);
        if (!os) {
            std::cerr << "error: cannot open " << c.out << '\n';
            return kExitError;
        }
        os << o.report.dump(2) << '\n';
        std::cout << line << '\n';
    }
    return o.pass ? kExitPass : kExitFail;
}
