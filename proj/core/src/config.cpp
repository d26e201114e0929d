#include "kfp/config.hpp"

#include <fstream>
#include <set>

namespace kfp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config." + path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        fail(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key))
            fail(path, "unknown key \"" + key + "\"");
}

double get_num(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        fail(path, std::string("missing key \"") + key + "\"");
    if (!j[key].is_number())
        fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& path, const char* key,
                  double dflt) {
    if (!j.contains(key))
        return dflt;
    if (!j[key].is_number())
        fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int get_int_or(const json& j, const std::string& path, const char* key, int dflt) {
    if (!j.contains(key))
        return dflt;
    if (!j[key].is_number_integer())
        fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

Vec get_vec(const json& j, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of numbers");
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number())
            fail(path, "expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

SymMatrix get_sym(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a nonempty array of rows");
    const int n = static_cast<int>(j.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            fail(path, "expected a square matrix");
        for (int k = 0; k < n; ++k) {
            if (!j[i][k].is_number())
                fail(path, "expected numeric entries");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return SymMatrix(m);
}

PotentialModel parse_potential(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail("potential", "expected an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "quadratic") {
            check_keys(j, "potential", {"kind", "m_inv", "p", "q"});
            if (!j.contains("m_inv"))
                fail("potential", "quadratic requires \"m_inv\"");
            const SymMatrix m_inv = get_sym(j["m_inv"], "potential.m_inv");
            Vec p(m_inv.dim(), 0.0);
            if (j.contains("p"))
                p = get_vec(j["p"], "potential.p");
            return PotentialModel::quadratic(m_inv, p,
                                             get_num_or(j, "potential", "q", 0.0));
        }
        if (kind == "radial_poly") {
            check_keys(j, "potential", {"kind", "n", "r", "k", "v0"});
            Vec v0;
            if (j.contains("v0"))
                v0 = get_vec(j["v0"], "potential.v0");
            return PotentialModel::radial_poly(get_int_or(j, "potential", "n", 1),
                                               get_num(j, "potential", "r"),
                                               get_int_or(j, "potential", "k", 2),
                                               v0);
        }
        if (kind == "double_well") {
            check_keys(j, "potential", {"kind", "n", "r1", "r2"});
            return PotentialModel::double_well(get_int_or(j, "potential", "n", 1),
                                               get_num(j, "potential", "r1"),
                                               get_num(j, "potential", "r2"));
        }
    } catch (const std::invalid_argument& e) {
        fail("potential", e.what());
    }
    fail("potential.kind", "unknown kind \"" + kind + "\"");
}

F0Spec parse_f0(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail("solver.f0", "expected an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "steady") {
        check_keys(j, "solver.f0", {"kind"});
        return SteadyInit{};
    }
    if (kind == "gaussian_shifted") {
        check_keys(j, "solver.f0", {"kind", "mean", "cov"});
        GaussianInit g;
        g.mean = j.contains("mean") ? get_vec(j["mean"], "solver.f0.mean")
                                    : Vec{1.0, 0.0};
        g.cov = j.contains("cov") ? get_sym(j["cov"], "solver.f0.cov")
                                  : SymMatrix::identity(2);
        return g;
    }
    if (kind == "h_perturbation") {
        check_keys(j, "solver.f0", {"kind", "amplitude", "x0", "v0", "width"});
        BumpInit b;
        b.amplitude = get_num_or(j, "solver.f0", "amplitude", 0.5);
        b.x0 = get_num_or(j, "solver.f0", "x0", 0.0);
        b.v0 = get_num_or(j, "solver.f0", "v0", 0.0);
        b.width = get_num_or(j, "solver.f0", "width", 1.0);
        return b;
    }
    if (kind == "rough_indicator") {
        check_keys(j, "solver.f0", {"kind", "x_lo", "x_hi", "smoothing"});
        RoughIndicatorInit r;
        r.x_lo = get_num_or(j, "solver.f0", "x_lo", -0.5);
        r.x_hi = get_num_or(j, "solver.f0", "x_hi", 0.5);
        r.smoothing = get_num_or(j, "solver.f0", "smoothing", 0.0);
        return r;
    }
    fail("solver.f0.kind", "unknown kind \"" + kind + "\"");
}

} // namespace

RunConfig parse_config(const nlohmann::json& j) {
    check_keys(j, "(root)",
               {"potential", "model", "assumption", "rate", "solver", "hypo",
                "certify", "output", "sweep"});
    if (!j.contains("potential"))
        fail("potential", "missing block");
    if (!j.contains("model"))
        fail("model", "missing block");

    RunConfig cfg;
    cfg.echo = j;
    cfg.potential = parse_potential(j["potential"]);
    const int n = cfg.potential->n();

    {
        const json& m = j["model"];
        check_keys(m, "model", {"nu", "sigma"});
        cfg.nu = get_num(m, "model", "nu");
        cfg.sigma = get_num(m, "model", "sigma");
        if (!(cfg.nu > 0.0) || !(cfg.sigma > 0.0))
            fail("model", "nu and sigma must be positive");
    }

    cfg.assumption.box = Box{Vec(n, -5.0), Vec(n, 5.0)};
    cfg.assumption.resolution = GridSpec(n, n == 1 ? 201 : 21);
    if (j.contains("assumption")) {
        const json& a = j["assumption"];
        check_keys(a, "assumption", {"box", "resolution", "c", "tau"});
        if (a.contains("box")) {
            check_keys(a["box"], "assumption.box", {"lo", "hi"});
            cfg.assumption.box.lo = get_vec(a["box"]["lo"], "assumption.box.lo");
            cfg.assumption.box.hi = get_vec(a["box"]["hi"], "assumption.box.hi");
            if (cfg.assumption.box.dim() != n || cfg.assumption.box.empty())
                fail("assumption.box", "box must be nonempty with dimension n");
        }
        if (a.contains("resolution")) {
            cfg.assumption.resolution.clear();
            for (const auto& e : a["resolution"]) {
                if (!e.is_number_integer() || e.get<int>() < 1)
                    fail("assumption.resolution", "expected positive integers");
                cfg.assumption.resolution.push_back(e.get<int>());
            }
            if (static_cast<int>(cfg.assumption.resolution.size()) != n)
                fail("assumption.resolution", "dimension mismatch");
        }
        if (a.contains("c"))
            cfg.assumption.c = get_num(a, "assumption", "c");
        if (a.contains("tau"))
            cfg.assumption.tau = get_num(a, "assumption", "tau");
    }

    if (j.contains("rate")) {
        const json& r = j["rate"];
        check_keys(r, "rate", {"c_pi", "epsilon_b"});
        if (r.contains("c_pi")) {
            if (r["c_pi"].is_string()) {
                if (r["c_pi"].get<std::string>() != "quadratic-auto")
                    fail("rate.c_pi", "expected a number or \"quadratic-auto\"");
                cfg.rate.c_pi_auto = true;
            } else if (r["c_pi"].is_number()) {
                cfg.rate.c_pi_auto = false;
                cfg.rate.c_pi = r["c_pi"].get<double>();
                if (!(*cfg.rate.c_pi > 0.0))
                    fail("rate.c_pi", "must be positive");
            } else {
                fail("rate.c_pi", "expected a number or \"quadratic-auto\"");
            }
        }
        if (r.contains("epsilon_b"))
            cfg.rate.epsilon_b = get_num(r, "rate", "epsilon_b");
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, "solver", {"nx", "nv", "dt", "T", "sample_every", "f0"});
        cfg.solver.nx = get_int_or(s, "solver", "nx", cfg.solver.nx);
        cfg.solver.nv = get_int_or(s, "solver", "nv", cfg.solver.nv);
        cfg.solver.dt = get_num_or(s, "solver", "dt", 0.0);
        cfg.solver.T = get_num_or(s, "solver", "T", cfg.solver.T);
        cfg.solver.sample_every =
            get_int_or(s, "solver", "sample_every", cfg.solver.sample_every);
        if (s.contains("f0"))
            cfg.solver.f0 = parse_f0(s["f0"]);
        if (cfg.solver.nx < 64 || cfg.solver.nv < 64)
            fail("solver", "nx and nv must be at least 64");
        if (!(cfg.solver.T > 0.0))
            fail("solver.T", "must be positive");
    }

    if (j.contains("hypo")) {
        const json& hc = j["hypo"];
        check_keys(hc, "hypo",
                   {"nx", "nv", "t_lo", "t_hi", "dt", "x_lo", "x_hi", "smoothing"});
        cfg.hypo.nx = get_int_or(hc, "hypo", "nx", cfg.hypo.nx);
        cfg.hypo.nv = get_int_or(hc, "hypo", "nv", cfg.hypo.nv);
        cfg.hypo.t_lo = get_num_or(hc, "hypo", "t_lo", cfg.hypo.t_lo);
        cfg.hypo.t_hi = get_num_or(hc, "hypo", "t_hi", cfg.hypo.t_hi);
        cfg.hypo.dt = get_num_or(hc, "hypo", "dt", cfg.hypo.dt);
        cfg.hypo.f0.x_lo = get_num_or(hc, "hypo", "x_lo", cfg.hypo.f0.x_lo);
        cfg.hypo.f0.x_hi = get_num_or(hc, "hypo", "x_hi", cfg.hypo.f0.x_hi);
        cfg.hypo.f0.smoothing = get_num_or(hc, "hypo", "smoothing", 0.0);
    }

    if (j.contains("certify")) {
        const json& c = j["certify"];
        check_keys(c, "certify", {"a", "gamma", "t0", "hessnorm_max"});
        if (c.contains("a"))
            cfg.certify.a = get_num(c, "certify", "a");
        if (c.contains("gamma"))
            cfg.certify.gamma = get_num(c, "certify", "gamma");
        cfg.certify.t0 = get_num_or(c, "certify", "t0", cfg.certify.t0);
        if (c.contains("hessnorm_max"))
            cfg.certify.hessnorm_max = get_num(c, "certify", "hessnorm_max");
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        check_keys(o, "output", {"dir", "formats"});
        if (o.contains("dir")) {
            if (!o["dir"].is_string())
                fail("output.dir", "expected a string");
            cfg.output.dir = o["dir"].get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o["formats"].is_array())
                fail("output.formats", "expected an array");
            cfg.output.csv = cfg.output.json = false;
            for (const auto& e : o["formats"]) {
                const std::string f = e.is_string() ? e.get<std::string>() : "";
                if (f == "csv")
                    cfg.output.csv = true;
                else if (f == "json")
                    cfg.output.json = true;
                else
                    fail("output.formats", "unknown format");
            }
        }
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        check_keys(s, "sweep", {"alpha0", "nu"});
        SweepConfig sw;
        if (s.contains("alpha0"))
            sw.alpha0 = get_vec(s["alpha0"], "sweep.alpha0");
        if (s.contains("nu"))
            sw.nu = get_vec(s["nu"], "sweep.nu");
        if (sw.alpha0.empty())
            sw.alpha0 = {1.0};
        if (sw.nu.empty())
            sw.nu = {cfg.nu};
        cfg.sweep = sw;
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config: parse error in \"" + path + "\": " + e.what());
    }
    return parse_config(j);
}

} // namespace kfp
