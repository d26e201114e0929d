#include "kfp/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

namespace kfp {

namespace {

double wall_seconds() {
    using clk = std::chrono::steady_clock;
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

struct ResolvedParams {
    HypoParams p;
    double alpha0 = 0.0;
    double c_pi = 0.0;
    ConditionCertificate certificate;
    bool have_certificate = false;
    bool feasible = true;
    RateReport rate;
};

/// Chooses (c, tau): fixed values from the assumption block when present,
/// otherwise the feasibility grid search ranked by the decay rate.
ResolvedParams resolve_params(const RunConfig& cfg, bool need_certificate) {
    const PotentialModel& V = *cfg.potential;
    ResolvedParams out;
    out.alpha0 =
        estimate_alpha0(V, cfg.assumption.box, cfg.assumption.resolution).alpha0;
    out.c_pi = resolve_c_pi(cfg, out.alpha0);

    if (cfg.assumption.c && cfg.assumption.tau) {
        out.p = HypoParams{cfg.nu, cfg.sigma, *cfg.assumption.c, *cfg.assumption.tau};
        out.p.validate();
        out.rate = decay_rate(out.p, out.alpha0, out.c_pi, cfg.rate.epsilon_b);
        if (need_certificate) {
            out.certificate =
                check_assumption(V, cfg.assumption.box, cfg.assumption.resolution,
                                 out.p, ConditionKind::assumption_psd_block);
            out.have_certificate = true;
            out.feasible = out.certificate.passed && out.rate.ok;
        } else {
            out.feasible = out.rate.ok;
        }
        return out;
    }

    FeasibleSearchResult fs =
        find_feasible(V, cfg.assumption.box, cfg.assumption.resolution, cfg.nu,
                      cfg.sigma, out.c_pi, cfg.rate.epsilon_b);
    out.feasible = fs.found;
    if (fs.found) {
        out.p = fs.params;
        out.certificate = fs.certificate;
        out.have_certificate = true;
        out.rate = fs.rate;
    } else {
        out.p = HypoParams{cfg.nu, cfg.sigma, -out.alpha0, 0.0};
        out.certificate =
            check_assumption(V, cfg.assumption.box, cfg.assumption.resolution,
                             out.p, ConditionKind::assumption_psd_block);
        out.have_certificate = true;
    }
    return out;
}

void mark_sharp(RateReport& r, const RunConfig& cfg) {
    if (cfg.potential->is_quadratic() &&
        (r.case_tag == RateCase::a || r.case_tag == RateCase::d))
        r.sharp = true;
}

void maybe_write(const std::string& outdir, const std::string& name,
                 const std::string& text) {
    if (outdir.empty())
        return;
    std::filesystem::create_directories(outdir);
    write_text_file(outdir + "/" + name, text);
}

CsvTable sweep_rates(const RunConfig& cfg) {
    CsvTable t;
    t.header = {"case", "lambda", "c", "tau", "a", "A", "B", "s", "c_pi"};
    if (!cfg.sweep)
        return t;
    for (double nu : cfg.sweep->nu)
        for (double a0 : cfg.sweep->alpha0) {
            if (!(a0 > 0.0))
                continue;
            const double c_pi = poincare_constant_quadratic(nu, cfg.sigma, a0);
            RateReport r = decay_rate(HypoParams{nu, cfg.sigma, -a0, 0.0}, a0,
                                      c_pi, cfg.rate.epsilon_b);
            append_rate_row(t, r);
        }
    return t;
}

} // namespace

double resolve_c_pi(const RunConfig& cfg, double alpha0) {
    if (!cfg.rate.c_pi_auto)
        return *cfg.rate.c_pi;
    if (!cfg.potential->is_quadratic())
        throw ConfigError("config.rate.c_pi: \"quadratic-auto\" needs a quadratic "
                          "potential; supply a numeric Poincare constant");
    return poincare_constant_quadratic(cfg.nu, cfg.sigma, alpha0);
}

CommandResult run_check(const RunConfig& cfg) {
    const PotentialModel& V = *cfg.potential;
    CommandResult res;

    if (cfg.assumption.c && cfg.assumption.tau) {
        HypoParams p{cfg.nu, cfg.sigma, *cfg.assumption.c, *cfg.assumption.tau};
        p.validate();
        const ConditionCertificate cert =
            check_assumption(V, cfg.assumption.box, cfg.assumption.resolution, p,
                             ConditionKind::assumption_psd_block);
        res.payload = to_json(cert);
        res.exit_code = cert.passed ? kExitOk : kExitInfeasible;
        return res;
    }

    const ResolvedParams rp = resolve_params(cfg, true);
    res.payload = to_json(rp.certificate);
    res.payload["feasible"] = rp.feasible;
    res.exit_code = rp.feasible ? kExitOk : kExitInfeasible;
    return res;
}

CommandResult run_rate(const RunConfig& cfg) {
    ResolvedParams rp = resolve_params(cfg, false);
    mark_sharp(rp.rate, cfg);
    CommandResult res;
    res.payload = to_json(rp.rate);
    res.exit_code = (rp.feasible && rp.rate.ok) ? kExitOk : kExitInfeasible;
    return res;
}

CommandResult run_certify(const RunConfig& cfg) {
    const PotentialModel& V = *cfg.potential;
    const ResolvedParams rp = resolve_params(cfg, true);
    const double nu = cfg.nu, sigma = cfg.sigma, alpha0 = rp.alpha0;

    // shift keeping P uniformly positive definite; at least c + nu^2/4 when a
    // feasible c is known
    double a;
    if (cfg.certify.a) {
        a = *cfg.certify.a;
    } else {
        a = 0.25 * nu * nu - alpha0 + std::max(1.0, 0.25 * nu * nu);
        if (rp.feasible)
            a = std::max(a, rp.p.c + 0.25 * nu * nu);
        a = std::max(a, 0.0);
    }
    if (!(a + alpha0 > 0.25 * nu * nu))
        throw NumericError("certify: shift a leaves P indefinite");

    double gamma;
    if (cfg.certify.gamma)
        gamma = *cfg.certify.gamma;
    else
        gamma = gamma_for_delta(a, 0.8 * nu, nu, sigma, alpha0);

    const LyapunovSelection sel = select_gamma_delta(a, gamma, nu, sigma, alpha0);
    const ConditionCertificate lyap = verify_lyapunov_inequality(
        V, cfg.assumption.box, cfg.assumption.resolution, sel, rp.p);
    const SandwichConstants sc = sandwich_constants(a, alpha0, nu);
    const auto [lowerC, upperC] = verify_sandwich(
        V, cfg.assumption.box, cfg.assumption.resolution, a, alpha0, rp.p);

    double hessnorm_max = 0.0;
    if (cfg.certify.hessnorm_max) {
        hessnorm_max = *cfg.certify.hessnorm_max;
    } else {
        for_each_grid_point(cfg.assumption.box, cfg.assumption.resolution,
                            [&](const Vec& x) {
                                const PotentialJet J = jet(V, x);
                                Matrix s = J.hessian.mat();
                                for (int i = 0; i < V.n(); ++i)
                                    s(i, i) += rp.p.c;
                                hessnorm_max =
                                    std::max(hessnorm_max, s.frobenius_norm());
                            });
    }
    const HypoellipticCertificate hypo =
        hypoelliptic_certificate(cfg.certify.t0, rp.p, hessnorm_max, V.n());

    CommandResult res;
    res.payload["params"] = to_json(rp.p);
    res.payload["alpha0"] = alpha0;
    res.payload["selection"] = to_json(sel);
    res.payload["lyapunov_certificate"] = to_json(lyap);
    res.payload["sandwich"] = OrderedJson{{"constants", to_json(sc)},
                                          {"lower", to_json(lowerC)},
                                          {"upper", to_json(upperC)}};
    res.payload["hypoelliptic"] = to_json(hypo);
    const bool all_ok =
        lyap.passed && lowerC.passed && upperC.passed && hypo.feasible;
    res.exit_code = all_ok ? kExitOk : kExitInfeasible;
    return res;
}

CommandResult run_propagator(const RunConfig& cfg, const std::string& outdir) {
    if (!cfg.potential->is_quadratic())
        throw ConfigError("config.potential: the propagator reduction requires a "
                          "quadratic potential");
    const auto& q = std::get<QuadraticPotential>(cfg.potential->kind());
    const OdeSystem sys = build_ode(q.m_inv, cfg.nu, cfg.sigma);
    PropagatorCurve curve = norm_curve(sys, default_time_grid());
    const JordanReport jr = classify(q.m_inv, cfg.nu);
    const FittedRate fr = fit_rate(curve, 20.0, 50.0);
    curve.fitted_rate = fr.rate;
    curve.fitted_poly_degree = fr.poly_degree;

    if (cfg.output.csv)
        maybe_write(outdir, "propagator.csv", to_csv(propagator_csv(curve, cfg.nu)));

    CommandResult res;
    res.payload["classification"] = to_json(jr);
    res.payload["fit"] = to_json(fr);
    res.payload["hypotheses"] =
        OrderedJson{{"positive_stable", sys.positive_stable},
                    {"no_invariant_kerD_subspace", sys.no_invariant_kerD_subspace}};
    res.payload["samples"] = curve.times.size();
    return res;
}

CommandResult run_simulate(const RunConfig& cfg, const std::string& outdir) {
    const PotentialModel& V = *cfg.potential;
    const KineticSolver solver(V, cfg.nu, cfg.sigma, cfg.solver.nx, cfg.solver.nv);

    // weight and L^2 admixture from the rate machinery when available
    PChoice weight = IdentityWeight{};
    double gamma = 0.0;
    OrderedJson rate_info;
    try {
        ResolvedParams rp = resolve_params(cfg, false);
        if (rp.feasible && rp.rate.ok) {
            mark_sharp(rp.rate, cfg);
            rate_info = to_json(rp.rate);
            switch (rp.rate.case_tag) {
            case RateCase::a:
                weight = ShiftedWeight{0.0};
                break;
            case RateCase::b:
                weight = ShiftedWeight{0.5 * rp.rate.intermediates.epsilon_b.value() *
                                       rp.rate.intermediates.epsilon_b.value()};
                break;
            default: {
                const double a = rp.rate.intermediates.a;
                weight = ShiftedWeight{a};
                const double m = a + rp.alpha0 - 0.25 * cfg.nu * cfg.nu;
                gamma = 4.0 * a * std::sqrt(m) * rp.rate.intermediates.s / cfg.sigma;
                break;
            }
            }
        }
    } catch (const ConfigError&) {
        // no Poincare constant for a non-quadratic potential: identity weight
    }

    double dt = cfg.solver.dt;
    if (dt <= 0.0) {
        const double bound = 0.45 / (solver.max_speed_x() / solver.grid().dx +
                                     solver.max_speed_v() / solver.grid().dv);
        const long steps = std::lround(std::ceil(cfg.solver.T / bound));
        dt = cfg.solver.T / double(steps);
    }

    Field f = solver.init(cfg.solver.f0);
    const FunctionalSeries series =
        solver.evolve(f, cfg.solver.T, dt, cfg.solver.sample_every, weight, gamma);

    std::vector<double> ts, l2;
    for (const auto& s : series.samples) {
        ts.push_back(s.t);
        l2.push_back(s.l2sq);
    }
    const double rate2 =
        fit_loglinear_rate(ts, l2, 0.5 * cfg.solver.T, cfg.solver.T);

    if (cfg.output.csv)
        maybe_write(outdir, "series.csv", to_csv(series_csv(series)));

    CommandResult res;
    res.payload["grid"] = OrderedJson{{"nx", solver.grid().nx},
                                      {"nv", solver.grid().nv},
                                      {"Lx", solver.grid().Lx},
                                      {"Lv", solver.grid().Lv}};
    res.payload["dt"] = dt;
    res.payload["T"] = cfg.solver.T;
    res.payload["fitted_l2_rate"] = rate2; // estimates 2*lambda
    res.payload["mass_initial"] = series.samples.front().mass;
    res.payload["mass_final"] = series.samples.back().mass;
    if (!rate_info.is_null())
        res.payload["rate_report"] = rate_info;
    res.payload["series_samples"] = series.samples.size();
    return res;
}

CommandResult run_hypo(const RunConfig& cfg) {
    const KineticSolver solver(*cfg.potential, cfg.nu, cfg.sigma, cfg.hypo.nx,
                               cfg.hypo.nv);
    const HypoSlopes slopes = solver.hypoelliptic_experiment(
        cfg.hypo.f0, cfg.hypo.t_lo, cfg.hypo.t_hi, cfg.hypo.dt);
    CommandResult res;
    res.payload = to_json(slopes);
    res.payload["window"] = OrderedJson{{"t_lo", cfg.hypo.t_lo},
                                        {"t_hi", cfg.hypo.t_hi},
                                        {"dt", cfg.hypo.dt}};
    return res;
}

CommandResult run_report(const RunConfig& cfg, const std::string& outdir) {
    CommandResult res;
    OrderedJson& bundle = res.payload;
    OrderedJson timings;

    bundle["tool"] = OrderedJson{{"name", "kfplab"}, {"version", KFPLAB_VERSION}};
    bundle["config"] = cfg.echo;

    int worst_exit = kExitOk;
    auto stage = [&](const char* name, auto&& fn) {
        const double t0 = wall_seconds();
        CommandResult r = fn();
        timings[name] = wall_seconds() - t0;
        bundle[name] = r.payload;
        worst_exit = std::max(worst_exit, r.exit_code);
    };

    stage("check", [&] { return run_check(cfg); });
    stage("rate", [&] { return run_rate(cfg); });
    stage("certify", [&] { return run_certify(cfg); });
    if (cfg.potential->is_quadratic())
        stage("propagator", [&] { return run_propagator(cfg, outdir); });
    stage("simulate", [&] { return run_simulate(cfg, outdir); });

    if (cfg.sweep) {
        const CsvTable sw = sweep_rates(cfg);
        if (cfg.output.csv)
            maybe_write(outdir, "rates_sweep.csv", to_csv(sw));
        bundle["sweep_rows"] = sw.rows.size();
    }

    if (!outdir.empty()) {
        bundle["artifacts"] = OrderedJson::array();
        if (cfg.output.csv) {
            if (cfg.potential->is_quadratic())
                bundle["artifacts"].push_back("propagator.csv");
            bundle["artifacts"].push_back("series.csv");
        }
    }

    // timings live in their own section so golden comparisons can drop them
    bundle["timings"] = timings;
    res.exit_code = worst_exit;

    if (!outdir.empty())
        maybe_write(outdir, "report.json", bundle.dump(2) + "\n");
    return res;
}

CommandResult run_subcommand(const std::string& name, const RunConfig& cfg,
                             const std::string& outdir) {
    if (name == "check")
        return run_check(cfg);
    if (name == "rate")
        return run_rate(cfg);
    if (name == "certify")
        return run_certify(cfg);
    if (name == "propagator")
        return run_propagator(cfg, outdir);
    if (name == "simulate")
        return run_simulate(cfg, outdir);
    if (name == "hypo")
        return run_hypo(cfg);
    if (name == "report")
        return run_report(cfg, outdir);
    throw ConfigError("unknown subcommand \"" + name + "\"");
}

} // namespace kfp
