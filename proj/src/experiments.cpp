#include "normsol/experiments.hpp"
#include "normsol/asymptotics.hpp"
#include "normsol/bubbles.hpp"
#include "normsol/errors.hpp"
#include "normsol/io.hpp"
#include "normsol/ode.hpp"
#include "normsol/thresholds.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace normsol {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw config_error("unknown key '" + it.key() + "' in " + where);
    }
}

double positive(const json& j, const char* key, double dflt, const std::string& where) {
    const double v = j.value(key, dflt);
    if (!(v > 0.0)) throw config_error(std::string(key) + " must be positive in " + where);
    return v;
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    check_keys(j, {"params", "grid", "solver", "sweep", "appendix", "nonexist", "output",
                   "cache", "threads"},
               "top level");
    RunConfig cfg;
    if (!j.contains("params")) throw config_error("missing 'params' block");
    {
        const json& p = j["params"];
        check_keys(p, {"N", "p", "q", "a", "mu"}, "params");
        cfg.N = p.value("N", 3);
        cfg.p = p.value("p", 2.0);
        cfg.q = p.value("q", 2.5);
        cfg.a = p.value("a", 1.0);
        cfg.mu = p.value("mu", 0.1);
        try {
            Params chk(cfg.N, cfg.p, cfg.q, cfg.a, cfg.mu);
        } catch (const parameter_error& e) {
            throw config_error(std::string("invalid params: ") + e.what());
        }
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, {"M", "R_max", "kappa"}, "grid");
        cfg.grid.M = g.value("M", 512);
        cfg.grid.R_max = positive(g, "R_max", 50.0, "grid");
        cfg.grid.kappa = positive(g, "kappa", 4.0, "grid");
        if (cfg.grid.M < 64) throw config_error("grid.M must be >= 64");
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, {"max_iter", "tol_grad", "tol_pohozaev", "newton_polish", "seed"},
                   "solver");
        cfg.solver.max_iter = s.value("max_iter", 50000);
        cfg.solver.tol_grad = positive(s, "tol_grad", 1e-8, "solver");
        cfg.solver.tol_pohozaev = positive(s, "tol_pohozaev", 1e-3, "solver");
        cfg.solver.newton_polish = s.value("newton_polish", true);
        cfg.solver.seed = s.value("seed", 1ULL);
        if (cfg.solver.max_iter <= 0) throw config_error("solver.max_iter must be positive");
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        check_keys(s, {"kind", "mu_min", "mu_max", "points", "track_profile"}, "sweep");
        SweepConfig sw;
        sw.kind = s.value("kind", std::string());
        if (sw.kind != "mu-to-zero" && sw.kind != "mu-to-alpha-bar" &&
            sw.kind != "mu-to-infinity")
            throw config_error("sweep.kind must be one of mu-to-zero|mu-to-alpha-bar|mu-to-infinity");
        sw.mu_min = positive(s, "mu_min", 0.0, "sweep");
        sw.mu_max = positive(s, "mu_max", 0.0, "sweep");
        if (!(sw.mu_min < sw.mu_max)) throw config_error("sweep grid must be monotone (mu_min < mu_max)");
        sw.points = s.value("points", 6);
        if (sw.points < 4) throw config_error("sweep.points must be >= 4");
        sw.track_profile = s.value("track_profile", false);
        cfg.sweep = sw;
    }
    if (j.contains("appendix")) {
        const json& a = j["appendix"];
        check_keys(a, {"eps_min", "eps_max", "points", "r_list"}, "appendix");
        AppendixConfig ac;
        ac.eps_min = positive(a, "eps_min", 0.002, "appendix");
        ac.eps_max = positive(a, "eps_max", 0.2, "appendix");
        if (!(ac.eps_min < ac.eps_max)) throw config_error("appendix eps grid must be monotone");
        ac.points = a.value("points", 8);
        if (ac.points < 5) throw config_error("appendix.points must be >= 5");
        if (a.contains("r_list"))
            for (const auto& v : a["r_list"]) ac.r_list.push_back(v.get<double>());
        cfg.appendix = ac;
    }
    if (j.contains("nonexist")) {
        const json& n = j["nonexist"];
        check_keys(n, {"mu_list", "triples", "flow_seeds"}, "nonexist");
        NonexistConfig nc;
        if (n.contains("mu_list"))
            for (const auto& v : n["mu_list"]) nc.mu_list.push_back(v.get<double>());
        if (nc.mu_list.empty()) throw config_error("nonexist.mu_list must be non-empty");
        for (double m : nc.mu_list)
            if (!(m < 0.0)) throw config_error("nonexist.mu_list entries must be negative");
        nc.triples = n.value("triples", 1000);
        nc.flow_seeds = n.value("flow_seeds", 50);
        cfg.nonexist = nc;
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        check_keys(o, {"directory", "write_profiles"}, "output");
        cfg.out_dir = o.value("directory", std::string("out"));
        cfg.write_profiles = o.value("write_profiles", true);
    }
    if (j.contains("cache")) {
        const json& c = j["cache"];
        check_keys(c, {"path"}, "cache");
        cfg.cache_path = c.value("path", std::string());
    }
    if (j.contains("threads")) cfg.threads = j.value("threads", 1);
    return cfg;
}

RunStage stage_from_verb(const std::string& verb) {
    if (verb == "thresholds") return RunStage::Thresholds;
    if (verb == "shoot") return RunStage::Shoot;
    if (verb == "solve-plus") return RunStage::SolvePlus;
    if (verb == "solve-minus") return RunStage::SolveMinus;
    if (verb == "sweep") return RunStage::Sweep;
    if (verb == "appendix") return RunStage::Appendix;
    if (verb == "nonexist") return RunStage::Nonexist;
    throw config_error("unknown verb " + verb);
}

namespace {

json triple_json(const NormTriple& t) {
    return json{{"A", t.A}, {"B", t.B}, {"C", t.C}};
}

json certificate_json(const CertificateReport& c) {
    return json{{"pohozaev_residual", c.pohozaev_residual},
                {"lambda", c.lambda},
                {"lambda_identity_residual", c.lambda_identity_residual},
                {"min_value", c.min_value},
                {"nonnegative", c.nonnegative},
                {"radially_nonincreasing", c.radially_nonincreasing},
                {"fiber_class", fiber_class_name(c.fiber_class)},
                {"fiber_point_at_solution", c.fiber_point_at_solution},
                {"fiber_point_small", c.fiber_point_small},
                {"psi2_sign_matches", c.psi2_sign_matches},
                {"lambda_sign_ok", c.lambda_sign_ok},
                {"pohozaev_ok", c.pohozaev_ok},
                {"lambda_identity_ok", c.lambda_identity_ok},
                {"all_passed", c.all_passed}};
}

json solver_json(const SolverResult& r, const std::string& profile_file) {
    return json{{"converged", r.converged},
                {"level", r.level},
                {"lambda", r.lambda},
                {"pohozaev_residual", r.pohozaev_residual},
                {"grad_residual", r.grad_residual},
                {"iterations", r.iterations},
                {"manifold_sign", r.manifold_sign == ManifoldSign::Plus ? "+" : "-"},
                {"triple", triple_json(r.triple)},
                {"message", r.message},
                {"profile", profile_file}};
}

json sweep_json(const ExponentReport& rep) {
    json recs = json::array();
    for (const auto& r : rep.records)
        recs.push_back(json{{"mu", r.mu},
                            {"lambda", r.lambda},
                            {"grad_norm_p", r.grad_norm_p},
                            {"level", r.level},
                            {"q_norm", r.q_norm},
                            {"converged", r.converged}});
    auto slope = [](const SlopeCheck& s) {
        return json{{"slope", s.fit.slope},
                    {"target", s.target},
                    {"r2", s.fit.r2},
                    {"points", s.fit.n},
                    {"within_10pct", s.within_10pct},
                    {"r2_ok", s.r2_ok}};
    };
    return json{{"records", recs},
                {"lambda_slope", slope(rep.lambda_slope)},
                {"grad_slope", slope(rep.grad_slope)},
                {"qnorm_slope", slope(rep.qnorm_slope)},
                {"level_trend_ok", rep.level_trend_ok},
                {"profile_gaps", rep.profile_gaps},
                {"profile_gap_decreasing", rep.profile_gap_decreasing},
                {"note", rep.note}};
}

void write_sweep_csv(const std::string& path, const ExponentReport& rep) {
    std::ofstream out(path);
    out << "mu,lambda,grad_norm_p,level,q_norm,converged\n";
    char buf[256];
    for (const auto& r : rep.records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.mu, r.lambda,
                      r.grad_norm_p, r.level, r.q_norm, r.converged ? 1 : 0);
        out << buf;
    }
}

struct ReportLines {
    std::vector<std::pair<std::string, bool>> checks;
    void add(const std::string& name, bool ok) { checks.emplace_back(name, ok); }
    bool all_ok() const {
        for (const auto& c : checks)
            if (!c.second) return false;
        return true;
    }
};

void write_report(const std::string& path, const std::string& title, const ReportLines& rl) {
    std::ofstream out(path);
    out << "# " << title << "\n\n";
    for (const auto& c : rl.checks)
        out << "- [" << (c.second ? "pass" : "FAIL") << "] " << c.first << "\n";
}

} // namespace

int run(RunStage stage, const std::string& config_path, const RunOverrides& ov) {
    RunConfig cfg;
    try {
        cfg = parse_config(config_path);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.seed) cfg.solver.seed = *ov.seed;
    if (ov.threads) cfg.threads = *ov.threads;

    try {
        fs::create_directories(cfg.out_dir);
        fs::create_directories(cfg.out_dir + "/profiles");
        const std::string cache_path =
            cfg.cache_path.empty() ? cfg.out_dir + "/threshold_cache.json" : cfg.cache_path;
        ThresholdCache cache(cache_path);

        const Params prm(cfg.N, cfg.p, cfg.q, cfg.a, cfg.mu);
        auto grid = RadialGrid::geometric(prm.N, cfg.grid.M, cfg.grid.R_max, cfg.grid.kappa);

        json out;
        ReportLines rl;
        out["config"] = json{{"N", prm.N}, {"p", prm.p},     {"q", prm.q},
                             {"a", prm.a}, {"mu", prm.mu},   {"M", cfg.grid.M},
                             {"R_max", cfg.grid.R_max},      {"kappa", cfg.grid.kappa},
                             {"seed", cfg.solver.seed}};
        out["params"] = json{{"gamma_q", prm.gamma_q},
                             {"p_star", prm.p_star},
                             {"regime", regime_name(classify_regime_kind(prm))}};

        // Shared preliminaries: S, phi0, thresholds.
        double S;
        if (auto c = cache.lookup_S(prm.N, prm.p)) S = *c;
        else {
            S = sobolev_constant(prm.N, prm.p);
            cache.store_S(prm.N, prm.p, S);
        }
        GroundStateProfile phi0;
        bool have_phi0 = false;
        const std::string res_tag = "gs-m" + std::to_string(std::max(512, cfg.grid.M));
        double C_gn;
        auto ensure_phi0 = [&]() {
            if (have_phi0) return;
            // The ground-state profile backs the GN constant and the Pohozaev
            // identity check; keep its sampling grid at full resolution even
            // when the solver grid is coarse.
            auto gs_grid = RadialGrid::geometric(prm.N, std::max(512, cfg.grid.M), 40.0,
                                                 cfg.grid.kappa);
            phi0 = shoot_ground_state(prm.N, prm.p, prm.q, gs_grid);
            have_phi0 = true;
        };
        if (auto c = cache.lookup_Cgn(prm.N, prm.p, prm.q, res_tag)) C_gn = *c;
        else {
            ensure_phi0();
            C_gn = gn_constant(prm, phi0);
            cache.store_Cgn(prm.N, prm.p, prm.q, res_tag, C_gn);
        }
        const ThresholdSet thr = threshold_constants(prm, S, C_gn);
        out["thresholds"] = json{{"S", thr.S},           {"C_gn", thr.C_gn},
                                 {"C_prime", thr.C_prime}, {"C_dprime", thr.C_dprime},
                                 {"alpha", thr.alpha},     {"alpha_bar", thr.alpha_bar},
                                 {"R0", thr.R0},           {"R1", thr.R1},
                                 {"t_bar", thr.t_bar}};
        const Regime reg = classify_regime(prm, thr);
        out["params"]["mu_bound_ok"] = reg.mu_bound_ok;

        switch (stage) {
            case RunStage::Thresholds: {
                rl.add("threshold constants finite", std::isfinite(thr.S) && thr.S > 0);
                break;
            }
            case RunStage::Shoot: {
                ensure_phi0();
                const std::string pf = cfg.out_dir + "/profiles/phi0.csv";
                if (cfg.write_profiles) write_profile_csv(pf, phi0.profile, prm.p);
                out["ground_state"] = json{{"beta_star", phi0.beta_star},
                                           {"residual", phi0.residual},
                                           {"mass_p", phi0.mass_p},
                                           {"triple", triple_json(phi0.norms)},
                                           {"converged", phi0.converged},
                                           {"profile", "profiles/phi0.csv"}};
                rl.add("ground state converged", phi0.converged);
                rl.add("ODE residual <= 1e-6", phi0.residual <= 1e-6);
                break;
            }
            case RunStage::SolvePlus:
            case RunStage::SolveMinus: {
                const bool plus = stage == RunStage::SolvePlus;
                SolverResult sol = plus ? solve_local_min(prm, thr, grid, cfg.solver)
                                        : solve_mountain_pass(prm, thr, grid, cfg.solver);
                const std::string name = plus ? "u_plus" : "u_minus";
                const std::string pf = "profiles/" + name + ".csv";
                if (cfg.write_profiles)
                    write_profile_csv(cfg.out_dir + "/" + pf, sol.profile, prm.p);
                const CertificateReport cert = certify(sol, prm, thr.S);
                out[name] = solver_json(sol, pf);
                out[name]["certificate"] = certificate_json(cert);
                rl.add(name + " converged", sol.converged);
                rl.add(name + " certificate", cert.all_passed);
                if (plus) rl.add("level m+ < 0", sol.level < 0.0);
                else {
                    rl.add("0 < level m-", sol.level > 0.0);
                    rl.add("m- < S^{N/p}/N",
                           sol.level < std::pow(thr.S, prm.N / prm.p) / prm.N);
                }
                rl.add("lambda < 0", sol.lambda < 0.0);
                break;
            }
            case RunStage::Sweep: {
                if (!cfg.sweep) throw config_error("sweep stage requires a 'sweep' block");
                const SweepConfig& sw = *cfg.sweep;
                std::vector<double> mus(sw.points);
                for (int i = 0; i < sw.points; ++i)
                    mus[i] = sw.mu_min *
                             std::pow(sw.mu_max / sw.mu_min,
                                      static_cast<double>(i) / (sw.points - 1));
                SweepOptions sopt;
                sopt.grid_M = cfg.grid.M;
                sopt.base_R_max = cfg.grid.R_max;
                sopt.solver = cfg.solver;
                sopt.track_limit_profile = sw.track_profile;
                if (sw.track_profile) ensure_phi0();
                ExponentReport rep;
                if (sw.kind == "mu-to-zero")
                    rep = sweep_mu_to_zero(prm, mus, thr, have_phi0 ? &phi0 : nullptr, sopt);
                else if (sw.kind == "mu-to-alpha-bar")
                    rep = sweep_mu_to_alpha_bar(prm, mus, thr, have_phi0 ? &phi0 : nullptr,
                                                sopt);
                else
                    rep = sweep_mu_to_infinity(prm, mus, thr, have_phi0 ? &phi0 : nullptr,
                                               sopt);
                fs::create_directories(cfg.out_dir + "/sweeps");
                write_sweep_csv(cfg.out_dir + "/sweeps/" + sw.kind + ".csv", rep);
                out["sweep"] = sweep_json(rep);
                out["sweep"]["kind"] = sw.kind;
                rl.add("slope(-lambda) within 10%", rep.lambda_slope.within_10pct);
                rl.add("slope(A) within 10%", rep.grad_slope.within_10pct);
                rl.add("slope(B) within 10%", rep.qnorm_slope.within_10pct);
                rl.add("level trend", rep.level_trend_ok);
                break;
            }
            case RunStage::Appendix: {
                if (!cfg.appendix) throw config_error("appendix stage requires an 'appendix' block");
                const AppendixConfig& ac = *cfg.appendix;
                std::vector<double> eps(ac.points);
                for (int i = 0; i < ac.points; ++i)
                    eps[i] = ac.eps_min *
                             std::pow(ac.eps_max / ac.eps_min,
                                      static_cast<double>(i) / (ac.points - 1));
                std::vector<double> rlist = ac.r_list;
                if (rlist.empty()) rlist = {prm.p, prm.q};
                const AppendixTable table = appendix_norms(prm.N, prm.p, eps, rlist, cfg.threads);
                const double SNp = std::pow(thr.S, prm.N / prm.p);
                const AppendixRegression reg2 = appendix_regression(prm.N, prm.p, table, SNp);
                fs::create_directories(cfg.out_dir + "/sweeps");
                {
                    std::ofstream csv(cfg.out_dir + "/sweeps/appendix.csv");
                    csv << "eps,grad_p,crit";
                    for (double r : rlist) csv << ",r" << r;
                    csv << "\n";
                    for (const auto& row : table.rows) {
                        csv << row.eps << "," << row.grad_p << "," << row.crit;
                        for (double v : row.r_norms) csv << "," << v;
                        csv << "\n";
                    }
                }
                json rows = json::array();
                for (const auto& row : table.rows) {
                    json jr{{"eps", row.eps}, {"grad_p", row.grad_p}, {"crit", row.crit}};
                    jr["r_norms"] = row.r_norms;
                    rows.push_back(jr);
                }
                out["appendix"] =
                    json{{"rows", rows},
                         {"grad_slope", reg2.grad_correction.slope},
                         {"grad_target", reg2.grad_target},
                         {"grad_r2", reg2.grad_correction.r2},
                         {"law_mismatch", reg2.law_mismatch},
                         {"eps_floor", table.eps_floor},
                         {"eps_floor_hit", table.eps_floor_hit}};
                rl.add("grad correction slope within 10%",
                       std::fabs(reg2.grad_correction.slope - reg2.grad_target) <=
                           0.10 * reg2.grad_target);
                rl.add("no r-norm law mismatch", !reg2.law_mismatch);
                break;
            }
            case RunStage::Nonexist: {
                if (!cfg.nonexist) throw config_error("nonexist stage requires a 'nonexist' block");
                const NonexistConfig& nc = *cfg.nonexist;
                const NonexistenceReport rep = nonexistence_scan(
                    prm, nc.mu_list, thr.S, nc.triples, nc.flow_seeds, cfg.solver.seed);
                out["nonexist"] = json{{"triples_checked", rep.triples_checked},
                                       {"triples_violating", rep.triples_violating},
                                       {"min_grad_excess", rep.min_grad_excess},
                                       {"min_energy_excess", rep.min_energy_excess},
                                       {"flow_runs", rep.flow_runs},
                                       {"flow_stationary_hits", rep.flow_stationary_hits},
                                       {"note", rep.note}};
                rl.add("no inequality violations", rep.triples_violating == 0);
                rl.add("no stationary point certified", rep.flow_stationary_hits == 0);
                break;
            }
        }

        {
            std::ofstream jf(cfg.out_dir + "/results.json");
            jf << out.dump(1) << "\n";
        }
        write_report(cfg.out_dir + "/report.md", "normsol run report", rl);
        return rl.all_ok() ? 0 : 3;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int verify(const std::string& results_dir) {
    try {
        std::ifstream in(results_dir + "/results.json");
        if (!in) {
            std::cerr << "verify: missing results.json\n";
            return 2;
        }
        json out;
        in >> out;
        const json& c = out.at("config");
        const Params prm(c.at("N").get<int>(), c.at("p").get<double>(),
                         c.at("q").get<double>(), c.at("a").get<double>(),
                         c.at("mu").get<double>());
        bool all_ok = true;
        auto check = [&](const std::string& name, bool ok) {
            std::cout << (ok ? "pass " : "FAIL ") << name << "\n";
            all_ok = all_ok && ok;
        };

        for (const char* name : {"u_plus", "u_minus"}) {
            if (!out.contains(name)) continue;
            const json& sol = out[name];
            const std::string pf = results_dir + "/" + sol.at("profile").get<std::string>();
            const LoadedProfile lp = read_profile_csv(pf);
            const NormTriple t = norm_triple(lp.u, prm);
            const json& rec = sol.at("triple");
            const double relA = std::fabs(t.A - rec.at("A").get<double>()) /
                                std::max(1.0, std::fabs(t.A));
            const double relB = std::fabs(t.B - rec.at("B").get<double>()) /
                                std::max(1.0, std::fabs(t.B));
            const double relC = std::fabs(t.C - rec.at("C").get<double>()) /
                                std::max(1.0, std::fabs(t.C));
            check(std::string(name) + " norms reload to 1e-12",
                  relA <= 1e-12 && relB <= 1e-12 && relC <= 1e-12);
            const double pres = std::fabs(pohozaev(t, prm)) / std::max(t.A, 1e-300);
            check(std::string(name) + " Pohozaev residual <= 1e-3", pres <= 1e-3);
            const LagrangeEval le = lagrange_multiplier(t, prm);
            check(std::string(name) + " lambda identity <= 1e-2",
                  le.identity_residual <= 1e-2);
            check(std::string(name) + " lambda sign",
                  prm.mu > 0 ? le.lambda < 0 : le.lambda > 0);
        }
        if (out.contains("ground_state")) {
            const json& gs = out["ground_state"];
            const std::string pf = results_dir + "/" + gs.at("profile").get<std::string>();
            const LoadedProfile lp = read_profile_csv(pf);
            const double mass = lr_norm(lp.u, prm.p);
            const double rel = std::fabs(mass - gs.at("mass_p").get<double>()) /
                               std::max(1.0, mass);
            check("ground state mass reloads to 1e-12", rel <= 1e-12);
            // Pohozaev identity for the phi0 equation.
            const double A = grad_lp_norm(lp.u, prm.p);
            double F = 0.0;
            {
                const RadialGrid& g = *lp.u.grid;
                for (int i = 0; i < g.cells(); ++i) {
                    const double um = 0.5 * (lp.u.values[i] + lp.u.values[i + 1]);
                    if (um > 0)
                        F += (-std::pow(um, prm.p) / prm.p + std::pow(um, prm.q) / prm.q) *
                             g.cell_weight[i];
                }
                F *= g.surface_const;
            }
            const double lhs = (prm.N - prm.p) * A;
            const double rhs = prm.N * prm.p * F;
            check("phi0 Pohozaev identity (1e-4)",
                  std::fabs(lhs - rhs) <= 1e-4 * std::max(std::fabs(lhs), std::fabs(rhs)));
        }
        if (!out.contains("u_plus") && !out.contains("u_minus") &&
            !out.contains("ground_state"))
            check("results.json present (no profiles to re-check)", true);
        return all_ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }
}

} // namespace normsol
