#include "wqed/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <ctime>
#include <iostream>

#include "wqed/coherent.hpp"
#include "wqed/csv.hpp"
#include "wqed/eigenstates.hpp"
#include "wqed/fock.hpp"
#include "wqed/oracle.hpp"

namespace wqed {

namespace {

struct CommonOpts {
    double epsilon = 10.0;
    double delta = 0.1;
    double gamma_prime = 0.0;
    double k0 = 0.0;  // 0 -> epsilon
    std::string v_spec = "0.5";
    double rel_tol = 1e-5;
    double abs_tol = 1e-9;
    double window = 10.0;
    int max_subdiv = 20000;
    std::string output = "-";
    std::string format = "csv";
    unsigned seed = 1;
    bool strict = false;
    int threads = 0;

    double k_center() const { return k0 != 0.0 ? k0 : epsilon; }
    QuadratureSpec quad() const {
        QuadratureSpec q;
        q.rel_tol = rel_tol;
        q.abs_tol = abs_tol;
        q.window_halfwidth = window;
        q.max_subdivisions = max_subdiv;
        return q;
    }
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_grid = true) {
    sub->add_option("--epsilon", o.epsilon, "emitter level splitting");
    sub->add_option("--delta", o.delta, "packet spectral width");
    sub->add_option("--gamma-prime", o.gamma_prime, "loss rate into non-guided channels");
    sub->add_option("--k0", o.k0, "packet central momentum (default epsilon)");
    if (with_grid)
        sub->add_option("--v", o.v_spec, "coupling V, a value or grid start:stop:steps");
    sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--window", o.window, "momentum window halfwidth in units of delta");
    sub->add_option("--max-subdiv", o.max_subdiv, "quadrature subdivision budget");
    sub->add_option("-o,--output", o.output, "output path ('-' for stdout)");
    sub->add_option("--format", o.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.seed, "seed for randomized sampling");
    sub->add_option("--threads", o.threads, "worker threads (0 = auto, env WQED_THREADS)");
    sub->add_flag("--strict", o.strict, "exit nonzero on any flagged-unreliable point");
}

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.empty()) throw std::invalid_argument("empty v-grid");
    const auto c1 = spec.find(':');
    if (c1 == std::string::npos) {
        size_t pos = 0;
        const double v = std::stod(spec, &pos);
        if (pos != spec.size()) throw std::invalid_argument("invalid v-grid: " + spec);
        return {v};
    }
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("invalid v-grid: " + spec);
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const int steps = std::stoi(spec.substr(c2 + 1));
    if (steps < 0 || (steps > 0 && !(stop > start)))
        throw std::invalid_argument("invalid v-grid: " + spec);
    std::vector<double> g;
    for (int i = 0; i <= steps; ++i)
        g.push_back(steps == 0 ? start : start + (stop - start) * double(i) / double(steps));
    return g;
}

std::string timestamp() {
    char buf[64];
    std::time_t t = std::time(nullptr);
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::vector<std::string> config_lines(const CommonOpts& o, const std::string& cmd) {
    std::vector<std::string> m;
    m.push_back("command: " + cmd);
    m.push_back("epsilon: " + format_g9(o.epsilon));
    m.push_back("delta: " + format_g9(o.delta));
    m.push_back("gamma_prime: " + format_g9(o.gamma_prime));
    m.push_back("k0: " + format_g9(o.k_center()));
    m.push_back("v: " + o.v_spec);
    m.push_back("rel_tol: " + format_g9(o.rel_tol));
    m.push_back("abs_tol: " + format_g9(o.abs_tol));
    m.push_back("window: " + format_g9(o.window));
    m.push_back("seed: " + std::to_string(o.seed));
    return m;
}

int run_fock(const CommonOpts& o, int n) {
    const auto grid = parse_grid(o.v_spec);
    const auto kind = n == 1 ? SweepKind::one : n == 2 ? SweepKind::two : SweepKind::three;
    auto rows = sweep(kind, grid, o.delta, o.epsilon, o.gamma_prime, o.quad(), o.threads);

    bool any_flagged = false;
    std::vector<std::string> warnings;
    for (const auto& r : rows)
        if (r.flagged) {
            any_flagged = true;
            warnings.push_back("V=" + format_g9(r.v) + " " + r.label.name() + ": " +
                               (r.note.empty() ? "flagged" : r.note));
        }

    if (o.format == "json") {
        nlohmann::json j;
        j["config"] = {{"command", "fock"},       {"n", n},
                       {"epsilon", o.epsilon},    {"delta", o.delta},
                       {"gamma_prime", o.gamma_prime}, {"v", o.v_spec},
                       {"rel_tol", o.rel_tol},    {"abs_tol", o.abs_tol},
                       {"window", o.window},      {"seed", o.seed}};
        j["generated"] = timestamp();
        auto& arr = j["rows"] = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"V", r.v},
                           {"sector", r.label.name()},
                           {"total", r.total},
                           {"pw", r.pw},
                           {"bs", r.bs},
                           {"err", r.err},
                           {"flagged", r.flagged}});
        if (o.output == "-") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream f(o.output);
            if (!f) throw std::runtime_error("cannot open output path: " + o.output);
            f << j.dump(2) << "\n";
        }
    } else {
        CsvWriter w(o.output);
        for (const auto& m : config_lines(o, "fock --n " + std::to_string(n))) w.config_line(m);
        w.config_line("generated: " + timestamp());
        w.header({"V", "sector", "total", "pw", "bs", "err"});
        for (const auto& r : rows)
            w.row({format_g9(r.v), r.label.name(), format_g9(r.total), format_g9(r.pw),
                   format_g9(r.bs), format_g9(r.err)});
        for (const auto& msg : warnings) w.comment("warning: " + msg);
    }
    for (const auto& msg : warnings) std::cerr << "warning: " << msg << "\n";
    return (o.strict && any_flagged) ? 3 : 0;
}

int run_g2(const CommonOpts& o, double nbar, double xmax_gamma, int points) {
    const auto grid = parse_grid(o.v_spec);
    bool any_flagged = false;

    CsvWriter w(o.output);
    for (const auto& m : config_lines(o, "g2")) w.config_line(m);
    w.config_line("nbar: " + format_g9(nbar));
    w.config_line("generated: " + timestamp());
    const bool multi = grid.size() > 1;
    if (multi)
        w.header({"V", "gamma_x", "g2"});
    else
        w.header({"gamma_x", "g2"});

    for (double v : grid) {
        SystemParams p(o.epsilon, v, o.gamma_prime);
        GaussianPacket pkt(o.k_center(), o.delta, nbar);
        std::vector<double> xs;
        if (points >= 4 && p.gamma() > 0.0) {
            xs.push_back(0.0);
            const double lo = std::log(std::max(1e-3, xmax_gamma * 1e-3)),
                         hi = std::log(xmax_gamma);
            for (int i = 0; i < points - 1; ++i)
                xs.push_back(std::exp(lo + (hi - lo) * double(i) / double(points - 2)) /
                             p.gamma());
        } else {
            xs = default_g2_grid(p);
        }
        auto curve = g2_curve(pkt, p, xs);
        any_flagged |= curve.flagged;
        for (size_t i = 0; i < curve.xs.size(); ++i) {
            std::vector<std::string> cells;
            if (multi) cells.push_back(format_g9(v));
            cells.push_back(format_g9(curve.xs[i] * p.gamma()));
            cells.push_back(format_g9(curve.values[i]));
            w.row(cells);
        }
        if (curve.flagged) {
            w.comment("warning: V=" + format_g9(v) + ": " + curve.note);
            std::cerr << "warning: V=" << format_g9(v) << ": " << curve.note << "\n";
        }
    }
    return (o.strict && any_flagged) ? 3 : 0;
}

int run_stats(const CommonOpts& o, double nbar, const std::string& ref) {
    const auto grid = parse_grid(o.v_spec);
    const PoissonRef pr = ref == "incident" ? PoissonRef::incident : PoissonRef::transmitted;
    bool any_flagged = false;

    CsvWriter w(o.output);
    for (const auto& m : config_lines(o, "stats")) w.config_line(m);
    w.config_line("nbar: " + format_g9(nbar));
    w.config_line("poisson_ref: " + ref);
    w.config_line("generated: " + timestamp());
    w.header({"V", "nbar", "n", "P", "P_poisson", "ratio"});

    for (double v : grid) {
        SystemParams p(o.epsilon, v, o.gamma_prime);
        GaussianPacket pkt(o.k_center(), o.delta, nbar);
        auto nd = number_distribution(pkt, p, o.quad(), pr);
        any_flagged |= nd.flagged;
        for (int m = 0; m <= 3; ++m)
            w.row({format_g9(v), format_g9(nbar), std::to_string(m), format_g9(nd.prob[m]),
                   format_g9(nd.poisson[m]), format_g9(nd.ratio[m])});
        if (nd.flagged) {
            w.comment("warning: V=" + format_g9(v) + ": " + nd.note);
            std::cerr << "warning: V=" << format_g9(v) << ": " << nd.note << "\n";
        }
    }
    return (o.strict && any_flagged) ? 3 : 0;
}

int run_eigenstate(const CommonOpts& o, const std::vector<double>& ks,
                   const std::vector<double>& offsets, const std::string& range) {
    const int n = int(ks.size());
    if (n < 1 || n > 4) throw std::invalid_argument("eigenstate: need 1..4 momenta via --ks");
    std::vector<double> offs = offsets;
    if (offs.empty())
        for (int i = 0; i < n; ++i) offs.push_back(double(i) * 0.4);
    if (int(offs.size()) != n)
        throw std::invalid_argument("eigenstate: --offsets must match --ks length");

    const auto g = parse_grid(range);  // reuse start:stop:steps syntax
    const auto vgrid = parse_grid(o.v_spec);
    SystemParams p(o.epsilon, vgrid.front(), o.gamma_prime);

    CsvWriter w(o.output);
    for (const auto& m : config_lines(o, "eigenstate")) w.config_line(m);
    {
        std::string s = "ks:";
        for (double k : ks) s += " " + format_g9(k);
        w.config_line(s);
    }
    w.config_line("generated: " + timestamp());
    std::vector<std::string> cols;
    for (int i = 1; i <= n; ++i) cols.push_back("x" + std::to_string(i));
    cols.push_back("re_g");
    cols.push_back("im_g");
    cols.push_back("abs_g");
    w.header(cols);

    for (double x : g) {
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = x + offs[i];
        bool at_origin = false;
        for (double xi : xs) at_origin |= xi == 0.0;
        const cplx gv = at_origin ? midpoint_value(ks, xs, p) : eigenstate_g(ks, xs, p);
        std::vector<std::string> cells;
        for (double xi : xs) cells.push_back(format_g9(xi));
        cells.push_back(format_g9(gv.real()));
        cells.push_back(format_g9(gv.imag()));
        cells.push_back(format_g9(std::abs(gv)));
        w.row(cells);
    }
    return 0;
}

int run_oracle(const CommonOpts& o, int photons, LatticeConfig cfg) {
    const auto vgrid = parse_grid(o.v_spec);
    SystemParams p(o.epsilon, vgrid.front(), o.gamma_prime);
    GaussianPacket pkt(o.k_center(), o.delta);
    auto rep = scatter_and_compare(photons, pkt, p, cfg);

    const double rms_limit = 1e-2, bound_limit = 5e-2;
    const bool pass_rms = rep.rms_pw_deviation <= rms_limit;
    const bool pass_bound = photons < 2 || rep.bound_l2_rel <= bound_limit;

    nlohmann::json j;
    j["config"] = {{"photons", photons},
                   {"m_modes", rep.m_modes},
                   {"dk", rep.dk},
                   {"evolve_time", rep.evolve_time},
                   {"x0", rep.x0},
                   {"epsilon", rep.epsilon},
                   {"v", rep.v},
                   {"gamma_prime", rep.gamma_prime},
                   {"delta", rep.delta},
                   {"k0", rep.k0}};
    j["generated"] = timestamp();
    j["deviations"] = {{"rms_pw", rep.rms_pw_deviation},
                       {"max_pw", rep.max_pw_deviation},
                       {"bound_l2_rel", rep.bound_l2_rel},
                       {"norm_drift", rep.norm_drift},
                       {"edge_amplitude", rep.edge_amplitude},
                       {"propagator_error", rep.propagator_error}};
    j["thresholds"] = {{"rms_pw", rms_limit}, {"bound_l2_rel", bound_limit}};
    j["pass"] = {{"rms_pw", pass_rms}, {"bound_l2_rel", pass_bound}, {"valid", rep.valid}};
    if (!rep.note.empty()) j["note"] = rep.note;

    if (o.output == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(o.output);
        if (!f) throw std::runtime_error("cannot open output path: " + o.output);
        f << j.dump(2) << "\n";
    }
    if (!rep.valid) return 4;
    return (o.strict && !(pass_rms && pass_bound)) ? 3 : 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"few-photon scattering from a waveguide-coupled two-level emitter"};
    app.require_subcommand(1);

    CommonOpts o;
    int fock_n = 2;
    double nbar = 0.5;
    double g2_xmax = 15.0;
    int g2_points = 60;
    std::string poisson_ref = "transmitted";
    std::vector<double> eig_ks, eig_offsets;
    std::string eig_range = "-5:5:200";
    int oracle_photons = 1;
    LatticeConfig lat_cfg;

    auto* fock_cmd = app.add_subcommand("fock", "Fock-state sector probabilities over a V grid");
    add_common(fock_cmd, o);
    fock_cmd->add_option("--n", fock_n, "photon number 1..3")->check(CLI::Range(1, 3));

    auto* g2_cmd = app.add_subcommand("g2", "second-order correlation of the transmitted field");
    add_common(g2_cmd, o);
    g2_cmd->add_option("--nbar", nbar, "coherent-state mean photon number (<= 1)");
    g2_cmd->add_option("--xmax", g2_xmax, "largest Gamma*x on the curve");
    g2_cmd->add_option("--points", g2_points, "number of separations");

    auto* stats_cmd = app.add_subcommand("stats", "transmitted photon-number distribution");
    add_common(stats_cmd, o);
    stats_cmd->add_option("--nbar", nbar, "coherent-state mean photon number (<= 1)");
    stats_cmd->add_option("--poisson-ref", poisson_ref,
                          "Poisson reference mean: transmitted or incident")
        ->check(CLI::IsMember({"transmitted", "incident"}));

    auto* eig_cmd = app.add_subcommand("eigenstate", "sample an n-photon eigenstate along a line");
    add_common(eig_cmd, o);
    eig_cmd->add_option("--ks", eig_ks, "photon momenta (1..4 values)")->delimiter(',');
    eig_cmd->add_option("--offsets", eig_offsets, "position offsets per photon")->delimiter(',');
    eig_cmd->add_option("--range", eig_range, "sampling line start:stop:steps");

    auto* oracle_cmd = app.add_subcommand("oracle", "lattice time-evolution cross-check");
    add_common(oracle_cmd, o);
    oracle_cmd->add_option("--photons", oracle_photons, "1 or 2")->check(CLI::Range(1, 2));
    oracle_cmd->add_option("--m-modes", lat_cfg.m_modes, "momentum modes (floor)");
    oracle_cmd->add_option("--k-halfwidth", lat_cfg.k_halfwidth_units,
                           "momentum window halfwidth in units of delta");
    oracle_cmd->add_option("--evolve-time", lat_cfg.evolve_time, "propagation time (0 = auto)");
    oracle_cmd->add_option("--x0", lat_cfg.x0, "initial packet center (0 = auto)");
    oracle_cmd->add_option("--tol", lat_cfg.propagator_tol, "propagator accuracy");
    oracle_cmd->add_flag("--allow-coarse", lat_cfg.allow_coarse,
                         "skip the dk resolution requirement");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) std::cerr << "error: " << e.what() << "\n";
        return app.exit(e, std::cout, std::cerr);
    }

    try {
        if (fock_cmd->parsed()) return run_fock(o, fock_n);
        if (g2_cmd->parsed()) return run_g2(o, nbar, g2_xmax, g2_points);
        if (stats_cmd->parsed()) return run_stats(o, nbar, poisson_ref);
        if (eig_cmd->parsed()) return run_eigenstate(o, eig_ks, eig_offsets, eig_range);
        if (oracle_cmd->parsed()) return run_oracle(o, oracle_photons, lat_cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace wqed
