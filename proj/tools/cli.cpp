#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>

#include "hamm/bounds.hpp"
#include "hamm/certificate.hpp"
#include "hamm/errors.hpp"
#include "hamm/problem.hpp"
#include "hamm/record.hpp"
#include "hamm/solver.hpp"
#include "hamm/sweep.hpp"

namespace hamm::cli {

namespace {

struct RunConfig {
    std::string command;
    std::string problem;
    int n = 256;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::optional<double> r;
    std::optional<double> R;
    bool estimate = false;
    double inflation = 1.05;
    double deflation = 0.95;

    int budget = 12;
    bool skip_falsify = false;

    int starts = 16;
    double tol = 1e-10;
    int max_iter = 10000;
    bool nontrivial = false;
    std::string record;

    std::string lambda, eta1, eta2;
    bool witness = false;
};

void validate_config(const RunConfig& cfg) {
    if (cfg.n < 2)
        throw ParameterError("--n must be at least 2");
    if (!(cfg.tol > 0.0))
        throw ParameterError("--tol must be positive");
    if (cfg.r.has_value() != cfg.R.has_value())
        throw ParameterError("--r and --R must be given together");
    if (cfg.r && !(*cfg.r > 0.0 && *cfg.r < *cfg.R))
        throw ParameterError("need 0 < r < R");
    if (cfg.threads < 1)
        throw ParameterError("--threads must be at least 1");
}

BoundSet make_bounds(const ProblemSpec& spec, const RunConfig& cfg) {
    BoundOptions opts;
    opts.estimate_missing = cfg.estimate;
    opts.seed = cfg.seed;
    opts.upper_inflation = cfg.inflation;
    opts.lower_deflation = cfg.deflation;
    return BoundSet(spec, opts);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os)
        throw Error("cannot write '" + path + "'");
    os << text;
}

void emit_record(const RunConfig& cfg, Record& rec, int code, std::ostream& out) {
    rec.set("exit_code", code);
    if (!cfg.out.empty()) {
        write_file(cfg.out, rec.str());
        out << "record written to " << cfg.out << "\n";
    }
}

void put_bound(Record& rec, const std::string& key, const BoundValue& b) {
    rec.set(key, b.value);
    rec.set(key + ".raw", b.raw);
    rec.set(key + ".rigor", std::string(to_string(b.rigor)));
}

void put_common(Record& rec, const RunConfig& cfg, const ProblemSpec& spec) {
    rec.set("command", cfg.command);
    rec.set("problem", cfg.problem);
    rec.set("n", cfg.n);
    rec.set("seed", static_cast<long long>(cfg.seed));
    rec.set("lambda", spec.params().lambda);
    rec.set("eta1", spec.params().eta1);
    rec.set("eta2", spec.params().eta2);
    rec.set("K", spec.K());
    rec.set("Kstar", spec.Kstar());
}

int certify_existence(const RunConfig& cfg, const ProblemSpec& spec, std::ostream& out) {
    if (!cfg.r)
        throw ParameterError("certify-existence needs --r and --R");
    const BoundSet bounds = make_bounds(spec, cfg);
    const ExistenceCertificate c = check_existence(spec, bounds, *cfg.r, *cfg.R);
    const int code = c.passed() ? kPass : kFail;

    out << std::setprecision(10);
    out << "existence certificate for r = " << c.r << ", R = " << c.R << "\n"
        << "  parameters      lambda = " << spec.params().lambda << ", eta1 = " << spec.params().eta1
        << ", eta2 = " << spec.params().eta2 << "\n"
        << "  kernel          K = " << spec.K() << ", K* = " << spec.Kstar() << "\n"
        << "  bounds          f_upper(R) = " << c.inputs.f_upper_R.value << " [" << to_string(c.inputs.f_upper_R.rigor)
        << "], f_lower(r) = " << c.inputs.f_lower_r.value << " [" << to_string(c.inputs.f_lower_r.rigor)
        << "], H1(R) = " << c.inputs.H1_R.value << " [" << to_string(c.inputs.H1_R.rigor)
        << "], H2(R) = " << c.inputs.H2_R.value << " [" << to_string(c.inputs.H2_R.rigor) << "]\n"
        << "  value branch    " << c.lhs_value_branch << "\n"
        << "  deriv branch    " << c.lhs_deriv_branch << "\n"
        << "  max branch      " << std::max(c.lhs_value_branch, c.lhs_deriv_branch) << " <= " << c.R << " : "
        << (c.upper_margin() >= 0 ? "yes" : "no") << " (margin " << c.upper_margin() << ")\n"
        << "  lower           " << c.lhs_idx0 << " >= " << c.r << " : " << (c.lower_margin() >= 0 ? "yes" : "no")
        << " (margin " << c.lower_margin() << ")\n"
        << "  rigor           " << to_string(c.rigor) << "\n"
        << "  verdict         " << to_string(c.verdict) << "\n";

    Record rec;
    put_common(rec, cfg, spec);
    rec.set("r", c.r);
    rec.set("R", c.R);
    put_bound(rec, "f_upper_R", c.inputs.f_upper_R);
    put_bound(rec, "f_lower_r", c.inputs.f_lower_r);
    put_bound(rec, "H1_R", c.inputs.H1_R);
    put_bound(rec, "H2_R", c.inputs.H2_R);
    rec.set("value_branch", c.lhs_value_branch);
    rec.set("deriv_branch", c.lhs_deriv_branch);
    rec.set("idx0", c.lhs_idx0);
    rec.set("upper_margin", c.upper_margin());
    rec.set("lower_margin", c.lower_margin());
    rec.set("rigor", std::string(to_string(c.rigor)));
    rec.set("verdict", std::string(to_string(c.verdict)));
    emit_record(cfg, rec, code, out);
    return code;
}

int certify_nonexistence(const RunConfig& cfg, const ProblemSpec& spec, std::ostream& out) {
    if (!spec.witness())
        throw IncompleteBoundsError("problem file declares no [witness] section (tau, xi1, xi2)");
    const LinearGrowthWitness& w = *spec.witness();
    NonexistenceCertificate c = cfg.skip_falsify ? check_nonexistence(spec, w)
                                                 : certify_nonexistence(spec, w, cfg.budget, cfg.seed);
    const int code = c.passed() ? kPass : kFail;

    out << std::setprecision(10);
    out << "non-existence certificate\n"
        << "  parameters      lambda = " << spec.params().lambda << ", eta1 = " << spec.params().eta1
        << ", eta2 = " << spec.params().eta2 << "\n"
        << "  witness         tau = " << w.tau << ", xi1 = " << w.xi1 << ", xi2 = " << w.xi2 << " ("
        << to_string(c.witness_status) << ")\n";
    if (c.counterexample)
        out << "  counterexample  " << c.counterexample->description << "\n";
    out << "  lhs             " << c.lhs << " < 1 : " << (c.inequality_holds ? "yes" : "no") << " (margin "
        << c.margin() << ")\n"
        << "  verdict         " << (c.passed() ? "pass" : "fail") << "\n";

    Record rec;
    put_common(rec, cfg, spec);
    rec.set("tau", w.tau);
    rec.set("xi1", w.xi1);
    rec.set("xi2", w.xi2);
    rec.set("witness_status", std::string(to_string(c.witness_status)));
    if (c.counterexample)
        rec.set("counterexample", c.counterexample->description);
    rec.set("lhs", c.lhs);
    rec.set("margin", c.margin());
    rec.set("verdict", c.passed() ? "pass" : "fail");
    emit_record(cfg, rec, code, out);
    return code;
}

int solve(const RunConfig& cfg, const ProblemSpec& spec, std::ostream& out) {
    SolveOptions so;
    so.tol = cfg.tol;
    so.max_iter = cfg.max_iter;
    MultistartOptions ms;
    ms.starts = cfg.starts;
    ms.seed = cfg.seed;
    ms.threads = cfg.threads;
    std::optional<Annulus> annulus;
    if (cfg.r)
        annulus = Annulus{*cfg.r, *cfg.R};

    const auto results = multistart_solve(spec, ms, so, annulus);
    const double trivial = 10.0 * so.tol;

    const SolveResult* chosen = nullptr;
    for (const auto& res : results)
        if (res.status == SolveStatus::Converged && (!chosen || (chosen->norm <= trivial && res.norm > trivial)))
            chosen = &res;
    const bool any_converged = chosen != nullptr;
    const bool nontrivial = chosen && chosen->norm > trivial;
    if (!chosen)
        chosen = &results.front();

    out << std::setprecision(10);
    out << "picard multistart: " << cfg.starts << " starts, " << results.size() << " distinct results\n";
    for (const auto& res : results) {
        out << "  " << std::left << std::setw(15) << to_string(res.status) << std::right << " norm=" << res.norm
            << " residual=" << res.residual << " iterations=" << res.iterations
            << " cone=" << (res.cone_ok ? "ok" : "VIOLATED");
        if (res.in_annulus)
            out << " annulus=" << (*res.in_annulus ? "in" : "out");
        out << "  [" << res.start << "]\n";
    }
    if (!any_converged)
        out << "no start converged; this does not contradict an existence certificate, which is not constructive\n";

    out << "solution (" << to_string(chosen->status) << ", norm " << chosen->norm << ")\n";
    out << "       t                    u                    u'\n";
    const Gridd& grid = spec.grid();
    for (Eigen::Index j = 0; j < grid.size(); ++j)
        out << std::setw(10) << grid.node(j) << "  " << std::setw(20) << chosen->u.values(j) << " " << std::setw(20)
            << chosen->u.dvalues(j) << "\n";

    int code = any_converged ? kPass : kFail;
    if (cfg.nontrivial && !nontrivial)
        code = kFail;

    if (!cfg.out.empty()) {
        std::ostringstream table;
        table << "t,u,du\n";
        for (Eigen::Index j = 0; j < grid.size(); ++j)
            table << format_double(grid.node(j)) << ',' << format_double(chosen->u.values(j)) << ','
                  << format_double(chosen->u.dvalues(j)) << '\n';
        write_file(cfg.out, table.str());
        out << "solution table written to " << cfg.out << "\n";
    }
    if (!cfg.record.empty()) {
        Record rec;
        put_common(rec, cfg, spec);
        rec.set("starts", cfg.starts);
        rec.set("tol", cfg.tol);
        rec.set("distinct_results", static_cast<long long>(results.size()));
        rec.set("status", std::string(to_string(chosen->status)));
        rec.set("norm", chosen->norm);
        rec.set("residual", chosen->residual);
        rec.set("iterations", chosen->iterations);
        rec.set("cone_ok", chosen->cone_ok);
        rec.set("nontrivial", nontrivial);
        if (chosen->in_annulus)
            rec.set("in_annulus", *chosen->in_annulus);
        rec.set("exit_code", code);
        write_file(cfg.record, rec.str());
    }
    return code;
}

int sweep(const RunConfig& cfg, const ProblemSpec& spec, std::ostream& out) {
    if (!cfg.r)
        throw ParameterError("sweep needs --r and --R");
    const SweepBox box{AxisRange::parse(cfg.lambda), AxisRange::parse(cfg.eta1), AxisRange::parse(cfg.eta2)};
    std::optional<LinearGrowthWitness> witness;
    if (cfg.witness) {
        if (!spec.witness())
            throw IncompleteBoundsError("--witness given but the problem file declares no [witness] section");
        witness = spec.witness();
    }
    const BoundSet bounds = make_bounds(spec, cfg);
    const auto cells = run_sweep(spec, box, bounds, witness, *cfg.r, *cfg.R, SweepOptions{cfg.threads});

    std::ostringstream csv;
    write_sweep_csv(csv, cells);
    if (cfg.out.empty()) {
        out << csv.str();
    } else {
        write_file(cfg.out, csv.str());
        std::size_t counts[4] = {0, 0, 0, 0};
        for (const auto& c : cells)
            ++counts[static_cast<int>(c.classification)];
        out << cells.size() << " cells: existence=" << counts[0] << " nonexistence=" << counts[1]
            << " both-fail=" << counts[2] << " conflict=" << counts[3] << "\n"
            << "classification holds at the evaluated lattice points only\n"
            << "table written to " << cfg.out << "\n";
    }
    if (const auto conflicts = count_conflicts(cells)) {
        // Existence and only-zero together: the declared bounds or witness are inconsistent.
        throw Error(std::to_string(conflicts) + " sweep cell(s) passed both certificates; check declared bounds "
                    "and witness");
    }
    return kPass;
}

int validate(const RunConfig& cfg, const ProblemSpec& spec, std::ostream& out) {
    const auto& checks = spec.hypothesis_checks();
    bool all = true;
    out << "hypothesis checks for " << cfg.problem << " (sampled; a pass does not prove the hypothesis)\n";
    for (const auto& c : checks) {
        out << "  " << (c.passed ? "pass" : "WARN") << "  " << c.name;
        if (!c.detail.empty())
            out << "  -- " << c.detail;
        out << "\n";
        all = all && c.passed;
    }
    out << "  pass  gamma derivatives match finite differences\n";
    out << "  pass  parameters lambda, eta1, eta2 >= 0\n";
    const int code = all ? kPass : kFail;
    if (!cfg.out.empty()) {
        Record rec;
        rec.set("command", cfg.command);
        rec.set("problem", cfg.problem);
        for (std::size_t i = 0; i < checks.size(); ++i)
            rec.set("check." + std::to_string(i), (checks[i].passed ? "pass: " : "warn: ") + checks[i].name);
        emit_record(cfg, rec, code, out);
    }
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Existence and non-existence certificates for perturbed Hammerstein equations"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--problem", cfg.problem, "problem file")->required();
        sub->add_option("--n", cfg.n, "grid subintervals")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for sampled procedures")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
    };
    auto radii = [&](CLI::App* sub, bool required) {
        auto* r = sub->add_option("--r", cfg.r, "inner radius");
        auto* R = sub->add_option("--R", cfg.R, "outer radius");
        if (required) {
            r->required();
            R->required();
        }
    };
    auto estimation = [&](CLI::App* sub) {
        sub->add_flag("--estimate", cfg.estimate, "estimate bounds missing from the problem file (heuristic)");
        sub->add_option("--inflate", cfg.inflation, "safety factor on sampled maxima")->capture_default_str();
        sub->add_option("--deflate", cfg.deflation, "safety factor on sampled minima")->capture_default_str();
    };

    auto* existence = app.add_subcommand("certify-existence", "check the annulus existence inequalities");
    common(existence);
    radii(existence, true);
    estimation(existence);
    existence->add_option("--out", cfg.out, "write key=value record");

    auto* nonexistence = app.add_subcommand("certify-nonexistence", "check the linear-growth inequality");
    common(nonexistence);
    nonexistence->add_option("--budget", cfg.budget, "number of doubling boxes probed")->capture_default_str();
    nonexistence->add_flag("--skip-falsify", cfg.skip_falsify, "do not probe the witness by sampling");
    nonexistence->add_option("--out", cfg.out, "write key=value record");

    auto* solve_cmd = app.add_subcommand("solve", "locate fixed points by Picard iteration");
    common(solve_cmd);
    radii(solve_cmd, false);
    solve_cmd->add_option("--starts", cfg.starts, "number of starts")->capture_default_str();
    solve_cmd->add_option("--tol", cfg.tol, "fixed-point tolerance (C1 norm)")->capture_default_str();
    solve_cmd->add_option("--max-iter", cfg.max_iter, "iteration cap")->capture_default_str();
    solve_cmd->add_flag("--nontrivial", cfg.nontrivial, "exit 1 unless a nonzero fixed point is found");
    solve_cmd->add_option("--out", cfg.out, "write solution table (t,u,du)");
    solve_cmd->add_option("--record", cfg.record, "write key=value record");

    auto* sweep_cmd = app.add_subcommand("sweep", "classify a lattice of (lambda, eta1, eta2)");
    common(sweep_cmd);
    radii(sweep_cmd, true);
    estimation(sweep_cmd);
    sweep_cmd->add_option("--lambda", cfg.lambda, "lo:hi:steps")->required();
    sweep_cmd->add_option("--eta1", cfg.eta1, "lo:hi:steps")->required();
    sweep_cmd->add_option("--eta2", cfg.eta2, "lo:hi:steps")->required();
    sweep_cmd->add_flag("--witness", cfg.witness, "also evaluate the non-existence certificate");
    sweep_cmd->add_option("--out", cfg.out, "write delimited table");

    auto* validate_cmd = app.add_subcommand("validate", "sampled checks of the standing hypotheses");
    common(validate_cmd);
    validate_cmd->add_option("--out", cfg.out, "write key=value record");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        validate_config(cfg);
        const ProblemSpec spec = load_problem(cfg.problem, cfg.n);
        if (cfg.command == "certify-existence")
            return certify_existence(cfg, spec, out);
        if (cfg.command == "certify-nonexistence")
            return certify_nonexistence(cfg, spec, out);
        if (cfg.command == "solve")
            return solve(cfg, spec, out);
        if (cfg.command == "sweep")
            return sweep(cfg, spec, out);
        return validate(cfg, spec, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

} // namespace hamm::cli
