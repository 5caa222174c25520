#include "hamm/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hamm/errors.hpp"

namespace hamm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

struct Entry {
    std::string value;
    std::size_t line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>> kSchema = {
    {"kernel", {"name", "k", "dk", "phi", "psi"}},
    {"gamma", {"gamma1", "gamma2", "dgamma1", "dgamma2"}},
    {"functionals", {"h1", "h2"}},
    {"nonlinearity", {"f"}},
    {"parameters", {"lambda", "eta1", "eta2"}},
    {"bounds", {"f_upper", "f_lower", "H1", "H2"}},
    {"witness", {"tau", "xi1", "xi2"}},
};

class FileReader {
public:
    FileReader(std::string_view text, std::string origin) : origin_(std::move(origin)) { read(text); }

    [[noreturn]] void fail(std::size_t line, const std::string& what) const {
        throw ParseError(origin_ + ":" + std::to_string(line) + ": " + what, line);
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end())
            return nullptr;
        auto e = s->second.find(key);
        return e == s->second.end() ? nullptr : &e->second;
    }

    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }

    Expr expr(const std::string& section, const std::string& key, Role role) const {
        const Entry* e = find(section, key);
        if (!e)
            fail(last_line_, "missing required key '" + key + "' in section [" + section + "]");
        return parse_entry(*e, key, role);
    }

    std::optional<Expr> optional_expr(const std::string& section, const std::string& key, Role role) const {
        const Entry* e = find(section, key);
        if (!e)
            return std::nullopt;
        return parse_entry(*e, key, role);
    }

    double number(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e)
            fail(last_line_, "missing required key '" + key + "' in section [" + section + "]");
        return parse_entry(*e, key, Role::Constant).constant();
    }

private:
    Expr parse_entry(const Entry& e, const std::string& key, Role role) const {
        try {
            return Expr::parse(e.value, role);
        } catch (const ParseError& err) {
            fail(e.line, "in '" + key + "': " + err.what());
        }
    }

    void read(std::string_view text) {
        std::string current;
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos)
                end = text.size();
            std::string_view line = text.substr(start, end - start);
            start = end + 1;
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            last_line_ = line_no;
            if (line.front() == '[') {
                if (line.back() != ']')
                    fail(line_no, "unterminated section header");
                current = std::string(trim(line.substr(1, line.size() - 2)));
                if (!kSchema.count(current))
                    fail(line_no, "unknown section [" + current + "]");
                sections_[current];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                fail(line_no, "expected 'key = value'");
            if (current.empty())
                fail(line_no, "entry outside of any section");
            const std::string key(trim(line.substr(0, eq)));
            std::string_view value = trim(line.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            if (!kSchema.at(current).count(key))
                fail(line_no, "unknown key '" + key + "' in section [" + current + "]");
            if (sections_[current].count(key))
                fail(line_no, "duplicate key '" + key + "'");
            sections_[current][key] = Entry{std::string(value), line_no};
        }
    }

    std::string origin_;
    std::map<std::string, Section> sections_;
    std::size_t last_line_ = 0;
};

void check_derivative(const Expr& gamma, const Expr& dgamma, int index, const Gridd& grid,
                      const ValidationOptions& opts) {
    const Eigen::Index stride = std::max<Eigen::Index>(1, grid.intervals() / 64);
    const double d = opts.fd_step;
    for (Eigen::Index j = 1; j < grid.intervals(); j += stride) {
        const double t = grid.node(j);
        const double fd = (gamma(t + d) - gamma(t - d)) / (2.0 * d);
        const double declared = dgamma(t);
        if (!(std::abs(fd - declared) <= opts.fd_tolerance)) {
            std::ostringstream os;
            os << "declared derivative dgamma" << index << " = '" << dgamma.source() << "' does not match gamma"
               << index << " = '" << gamma.source() << "' at t=" << t << " (finite difference " << fd
               << ", declared " << declared << ")";
            throw DerivativeMismatchError(os.str());
        }
    }
}

} // namespace

ProblemDefinition parse_problem(std::string_view text, const std::string& origin) {
    FileReader in(text, origin);
    ProblemDefinition def;

    if (const Entry* name = in.find("kernel", "name"))
        def.kernel_name = name->value;
    if (def.kernel_name == "expr") {
        def.k = in.expr("kernel", "k", Role::Kernel);
        def.dk = in.expr("kernel", "dk", Role::Kernel);
        def.phi = in.optional_expr("kernel", "phi", Role::Kernel);
        def.psi = in.optional_expr("kernel", "psi", Role::Kernel);
    } else if (def.kernel_name != "focal") {
        in.fail(in.find("kernel", "name")->line, "unknown kernel '" + def.kernel_name + "' (expected focal or expr)");
    }

    def.gamma1 = in.expr("gamma", "gamma1", Role::Coefficient);
    def.gamma2 = in.expr("gamma", "gamma2", Role::Coefficient);
    def.dgamma1 = in.expr("gamma", "dgamma1", Role::Coefficient);
    def.dgamma2 = in.expr("gamma", "dgamma2", Role::Coefficient);
    def.h1 = in.expr("functionals", "h1", Role::Functional);
    def.h2 = in.expr("functionals", "h2", Role::Functional);
    def.f = in.expr("nonlinearity", "f", Role::Nonlinearity);
    def.params.lambda = in.number("parameters", "lambda");
    def.params.eta1 = in.number("parameters", "eta1");
    def.params.eta2 = in.number("parameters", "eta2");

    def.bounds.f_upper = in.optional_expr("bounds", "f_upper", Role::Bound);
    def.bounds.f_lower = in.optional_expr("bounds", "f_lower", Role::Bound);
    def.bounds.H1 = in.optional_expr("bounds", "H1", Role::Bound);
    def.bounds.H2 = in.optional_expr("bounds", "H2", Role::Bound);

    if (in.has_section("witness")) {
        LinearGrowthWitness w;
        w.tau = in.number("witness", "tau");
        w.xi1 = in.number("witness", "xi1");
        w.xi2 = in.number("witness", "xi2");
        if (w.tau < 0 || w.xi1 < 0 || w.xi2 < 0)
            throw ParameterError(origin + ": witness constants tau, xi1, xi2 must be non-negative");
        def.witness = w;
    }
    require_valid_parameters(def.params);
    return def;
}

ProblemDefinition read_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open problem file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_problem(text.str(), path.string());
}

void require_valid_parameters(const Parameters& p) {
    auto check = [](double x, const char* name) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ParameterError(std::string("parameter ") + name + " must be finite and non-negative, got "
                                 + std::to_string(x));
    };
    check(p.lambda, "lambda");
    check(p.eta1, "eta1");
    check(p.eta2, "eta2");
}

ProblemSpec ProblemSpec::build(ProblemDefinition def, Eigen::Index n, const ValidationOptions& opts) {
    require_valid_parameters(def.params);
    ProblemSpec spec(std::move(def), Gridd(n));
    spec.opts_ = opts;
    const ProblemDefinition& d = spec.def_;

    if (d.kernel_name == "focal")
        spec.kernel_ = std::make_shared<FocalKernel>();
    else
        spec.kernel_ = std::make_shared<ExprKernel>(*d.k, *d.dk, d.phi, d.psi);

    const Gridd& grid = spec.grid_;
    spec.matrices_ = std::make_shared<KernelMatrices>(assemble(*spec.kernel_, grid));
    spec.K_ = constant_K(*spec.kernel_, grid);
    spec.Kstar_ = constant_Kstar(*spec.kernel_, grid);

    for (int i = 1; i <= 2; ++i) {
        const Expr& g = spec.gamma(i);
        const Expr& dg = spec.dgamma(i);
        check_derivative(g, dg, i, grid, opts);
        VectorXd gs(grid.size()), dgs(grid.size());
        for (Eigen::Index j = 0; j < grid.size(); ++j) {
            gs(j) = g(grid.node(j));
            dgs(j) = dg(grid.node(j));
        }
        spec.gamma_one_[i - 1] = g(1.0);
        spec.dgamma_sup_[i - 1] = dgs.cwiseAbs().maxCoeff();
        spec.gamma_samples_[i - 1] = std::move(gs);
        spec.dgamma_samples_[i - 1] = std::move(dgs);
    }
    spec.checks_ = validate_hypotheses(spec);
    return spec;
}

std::vector<HypothesisCheck> ProblemSpec::warnings() const {
    std::vector<HypothesisCheck> out;
    for (const auto& c : checks_)
        if (!c.passed)
            out.push_back(c);
    return out;
}

ProblemSpec ProblemSpec::with_params(const Parameters& p) const {
    require_valid_parameters(p);
    ProblemSpec copy = *this;
    copy.def_.params = p;
    return copy;
}

ProblemSpec ProblemSpec::on_grid(Eigen::Index n) const { return build(def_, n, opts_); }

ProblemSpec load_problem(const std::filesystem::path& path, Eigen::Index n) {
    return ProblemSpec::build(read_problem_file(path), n);
}

VectorXd sample_nonlinearity(const ProblemSpec& spec, const GridFunctiond& u) {
    const Gridd& grid = spec.grid();
    if (!(u.grid == grid))
        throw ShapeError("apply_T: input lives on a grid with " + std::to_string(u.grid.intervals())
                         + " subintervals, problem uses " + std::to_string(grid.intervals()));
    VectorXd F(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        double a = u.values(j);
        double b = u.dvalues(j);
        if (a < -kConeTolerance || b < -kConeTolerance)
            throw ParameterError("apply_T: input leaves the cone at t=" + std::to_string(grid.node(j)));
        a = std::max(a, 0.0);
        b = std::max(b, 0.0);
        F(j) = spec.nonlinearity().nonlinearity(grid.node(j), a, b);
    }
    return F;
}

GridFunctiond apply_T(const ProblemSpec& spec, const GridFunctiond& u) {
    const Parameters& p = spec.params();
    GridFunctiond w = GridFunctiond::zero(spec.grid());
    const double etas[2] = {p.eta1, p.eta2};
    for (int i = 1; i <= 2; ++i) {
        if (etas[i - 1] == 0.0)
            continue;
        const double hu = spec.h(i).functional(u);
        w.values += (etas[i - 1] * hu) * spec.gamma_samples(i);
        w.dvalues += (etas[i - 1] * hu) * spec.dgamma_samples(i);
    }
    if (p.lambda != 0.0) {
        const VectorXd F = sample_nonlinearity(spec, u);
        const KernelMatrices& m = spec.kernel_matrices();
        w.values.noalias() += p.lambda * (m.value * F);
        w.dvalues.noalias() += p.lambda * (m.deriv * F);
    }
    return w;
}

std::vector<HypothesisCheck> validate_hypotheses(const ProblemSpec& spec) {
    const ValidationOptions opts;
    std::vector<HypothesisCheck> checks = check_kernel_hypotheses(spec.kernel(), opts.kernel_lattice);
    const Gridd& grid = spec.grid();

    for (int i = 1; i <= 2; ++i) {
        const std::string idx = std::to_string(i);
        HypothesisCheck g{"gamma" + idx + " >= 0", true, {}};
        HypothesisCheck dg{"gamma" + idx + "' >= 0", true, {}};
        for (Eigen::Index j = 0; j < grid.size(); ++j) {
            if (g.passed && !(spec.gamma_samples(i)(j) >= -kConeTolerance))
                g = {g.name, false, "negative at t=" + std::to_string(grid.node(j))};
            if (dg.passed && !(spec.dgamma_samples(i)(j) >= -kConeTolerance))
                dg = {dg.name, false, "negative at t=" + std::to_string(grid.node(j))};
        }
        checks.push_back(g);
        checks.push_back(dg);
    }

    HypothesisCheck f_sign{"f >= 0", true, {}};
    const int m = opts.f_lattice;
    for (int a = 0; a < m && f_sign.passed; ++a)
        for (int b = 0; b < m && f_sign.passed; ++b)
            for (int c = 0; c < m && f_sign.passed; ++c) {
                const double t = double(a) / (m - 1);
                const double u = opts.f_box * b / (m - 1);
                const double v = opts.f_box * c / (m - 1);
                const double value = spec.nonlinearity().nonlinearity(t, u, v);
                if (!(value >= -kConeTolerance)) {
                    std::ostringstream os;
                    os << "f(" << t << ", " << u << ", " << v << ") = " << value;
                    f_sign = {f_sign.name, false, os.str()};
                }
            }
    checks.push_back(f_sign);

    for (int i = 1; i <= 2; ++i) {
        HypothesisCheck probe{"h" + std::to_string(i) + " finite and >= 0 on cone probes", true, {}};
        for (double rho : {0.5, 1.0, 2.0}) {
            const auto ramp = GridFunctiond::sample(grid, [rho](double t) { return rho * t; },
                                                    [rho](double) { return rho; });
            const auto flat = GridFunctiond::sample(grid, [rho](double) { return rho; }, [](double) { return 0.0; });
            for (const auto* u : {&ramp, &flat}) {
                const double value = spec.h(i).functional(*u);
                if (probe.passed && !(std::isfinite(value) && value >= -kConeTolerance)) {
                    std::ostringstream os;
                    os << "h" << i << " = " << value << " on " << (u == &ramp ? "u(t)=" : "u(t)==") << rho
                       << (u == &ramp ? "*t" : "");
                    probe = {probe.name, false, os.str()};
                }
            }
        }
        checks.push_back(probe);
    }
    return checks;
}

} // namespace hamm
