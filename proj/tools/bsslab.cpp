// bsslab: command-line laboratory for the Baskakov-Schurer-Szasz operator
// family. Subcommands: moments, eval, voronovskaja, rates, bounds, statconv.
// Emits CSV (default) or JSON; deterministic for identical configs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bss/bss.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitTruncation = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string fmt(std::int64_t v) { return std::to_string(v); }

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& k, const std::string& v) { meta.emplace_back(k, v); }

    std::string to_csv() const {
        std::ostringstream os;
        for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? "," : "");
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "");
            os << "\n";
        }
        return os.str();
    }

    std::string to_json() const {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : meta) j["meta"][k] = v;
        j["records"] = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json rec;
            for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i)
                rec[columns[i]] = row[i];
            j["records"].push_back(std::move(rec));
        }
        return j.dump(2) + "\n";
    }
};

// Writes to stdout when path is empty, otherwise to a temp file renamed into
// place on success so failures leave no partial output.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

struct CommonOpts {
    std::string variant = "classical";
    int n = 10;
    int p = 1;
    double alpha = 0.0;
    double beta = 0.0;
    double q = 0.9;
    double A = 1.0;
    std::string f = "e1";
    double x = 1.0;
    std::string x_grid;
    std::string n_list = "10,100,1000";
    double b = 1.0;
    double gamma = -1.0;
    std::string schedule = "square-perturbed";
    std::int64_t N = 100000;
    double eps = 0.05;
    std::string format = "csv";
    std::string out;
    int quad_order = 32;
    double series_tol = 1e-12;
    std::int64_t k_max = 200000;
    double tol = 0.0;  // 0: per-variant default
    bool strict = false;
};

std::vector<double> parse_x_points(const CommonOpts& o) {
    if (o.x_grid.empty()) return {o.x};
    double start, stop, step;
    char c1, c2;
    std::istringstream is(o.x_grid);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw std::domain_error("bad --x-grid '" + o.x_grid + "' (want start:stop:step with step>0)");
    std::vector<double> xs;
    for (double x = start; x <= stop + 1e-12 * std::max(1.0, std::fabs(stop)); x += step)
        xs.push_back(x);
    return xs;
}

std::vector<std::int64_t> parse_n_list(const std::string& s) {
    std::vector<std::int64_t> ns;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) ns.push_back(std::stoll(item));
    if (ns.empty()) throw std::domain_error("empty --n-list");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw std::domain_error("--n-list must be strictly increasing");
    return ns;
}

bss::OperatorSpec make_spec(const CommonOpts& o) {
    bss::OperatorSpec s;
    if (o.variant == "classical") s.variant = bss::Variant::classical;
    else if (o.variant == "stancu") s.variant = bss::Variant::stancu;
    else if (o.variant == "king") s.variant = bss::Variant::king;
    else throw std::domain_error("bad --variant '" + o.variant + "'");
    s.n = o.n;
    s.p = o.p;
    s.alpha = o.alpha;
    s.beta = o.beta;
    s.validate();
    return s;
}

bss::EvalPolicy make_policy(const CommonOpts& o) {
    bss::EvalPolicy pol;
    pol.quad_order = o.quad_order;
    pol.series.rel_tol = o.series_tol;
    pol.series.k_max = o.k_max;
    return pol;
}

bss::QEvalPolicy make_q_policy(const CommonOpts& o) {
    bss::QEvalPolicy pol;
    pol.series.rel_tol = o.series_tol;
    pol.series.k_max = o.k_max;
    return pol;
}

bss::FuncExpr resolve_function(const std::string& name) {
    try {
        return bss::catalog(name);
    } catch (const std::invalid_argument&) {
        return bss::parse(name);  // not a catalog id: treat as expression
    }
}

void add_common_meta(Table& t, const CommonOpts& o, const std::string& cmd) {
    t.add_meta("command", cmd);
    t.add_meta("variant", o.variant);
    t.add_meta("n", std::to_string(o.n));
    t.add_meta("p", std::to_string(o.p));
    t.add_meta("alpha", fmt(o.alpha));
    t.add_meta("beta", fmt(o.beta));
    if (o.variant == "q") {
        t.add_meta("q", fmt(o.q));
        t.add_meta("A", fmt(o.A));
    }
    t.add_meta("quad_order", std::to_string(o.quad_order));
    t.add_meta("series_tol", fmt(o.series_tol));
    t.add_meta("k_max", std::to_string(o.k_max));
}

int emit(const Table& t, const CommonOpts& o) {
    write_output(o.out, o.format == "json" ? t.to_json() : t.to_csv());
    return kExitOk;
}

int cmd_moments(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "moments");
    const double tol = o.tol > 0.0 ? o.tol : (o.variant == "q" ? 1e-6 : 1e-8);
    t.add_meta("tolerance", fmt(tol));
    const std::vector<double> xs = parse_x_points(o);

    bool tol_ok = true, flagged = false;
    if (o.variant == "q") {
        t.columns = {"x", "e0", "e1", "e2", "m1", "m2", "central_bound",
                     "numeric_e0", "numeric_e1", "numeric_e2", "max_rel_discrepancy"};
        bss::QOperatorSpec spec;
        spec.n = o.n;
        spec.p = o.p;
        spec.ctx = bss::QContext::for_q(o.q, o.A);
        spec.ctx.rel_tol = o.series_tol;
        const auto pol = make_q_policy(o);
        for (const double x : xs) {
            const auto rep = bss::q_moments(spec, x, pol);
            t.rows.push_back({fmt(x), fmt(rep.e0), fmt(rep.e1), fmt(rep.e2), fmt(rep.m1),
                              fmt(rep.m2), fmt(rep.central_bound), fmt(rep.numeric_e0),
                              fmt(rep.numeric_e1), fmt(rep.numeric_e2),
                              fmt(rep.max_rel_discrepancy)});
            tol_ok = tol_ok && rep.max_rel_discrepancy < tol;
            flagged = flagged || rep.flagged;
        }
    } else {
        const bss::OperatorSpec spec = make_spec(o);
        const auto pol = make_policy(o);
        const bool king = spec.variant == bss::Variant::king;
        t.columns = {"x", "e0", "e1", "e2", "m1", "m2",
                     "numeric_e0", "numeric_e1", "numeric_e2", "max_rel_discrepancy"};
        if (king) {
            t.columns.push_back("paper_e2");
            t.columns.push_back("paper_m2");
        }
        for (const double x : xs) {
            const auto rep = bss::closed_moments(spec, x, pol);
            std::vector<std::string> row{fmt(x), fmt(rep.e0), fmt(rep.e1), fmt(rep.e2),
                                         fmt(rep.m1), fmt(rep.m2), fmt(rep.numeric_e0),
                                         fmt(rep.numeric_e1), fmt(rep.numeric_e2),
                                         fmt(rep.max_rel_discrepancy)};
            if (king) {
                const auto pm = bss::paper_king_moments(spec, x);
                row.push_back(fmt(pm.e2));
                row.push_back(fmt(pm.m2));
            }
            t.rows.push_back(std::move(row));
            tol_ok = tol_ok && rep.max_rel_discrepancy < tol;
            flagged = flagged || rep.flagged;
        }
    }
    const int rc = emit(t, o);
    if (o.strict && flagged) return kExitTruncation;
    if (!tol_ok) return kExitCheckFailed;
    return rc;
}

int cmd_eval(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "eval");
    t.add_meta("f", o.f);
    const bss::FuncExpr f = resolve_function(o.f);
    const std::vector<double> xs = parse_x_points(o);
    t.columns = {"x", "value", "flagged"};

    std::vector<std::pair<double, bool>> results(xs.size());
    bool any_flag = false;
    if (o.variant == "q") {
        bss::QOperatorSpec spec;
        spec.n = o.n;
        spec.p = o.p;
        spec.ctx = bss::QContext::for_q(o.q, o.A);
        spec.ctx.rel_tol = o.series_tol;
        const auto pol = make_q_policy(o);
        bss::parallel_for(static_cast<std::int64_t>(xs.size()), [&](std::int64_t i) {
            const auto r = bss::q_evaluate_detailed(spec, f, xs[i], pol);
            results[i] = {r.value, r.flagged()};
        });
    } else {
        const bss::OperatorSpec spec = make_spec(o);
        const auto pol = make_policy(o);
        bss::parallel_for(static_cast<std::int64_t>(xs.size()), [&](std::int64_t i) {
            const auto r = bss::evaluate_detailed(spec, f, xs[i], pol);
            results[i] = {r.value, r.flagged()};
        });
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        t.rows.push_back({fmt(xs[i]), fmt(results[i].first), results[i].second ? "1" : "0"});
        any_flag = any_flag || results[i].second;
    }
    const int rc = emit(t, o);
    if (o.strict && any_flag) return kExitTruncation;
    return rc;
}

int cmd_voronovskaja(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "voronovskaja");
    t.add_meta("f", o.f);
    t.add_meta("x", fmt(o.x));
    const bss::FuncExpr f = resolve_function(o.f);
    const auto ns = parse_n_list(o.n_list);
    std::vector<bss::ConvergenceRecord> records;
    if (o.variant == "q") {
        t.add_meta("schedule", o.schedule);
        const bss::QSequence qs = bss::make_schedule(o.schedule);
        records = bss::q_voronovskaja_run(o.p, f, o.x, ns,
                                          [&](std::int64_t n) { return qs(n); }, o.A,
                                          make_q_policy(o));
    } else {
        bss::OperatorSpec base = make_spec(o);
        records = bss::voronovskaja_run(base, f, o.x, ns, make_policy(o));
    }
    t.add_meta("loglog_slope", fmt(bss::loglog_slope(records)));
    t.columns = {"n", "scaled_error", "target", "abs_gap"};
    for (const auto& r : records)
        t.rows.push_back({fmt(r.n), fmt(r.scaled_error), fmt(r.target), fmt(r.abs_gap)});
    return emit(t, o);
}

int cmd_rates(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "rates");
    t.add_meta("f", o.f);
    t.add_meta("b", fmt(o.b));
    const bss::FuncExpr f = resolve_function(o.f);
    const auto ns = parse_n_list(o.n_list);
    const auto pol = make_policy(o);
    t.columns = {"n", "sup_error", "delta_nb", "omega_term", "rhs", "ratio",
                 "korovkin_e0", "korovkin_e1", "korovkin_e2"};
    bool all_hold = true;
    std::vector<bss::T2Report> reps(ns.size());
    std::vector<std::array<double, 3>> kor(ns.size());
    bss::parallel_for(static_cast<std::int64_t>(ns.size()), [&](std::int64_t i) {
        bss::OperatorSpec spec = make_spec(o);
        spec.n = static_cast<int>(ns[i]);
        reps[i] = bss::bound_check_theorem_t2(f, spec, o.b, pol);
        kor[i] = bss::korovkin_weighted_norms(spec);
    });
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto& r = reps[i];
        t.rows.push_back({fmt(ns[i]), fmt(r.lhs), fmt(r.delta_nb), fmt(r.omega_term),
                          fmt(r.rhs), fmt(r.ratio), fmt(kor[i][0]), fmt(kor[i][1]),
                          fmt(kor[i][2])});
        all_hold = all_hold && r.holds;
    }
    const int rc = emit(t, o);
    return all_hold ? rc : kExitCheckFailed;
}

int cmd_bounds(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "bounds");
    t.add_meta("f", o.f);
    const bss::FuncExpr f = resolve_function(o.f);
    const bss::OperatorSpec spec = make_spec(o);
    const auto pol = make_policy(o);
    t.columns = {"check", "param", "lhs", "rhs", "detail", "holds"};
    bool all_hold = true;

    const auto t2 = bss::bound_check_theorem_t2(f, spec, o.b, pol);
    t.rows.push_back({"t2", fmt(o.b), fmt(t2.lhs), fmt(t2.rhs),
                      "ratio=" + fmt(t2.ratio), t2.holds ? "1" : "0"});
    all_hold = all_hold && t2.holds;

    for (const double x : parse_x_points(o)) {
        const auto e1 = bss::bound_check_theorem_the1(f, spec, x, pol);
        const std::string detail = e1.exceptional ? "exceptional(linear)"
                                                  : "C_implied=" + fmt(e1.c_implied);
        t.rows.push_back({"the1", fmt(x), fmt(e1.lhs),
                          fmt(e1.omega_term + bss::The1Report::kBudget * e1.omega2_term),
                          detail, e1.within_budget ? "1" : "0"});
        all_hold = all_hold && e1.within_budget;
    }

    if (o.gamma >= 0.0) {
        if (spec.variant == bss::Variant::classical)
            throw std::domain_error("bounds: the weighted rate check needs --variant stancu");
        const auto wr = bss::check_weighted_rate(spec, f, o.x, o.gamma, 0.0, pol);
        t.rows.push_back({"weighted_rate", fmt(o.x), fmt(wr.lhs), fmt(wr.rhs),
                          "delta=" + fmt(wr.delta), wr.holds ? "1" : "0"});
        all_hold = all_hold && wr.holds;
    }
    const int rc = emit(t, o);
    return all_hold ? rc : kExitCheckFailed;
}

int cmd_statconv(const CommonOpts& o) {
    Table t;
    add_common_meta(t, o, "statconv");
    t.add_meta("schedule", o.schedule);
    t.add_meta("N", std::to_string(o.N));
    t.add_meta("eps", fmt(o.eps));
    const bss::QSequence qs = bss::make_schedule(o.schedule);
    const auto seqs = bss::moment_gap_sequences(o.p, qs, o.N);

    std::vector<std::int64_t> N_list;
    for (std::int64_t N = std::max<std::int64_t>(o.N / 100, 1); N < o.N; N *= 10)
        N_list.push_back(N);
    N_list.push_back(o.N);

    t.columns = {"sequence", "N", "exception_density", "consistent"};
    bool all_ok = true;
    const char* names[3] = {"alpha", "beta", "gamma"};
    const std::vector<double>* data[3] = {&seqs.alpha, &seqs.beta, &seqs.gamma};
    for (int s = 0; s < 3; ++s) {
        const auto rep = bss::st_limit_check(
            [&](std::int64_t j) { return (*data[s])[j - 1]; }, 0.0, o.eps, N_list);
        for (std::size_t i = 0; i < rep.N_list.size(); ++i)
            t.rows.push_back({names[s], fmt(rep.N_list[i]), fmt(rep.densities[i]),
                              rep.consistent ? "1" : "0"});
        all_ok = all_ok && rep.consistent;
    }

    // the schedule's q_n^n tail (the a < 1 condition), reported not enforced
    std::int64_t probe = o.N;
    const double ql = qs(probe);
    t.add_meta("qn_pow_n_at_N", fmt(std::pow(ql, static_cast<double>(probe))));
    const int rc = emit(t, o);
    return all_ok ? rc : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bsslab: numerical laboratory for Baskakov-Schurer-Szasz type operators"};
    app.require_subcommand(1);
    CommonOpts o;

    auto add_flags = [&](CLI::App* cmd) {
        cmd->add_option("--variant", o.variant, "classical|stancu|king|q");
        cmd->add_option("--n", o.n, "operator index n");
        cmd->add_option("--p", o.p, "Schurer shift p");
        cmd->add_option("--alpha", o.alpha, "Stancu alpha (0 <= alpha <= beta)");
        cmd->add_option("--beta", o.beta, "Stancu beta");
        cmd->add_option("--q", o.q, "q in (0,1) for the q-variant");
        cmd->add_option("--A", o.A, "Jackson lattice scale A > 0");
        cmd->add_option("--f", o.f, "catalog name or expression in t "
                                    "(grammar: number|t|exp,sin,cos,abs,sqrt,ln|+-*/^|parens)");
        cmd->add_option("--x", o.x, "evaluation point");
        cmd->add_option("--x-grid", o.x_grid, "grid start:stop:step");
        cmd->add_option("--n-list", o.n_list, "comma-separated strictly increasing n values");
        cmd->add_option("--b", o.b, "finite-interval bound parameter");
        cmd->add_option("--gamma", o.gamma, "weighted-modulus exponent (enables rate check)");
        cmd->add_option("--schedule", o.schedule,
                        "q_n schedule: one-minus-inv-n|one-minus-inv-n2|square-perturbed|constant:c");
        cmd->add_option("--N", o.N, "sequence length for statconv");
        cmd->add_option("--eps", o.eps, "statistical-limit epsilon");
        cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", o.out, "output path (default stdout); written via temp+rename");
        cmd->add_option("--quad-order", o.quad_order, "base Gauss-Laguerre order");
        cmd->add_option("--series-tol", o.series_tol, "series relative tolerance");
        cmd->add_option("--k-max", o.k_max, "series term cap");
        cmd->add_option("--tol", o.tol, "moment agreement tolerance (0: variant default)");
        cmd->add_flag("--strict", o.strict, "escalate truncation warnings to exit code 4");
    };

    CLI::App* c_moments = app.add_subcommand("moments", "closed-form vs numeric moments");
    CLI::App* c_eval = app.add_subcommand("eval", "evaluate the operator on a grid");
    CLI::App* c_vor = app.add_subcommand("voronovskaja", "scaled-error asymptotics");
    CLI::App* c_rates = app.add_subcommand("rates", "error-rate table over n");
    CLI::App* c_bounds = app.add_subcommand("bounds", "error-bound inequality checks");
    CLI::App* c_stat = app.add_subcommand("statconv", "statistical-convergence experiment");
    for (CLI::App* c : {c_moments, c_eval, c_vor, c_rates, c_bounds, c_stat}) add_flags(c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_moments->parsed()) return cmd_moments(o);
        if (c_eval->parsed()) return cmd_eval(o);
        if (c_vor->parsed()) return cmd_voronovskaja(o);
        if (c_rates->parsed()) return cmd_rates(o);
        if (c_bounds->parsed()) return cmd_bounds(o);
        if (c_stat->parsed()) return cmd_statconv(o);
    } catch (const bss::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
