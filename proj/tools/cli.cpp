#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <ostream>
#include <regex>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "reference_data.hpp"
#include "struve/coeffgen.hpp"
#include "struve/errors.hpp"
#include "struve/evaluate.hpp"
#include "struve/landscape.hpp"
#include "struve/transitions.hpp"

namespace struve::cli {

namespace {

using cplx = std::complex<double>;
using nlohmann::json;
constexpr double kPi = std::numbers::pi;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename... Args>
std::string format(const char* fmt, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

std::string format_complex(cplx z)
{
    return format("%.10g%+.10gi", z.real(), z.imag());
}

// Output goes to --out when given, otherwise to the supplied stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback)
    {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw UsageError("cannot open output file '" + path + "'");
        os_ = &file_;
    }
    std::ostream& get() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

// Fixed number of workers pulling row indices; results keep row order.
template <typename R, typename F>
std::vector<R> map_rows(std::size_t n, unsigned jobs, F f)
{
    std::vector<std::optional<R>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                results[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    for (unsigned j = 0; j < count; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*results[i]));
    }
    return out;
}

int default_digits()
{
    const char* env = std::getenv(kDigitsEnv);
    if (env == nullptr || *env == '\0') return mp::kDefaultDigits;
    char* end = nullptr;
    const long d = std::strtol(env, &end, 10);
    if (*end != '\0' || d < 15 || d > 1000)
        throw UsageError(std::string(kDigitsEnv) + " must be an integer in [15, 1000]");
    return static_cast<int>(d);
}

cplx require_complex(const std::string& text, const char* flag)
{
    const auto z = parse_complex(text);
    if (!z) throw UsageError(std::string(flag) + ": malformed complex literal '" + text + "'");
    return *z;
}

double theta_from(double theta_pi)
{
    if (!(std::abs(theta_pi) < 0.5)) throw UsageError("--theta-pi must lie in (-0.5, 0.5)");
    return theta_pi * kPi;
}

void require_admissible(cplx q, double theta)
{
    if (!landscape::Parameters{q, theta}.admissible())
        throw UsageError("q = " + format_complex(q) + " is outside the admissible sector for this theta");
}

// ---------------------------------------------------------------------------

struct Common {
    std::string out_path;
    bool json = false;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--out", c.out_path, "write data to FILE instead of standard output");
    sub->add_flag("--json", c.json, "JSON instead of CSV/text");
}

void write_coefficients(std::size_t kmax, bool as_json, std::ostream& os)
{
    const auto& cs = coeffgen::coefficients(kmax);
    if (as_json) {
        json arr = json::array();
        for (std::size_t k = 0; k <= kmax; ++k) arr.push_back({{"k", k}, {"coefficients", cs[k].to_fraction_strings()}});
        os << arr.dump(2) << '\n';
        return;
    }
    for (std::size_t k = 0; k <= kmax; ++k) os << 'c' << k << " = " << cs[k].to_string() << '\n';
}

int check_table1(std::ostream& out)
{
    const auto& cs = coeffgen::coefficients(10);
    bool ok = true;
    for (const auto& row : reference::table1()) {
        const bool pass = coeffgen::QPolynomial::from_fraction_strings(row.by_power) == cs[row.k];
        ok = ok && pass;
        out << "table1 k=" << row.k << ": " << (pass ? "PASS" : "FAIL") << '\n';
    }
    return ok ? kExitOk : kExitCheckFailed;
}

struct Table2Row {
    double theta_over_pi;
    cplx P;
    double Q;
};

Table2Row compute_table2_row(double theta_over_pi)
{
    const double theta = theta_over_pi * kPi;
    return {theta_over_pi, transitions::triple_point(theta).q_P, transitions::intercept_Q(theta).q_Q};
}

void write_table2(const std::vector<Table2Row>& rows, bool as_json, std::ostream& os)
{
    if (as_json) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"theta_over_pi", r.theta_over_pi}, {"re_P", r.P.real()}, {"im_P", r.P.imag()}, {"Q", r.Q}});
        os << arr.dump(2) << '\n';
        return;
    }
    os << "theta_over_pi,re_P,im_P,Q\n";
    for (const auto& r : rows) os << format("%.17g,%.17g,%.17g,%.17g\n", r.theta_over_pi, r.P.real(), r.P.imag(), r.Q);
}

int check_table2(const std::vector<Table2Row>& rows, double tol, double rel_tol, std::ostream& out)
{
    bool ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& ref = reference::kTable2[i];
        const auto& r = rows[i];
        auto close = [&](double got, double want, bool relative) {
            return relative ? std::abs(got - want) <= rel_tol * std::abs(want) : std::abs(got - want) <= tol;
        };
        const bool pass = close(r.P.real(), ref.re_P, ref.relative) && close(r.P.imag(), ref.im_P, ref.relative) &&
                          close(r.Q, ref.Q, false);
        ok = ok && pass;
        out << format("table2 theta/pi=%.2f: P %.6f%+.6fi ref %.6g%+.6gi, Q %.6f ref %.5f: %s\n", ref.theta_over_pi,
                      r.P.real(), r.P.imag(), ref.re_P, ref.im_P, r.Q, ref.Q, pass ? "PASS" : "FAIL");
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int check_table3(const std::vector<evaluate::EvalReport>& reports, double factor, std::ostream& out)
{
    bool ok = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& ref = reference::kTable3[i];
        const auto& r = reports[i];
        const double ratio = r.rel_err_H / ref.rel_err_H;
        const bool pass = r.endpoint_text == ref.endpoint && ratio <= factor && ratio >= 1.0 / factor;
        ok = ok && pass;
        out << format("table3 q=%s theta/pi=%.2f: rel_err_H %.4e ref %.4e, endpoint %s ref %s: %s\n",
                      format_complex({ref.q_re, ref.q_im}).c_str(), ref.theta_over_pi, r.rel_err_H, ref.rel_err_H,
                      r.endpoint_text.c_str(), std::string(ref.endpoint).c_str(), pass ? "PASS" : "FAIL");
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Struve function asymptotics: coefficients, steepest-descent geometry, error tables", "struve"};
    app.require_subcommand(1);

    Common common;
    std::string q_text = "0";
    double theta_pi = 0.0;
    int kmax = 10;
    bool check = false;
    bool unbounded = false;
    double modulus = reference::kTable3Modulus;
    int digits = 0;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto* coeffs = app.add_subcommand("coeffs", "exact polynomials c_0(q) .. c_K(q)");
    coeffs->add_option("--kmax", kmax, "highest index K")->required()->check(CLI::Range(0, 80));
    add_common(coeffs, common);

    auto* classify = app.add_subcommand("classify", "endpoint of the steepest-descent path from the origin");
    classify->add_option("--q", q_text, "q = nu/z")->required();
    classify->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    add_common(classify, common);

    auto* trace = app.add_subcommand("trace", "steepest-descent path from the origin as rows");
    trace->add_option("--q", q_text, "q = nu/z")->required();
    trace->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    add_common(trace, common);

    double alpha = 0, lo = 0.0, hi = 1.0;
    auto* crit = app.add_subcommand("critical-beta", "beta where the label of alpha + i beta changes");
    crit->add_option("--alpha", alpha, "real part of q")->required();
    crit->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    crit->add_option("--lo", lo, "lower end of the beta bracket");
    crit->add_option("--hi", hi, "upper end of the beta bracket");
    add_common(crit, common);

    auto* triple = app.add_subcommand("triple-point", "q at which the path meets both saddles");
    triple->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    add_common(triple, common);

    auto* intercept = app.add_subcommand("intercept", "crossing of the lower transition curve with the real q-axis");
    intercept->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    add_common(intercept, common);

    std::string branch_text = "all";
    double arc = 1.0, step = 0.02;
    auto* curves = app.add_subcommand("curves", "sampled transition curves from the triple point");
    curves->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    curves->add_option("--branch", branch_text, "upper, middle, lower or all");
    curves->add_option("--arc", arc, "arc length from the triple point");
    curves->add_option("--step", step, "sample spacing");
    add_common(curves, common);

    auto add_eval_options = [&](CLI::App* sub) {
        sub->add_option("--modulus", modulus, "|z|");
        sub->add_option("--kmax", kmax, "largest term index searched for the least term")->check(CLI::Range(0, 160));
        sub->add_flag("--unbounded", unbounded, "search for the least term without an index bound");
        sub->add_option("--digits", digits, "oracle precision in decimal digits")->check(CLI::Range(15, 1000));
    };
    auto* eval = app.add_subcommand("eval", "relative error of the optimally truncated expansion");
    eval->add_option("--q", q_text, "q = nu/z")->required();
    eval->add_option("--theta-pi", theta_pi, "arg z in units of pi");
    add_eval_options(eval);
    add_common(eval, common);

    auto* table1 = app.add_subcommand("table1", "coefficients c_0 .. c_10");
    table1->add_flag("--check", check, "compare with the reference table");
    add_common(table1, common);

    double tol = 5e-5, rel_tol = 5e-3;
    auto* table2 = app.add_subcommand("table2", "triple point and intercept for the reference angles");
    table2->add_flag("--check", check, "compare with the reference table");
    table2->add_option("--tol", tol, "absolute tolerance per coordinate");
    table2->add_option("--rel-tol", rel_tol, "relative tolerance for rows given to 6 significant figures");
    table2->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    add_common(table2, common);

    double factor = 3.0;
    auto* table3 = app.add_subcommand("table3", "relative errors for the reference rows");
    table3->add_flag("--check", check, "compare with the reference table");
    table3->add_option("--factor", factor, "allowed ratio to the reference error")->check(CLI::Range(1.0, 1e6));
    table3->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    add_eval_options(table3);
    add_common(table3, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (digits == 0) digits = default_digits();
    const std::optional<std::size_t> k_bound =
        unbounded ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(kmax));
    if (!(modulus > 0)) throw UsageError("--modulus must be positive");

    if (coeffs->parsed()) {
        Sink sink(common.out_path, out);
        write_coefficients(static_cast<std::size_t>(kmax), common.json, sink.get());
        return kExitOk;
    }
    if (classify->parsed()) {
        const cplx q = require_complex(q_text, "--q");
        const double theta = theta_from(theta_pi);
        require_admissible(q, theta);
        const auto label = landscape::classify_endpoint({q, theta});
        Sink sink(common.out_path, out);
        if (common.json)
            sink.get() << json{{"q_re", q.real()}, {"q_im", q.imag()}, {"theta_over_pi", theta_pi},
                               {"label", std::string(landscape::to_string(label))}}
                              .dump(2)
                       << '\n';
        else
            sink.get() << landscape::to_string(label) << '\n';
        return kExitOk;
    }
    if (trace->parsed()) {
        const cplx q = require_complex(q_text, "--q");
        const double theta = theta_from(theta_pi);
        require_admissible(q, theta);
        const auto path = landscape::trace_steepest({q, theta});
        Sink sink(common.out_path, out);
        if (common.json)
            landscape::export_path_json(path, sink.get());
        else
            landscape::export_path_csv(path, sink.get());
        return kExitOk;
    }
    if (crit->parsed()) {
        const double theta = theta_from(theta_pi);
        if (!(lo < hi)) throw UsageError("--lo must be below --hi");
        const double beta = transitions::critical_beta(alpha, theta, lo, hi);
        Sink sink(common.out_path, out);
        if (common.json)
            sink.get() << json{{"alpha", alpha}, {"theta_over_pi", theta_pi}, {"beta", beta}}.dump(2) << '\n';
        else
            sink.get() << format("%.10g\n", beta);
        return kExitOk;
    }
    if (triple->parsed()) {
        const auto tp = transitions::triple_point(theta_from(theta_pi));
        Sink sink(common.out_path, out);
        if (common.json)
            sink.get() << json{{"theta_over_pi", theta_pi}, {"re_P", tp.q_P.real()}, {"im_P", tp.q_P.imag()}}.dump(2)
                       << '\n';
        else
            sink.get() << "P = " << format_complex(tp.q_P) << '\n';
        return kExitOk;
    }
    if (intercept->parsed()) {
        const auto iq = transitions::intercept_Q(theta_from(theta_pi));
        Sink sink(common.out_path, out);
        if (common.json)
            sink.get() << json{{"theta_over_pi", theta_pi}, {"Q", iq.q_Q}}.dump(2) << '\n';
        else
            sink.get() << format("Q = %.10g\n", iq.q_Q);
        return kExitOk;
    }
    if (curves->parsed()) {
        const double theta = theta_from(theta_pi);
        if (!(arc > 0 && step > 0 && step <= arc)) throw UsageError("need 0 < --step <= --arc");
        std::vector<transitions::Branch> branches;
        if (branch_text == "all") {
            branches = {transitions::Branch::Upper, transitions::Branch::Middle, transitions::Branch::Lower};
        } else if (auto b = transitions::parse_branch(branch_text)) {
            branches = {*b};
        } else {
            throw UsageError("--branch must be upper, middle, lower or all");
        }
        Sink sink(common.out_path, out);
        json arr = json::array();
        bool header = true;
        for (auto b : branches) {
            const auto curve = transitions::trace_transition_curve(theta, b, arc, step);
            if (common.json) {
                json samples = json::array();
                for (auto s : curve.samples) samples.push_back({s.real(), s.imag()});
                arr.push_back({{"branch", std::string(transitions::to_string(b))},
                               {"theta_over_pi", theta_pi},
                               {"samples", samples}});
            } else {
                transitions::export_curve_csv(curve, sink.get(), header);
                header = false;
            }
        }
        if (common.json) sink.get() << arr.dump(2) << '\n';
        return kExitOk;
    }
    if (eval->parsed()) {
        const cplx q = require_complex(q_text, "--q");
        const double theta = theta_from(theta_pi);
        require_admissible(q, theta);
        const auto report = evaluate::error_report(q, theta, modulus, k_bound, digits);
        Sink sink(common.out_path, out);
        if (common.json)
            evaluate::write_reports_json({report}, sink.get());
        else
            evaluate::write_reports_csv({report}, sink.get());
        return kExitOk;
    }
    if (table1->parsed()) {
        Sink sink(common.out_path, out);
        write_coefficients(10, common.json, sink.get());
        return check ? check_table1(out) : kExitOk;
    }
    if (table2->parsed()) {
        if (!(tol > 0 && rel_tol > 0)) throw UsageError("tolerances must be positive");
        const auto rows = map_rows<Table2Row>(reference::kTable2.size(), jobs, [](std::size_t i) {
            return compute_table2_row(reference::kTable2[i].theta_over_pi);
        });
        Sink sink(common.out_path, out);
        write_table2(rows, common.json, sink.get());
        return check ? check_table2(rows, tol, rel_tol, out) : kExitOk;
    }
    if (table3->parsed()) {
        const auto reports = map_rows<evaluate::EvalReport>(reference::kTable3.size(), jobs, [&](std::size_t i) {
            const auto& ref = reference::kTable3[i];
            return evaluate::error_report({ref.q_re, ref.q_im}, ref.theta_over_pi * kPi, modulus, k_bound, digits);
        });
        Sink sink(common.out_path, out);
        if (common.json)
            evaluate::write_reports_json(reports, sink.get());
        else
            evaluate::write_reports_csv(reports, sink.get());
        return check ? check_table3(reports, factor, out) : kExitOk;
    }
    return kExitUsage;
}

}  // namespace

std::optional<cplx> parse_complex(std::string_view text)
{
    static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
    static const std::regex real_re("^([+-]?" + num + ")$");
    static const std::regex imag_re("^([+-]?" + num + ")i$");
    static const std::regex full_re("^([+-]?" + num + ")([+-]" + num + ")i$");
    const std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, real_re)) return cplx(std::stod(m[1]), 0.0);
    if (std::regex_match(s, m, imag_re)) return cplx(0.0, std::stod(m[1]));
    if (std::regex_match(s, m, full_re)) return cplx(std::stod(m[1]), std::stod(m[2]));
    return std::nullopt;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace struve::cli
