#include "gradpower/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradpower/errors.hpp"
#include "gradpower/expansion.hpp"
#include "gradpower/expfam.hpp"
#include "gradpower/localpower.hpp"
#include "gradpower/montecarlo.hpp"
#include "gradpower/teststats.hpp"
#include "gradpower/tensor_io.hpp"

namespace gradpower::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, const std::string& flag)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw UsageError(flag + ": cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

std::map<std::string, double> parse_fixed(const std::string& text)
{
    std::map<std::string, double> out;
    if (text.empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--fixed: expected key=value[,key=value...], got '" + item + "'");
        }
        out[item.substr(0, eq)] = parse_number(item.substr(eq + 1), "--fixed");
    }
    return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number(item, flag));
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

/// "v", "a,b,c", "a:b:step", "a:b" (step 0.1) or ":" (default grid).
std::vector<double> parse_grid(const std::string& text, const std::string& flag, double lo_default,
                               double hi_default, double step_default)
{
    if (text.find(':') == std::string::npos) return parse_list(text, flag);
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError(flag + ": expected a:b:step");
    const double a = parts[0].empty() ? lo_default : parse_number(parts[0], flag);
    const double b = parts[1].empty() ? hi_default : parse_number(parts[1], flag);
    const double step = parts.size() < 3 || parts[2].empty() ? step_default : parse_number(parts[2], flag);
    if (!(step > 0.0) || b < a) throw UsageError(flag + ": need a <= b and step > 0");
    const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 1000000) throw UsageError(flag + ": grid too large");
    std::vector<double> out;
    for (long long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
}

std::string fixed_to_string(const std::map<std::string, double>& fixed)
{
    std::string s;
    for (const auto& [k, v] : fixed) {
        if (!s.empty()) s += ',';
        s += k + "=" + format_double(v);
    }
    return s;
}

json fixed_to_json(const std::map<std::string, double>& fixed)
{
    json j = json::object();
    for (const auto& [k, v] : fixed) j[k] = v;
    return j;
}

// CSV header echo: "# key = value" lines.
struct CsvWriter {
    std::ostringstream os;

    void comment(const std::string& key, const std::string& value) { os << "# " << key << " = " << value << '\n'; }
    void header(const std::vector<std::string>& cols)
    {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
        os << '\n';
    }
    void row(const std::vector<double>& vals)
    {
        for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << format_double(vals[i]);
        os << '\n';
    }
};

struct ModelOptions {
    std::string name;
    std::string fixed;

    void add(CLI::App* sub)
    {
        sub->add_option("--model", name, "Catalog family")
            ->required()
            ->check(CLI::IsMember(catalog_names()));
        sub->add_option("--fixed", fixed, "Known constants, e.g. k=2 or mu=0 (comma separated)");
    }

    ExpFamModel build() const { return catalog_model(name, parse_fixed(fixed)); }
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

//------------------------------------------------------------------------------

std::string cmd_model_list()
{
    std::ostringstream os;
    for (const auto& name : catalog_names()) {
        const auto model = catalog_model(name, catalog_default_fixed(name));
        std::string keys;
        for (const auto& [k, v] : model.fixed) keys += (keys.empty() ? "" : ",") + k;
        os << name << "\tfixed: " << (keys.empty() ? "-" : keys) << '\n';
    }
    return os.str();
}

std::string cmd_model_info(const std::string& name, const std::string& fixed_text)
{
    auto fixed = catalog_default_fixed(name);
    for (const auto& [k, v] : parse_fixed(fixed_text)) fixed[k] = v;
    const auto m = catalog_model(name, fixed);
    json j;
    j["command"] = "model info";
    j["name"] = m.name;
    j["fixed"] = fixed_to_json(m.fixed);
    j["parameter"] = m.text.parameter;
    j["alpha"] = m.text.alpha;
    j["zeta"] = m.text.zeta;
    j["d"] = m.text.d;
    j["v"] = m.text.v;
    j["support"] = m.support.to_string();
    j["parameter_space"] = m.param_space.to_string();
    j["mle"] = m.text.mle;
    return json_text(j);
}

struct StatOptions {
    ModelOptions model;
    double theta0 = 0.0;
    std::string data;
    std::string format = "json";
};

std::string cmd_stat(const StatOptions& o)
{
    const auto model = o.model.build();
    const auto data = read_data_file(o.data);
    const auto r = compute_statistics(model, data, o.theta0);
    if (o.format == "csv") {
        CsvWriter w;
        w.comment("command", "stat");
        w.comment("model", model.name);
        w.comment("fixed", fixed_to_string(model.fixed));
        w.comment("theta0", format_double(o.theta0));
        w.comment("data", o.data);
        w.header({"n", "d_bar", "theta_hat", "s_lr", "s_wald", "s_score", "s_gradient", "p_lr", "p_wald",
                  "p_score", "p_gradient"});
        w.row({static_cast<double>(r.n), r.d_bar, r.theta_hat, r.s[0], r.s[1], r.s[2], r.s[3], r.p_values[0],
               r.p_values[1], r.p_values[2], r.p_values[3]});
        return w.os.str();
    }
    json j;
    j["command"] = "stat";
    j["config"] = {{"model", model.name}, {"fixed", fixed_to_json(model.fixed)}, {"theta0", o.theta0},
                   {"data", o.data}};
    j["n"] = r.n;
    j["d_bar"] = r.d_bar;
    j["theta_hat"] = r.theta_hat;
    json s, p;
    for (TestKind t : all_tests) {
        s[std::string(to_string(t))] = r[t];
        p[std::string(to_string(t))] = r.p_values[index(t)];
    }
    j["statistics"] = s;
    j["p_values"] = p;
    return json_text(j);
}

struct PowerOptions {
    ModelOptions model;
    double theta0 = 0.0;
    std::string eps;
    long long n = 0;
    double alpha = 0.05;
    std::string source = "consistent";
};

std::string cmd_power(const PowerOptions& o, std::ostream& err)
{
    const auto model = o.model.build();
    const auto source = parse_coefficient_source(o.source);
    const auto grid = parse_grid(o.eps, "--eps", 0.0, 2.0, 0.1);
    CsvWriter w;
    w.comment("command", "power");
    w.comment("model", model.name);
    w.comment("fixed", fixed_to_string(model.fixed));
    w.comment("theta0", format_double(o.theta0));
    w.comment("eps", o.eps);
    w.comment("n", std::to_string(o.n));
    w.comment("alpha", format_double(o.alpha));
    w.comment("source", to_string(source));
    w.header({"eps", "lambda", "pi_lr", "pi_wald", "pi_score", "pi_gradient"});
    for (double e : grid) {
        PowerQuery q{&model, o.theta0, e, o.n, o.alpha};
        const auto p = local_powers(q, source);
        for (TestKind t : all_tests) {
            if (p[index(t)].out_of_range) {
                err << "warning: " << to_string(t) << " power expansion " << format_double(p[index(t)].raw)
                    << " at eps=" << format_double(e) << " clamped to [0,1]\n";
            }
        }
        w.row({e, q.noncentrality(), p[0].value, p[1].value, p[2].value, p[3].value});
    }
    return w.os.str();
}

struct OrderOptions {
    ModelOptions model;
    double theta0 = 0.0;
    double alpha = 0.05;
    std::string direction = "above";
    std::string source = "consistent";
    std::string eps_grid = "0.25,0.5,1,2";
    std::string format = "text";
};

std::string cmd_order(const OrderOptions& o)
{
    const auto model = o.model.build();
    const auto source = parse_coefficient_source(o.source);
    const int dir = o.direction == "above" ? 1 : -1;
    const auto rep = power_ordering(model, o.theta0, dir, o.alpha, source, parse_list(o.eps_grid, "--eps-grid"));
    if (o.format == "text") {
        CsvWriter w;
        w.comment("command", "order");
        w.comment("model", model.name);
        w.comment("fixed", fixed_to_string(model.fixed));
        w.comment("theta0", format_double(o.theta0));
        w.comment("alpha", format_double(o.alpha));
        w.comment("direction", o.direction);
        w.comment("source", to_string(source));
        w.comment("eps_grid", o.eps_grid);
        w.os << rep.summary() << '\n';
        w.os << "# Pi_i - Pi_j = -(2/sqrt(n)) * (C1 g3 + C2 g5 + C3 g7), g_m the noncentral chi-square(m) density\n";
        for (const auto& pc : rep.pairs) {
            w.os << to_string(pc.first) << ' ' << to_string(pc.relation) << ' ' << to_string(pc.second)
                 << (pc.uniform ? " uniform" : " non-uniform");
            if (!pc.uniform) w.os << " fraction_greater=" << format_double(pc.fraction_greater);
            for (std::size_t e = 0; e < pc.terms.size(); ++e) {
                const auto& d = pc.terms[e];
                w.os << "; eps=" << format_double(rep.eps_grid[e]) << " C=(" << format_double(d.C[0]) << ','
                     << format_double(d.C[1]) << ',' << format_double(d.C[2]) << ')';
                if (std::abs(d.defect) > 1e-12) w.os << " row_sum_defect=" << format_double(d.defect);
            }
            w.os << '\n';
        }
        return w.os.str();
    }
    json j;
    j["command"] = "order";
    j["config"] = {{"model", model.name}, {"fixed", fixed_to_json(model.fixed)}, {"theta0", o.theta0},
                   {"alpha", o.alpha},    {"direction", o.direction},           {"source", to_string(source)},
                   {"eps_grid", rep.eps_grid}};
    j["ordering"] = rep.summary();
    j["uniform"] = rep.uniform;
    json groups = json::array();
    for (const auto& g : rep.groups) {
        json members = json::array();
        for (TestKind t : g) members.push_back(std::string(to_string(t)));
        groups.push_back(members);
    }
    j["groups"] = groups;
    json pairs = json::array();
    for (const auto& pc : rep.pairs) {
        json c = json::array();
        json defect = json::array();
        for (const auto& d : pc.terms) {
            c.push_back({d.C[0], d.C[1], d.C[2]});
            defect.push_back(d.defect);
        }
        pairs.push_back({{"pair", std::string(to_string(pc.first)) + " vs " + std::string(to_string(pc.second))},
                         {"relation", to_string(pc.relation)},
                         {"uniform", pc.uniform},
                         {"partial_sums", c},
                         {"row_sum_defect", defect},
                         {"fraction_greater", pc.fraction_greater}});
    }
    j["certificates"] = pairs;
    j["certificate_form"] = "Pi_i - Pi_j = -(2/sqrt(n)) * sum_m C_m * g_{1+2m,lambda}(x), m = 1..3";
    return json_text(j);
}

struct ExpandOptions {
    std::string tensors;
    std::string eps;
    long long n = 0;
    std::string x = "0:20:0.5";
};

std::string cmd_expand(const ExpandOptions& o)
{
    const auto t = read_tensor_file(o.tensors);
    const auto eps_values = parse_list(o.eps, "--eps");
    Vector<double> eps(static_cast<Eigen::Index>(eps_values.size()));
    for (std::size_t i = 0; i < eps_values.size(); ++i) eps(static_cast<Eigen::Index>(i)) = eps_values[i];
    if (eps.size() != t.p - t.q) {
        throw UsageError("--eps: expected " + std::to_string(t.p - t.q) + " values (p - q)");
    }
    const auto e = composite_coefficients(t, eps);
    const auto m = st_moments(t, eps, o.n);
    CsvWriter w;
    w.comment("command", "expand");
    w.comment("tensors", o.tensors);
    w.comment("p", std::to_string(t.p));
    w.comment("q", std::to_string(t.q));
    w.comment("eps", o.eps);
    w.comment("n", std::to_string(o.n));
    w.header({"x", "cdf", "cdf_raw", "out_of_range", "f", "lambda", "a0", "a1", "a2", "a3", "A1", "A2", "A3", "mean_literal",
              "var_literal", "third_literal", "mean_mixture"});
    for (double x : parse_grid(o.x, "--x", 0.0, 20.0, 0.5)) {
        const auto c = cdf_expansion(e, o.n, x);
        w.row({x, c.value, c.raw, c.out_of_range ? 1.0 : 0.0, static_cast<double>(e.f), e.lambda, e.a[0], e.a[1], e.a[2], e.a[3], m.A[0],
               m.A[1], m.A[2], m.m1, m.m2, m.m3, m.mixture_mean});
    }
    return w.os.str();
}

struct SimulateOptions {
    ModelOptions model;
    double theta0 = 0.0;
    double eps = 0.0;
    long long n = 0;
    long long reps = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool compare_sources = false;
    std::string format = "json";
};

std::string cmd_simulate(const SimulateOptions& o, std::ostream& err)
{
    const auto model = o.model.build();
    SimulationConfig cfg;
    cfg.model = &model;
    cfg.theta0 = o.theta0;
    cfg.eps = o.eps;
    cfg.n = o.n;
    cfg.reps = o.reps;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.compare_sources = o.compare_sources;
    cfg.threads = o.threads;

    std::optional<SourceAdjudication> source_adj;
    MomentAdjudication moments;
    if (o.compare_sources) {
        source_adj = adjudicate_gradient_source(cfg);
        moments = adjudicate_moments(cfg, source_adj->simulation);
    } else {
        moments = adjudicate_moments(cfg);
    }
    const auto& rep = moments.simulation;
    err << "simulate: wall time " << rep.wall_seconds << " s on " << rep.threads_used << " thread(s)\n";

    if (o.format == "csv") {
        CsvWriter w;
        w.comment("command", "simulate");
        w.comment("model", model.name);
        w.comment("fixed", fixed_to_string(model.fixed));
        w.comment("theta0", format_double(o.theta0));
        w.comment("eps", format_double(o.eps));
        w.comment("n", std::to_string(o.n));
        w.comment("reps", std::to_string(o.reps));
        w.comment("alpha", format_double(o.alpha));
        w.comment("seed", std::to_string(o.seed));
        w.comment("completed", std::to_string(rep.completed));
        w.comment("failures", std::to_string(rep.failures));
        w.header({"test", "rejection_rate", "mc_stderr", "predicted_power", "predicted_power_table"});
        for (int i = 0; i < 4; ++i) {
            w.os << to_string(all_tests[static_cast<std::size_t>(i)]);
            w.os << ',' << format_double(rep.rejection_rate[i]) << ',' << format_double(rep.mc_stderr[i]) << ','
                 << format_double(rep.predicted_power[i]) << ','
                 << (rep.predicted_power_table ? format_double((*rep.predicted_power_table)[i]) : "") << '\n';
        }
        return w.os.str();
    }

    json j;
    j["command"] = "simulate";
    j["config"] = {{"model", model.name}, {"fixed", fixed_to_json(model.fixed)},
                   {"theta0", o.theta0},  {"eps", o.eps},
                   {"theta_n", cfg.theta_n()}, {"n", o.n},
                   {"reps", o.reps},      {"alpha", o.alpha},
                   {"seed", o.seed},      {"compare_sources", o.compare_sources}};
    j["critical_value"] = rep.critical_value;
    j["completed"] = rep.completed;
    j["failures"] = rep.failures;
    json tests = json::array();
    for (TestKind t : all_tests) {
        const auto i = index(t);
        json row = {{"test", std::string(to_string(t))},
                    {"rejection_rate", rep.rejection_rate[i]},
                    {"mc_stderr", rep.mc_stderr[i]},
                    {"predicted_power", rep.predicted_power[i]}};
        if (rep.predicted_power_table) row["predicted_power_table"] = (*rep.predicted_power_table)[i];
        tests.push_back(row);
    }
    j["tests"] = tests;
    j["gradient_moments"] = {
        {"mean", rep.s4_mean.value},
        {"mean_stderr", rep.s4_mean.std_error},
        {"variance", rep.s4_variance.value},
        {"variance_stderr", rep.s4_variance.std_error},
        {"third_central_moment", rep.s4_third_moment.value},
        {"third_central_moment_stderr", rep.s4_third_moment.std_error},
        {"predicted_mean_mixture", moments.mixture_mean},
        {"predicted_mean_literal", moments.literal_mean},
        {"distance_mixture_se", moments.z_mixture},
        {"distance_literal_se", moments.z_literal},
        {"verdict", moments.verdict},
    };
    if (source_adj) {
        j["gradient_source_adjudication"] = {
            {"empirical_gradient_minus_score", source_adj->empirical_difference.value},
            {"stderr", source_adj->empirical_difference.std_error},
            {"predicted_consistent", source_adj->predicted_consistent},
            {"predicted_table", source_adj->predicted_table},
            {"distance_consistent_se", source_adj->z_consistent},
            {"distance_table_se", source_adj->z_table},
            {"favors", to_string(source_adj->favored)},
            {"verdict", source_adj->verdict},
        };
    }
    return json_text(j);
}

void write_output(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw DomainError("failed writing output file '" + path + "'");
}

} // namespace

std::string format_double(double x)
{
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Gradient, likelihood ratio, Wald and score tests in one-parameter exponential "
                 "families: statistics, local power expansions, orderings and Monte Carlo checks."};
    app.name("gradpower");
    app.require_subcommand(1);

    std::string output;
    app.add_option("-o,--output", output, "Write output to this file instead of standard output");

    auto* model_cmd = app.add_subcommand("model", "Catalog of exponential families");
    model_cmd->require_subcommand(1);
    auto* model_list = model_cmd->add_subcommand("list", "List catalog families and their fixed constants");
    auto* model_info = model_cmd->add_subcommand("info", "Show alpha, zeta, d, v, support and MLE of a family");
    std::string info_name, info_fixed;
    model_info->add_option("name", info_name, "Family name")->required()->check(CLI::IsMember(catalog_names()));
    model_info->add_option("--fixed", info_fixed, "Known constants, e.g. k=2");

    StatOptions stat;
    auto* stat_cmd = app.add_subcommand("stat", "Compute the four statistics and p-values from a data file");
    stat.model.add(stat_cmd);
    stat_cmd->add_option("--theta0", stat.theta0, "Null value")->required();
    stat_cmd->add_option("--data", stat.data, "Data file (one value per line, '#' comments)")->required();
    stat_cmd->add_option("--format", stat.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    PowerOptions power;
    auto* power_cmd = app.add_subcommand("power", "Local powers to order n^-1/2 as CSV");
    power.model.add(power_cmd);
    power_cmd->add_option("--theta0", power.theta0, "Null value")->required();
    power_cmd->add_option("--eps", power.eps, "Pitman offset: value, list a,b,c or grid a:b:step (':' = 0:2:0.1)")
        ->required();
    power_cmd->add_option("--n", power.n, "Sample size")->required()->check(CLI::PositiveNumber);
    power_cmd->add_option("--alpha", power.alpha, "Nominal size");
    power_cmd->add_option("--source", power.source, "Gradient a_40 coefficient source")
        ->check(CLI::IsMember({"consistent", "table"}));

    OrderOptions order;
    auto* order_cmd = app.add_subcommand("order", "Order the four tests by local power with certificates");
    order.model.add(order_cmd);
    order_cmd->add_option("--theta0", order.theta0, "Null value")->required();
    order_cmd->add_option("--alpha", order.alpha, "Nominal size");
    order_cmd->add_option("--direction", order.direction, "Alternative above or below theta0")
        ->check(CLI::IsMember({"above", "below"}));
    order_cmd->add_option("--source", order.source, "Gradient a_40 coefficient source")
        ->check(CLI::IsMember({"consistent", "table"}));
    order_cmd->add_option("--eps-grid", order.eps_grid, "Positive eps magnitudes (comma separated)");
    order_cmd->add_option("--format", order.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    ExpandOptions expand;
    auto* expand_cmd = app.add_subcommand("expand", "Expansion coefficients, CDF and moments from a tensor file");
    expand_cmd->add_option("--tensors", expand.tensors, "Tensor file (JSON)")->required();
    expand_cmd->add_option("--eps", expand.eps, "Pitman offset vector, comma separated (length p - q)")->required();
    expand_cmd->add_option("--n", expand.n, "Sample size")->required()->check(CLI::PositiveNumber);
    expand_cmd->add_option("--x", expand.x, "Evaluation points: list or grid a:b:step");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo size, power and moments of the four tests");
    sim.model.add(sim_cmd);
    sim_cmd->add_option("--theta0", sim.theta0, "Null value")->required();
    sim_cmd->add_option("--eps", sim.eps, "Pitman offset; data drawn at theta0 + eps/sqrt(n)")->required();
    sim_cmd->add_option("--n", sim.n, "Sample size per replicate")->required()->check(CLI::Range(2LL, 1LL << 40));
    sim_cmd->add_option("--reps", sim.reps, "Replicates")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--alpha", sim.alpha, "Nominal size");
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->required();
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (default: GRADPOWER_THREADS or all cores)");
    sim_cmd->add_flag("--compare-sources", sim.compare_sources,
                      "Also predict with the paper-table a_40 and adjudicate gradient vs score");
    sim_cmd->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? Success : Usage;
    }

    try {
        std::string text;
        if (model_cmd->parsed()) {
            text = model_list->parsed() ? cmd_model_list() : cmd_model_info(info_name, info_fixed);
        } else if (stat_cmd->parsed()) {
            text = cmd_stat(stat);
        } else if (power_cmd->parsed()) {
            text = cmd_power(power, err);
        } else if (order_cmd->parsed()) {
            text = cmd_order(order);
        } else if (expand_cmd->parsed()) {
            text = cmd_expand(expand);
        } else if (sim_cmd->parsed()) {
            text = cmd_simulate(sim, err);
        }
        write_output(text, output, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return Usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return Domain;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return Numeric;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return Numeric;
    }
    return Success;
}

} // namespace gradpower::cli
