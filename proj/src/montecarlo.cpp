#include "gradpower/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>
#include <thread>
#include <vector>

#include "gradpower/errors.hpp"
#include "gradpower/expansion.hpp"
#include "gradpower/specfun.hpp"
#include "gradpower/teststats.hpp"

namespace gradpower {

void SimulationConfig::validate() const
{
    if (model == nullptr) throw DomainError("simulation has no model");
    if (reps < 1) throw DomainError("reps must be at least 1");
    if (n < 2) throw DomainError("n must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (!std::isfinite(eps)) throw DomainError("eps must be finite");
    model->require_parameter(theta0);
    model->require_parameter(theta_n());
}

double SimulationConfig::theta_n() const { return theta0 + eps / std::sqrt(static_cast<double>(n)); }

Estimate SimulationReport::rate_difference(TestKind i, TestKind j) const
{
    const double a = reject_only[index(i)][index(j)];
    const double b = reject_only[index(j)][index(i)];
    const double diff = a - b;
    const double n = static_cast<double>(completed);
    return {diff, std::sqrt(std::max(0.0, a + b - diff * diff) / n)};
}

unsigned default_thread_count()
{
    if (const char* env = std::getenv("GRADPOWER_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

constexpr long long chunk_size = 1024;

// Compensated (Neumaier) accumulator.
struct Sum {
    double s = 0.0;
    double c = 0.0;
    void add(double x)
    {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct Replicate {
    double s4 = 0.0;
    std::uint8_t rejected = 0;  // bit i: test i rejects
    bool failed = false;
};

Replicate run_replicate(const SimulationConfig& cfg, double theta_n, double crit, long long r)
{
    const ExpFamModel& model = *cfg.model;
    Stream stream(cfg.seed, static_cast<std::uint64_t>(r));
    Sum dsum;
    for (long long l = 0; l < cfg.n; ++l) {
        dsum.add(model.d(model.draw(theta_n, stream)));
    }
    const double dbar = dsum.value() / static_cast<double>(cfg.n);
    Replicate out;
    double theta_hat = 0.0;
    try {
        theta_hat = mle_from_dbar(model, dbar);
    } catch (const EstimationError&) {
        out.failed = true;
        return out;
    }
    const auto s = statistics_from_summary(model, static_cast<std::size_t>(cfg.n), dbar, theta_hat, cfg.theta0);
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(s[i])) {
            out.failed = true;
            return out;
        }
        if (s[i] > crit) out.rejected |= static_cast<std::uint8_t>(1u << i);
    }
    out.s4 = s[3];
    return out;
}

} // namespace

SimulationReport simulate(const SimulationConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    SimulationReport rep;
    rep.critical_value = central_chisq_quantile(1.0, 1.0 - cfg.alpha);
    const double theta_n = cfg.theta_n();

    std::vector<Replicate> results(static_cast<std::size_t>(cfg.reps));
    const long long chunks = (cfg.reps + chunk_size - 1) / chunk_size;
    unsigned workers = cfg.threads ? cfg.threads : default_thread_count();
    workers = static_cast<unsigned>(std::min<long long>(workers, chunks));
    rep.threads_used = workers;

    std::atomic<long long> next{0};
    auto work = [&] {
        for (;;) {
            const long long c = next.fetch_add(1);
            if (c >= chunks) return;
            const long long end = std::min(cfg.reps, (c + 1) * chunk_size);
            for (long long r = c * chunk_size; r < end; ++r) {
                results[static_cast<std::size_t>(r)] = run_replicate(cfg, theta_n, rep.critical_value, r);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    // Serial reduction in replicate order.
    std::array<long long, 4> rejections{};
    std::array<std::array<long long, 4>, 4> only{};
    Sum s4_sum;
    for (const auto& r : results) {
        if (r.failed) {
            ++rep.failures;
            continue;
        }
        ++rep.completed;
        s4_sum.add(r.s4);
        for (int i = 0; i < 4; ++i) {
            const bool ri = (r.rejected >> i) & 1u;
            if (ri) ++rejections[i];
            for (int j = 0; j < 4; ++j) {
                if (ri && !((r.rejected >> j) & 1u)) ++only[i][j];
            }
        }
    }
    if (static_cast<double>(rep.failures) > 0.001 * static_cast<double>(cfg.reps)) {
        std::ostringstream os;
        os << cfg.model->name << ": " << rep.failures << " of " << cfg.reps
           << " replicates failed MLE estimation (limit 0.1%) at theta = " << theta_n << ", n = " << cfg.n;
        throw NumericError(os.str());
    }
    if (rep.completed == 0) throw NumericError("no replicate completed");

    const double total = static_cast<double>(rep.completed);
    for (int i = 0; i < 4; ++i) {
        const double p = static_cast<double>(rejections[i]) / total;
        rep.rejection_rate[i] = p;
        rep.mc_stderr[i] = std::sqrt(p * (1.0 - p) / total);
        for (int j = 0; j < 4; ++j) rep.reject_only[i][j] = static_cast<double>(only[i][j]) / total;
    }

    const double mean = s4_sum.value() / total;
    Sum m2, m3, m4, m6;
    for (const auto& r : results) {
        if (r.failed) continue;
        const double d = r.s4 - mean;
        const double d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
        m6.add(d2 * d2 * d2);
    }
    const double c2 = m2.value() / total, c3 = m3.value() / total;
    const double c4 = m4.value() / total, c6 = m6.value() / total;
    rep.s4_mean = {mean, std::sqrt(c2 / total)};
    rep.s4_variance = {c2, std::sqrt(std::max(0.0, c4 - c2 * c2) / total)};
    rep.s4_third_moment = {c3, std::sqrt(std::max(0.0, c6 - c3 * c3 - 6.0 * c4 * c2 + 9.0 * c2 * c2 * c2) / total)};

    PowerQuery q{cfg.model, cfg.theta0, cfg.eps, cfg.n, cfg.alpha};
    const auto pc = local_powers(q, CoefficientSource::ConsistentChain);
    for (int i = 0; i < 4; ++i) rep.predicted_power[i] = pc[i].value;
    if (cfg.compare_sources) {
        const auto pt = local_powers(q, CoefficientSource::PaperTable);
        std::array<double, 4> t{};
        for (int i = 0; i < 4; ++i) t[i] = pt[i].value;
        rep.predicted_power_table = t;
    }

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

namespace {

// A rate estimated from `reps` replicates cannot resolve differences below
// 1/reps, so a zero standard error (every replicate agreed) is floored there.
double z_distance(double observed, double predicted, double se, long long reps)
{
    return std::abs(observed - predicted) / std::max(se, 1.0 / static_cast<double>(reps));
}

} // namespace

SourceAdjudication adjudicate_gradient_source(const SimulationConfig& config)
{
    SimulationConfig cfg = config;
    cfg.compare_sources = true;
    SourceAdjudication out;
    out.simulation = simulate(cfg);
    const auto& s = out.simulation;
    out.empirical_difference = s.rate_difference(TestKind::Gradient, TestKind::Score);
    out.predicted_consistent = s.predicted_power[3] - s.predicted_power[2];
    out.predicted_table = (*s.predicted_power_table)[3] - (*s.predicted_power_table)[2];
    const double se = out.empirical_difference.std_error;
    out.z_consistent = z_distance(out.empirical_difference.value, out.predicted_consistent, se, s.completed);
    out.z_table = z_distance(out.empirical_difference.value, out.predicted_table, se, s.completed);
    out.favored = out.z_consistent <= out.z_table ? CoefficientSource::ConsistentChain
                                                  : CoefficientSource::PaperTable;
    std::ostringstream os;
    os.precision(6);
    os << "empirical Pi_gradient - Pi_score = " << out.empirical_difference.value << " (se "
       << se << (se == 0.0 ? "; the tests agreed on every replicate, distances use the 1/reps floor" : "")
       << "); consistent-chain predicts " << out.predicted_consistent << " (" << out.z_consistent
       << " se away), paper-table predicts " << out.predicted_table << " (" << out.z_table
       << " se away); favors " << to_string(out.favored);
    out.verdict = os.str();
    return out;
}

MomentAdjudication adjudicate_moments(const SimulationConfig& config)
{
    return adjudicate_moments(config, simulate(config));
}

MomentAdjudication adjudicate_moments(const SimulationConfig& config, SimulationReport simulation)
{
    MomentAdjudication out;
    out.simulation = std::move(simulation);
    const auto tensors = tensors_from_cumulants(cumulants(*config.model, config.theta0));
    Vector<double> eps(1);
    eps(0) = config.eps;
    const auto m = st_moments(tensors, eps, config.n);
    out.empirical_mean = out.simulation.s4_mean;
    out.literal_mean = m.m1;
    out.mixture_mean = m.mixture_mean;
    const double se = out.empirical_mean.std_error;
    out.z_literal = z_distance(out.empirical_mean.value, m.m1, se, out.simulation.completed);
    out.z_mixture = z_distance(out.empirical_mean.value, m.mixture_mean, se, out.simulation.completed);
    std::ostringstream os;
    os.precision(6);
    os << "empirical mean of S4 = " << out.empirical_mean.value << " (se " << se
       << "); mixture-implied mean " << out.mixture_mean << " (" << out.z_mixture
       << " se away); literal moment formula " << out.literal_mean << " (" << out.z_literal
       << " se away); closer: " << (out.z_mixture <= out.z_literal ? "mixture" : "literal");
    out.verdict = os.str();
    return out;
}

} // namespace gradpower
