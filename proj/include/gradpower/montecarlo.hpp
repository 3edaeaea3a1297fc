#ifndef GRADPOWER_MONTECARLO_HPP
#define GRADPOWER_MONTECARLO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "gradpower/expfam.hpp"
#include "gradpower/localpower.hpp"

namespace gradpower {

struct SimulationConfig {
    const ExpFamModel* model = nullptr;
    double theta0 = 1.0;
    double eps = 0.0;
    long long n = 50;
    long long reps = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    bool compare_sources = false;
    /// Worker count; 0 picks GRADPOWER_THREADS or the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
    /// Data-generating parameter theta0 + eps / sqrt(n).
    double theta_n() const;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct SimulationReport {
    std::array<double, 4> rejection_rate{};
    std::array<double, 4> mc_stderr{};
    /// Local power predictions (consistent-chain coefficients).
    std::array<double, 4> predicted_power{};
    /// Paper-table gradient coefficients; set when compare_sources.
    std::optional<std::array<double, 4>> predicted_power_table;
    /// reject_only(i, j): fraction of replicates where test i rejects and j does not.
    std::array<std::array<double, 4>, 4> reject_only{};

    Estimate s4_mean;
    Estimate s4_variance;
    Estimate s4_third_moment;

    long long completed = 0;
    long long failures = 0;
    double critical_value = 0.0;
    unsigned threads_used = 1;
    double wall_seconds = 0.0;

    /// Paired difference rejection_rate[i] - rejection_rate[j] with its MC
    /// standard error.
    Estimate rate_difference(TestKind i, TestKind j) const;
};

unsigned default_thread_count();

/// Runs reps independent replicates. Replicate r draws from Stream(seed, r),
/// so the report does not depend on the number of workers.
SimulationReport simulate(const SimulationConfig& config);

/// Gradient-minus-score rejection difference versus the two a_40 choices.
struct SourceAdjudication {
    Estimate empirical_difference;
    double predicted_consistent = 0.0;
    double predicted_table = 0.0;
    double z_consistent = 0.0;  ///< |empirical - predicted| / stderr
    double z_table = 0.0;
    CoefficientSource favored = CoefficientSource::ConsistentChain;
    SimulationReport simulation;
    std::string verdict;
};

SourceAdjudication adjudicate_gradient_source(const SimulationConfig& config);

/// Empirical mean of the gradient statistic versus the literal first-moment
/// formula and the mean implied by the chi-square mixture expansion.
struct MomentAdjudication {
    Estimate empirical_mean;
    double literal_mean = 0.0;
    double mixture_mean = 0.0;
    double z_literal = 0.0;
    double z_mixture = 0.0;
    SimulationReport simulation;
    std::string verdict;
};

MomentAdjudication adjudicate_moments(const SimulationConfig& config);
/// Same comparison on an existing simulation of `config`.
MomentAdjudication adjudicate_moments(const SimulationConfig& config, SimulationReport simulation);

} // namespace gradpower

#endif // GRADPOWER_MONTECARLO_HPP
