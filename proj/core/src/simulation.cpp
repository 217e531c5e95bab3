#include "kmselect/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "kmselect/covariance.hpp"
#include "kmselect/errors.hpp"
#include "kmselect/inference.hpp"
#include "kmselect/kmeans.hpp"
#include "kmselect/rng.hpp"
#include "kmselect/variance.hpp"

namespace kmselect {

namespace {

constexpr int kMaxReseeds = 100;

int thread_count() {
    if (const char* env = std::getenv("KMSEL_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Deterministic regardless of scheduling: work item m always computes the
// same result into slot m.
void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::min(thread_count(), std::max(count, 1));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

struct ReplicateOutcome {
    std::vector<ReplicateRecord> records;  // one, or one per pair with all_pairs
    int reseeds = 0;
    bool valid = false;
};

double compute_p(const ExperimentConfig& cfg, const DataMatrix& data,
                 const ClusterTrace& trace, int k1, int k2, double* stat_out) {
    switch (cfg.method) {
        case PValueMethod::SelectiveKnown: {
            auto r = p_selective(data, trace, k1, k2, cfg.sigma);
            *stat_out = r.stat;
            return r.p_value;
        }
        case PValueMethod::SelectiveMed: {
            const SigmaEstimate est = sigma_med(data);
            if (est.degenerate) throw NumericalError("degenerate sigma_med estimate");
            auto r = p_selective_estimated(data, trace, k1, k2, est.value, SigmaSource::Med);
            *stat_out = r.stat;
            return r.p_value;
        }
        case PValueMethod::SelectiveSample: {
            const SigmaEstimate est = sigma_sample(data);
            if (est.degenerate) throw NumericalError("degenerate sigma_sample estimate");
            auto r = p_selective_estimated(data, trace, k1, k2, est.value, SigmaSource::Sample);
            *stat_out = r.stat;
            return r.p_value;
        }
        case PValueMethod::Naive: {
            ContrastContext ctx(data, trace.assignments.back(), k1, k2);
            *stat_out = ctx.stat();
            return p_naive(ctx, data.q(), cfg.sigma);
        }
        case PValueMethod::SigmaDirect: {
            // Spherical covariance handed to the general-Sigma route.
            const Matrix sigma_mat =
                cfg.sigma * cfg.sigma * Matrix::Identity(data.q(), data.q());
            const CovarianceFactors factors = factorize(sigma_mat);
            auto r = p_sigma_selective(data, trace, k1, k2, factors.inv_sqrt, factors.sqrt);
            *stat_out = r.stat;
            return r.p_value;
        }
    }
    throw std::invalid_argument("compute_p: unknown method");
}

Matrix model_mean(const ExperimentConfig& cfg) {
    switch (cfg.model) {
        case Model::GlobalNull: return Matrix::Zero(cfg.n, cfg.q);
        case Model::Spike: return mu_spike(cfg.n, cfg.q, cfg.delta);
        case Model::OrthoTheta: return mu_ortho_theta(cfg.n, cfg.q, cfg.delta);
    }
    throw std::invalid_argument("model_mean: unknown model");
}

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, const Matrix& mu,
                               const std::vector<int>& true_labels, int m) {
    ReplicateOutcome out;
    const std::uint64_t rep_seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(m));
    for (int attempt = 0; attempt < kMaxReseeds; ++attempt) {
        const std::uint64_t data_seed = derive_seed(rep_seed, 1000u + static_cast<std::uint64_t>(attempt));
        const std::uint64_t lloyd_seed = derive_seed(rep_seed, 2000u + static_cast<std::uint64_t>(attempt));
        const std::uint64_t pair_seed = derive_seed(rep_seed, 3000u + static_cast<std::uint64_t>(attempt));
        try {
            const DataMatrix data = gen_matrix_normal(mu, cfg.sigma, data_seed);
            const ClusterTrace trace = lloyd(data, cfg.K, cfg.t_max, lloyd_seed);
            const auto& final_labels = trace.assignments.back();

            std::vector<std::pair<int, int>> pairs;
            if (cfg.pair_policy == PairPolicy::AllPairs) {
                for (int k1 = 0; k1 < cfg.K; ++k1)
                    for (int k2 = k1 + 1; k2 < cfg.K; ++k2) pairs.emplace_back(k1, k2);
            } else {
                // Dedicated seed stream for the random pair choice.
                SplitMix64 gen(pair_seed);
                const auto total =
                    static_cast<std::uint64_t>(cfg.K) * static_cast<std::uint64_t>(cfg.K - 1) / 2;
                auto idx = gen.next_below(total);
                for (int k1 = 0; k1 < cfg.K; ++k1) {
                    const auto row = static_cast<std::uint64_t>(cfg.K - 1 - k1);
                    if (idx < row) {
                        pairs.emplace_back(k1, k1 + 1 + static_cast<int>(idx));
                        break;
                    }
                    idx -= row;
                }
            }

            std::vector<ReplicateRecord> records;
            for (const auto& [k1, k2] : pairs) {
                double stat = 0.0;
                const double p = compute_p(cfg, data, trace, k1, k2, &stat);
                ReplicateRecord rec;
                rec.replicate = m;
                rec.p = p;
                rec.stat = stat;
                if (true_labels.empty()) {
                    rec.effect = 0.0;
                    rec.recovered = false;
                } else {
                    const Vector nu = contrast_vector(final_labels, k1, k2);
                    rec.effect = (mu.transpose() * nu).norm();
                    rec.recovered = true_pair_recovered(final_labels, k1, k2, true_labels);
                }
                records.push_back(rec);
            }
            out.records = std::move(records);
            out.valid = true;
            return out;
        } catch (const EmptyClusterError&) {
            ++out.reseeds;
        } catch (const DegenerateContrastError&) {
            ++out.reseeds;
        } catch (const NumericalError&) {
            ++out.reseeds;
        }
    }
    return out;  // invalid after kMaxReseeds attempts
}

} // namespace

void ExperimentConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (delta < 0.0) throw std::invalid_argument("config: delta must be nonnegative");
    if (sigma <= 0.0) throw std::invalid_argument("config: sigma must be positive");
    if (n < 2 || q < 1) throw std::invalid_argument("config: need n >= 2 and q >= 1");
    if (K < 2 || K > n) throw std::invalid_argument("config: need 2 <= K <= n");
    if (t_max < 1) throw std::invalid_argument("config: t_max must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("config: alpha in (0,1)");
    if (model == Model::Spike) {
        if (n % 3 != 0) throw std::invalid_argument("config: spike model needs n divisible by 3");
        if (q < 2) throw std::invalid_argument("config: spike model needs q >= 2");
    }
    if (model == Model::OrthoTheta) {
        if (n % 3 != 0)
            throw std::invalid_argument("config: ortho_theta model needs n divisible by 3");
        if (q % 10 != 0)
            throw std::invalid_argument("config: ortho_theta model needs q divisible by 10");
        if (q / 10 < 3)
            throw std::invalid_argument("config: ortho_theta model needs 0.1 q >= 3");
    }
}

std::string model_name(Model m) {
    switch (m) {
        case Model::GlobalNull: return "global_null";
        case Model::Spike: return "spike";
        case Model::OrthoTheta: return "ortho_theta";
    }
    return "unknown";
}

std::string method_name(PValueMethod m) {
    switch (m) {
        case PValueMethod::SelectiveKnown: return "selective_known";
        case PValueMethod::SelectiveMed: return "selective_med";
        case PValueMethod::SelectiveSample: return "selective_sample";
        case PValueMethod::Naive: return "naive";
        case PValueMethod::SigmaDirect: return "sigma_direct";
    }
    return "unknown";
}

DataMatrix gen_matrix_normal(const Matrix& mu, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) throw std::invalid_argument("gen_matrix_normal: sigma must be positive");
    SplitMix64 gen(seed);
    Matrix out(mu.rows(), mu.cols());
    for (Eigen::Index i = 0; i < mu.rows(); ++i)
        for (Eigen::Index j = 0; j < mu.cols(); ++j)
            out(i, j) = mu(i, j) + sigma * gen.next_gaussian();
    return DataMatrix(std::move(out));
}

Matrix mu_spike(int n, int q, double delta) {
    if (n % 3 != 0) throw std::invalid_argument("mu_spike: n must be divisible by 3");
    if (q < 2) throw std::invalid_argument("mu_spike: need q >= 2");
    Matrix mu = Matrix::Zero(n, q);
    const int third = n / 3;
    for (int i = 0; i < third; ++i) mu(i, 0) = -0.5 * delta;
    for (int i = third; i < 2 * third; ++i) mu(i, q - 1) = 0.5 * std::sqrt(3.0) * delta;
    for (int i = 2 * third; i < n; ++i) mu(i, 0) = 0.5 * delta;
    return mu;
}

Matrix mu_ortho_theta(int n, int q, double delta) {
    if (n % 3 != 0) throw std::invalid_argument("mu_ortho_theta: n must be divisible by 3");
    if (q % 10 != 0 || q / 10 < 3)
        throw std::invalid_argument("mu_ortho_theta: need q divisible by 10 with 0.1 q >= 3");
    Matrix mu = Matrix::Zero(n, q);
    const int third = n / 3;
    const double magnitude = std::sqrt(0.5 * delta);
    // theta_b = sqrt(delta/2) e_b: disjoint supports give exact orthogonality.
    for (int b = 0; b < 3; ++b)
        for (int i = b * third; i < (b + 1) * third; ++i) mu(i, b) = magnitude;
    return mu;
}

bool true_pair_recovered(const std::vector<int>& labels, int k1, int k2,
                         const std::vector<int>& true_labels) {
    if (labels.size() != true_labels.size())
        throw std::invalid_argument("true_pair_recovered: label length mismatch");
    for (int k : {k1, k2}) {
        int matched_true = -1;
        int estimated_size = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] != k) continue;
            ++estimated_size;
            if (matched_true == -1) matched_true = true_labels[i];
            else if (true_labels[i] != matched_true) return false;
        }
        if (estimated_size == 0) return false;
        int true_size = 0;
        for (int t : true_labels)
            if (t == matched_true) ++true_size;
        if (true_size != estimated_size) return false;
    }
    return true;
}

double ks_uniform(std::vector<double> pvalues) {
    if (pvalues.empty()) throw std::invalid_argument("ks_uniform: empty sample");
    std::sort(pvalues.begin(), pvalues.end());
    const double m = static_cast<double>(pvalues.size());
    double d = 0.0;
    for (std::size_t i = 0; i < pvalues.size(); ++i) {
        const double upper = static_cast<double>(i + 1) / m - pvalues[i];
        const double lower = pvalues[i] - static_cast<double>(i) / m;
        d = std::max({d, upper, lower});
    }
    return d;
}

double ks_critical_value(std::size_t m, double level) {
    // Asymptotic inverse of the Kolmogorov distribution tail.
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    return c / std::sqrt(static_cast<double>(m));
}

std::vector<int> true_thirds_labels(int n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int third = n / 3;
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = std::min(i / third, 2);
    return labels;
}

Type1Report run_type1(const ExperimentConfig& config) {
    config.validate();
    if (config.model != Model::GlobalNull)
        throw std::invalid_argument("run_type1: model must be global_null");
    const Matrix mu = model_mean(config);

    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(config.replicates));
    parallel_for(config.replicates, [&](int m) {
        outcomes[static_cast<std::size_t>(m)] = run_replicate(config, mu, {}, m);
    });

    Type1Report report;
    report.reseeds = 0;
    for (const auto& out : outcomes) {
        report.reseeds += static_cast<std::size_t>(out.reseeds);
        if (!out.valid) continue;
        for (const auto& rec : out.records) {
            report.pvalues.push_back(rec.p);
            report.records.push_back(rec);
        }
    }
    if (report.pvalues.empty()) throw NumericalError("run_type1: no valid replicates");
    std::size_t rejections = 0;
    for (double p : report.pvalues)
        if (p <= config.alpha) ++rejections;
    report.rejection_rate = static_cast<double>(rejections) /
                            static_cast<double>(report.pvalues.size());
    report.ks_distance = ks_uniform(report.pvalues);
    return report;
}

PowerReport run_power(const ExperimentConfig& config) {
    config.validate();
    if (config.model == Model::GlobalNull)
        throw std::invalid_argument("run_power: model must be spike or ortho_theta");
    if (config.pair_policy != PairPolicy::RandomPair)
        throw std::invalid_argument("run_power: conditional power is defined for random_pair");
    const Matrix mu = model_mean(config);
    const std::vector<int> truth = true_thirds_labels(config.n);

    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(config.replicates));
    parallel_for(config.replicates, [&](int m) {
        outcomes[static_cast<std::size_t>(m)] = run_replicate(config, mu, truth, m);
    });

    PowerReport report;
    report.reseeds = 0;
    std::size_t valid = 0;
    std::size_t recovered = 0;
    std::size_t recovered_rejections = 0;
    for (const auto& out : outcomes) {
        report.reseeds += static_cast<std::size_t>(out.reseeds);
        if (!out.valid) continue;
        ++valid;
        const auto& rec = out.records.front();
        report.records.push_back(rec);
        if (rec.recovered) {
            ++recovered;
            if (rec.p <= config.alpha) ++recovered_rejections;
        }
    }
    if (valid == 0) throw NumericalError("run_power: no valid replicates");
    report.accepted_replicates = recovered;
    report.detection_probability = static_cast<double>(recovered) / static_cast<double>(valid);
    if (recovered == 0) {
        report.conditional_power = std::numeric_limits<double>::quiet_NaN();
        report.conditional_power_se = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double power = static_cast<double>(recovered_rejections) /
                             static_cast<double>(recovered);
        report.conditional_power = power;
        report.conditional_power_se =
            std::sqrt(power * (1.0 - power) / static_cast<double>(recovered));
    }
    return report;
}

} // namespace kmselect
