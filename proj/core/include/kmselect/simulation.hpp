#ifndef KMSELECT_SIMULATION_HPP
#define KMSELECT_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kmselect/data_matrix.hpp"

namespace kmselect {

enum class Model { GlobalNull, Spike, OrthoTheta };
enum class PValueMethod { SelectiveKnown, SelectiveMed, SelectiveSample, Naive, SigmaDirect };
enum class PairPolicy { RandomPair, AllPairs };

std::string model_name(Model m);
std::string method_name(PValueMethod m);

struct ExperimentConfig {
    Model model = Model::GlobalNull;
    int n = 30;
    int q = 2;
    int K = 3;
    int t_max = 50;
    double sigma = 1.0;
    double delta = 0.0;
    int replicates = 100;
    double alpha = 0.05;
    std::uint64_t base_seed = 1;
    PValueMethod method = PValueMethod::SelectiveKnown;
    PairPolicy pair_policy = PairPolicy::RandomPair;

    void validate() const;
};

struct ReplicateRecord {
    int replicate;
    double p;
    double stat;
    double effect;     // ||mu^T nu||
    bool recovered;    // chosen estimated pair matches true clusters exactly
};

struct Type1Report {
    std::vector<double> pvalues;
    double rejection_rate;
    double ks_distance;
    std::size_t reseeds;
    std::vector<ReplicateRecord> records;
};

struct PowerReport {
    double detection_probability;
    double conditional_power;       // NaN when no replicate recovers the truth
    double conditional_power_se;    // Monte Carlo standard error
    std::size_t accepted_replicates;
    std::size_t reseeds;
    std::vector<ReplicateRecord> records;
};

// mu + sigma * z with i.i.d. standard normal z, deterministic in the seed.
DataMatrix gen_matrix_normal(const Matrix& mu, double sigma, std::uint64_t seed);

// Three equidistant mean blocks: all pairwise block distances equal |delta|.
Matrix mu_spike(int n, int q, double delta);

// Three blocks with orthogonal disjoint-support signals of squared norm
// delta/2 in the first 0.1 q coordinates; pairwise block distances = delta.
Matrix mu_ortho_theta(int n, int q, double delta);

// True iff each of the two estimated clusters coincides exactly with some
// true cluster's membership set.
bool true_pair_recovered(const std::vector<int>& labels, int k1, int k2,
                         const std::vector<int>& true_labels);

// One-sample Kolmogorov-Smirnov distance to Uniform(0,1).
double ks_uniform(std::vector<double> pvalues);

// Asymptotic KS critical value at the given level (e.g. 0.01 -> 1.6276/sqrt(M)).
double ks_critical_value(std::size_t m, double level);

Type1Report run_type1(const ExperimentConfig& config);
PowerReport run_power(const ExperimentConfig& config);

// True-cluster labels for the power models: thirds of rows.
std::vector<int> true_thirds_labels(int n);

} // namespace kmselect

#endif
