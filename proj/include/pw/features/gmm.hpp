#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pw::features {

struct GmmCluster {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

struct GmmModel {
    std::vector<GmmCluster> clusters;
    int dim = 0;
    std::string feature_set;  // "with-azimuth" or "without-azimuth"

    void validate() const;  // throws on broken invariants
};

/// Mixture density with per-cluster Cholesky factors precomputed;
/// evaluation happens in log space so far tails never underflow to 0.
class GmmDensity {
public:
    explicit GmmDensity(const GmmModel& model);

    double log_density(const Eigen::VectorXd& x) const;
    double density(const Eigen::VectorXd& x) const { return std::exp(log_density(x)); }

private:
    struct Cluster {
        double log_weight;
        double log_norm;  // -0.5 * (d*log(2pi) + log|S|)
        Eigen::VectorXd mean;
        Eigen::LLT<Eigen::MatrixXd> llt;
    };
    std::vector<Cluster> clusters_;
};

struct GmmTrainConfig {
    int clusters = 5;
    int max_iterations = 300;
    double tolerance = 1e-6;        // relative log-likelihood change
    double covariance_floor = 1e-6; // added to the diagonal
    bool diagonal_covariance = false;
    std::uint64_t seed = 0;
};

struct GmmTrainResult {
    GmmModel model;
    std::vector<double> log_likelihood;  // per EM iteration, mean per sample
    int iterations = 0;
};

/// EM from a k-means++ seeding; deterministic for a given seed. Samples
/// are rows of `data`. Throws when there are fewer than
/// 10 * clusters * dim samples.
GmmTrainResult train_gmm(const Eigen::MatrixXd& data, const GmmTrainConfig& config);

nlohmann::json gmm_to_json(const GmmModel& model);
GmmModel gmm_from_json(const nlohmann::json& j);
void save_gmm(const GmmModel& model, const std::string& path, const nlohmann::json& provenance);
GmmModel load_gmm(const std::string& path);

}  // namespace pw::features
