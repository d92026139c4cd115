#include "pw/features/gmm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pw::features {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

struct LogGaussian {
    double log_norm;
    Eigen::VectorXd mean;
    Eigen::LLT<Eigen::MatrixXd> llt;

    LogGaussian(const Eigen::VectorXd& m, const Eigen::MatrixXd& cov) : mean(m), llt(cov) {
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("covariance is not positive-definite");
        double log_det = 0.0;
        const auto& l = llt.matrixL();
        for (int i = 0; i < m.size(); ++i) log_det += 2.0 * std::log(l(i, i));
        log_norm = -0.5 * (m.size() * kLog2Pi + log_det);
    }

    double operator()(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
        return log_norm - 0.5 * z.squaredNorm();
    }
};

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

/// k-means++ seeding followed by a few Lloyd rounds.
std::vector<Eigen::VectorXd> kmeans_init(const Eigen::MatrixXd& data, int k,
                                         std::mt19937_64& rng) {
    const auto n = data.rows();
    std::vector<Eigen::VectorXd> centers;
    std::uniform_int_distribution<Eigen::Index> uniform(0, n - 1);
    centers.push_back(data.row(uniform(rng)).transpose());

    Eigen::VectorXd dist2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::max());
    while (static_cast<int>(centers.size()) < k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (data.row(i).transpose() - centers.back()).squaredNorm();
            if (d < dist2[i]) dist2[i] = d;
        }
        const double total = dist2.sum();
        if (total <= 0.0) {
            centers.push_back(data.row(uniform(rng)).transpose());
            continue;
        }
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        Eigen::Index pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            target -= dist2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(data.row(pick).transpose());
    }

    std::vector<int> assign(n, 0);
    for (int round = 0; round < 10; ++round) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                const double d = (data.row(i).transpose() - centers[c]).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        for (int c = 0; c < k; ++c) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.cols());
            int count = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (assign[i] == c) {
                    sum += data.row(i).transpose();
                    ++count;
                }
            if (count > 0) centers[c] = sum / count;
        }
        if (!changed) break;
    }
    return centers;
}

}  // namespace

void GmmModel::validate() const {
    if (clusters.empty()) throw std::runtime_error("GMM has no clusters");
    double total = 0.0;
    for (const auto& c : clusters) {
        if (c.weight <= 0.0) throw std::runtime_error("cluster weight must be positive");
        if (c.mean.size() != dim || c.covariance.rows() != dim || c.covariance.cols() != dim)
            throw std::runtime_error("cluster dimension mismatch");
        Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("cluster covariance is not positive-definite");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("cluster weights must sum to 1");
}

GmmDensity::GmmDensity(const GmmModel& model) {
    model.validate();
    for (const auto& c : model.clusters) {
        LogGaussian g(c.mean, c.covariance);
        clusters_.push_back({std::log(c.weight), g.log_norm, c.mean, g.llt});
    }
}

double GmmDensity::log_density(const Eigen::VectorXd& x) const {
    Eigen::VectorXd terms(clusters_.size());
    for (size_t k = 0; k < clusters_.size(); ++k) {
        const auto& c = clusters_[k];
        const Eigen::VectorXd z = c.llt.matrixL().solve(x - c.mean);
        terms[static_cast<Eigen::Index>(k)] = c.log_weight + c.log_norm - 0.5 * z.squaredNorm();
    }
    return log_sum_exp(terms);
}

GmmTrainResult train_gmm(const Eigen::MatrixXd& data, const GmmTrainConfig& config) {
    const auto n = data.rows();
    const auto d = data.cols();
    if (config.clusters < 1) throw std::invalid_argument("cluster count must be >= 1");
    if (n < 10LL * config.clusters * d)
        throw std::runtime_error("too few samples to train GMM");

    std::mt19937_64 rng(config.seed);
    auto centers = kmeans_init(data, config.clusters, rng);

    int m = config.clusters;
    std::vector<double> weights(m, 1.0 / m);
    std::vector<Eigen::VectorXd> means = centers;
    std::vector<Eigen::MatrixXd> covs(m);
    {
        Eigen::VectorXd global_mean = data.colwise().mean().transpose();
        Eigen::MatrixXd centered = data.rowwise() - global_mean.transpose();
        Eigen::MatrixXd global_cov = centered.transpose() * centered / static_cast<double>(n);
        global_cov.diagonal().array() += config.covariance_floor;
        if (config.diagonal_covariance) global_cov = global_cov.diagonal().asDiagonal();
        for (auto& c : covs) c = global_cov;
    }

    GmmTrainResult result;
    Eigen::MatrixXd log_resp(n, m);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        // E-step
        std::vector<LogGaussian> gaussians;
        gaussians.reserve(m);
        for (int k = 0; k < m; ++k) gaussians.emplace_back(means[k], covs[k]);
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd row(m);
            const Eigen::VectorXd x = data.row(i).transpose();
            for (int k = 0; k < m; ++k) row[k] = std::log(weights[k]) + gaussians[k](x);
            const double lse = log_sum_exp(row);
            log_resp.row(i) = (row.array() - lse).transpose();
            ll += lse;
        }
        ll /= static_cast<double>(n);
        result.log_likelihood.push_back(ll);
        result.iterations = iter + 1;
        if (iter > 0 && std::abs(ll - prev_ll) < config.tolerance * std::abs(prev_ll)) break;
        prev_ll = ll;

        // M-step
        for (int k = 0; k < m; ++k) {
            const Eigen::VectorXd resp = log_resp.col(k).array().exp();
            const double nk = resp.sum();
            weights[k] = nk / static_cast<double>(n);
            if (nk <= 0.0) continue;
            means[k] = (data.transpose() * resp) / nk;
            Eigen::MatrixXd centered = data.rowwise() - means[k].transpose();
            Eigen::MatrixXd cov =
                centered.transpose() * resp.asDiagonal() * centered / nk;
            cov.diagonal().array() += config.covariance_floor;
            if (config.diagonal_covariance) cov = cov.diagonal().asDiagonal().toDenseMatrix();
            covs[k] = cov;
        }

        // Drop collapsed clusters and renormalize.
        for (int k = m - 1; k >= 0; --k) {
            if (weights[k] < 1e-8 && m > 1) {
                std::cerr << "gmm: removing collapsed cluster " << k << "\n";
                weights.erase(weights.begin() + k);
                means.erase(means.begin() + k);
                covs.erase(covs.begin() + k);
                --m;
                log_resp.resize(n, m);
                double total = 0.0;
                for (double w : weights) total += w;
                for (double& w : weights) w /= total;
            }
        }
    }

    double total = 0.0;
    for (double w : weights) total += w;
    GmmModel model;
    model.dim = static_cast<int>(d);
    for (int k = 0; k < m; ++k)
        model.clusters.push_back({weights[k] / total, means[k], covs[k]});
    result.model = std::move(model);
    return result;
}

nlohmann::json gmm_to_json(const GmmModel& model) {
    nlohmann::json j;
    j["version"] = 1;
    j["dim"] = model.dim;
    j["feature_set"] = model.feature_set;
    for (const auto& c : model.clusters) {
        nlohmann::json jc;
        jc["weight"] = c.weight;
        jc["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
        std::vector<std::vector<double>> cov(model.dim, std::vector<double>(model.dim));
        for (int r = 0; r < model.dim; ++r)
            for (int cidx = 0; cidx < model.dim; ++cidx) cov[r][cidx] = c.covariance(r, cidx);
        jc["covariance"] = cov;
        j["clusters"].push_back(jc);
    }
    return j;
}

GmmModel gmm_from_json(const nlohmann::json& j) {
    GmmModel model;
    model.dim = j.at("dim").get<int>();
    model.feature_set = j.value("feature_set", "");
    for (const auto& jc : j.at("clusters")) {
        GmmCluster c;
        c.weight = jc.at("weight").get<double>();
        const auto mean = jc.at("mean").get<std::vector<double>>();
        c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
        const auto cov = jc.at("covariance").get<std::vector<std::vector<double>>>();
        c.covariance.resize(model.dim, model.dim);
        for (int r = 0; r < model.dim; ++r)
            for (int cc = 0; cc < model.dim; ++cc) c.covariance(r, cc) = cov[r][cc];
        model.clusters.push_back(std::move(c));
    }
    model.validate();
    return model;
}

void save_gmm(const GmmModel& model, const std::string& path, const nlohmann::json& provenance) {
    nlohmann::json j = gmm_to_json(model);
    if (!provenance.is_null()) j["provenance"] = provenance;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

GmmModel load_gmm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return gmm_from_json(j);
}

}  // namespace pw::features
