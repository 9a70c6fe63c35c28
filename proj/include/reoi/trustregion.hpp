#pragma once

#include <Eigen/Dense>
#include <vector>

#include "json.hpp"
#include "reoi/mpc.hpp"
#include "reoi/rng.hpp"
#include "reoi/wm.hpp"

namespace reoi::trustregion {

/// Union of r-balls around low-error training inputs (standardized
/// per-dimension). Within the region the prediction error is bounded by
/// epsilon = lipschitz * dispersion + max_train_error.
struct TrustRegion {
    Eigen::MatrixXd centers;  // n x d, standardized
    double radius = 0;
    double lipschitz = 0;
    double max_train_error = 0;
    double dispersion = 0;  // == radius for a union of r-balls
    Eigen::VectorXd mean, std;
    nlohmann::json provenance;

    bool built() const { return centers.rows() > 0; }
    double bound() const { return lipschitz * dispersion + max_train_error; }
};

struct QueryResult {
    bool inside = false;
    double bound = 0;             // valid when inside
    double nearest_distance = 0;  // min distance to a center
};

/// Input point for a (initial latent, action plan) pair.
Eigen::VectorXd plan_input(const wm::Latent& z0, const sim::ActionPlan& plan);

/// Max |e_i - e_j| / ||x_i - x_j|| over distinct pairs; exhaustive when the
/// pair count fits max_pairs, otherwise over max_pairs sampled pairs. Pairs
/// closer than 1e-6 are skipped; throws when every pair is degenerate.
double estimate_lipschitz(const Eigen::MatrixXd& points, const std::vector<double>& errors,
                          long max_pairs, Rng& rng);

/// Standardize, keep points with error <= threshold, estimate the Lipschitz
/// constant over them. err_threshold < 0 selects the 75th percentile of the
/// training errors (the spec analog of the paper's absolute cutoff).
TrustRegion build(const Eigen::MatrixXd& points, const std::vector<double>& errors,
                  double err_threshold = -1.0, double r0 = 0.1);

/// Grow r in r_step increments, admitting training points that fall inside
/// the enlarged union, while the Lipschitz estimate stays below L_max and
/// r <= r_max.
TrustRegion expand(const TrustRegion& region, const Eigen::MatrixXd& points,
                   const std::vector<double>& errors, double L_max = 1.0, double r_step = 0.05,
                   double r_max = 0.5);

QueryResult query(const TrustRegion& region, const Eigen::VectorXd& x);

/// Baseline planner: candidates whose (z0, plan) input falls outside the
/// region are rejected before verification.
mpc::PlanResult plan_trustregion(const wm::WorldModel& model, const TrustRegion& region,
                                 const Frame& obs, const sim::TaskSpec& task, int n_candidates,
                                 Rng& rng, int plan_len = 12);

}  // namespace reoi::trustregion
