#include "reoi/trustregion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reoi/kernels.hpp"

namespace reoi::trustregion {

Eigen::VectorXd plan_input(const wm::Latent& z0, const sim::ActionPlan& plan) {
    Eigen::VectorXd x(z0.size() + 3 * Eigen::Index(plan.size()));
    x.head(z0.size()) = z0;
    for (size_t t = 0; t < plan.size(); ++t) {
        x(z0.size() + 3 * t + 0) = plan[t].dx;
        x(z0.size() + 3 * t + 1) = plan[t].dy;
        x(z0.size() + 3 * t + 2) = plan[t].grip ? 1.0 : 0.0;
    }
    return x;
}

namespace {

std::vector<std::pair<int, int>> all_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

double lipschitz_over(const Eigen::MatrixXd& pts, const std::vector<double>& errs, long max_pairs,
                      Rng& rng) {
    const int n = int(pts.rows());
    if (n < 2) return 0.0;

    // Row-major copy for the kernel.
    std::vector<double> flat(size_t(n) * pts.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < pts.cols(); ++j) flat[size_t(i) * pts.cols() + j] = pts(i, j);

    std::vector<std::pair<int, int>> pairs;
    long total = long(n) * (n - 1) / 2;
    if (total <= max_pairs) {
        pairs = all_pairs(n);
    } else {
        pairs.reserve(max_pairs);
        for (long t = 0; t < max_pairs; ++t) {
            int i = int(rng.uniform_int(n));
            int j = int(rng.uniform_int(n));
            if (i == j) continue;
            pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    }

    bool any_valid = false;
    for (const auto& [i, j] : pairs)
        if ((pts.row(i) - pts.row(j)).norm() >= 1e-6) {
            any_valid = true;
            break;
        }
    if (!any_valid) throw std::runtime_error("estimate_lipschitz: all pairs degenerate");

    return kernels::max_pair_slope(flat.data(), n, int(pts.cols()), errs.data(), pairs, 1e-6);
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& pts, const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& std) {
    Eigen::MatrixXd out = pts;
    for (int i = 0; i < out.rows(); ++i)
        out.row(i) = (out.row(i) - mean.transpose()).array() / std.transpose().array();
    return out;
}

}  // namespace

double estimate_lipschitz(const Eigen::MatrixXd& points, const std::vector<double>& errors,
                          long max_pairs, Rng& rng) {
    if (points.rows() < 2) throw std::invalid_argument("estimate_lipschitz: need >= 2 points");
    if (size_t(points.rows()) != errors.size())
        throw std::invalid_argument("estimate_lipschitz: points/errors length mismatch");
    return lipschitz_over(points, errors, max_pairs, rng);
}

TrustRegion build(const Eigen::MatrixXd& points, const std::vector<double>& errors,
                  double err_threshold, double r0) {
    if (points.rows() < 2 || size_t(points.rows()) != errors.size())
        throw std::invalid_argument("build: need >= 2 (point, error) pairs");

    if (err_threshold < 0) {
        std::vector<double> sorted = errors;
        std::sort(sorted.begin(), sorted.end());
        double pos = 0.75 * (sorted.size() - 1);
        size_t lo = size_t(pos);
        double frac = pos - double(lo);
        err_threshold = lo + 1 < sorted.size()
                            ? sorted[lo] * (1 - frac) + sorted[lo + 1] * frac
                            : sorted[lo];
    }

    TrustRegion region;
    region.mean = points.colwise().mean();
    Eigen::VectorXd var = Eigen::VectorXd::Zero(points.cols());
    for (int i = 0; i < points.rows(); ++i) {
        Eigen::VectorXd d = points.row(i).transpose() - region.mean;
        var += d.cwiseProduct(d);
    }
    var /= double(points.rows());
    region.std = var.cwiseSqrt();
    for (int j = 0; j < region.std.size(); ++j)
        if (region.std(j) < 1e-9) region.std(j) = 1.0;

    std::vector<int> kept;
    for (int i = 0; i < points.rows(); ++i)
        if (errors[i] <= err_threshold) kept.push_back(i);
    if (kept.empty()) throw std::runtime_error("build: no points below the error threshold");

    Eigen::MatrixXd std_points = standardize(points, region.mean, region.std);
    region.centers.resize(kept.size(), points.cols());
    std::vector<double> kept_errors;
    for (size_t i = 0; i < kept.size(); ++i) {
        region.centers.row(i) = std_points.row(kept[i]);
        kept_errors.push_back(errors[kept[i]]);
    }

    Rng rng(20240517);
    region.lipschitz =
        kept.size() >= 2 ? lipschitz_over(region.centers, kept_errors, 100000, rng) : 0.0;
    region.radius = r0;
    region.dispersion = r0;
    region.max_train_error = *std::max_element(kept_errors.begin(), kept_errors.end());
    region.provenance = {{"n_input_points", points.rows()},
                         {"n_centers", kept.size()},
                         {"err_threshold", err_threshold},
                         {"r0", r0}};
    return region;
}

TrustRegion expand(const TrustRegion& region, const Eigen::MatrixXd& points,
                   const std::vector<double>& errors, double L_max, double r_step, double r_max) {
    TrustRegion cur = region;
    Eigen::MatrixXd std_points = standardize(points, region.mean, region.std);
    Rng rng(20240518);

    while (cur.radius + r_step <= r_max + 1e-12) {
        double r_next = cur.radius + r_step;

        // Admit training points inside the enlarged union as new centers.
        std::vector<int> admitted;
        std::vector<double> admitted_errors;
        for (int i = 0; i < std_points.rows(); ++i) {
            double dmin = (cur.centers.rowwise() - std_points.row(i)).rowwise().norm().minCoeff();
            if (dmin <= r_next) {
                admitted.push_back(i);
                admitted_errors.push_back(errors[i]);
            }
        }
        if (admitted.empty()) break;

        Eigen::MatrixXd candidate_centers(admitted.size(), std_points.cols());
        for (size_t i = 0; i < admitted.size(); ++i)
            candidate_centers.row(i) = std_points.row(admitted[i]);

        double L = admitted.size() >= 2
                       ? lipschitz_over(candidate_centers, admitted_errors, 100000, rng)
                       : 0.0;
        if (L >= L_max) break;

        cur.centers = std::move(candidate_centers);
        cur.radius = r_next;
        cur.dispersion = r_next;
        cur.lipschitz = L;
        cur.max_train_error =
            *std::max_element(admitted_errors.begin(), admitted_errors.end());
    }
    cur.provenance = region.provenance;
    cur.provenance["expanded_r"] = cur.radius;
    cur.provenance["expanded_L"] = cur.lipschitz;
    cur.provenance["expanded_bound"] = cur.bound();
    return cur;
}

QueryResult query(const TrustRegion& region, const Eigen::VectorXd& x) {
    if (!region.built()) throw std::runtime_error("query: region not built");
    Eigen::VectorXd xs = (x - region.mean).array() / region.std.array();
    double dmin = (region.centers.rowwise() - xs.transpose()).rowwise().norm().minCoeff();
    QueryResult q;
    q.nearest_distance = dmin;
    q.inside = dmin <= region.radius;
    if (q.inside) q.bound = region.bound();
    return q;
}

mpc::PlanResult plan_trustregion(const wm::WorldModel& model, const TrustRegion& region,
                                 const Frame& obs, const sim::TaskSpec& task, int n_candidates,
                                 Rng& rng, int plan_len) {
    mpc::PlanResult result;
    result.mode = "trustregion";
    result.plans = mpc::sample_candidates(obs, task, n_candidates, plan_len, rng);

    wm::Latent z0 = wm::encode(obs);
    distractor::IdentificationReport rep = distractor::identify(model, obs, task);

    for (const sim::ActionPlan& plan : result.plans) {
        QueryResult q = query(region, plan_input(z0, plan));
        if (!q.inside) {
            result.verdicts.push_back(mpc::Verdict::reject(0, "out_of_region"));
            result.rollouts.emplace_back();
            continue;
        }
        std::vector<Frame> frames = wm::rollout(model, obs, {}, plan);
        std::vector<Mask> masks;
        int check = std::min<int>(rep.check_frame_index, int(frames.size())) - 1;
        auto survived = distractor::segment(frames[check]);
        for (int id : rep.flagged) {
            const distractor::Segment* orig = rep.find(id);
            if (!orig) continue;
            for (const auto& s : survived)
                if (distractor::quantize(s.mean_color) == distractor::quantize(orig->mean_color) &&
                    s.bbox.intersects(orig->bbox)) {
                    masks.push_back(s.mask);
                    break;
                }
        }
        result.verdicts.push_back(mpc::verify(frames, task, masks));
        result.rollouts.push_back(std::move(frames));
    }
    result.chosen = mpc::select(result.verdicts);
    return result;
}

}  // namespace reoi::trustregion
