#include "reoi/wm.hpp"

#include <stdexcept>

#include "reoi/kernels.hpp"

namespace reoi::wm {

namespace {

Eigen::VectorXd dyn_input(const Latent& zm2, const Latent& zm1, const Latent& z0,
                          const sim::Action& a) {
    Eigen::VectorXd x(kDynInputDim);
    x.segment(0, kLatentDim) = zm2;
    x.segment(kLatentDim, kLatentDim) = zm1;
    x.segment(2 * kLatentDim, kLatentDim) = z0;
    x(3 * kLatentDim + 0) = std::clamp(a.dx, -1.f, 1.f);
    x(3 * kLatentDim + 1) = std::clamp(a.dy, -1.f, 1.f);
    x(3 * kLatentDim + 2) = a.grip ? 1.0 : 0.0;
    return x;
}

/// Ridge solve W^T = (A^T A + lambda I)^-1 A^T B for row-major A (n x p)
/// and B (n x q); returns W (q x p).
Eigen::MatrixXd ridge_solve(const std::vector<double>& a, int n, int p,
                            const std::vector<double>& b, int q, double lambda) {
    std::vector<double> gram(size_t(p) * p);
    std::vector<double> cross(size_t(p) * q);
    kernels::atb(a.data(), n, p, a.data(), p, gram.data());
    kernels::atb(a.data(), n, p, b.data(), q, cross.data());

    Eigen::MatrixXd G = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(gram.data(), p, p);
    G.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("train: normal matrix is not positive definite (singular system)");

    Eigen::MatrixXd C = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(cross.data(), p, q);
    Eigen::MatrixXd wt = llt.solve(C);  // p x q
    return wt.transpose();
}

}  // namespace

Latent encode(const Frame& frame) {
    if (frame.h != sim::kImageSize || frame.w != sim::kImageSize)
        throw std::invalid_argument("encode: frame must be 64x64x3");
    Latent z(kLatentDim);
    for (int pr = 0; pr < kGrid; ++pr)
        for (int pc = 0; pc < kGrid; ++pc)
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (int r = 0; r < kPatch; ++r)
                    for (int c = 0; c < kPatch; ++c)
                        acc += frame.at(pr * kPatch + r, pc * kPatch + c, ch);
                z((pr * kGrid + pc) * 3 + ch) = acc / (kPatch * kPatch);
            }
    return z;
}

Frame decode(const WorldModel& model, const Latent& z) {
    if (!model.trained()) throw std::runtime_error("decode: untrained model");
    Eigen::VectorXd flat = model.dec_W * z;
    Frame f(sim::kImageSize, sim::kImageSize);
    for (int i = 0; i < kFrameDim; ++i) f.px[i] = float(std::clamp(flat(i), 0.0, 1.0));
    return f;
}

Latent predict_next(const WorldModel& model, const std::array<Latent, kHistory>& history,
                    const sim::Action& action) {
    if (!model.trained()) throw std::runtime_error("predict_next: untrained model");
    return model.dyn_W * dyn_input(history[0], history[1], history[2], action);
}

std::vector<Frame> rollout(const WorldModel& model, const Frame& frame0,
                           const std::vector<Frame>& warmup, const sim::ActionPlan& plan) {
    if (!model.trained()) throw std::runtime_error("rollout: untrained model");
    if (plan.empty()) throw std::invalid_argument("rollout: empty plan");

    Latent z0 = encode(frame0);
    Latent zm1 = warmup.size() >= 1 ? encode(warmup.back()) : z0;
    Latent zm2 = warmup.size() >= 2 ? encode(warmup[warmup.size() - 2]) : zm1;

    std::vector<Frame> out;
    out.reserve(plan.size());
    for (const sim::Action& a : plan) {
        Latent z = model.dyn_W * dyn_input(zm2, zm1, z0, a);
        out.push_back(decode(model, z));
        zm2 = std::move(zm1);
        zm1 = std::move(z0);
        z0 = std::move(z);
    }
    return out;
}

WorldModel train(const std::vector<Trajectory>& dataset, double lambda) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");

    // Encode everything once; history shorter than kHistory repeats the
    // earliest frame, matching what rollout does at t=0.
    std::vector<std::vector<Latent>> latents(dataset.size());
    int n_dyn = 0, n_dec = 0;
    for (size_t e = 0; e < dataset.size(); ++e) {
        const auto& traj = dataset[e];
        if (traj.frames.size() != traj.actions.size() + 1)
            throw std::invalid_argument("train: trajectory frame/action length mismatch");
        latents[e].reserve(traj.frames.size());
        for (const Frame& f : traj.frames) latents[e].push_back(encode(f));
        n_dyn += int(traj.actions.size());
        n_dec += int(traj.frames.size());
    }

    std::vector<double> X(size_t(n_dyn) * kDynInputDim), Y(size_t(n_dyn) * kLatentDim);
    std::vector<double> Z(size_t(n_dec) * kLatentDim), F(size_t(n_dec) * kFrameDim);
    int row = 0, zrow = 0;
    for (size_t e = 0; e < dataset.size(); ++e) {
        const auto& traj = dataset[e];
        const auto& zs = latents[e];
        for (size_t t = 0; t < traj.actions.size(); ++t) {
            const Latent& zm2 = zs[t >= 2 ? t - 2 : 0];
            const Latent& zm1 = zs[t >= 1 ? t - 1 : 0];
            Eigen::VectorXd x = dyn_input(zm2, zm1, zs[t], traj.actions[t]);
            Eigen::Map<Eigen::VectorXd>(X.data() + size_t(row) * kDynInputDim, kDynInputDim) = x;
            Eigen::Map<Eigen::VectorXd>(Y.data() + size_t(row) * kLatentDim, kLatentDim) = zs[t + 1];
            ++row;
        }
        for (size_t t = 0; t < traj.frames.size(); ++t) {
            Eigen::Map<Eigen::VectorXd>(Z.data() + size_t(zrow) * kLatentDim, kLatentDim) = zs[t];
            for (int i = 0; i < kFrameDim; ++i)
                F[size_t(zrow) * kFrameDim + i] = traj.frames[t].px[i];
            ++zrow;
        }
    }

    WorldModel model;
    model.ridge_lambda = lambda;
    model.dyn_W = ridge_solve(X, n_dyn, kDynInputDim, Y, kLatentDim, lambda);
    model.dec_W = ridge_solve(Z, n_dec, kLatentDim, F, kFrameDim, lambda);

    // Residual statistics over the training tuples.
    double dyn_sum = 0, dyn_max = 0, dec_sum = 0, dec_max = 0;
    for (int r = 0; r < n_dyn; ++r) {
        Eigen::Map<const Eigen::VectorXd> x(X.data() + size_t(r) * kDynInputDim, kDynInputDim);
        Eigen::Map<const Eigen::VectorXd> y(Y.data() + size_t(r) * kLatentDim, kLatentDim);
        double res = (model.dyn_W * x - y).norm();
        dyn_sum += res;
        dyn_max = std::max(dyn_max, res);
    }
    for (int r = 0; r < n_dec; ++r) {
        Eigen::Map<const Eigen::VectorXd> z(Z.data() + size_t(r) * kLatentDim, kLatentDim);
        Eigen::Map<const Eigen::VectorXd> f(F.data() + size_t(r) * kFrameDim, kFrameDim);
        double res = (model.dec_W * z - f).norm();
        dec_sum += res;
        dec_max = std::max(dec_max, res);
    }
    model.residuals = {dyn_sum / std::max(1, n_dyn), dyn_max, dec_sum / std::max(1, n_dec), dec_max};
    model.manifest = {{"n_trajectories", dataset.size()},
                      {"n_dyn_rows", n_dyn},
                      {"n_dec_rows", n_dec},
                      {"lambda", lambda}};
    return model;
}

std::vector<double> latent_error_per_step(const WorldModel& model, const Trajectory& trajectory) {
    if (!model.trained()) throw std::runtime_error("latent_error: untrained model");
    std::vector<Latent> zs;
    zs.reserve(trajectory.frames.size());
    for (const Frame& f : trajectory.frames) zs.push_back(encode(f));

    Latent z0 = zs[0], zm1 = zs[0], zm2 = zs[0];
    std::vector<double> errs;
    errs.reserve(trajectory.actions.size());
    for (size_t t = 0; t < trajectory.actions.size(); ++t) {
        Latent pred = model.dyn_W * dyn_input(zm2, zm1, z0, trajectory.actions[t]);
        errs.push_back((pred - zs[t + 1]).norm());
        zm2 = std::move(zm1);
        zm1 = std::move(z0);
        z0 = std::move(pred);
    }
    return errs;
}

double latent_error(const WorldModel& model, const Trajectory& trajectory) {
    double acc = 0;
    for (double e : latent_error_per_step(model, trajectory)) acc += e;
    return acc;
}

}  // namespace reoi::wm
