#pragma once

#include <stdexcept>
#include <string>

#include "reoi/trustregion.hpp"
#include "reoi/types.hpp"
#include "reoi/wm.hpp"

namespace reoi::io {

enum class LoadErrorKind { io, bad_magic, truncation, version_mismatch, format };

struct LoadError : std::runtime_error {
    LoadErrorKind kind;
    LoadError(LoadErrorKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// Episode file: "RWMD", u32 version=1, u32 H, W, C, T, A; (T+1)*H*W*C f32
// frames; T*A f32 actions; u32-length-prefixed JSON metadata. All numbers
// little-endian.
void save_episode(const std::string& path, const wm::Trajectory& trajectory);
wm::Trajectory load_episode(const std::string& path);

// Model file: "RWMM", u32 version=1, u32 D, history, action_dim, H, W, C;
// dyn_W and dec_W row-major f32; 4 f64 residual stats; JSON manifest.
void save_model(const std::string& path, const wm::WorldModel& model);
wm::WorldModel load_model(const std::string& path);

// Region file: "RWTR", u32 version=1, u32 dims, n_centers; centers row-major
// f32; f64 r, L, e, b; mean/std f32 vectors; JSON provenance.
void save_region(const std::string& path, const trustregion::TrustRegion& region);
trustregion::TrustRegion load_region(const std::string& path);

/// Order-independent digest of a dataset directory: SHA-256 over
/// (sorted filename, content) records; 64 hex digits.
std::string hash_dataset(const std::string& dir);

/// SHA-256 of a single file, 64 hex digits.
std::string hash_file(const std::string& path);

/// Binary portable pixmap (P6, 8-bit).
void write_ppm(const std::string& path, const Frame& frame);
/// Binary portable bitmap (P4); set pixels are black.
void write_pbm(const std::string& path, const Mask& mask);

}  // namespace reoi::io
