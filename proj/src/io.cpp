#include "reoi/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace reoi::io {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

namespace {

constexpr uint32_t kVersion = 1;

struct Reader {
    std::ifstream f;
    std::string path;
    uint64_t size = 0;

    explicit Reader(const std::string& p) : path(p) {
        std::error_code ec;
        size = std::filesystem::file_size(p, ec);
        if (ec) throw LoadError(LoadErrorKind::io, "cannot stat " + p);
        f.open(p, std::ios::binary);
        if (!f) throw LoadError(LoadErrorKind::io, "cannot open " + p);
    }

    void raw(void* dst, size_t n) {
        f.read(reinterpret_cast<char*>(dst), std::streamsize(n));
        if (size_t(f.gcount()) != n)
            throw LoadError(LoadErrorKind::truncation, path + ": truncated file");
    }

    uint32_t u32() {
        uint32_t v;
        raw(&v, 4);
        return v;
    }
    double f64() {
        double v;
        raw(&v, 8);
        return v;
    }

    void magic(const char* expect) {
        char m[4];
        raw(m, 4);
        if (std::memcmp(m, expect, 4) != 0)
            throw LoadError(LoadErrorKind::bad_magic, path + ": bad magic");
    }

    void version(uint32_t expect) {
        uint32_t v = u32();
        if (v != expect)
            throw LoadError(LoadErrorKind::version_mismatch,
                            path + ": unsupported version " + std::to_string(v));
    }

    std::vector<float> f32s(size_t n) {
        std::vector<float> v(n);
        raw(v.data(), n * 4);
        return v;
    }

    nlohmann::json json_block() {
        uint32_t len = u32();
        if (uint64_t(f.tellg()) + len > size)
            throw LoadError(LoadErrorKind::truncation, path + ": truncated metadata");
        std::string s(len, '\0');
        raw(s.data(), len);
        try {
            return nlohmann::json::parse(s);
        } catch (const nlohmann::json::exception&) {
            throw LoadError(LoadErrorKind::format, path + ": bad metadata JSON");
        }
    }

    void expect_eof() {
        if (uint64_t(f.tellg()) != size)
            throw LoadError(LoadErrorKind::truncation, path + ": size inconsistent with header");
    }
};

struct Writer {
    std::ofstream f;
    explicit Writer(const std::string& p) : f(p, std::ios::binary) {
        if (!f) throw LoadError(LoadErrorKind::io, "cannot write " + p);
    }
    void raw(const void* src, size_t n) { f.write(reinterpret_cast<const char*>(src), std::streamsize(n)); }
    void u32(uint32_t v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void magic(const char* m) { raw(m, 4); }
    void f32s(const std::vector<float>& v) { raw(v.data(), v.size() * 4); }
    void json_block(const nlohmann::json& j) {
        std::string s = j.dump();
        u32(uint32_t(s.size()));
        raw(s.data(), s.size());
    }
};

std::vector<float> matrix_to_f32(const Eigen::MatrixXd& m) {
    std::vector<float> v;
    v.reserve(size_t(m.rows()) * m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) v.push_back(float(m(r, c)));
    return v;
}

Eigen::MatrixXd f32_to_matrix(const std::vector<float>& v, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = v[size_t(r) * cols + c];
    return m;
}

}  // namespace

void save_episode(const std::string& path, const wm::Trajectory& t) {
    if (t.frames.empty() || t.frames.size() != t.actions.size() + 1)
        throw std::invalid_argument("save_episode: inconsistent trajectory");
    const int h = t.frames[0].h, w = t.frames[0].w;
    Writer out(path);
    out.magic("RWMD");
    out.u32(kVersion);
    out.u32(uint32_t(h));
    out.u32(uint32_t(w));
    out.u32(3);
    out.u32(uint32_t(t.actions.size()));
    out.u32(3);  // action dims
    for (const Frame& f : t.frames) out.f32s(f.px);
    std::vector<float> acts;
    for (const auto& a : t.actions) {
        acts.push_back(a.dx);
        acts.push_back(a.dy);
        acts.push_back(float(a.grip));
    }
    out.f32s(acts);
    out.json_block(t.metadata);
}

wm::Trajectory load_episode(const std::string& path) {
    Reader in(path);
    in.magic("RWMD");
    in.version(kVersion);
    uint32_t h = in.u32(), w = in.u32(), ch = in.u32(), steps = in.u32(), adim = in.u32();
    if (ch != 3 || adim != 3)
        throw LoadError(LoadErrorKind::format, path + ": unsupported channel/action dims");
    wm::Trajectory t;
    for (uint32_t i = 0; i <= steps; ++i) {
        Frame f{int(h), int(w)};
        f.px = in.f32s(size_t(h) * w * ch);
        t.frames.push_back(std::move(f));
    }
    std::vector<float> acts = in.f32s(size_t(steps) * adim);
    for (uint32_t i = 0; i < steps; ++i)
        t.actions.push_back({acts[i * 3], acts[i * 3 + 1], int(acts[i * 3 + 2])});
    t.metadata = in.json_block();
    in.expect_eof();
    return t;
}

void save_model(const std::string& path, const wm::WorldModel& model) {
    if (!model.trained()) throw std::invalid_argument("save_model: untrained model");
    Writer out(path);
    out.magic("RWMM");
    out.u32(kVersion);
    out.u32(wm::kLatentDim);
    out.u32(wm::kHistory);
    out.u32(wm::kActionDim);
    out.u32(sim::kImageSize);
    out.u32(sim::kImageSize);
    out.u32(3);
    out.f32s(matrix_to_f32(model.dyn_W));
    out.f32s(matrix_to_f32(model.dec_W));
    out.f64(model.residuals.dyn_mean);
    out.f64(model.residuals.dyn_max);
    out.f64(model.residuals.dec_mean);
    out.f64(model.residuals.dec_max);
    out.json_block(model.manifest);
}

wm::WorldModel load_model(const std::string& path) {
    Reader in(path);
    in.magic("RWMM");
    in.version(kVersion);
    uint32_t d = in.u32(), hist = in.u32(), adim = in.u32(), h = in.u32(), w = in.u32(),
             ch = in.u32();
    if (d != wm::kLatentDim || hist != wm::kHistory || adim != wm::kActionDim ||
        h != sim::kImageSize || w != sim::kImageSize || ch != 3)
        throw LoadError(LoadErrorKind::format, path + ": geometry mismatch");
    wm::WorldModel m;
    m.dyn_W = f32_to_matrix(in.f32s(size_t(d) * wm::kDynInputDim), wm::kLatentDim, wm::kDynInputDim);
    m.dec_W = f32_to_matrix(in.f32s(size_t(wm::kFrameDim) * d), wm::kFrameDim, wm::kLatentDim);
    m.residuals.dyn_mean = in.f64();
    m.residuals.dyn_max = in.f64();
    m.residuals.dec_mean = in.f64();
    m.residuals.dec_max = in.f64();
    m.manifest = in.json_block();
    if (m.manifest.contains("lambda")) m.ridge_lambda = m.manifest["lambda"].get<double>();
    in.expect_eof();
    return m;
}

void save_region(const std::string& path, const trustregion::TrustRegion& region) {
    if (!region.built()) throw std::invalid_argument("save_region: empty region");
    Writer out(path);
    out.magic("RWTR");
    out.u32(kVersion);
    out.u32(uint32_t(region.centers.cols()));
    out.u32(uint32_t(region.centers.rows()));
    out.f32s(matrix_to_f32(region.centers));
    out.f64(region.radius);
    out.f64(region.lipschitz);
    out.f64(region.max_train_error);
    out.f64(region.dispersion);
    out.f32s(matrix_to_f32(region.mean.transpose()));
    out.f32s(matrix_to_f32(region.std.transpose()));
    out.json_block(region.provenance);
}

trustregion::TrustRegion load_region(const std::string& path) {
    Reader in(path);
    in.magic("RWTR");
    in.version(kVersion);
    uint32_t dims = in.u32(), n = in.u32();
    trustregion::TrustRegion r;
    r.centers = f32_to_matrix(in.f32s(size_t(n) * dims), int(n), int(dims));
    r.radius = in.f64();
    r.lipschitz = in.f64();
    r.max_train_error = in.f64();
    r.dispersion = in.f64();
    r.mean = f32_to_matrix(in.f32s(dims), 1, int(dims)).transpose();
    r.std = f32_to_matrix(in.f32s(dims), 1, int(dims)).transpose();
    r.provenance = in.json_block();
    in.expect_eof();
    return r;
}

namespace {

struct Sha256 {
    EVP_MD_CTX* ctx;
    Sha256() : ctx(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr); }
    ~Sha256() { EVP_MD_CTX_free(ctx); }
    void update(const void* data, size_t n) { EVP_DigestUpdate(ctx, data, n); }
    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx, digest, &len);
        static const char* k = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out.push_back(k[digest[i] >> 4]);
            out.push_back(k[digest[i] & 0xf]);
        }
        return out;
    }
};

void hash_stream(Sha256& sha, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw LoadError(LoadErrorKind::io, "cannot read " + path);
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        sha.update(buf, size_t(f.gcount()));
    }
}

}  // namespace

std::string hash_file(const std::string& path) {
    Sha256 sha;
    hash_stream(sha, path);
    return sha.hex();
}

std::string hash_dataset(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    Sha256 sha;
    for (const auto& p : files) {
        std::string name = p.filename().string();
        uint64_t len = name.size();
        sha.update(&len, 8);
        sha.update(name.data(), name.size());
        uint64_t content_len = std::filesystem::file_size(p);
        sha.update(&content_len, 8);
        hash_stream(sha, p.string());
    }
    return sha.hex();
}

void write_ppm(const std::string& path, const Frame& frame) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LoadError(LoadErrorKind::io, "cannot write " + path);
    f << "P6\n" << frame.w << " " << frame.h << "\n255\n";
    for (float v : frame.px) {
        unsigned char b = (unsigned char)std::lround(std::clamp(v, 0.f, 1.f) * 255.f);
        f.write(reinterpret_cast<const char*>(&b), 1);
    }
}

void write_pbm(const std::string& path, const Mask& mask) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LoadError(LoadErrorKind::io, "cannot write " + path);
    f << "P4\n" << mask.w << " " << mask.h << "\n";
    for (int r = 0; r < mask.h; ++r) {
        for (int c = 0; c < mask.w; c += 8) {
            unsigned char byte = 0;
            for (int b = 0; b < 8 && c + b < mask.w; ++b)
                if (mask.at(r, c + b)) byte |= 0x80 >> b;
            f.write(reinterpret_cast<const char*>(&byte), 1);
        }
    }
}

}  // namespace reoi::io
