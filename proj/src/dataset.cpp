#include "nlos/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <type_traits>

#include <json.hpp>

namespace nlos {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', '1'};

class Writer {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_arithmetic_v<T>);
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
        bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
    }
    void put_u32(std::size_t v) {
        if (v > 0xffffffffu) throw ValidationError("count does not fit the container's u32 field");
        put(static_cast<std::uint32_t>(v));
    }
    void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }

    void flush(const std::filesystem::path& path) const {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
        os.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
        if (!os) throw IoError("write to '" + path.string() + "' failed");
    }

private:
    std::vector<unsigned char> bytes_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw IoError("cannot open '" + path.string() + "'");
        bytes_.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    }

    template <class T>
    T get() {
        need(sizeof(T));
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, raw, sizeof(T));
        return v;
    }
    double get_finite() {
        const double v = get<double>();
        if (!std::isfinite(v)) throw DatasetError(DatasetErrorKind::NonFinite, "non-finite geometry value");
        return v;
    }
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw DatasetError(DatasetErrorKind::Truncated, "container is truncated");
    }
    void magic() {
        need(4);
        if (std::memcmp(bytes_.data(), kMagic, 4) != 0)
            throw DatasetError(DatasetErrorKind::BadMagic, "missing NLS1 magic");
        pos_ = 4;
    }
    [[nodiscard]] bool at_end() const noexcept { return pos_ == bytes_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return bytes_.size(); }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

struct Header {
    std::uint32_t a = 0, b = 0, c = 0;
    double dt = 0.0, t0 = 0.0;
    std::uint8_t tag = 0;
};

void put_header(Writer& w, std::size_t a, std::size_t b, std::size_t c, double dt, double t0, std::uint8_t tag) {
    w.raw(kMagic, 4);
    w.put(kContainerVersion);
    w.put_u32(a);
    w.put_u32(b);
    w.put_u32(c);
    w.put(dt);
    w.put(t0);
    w.put(tag);
}

Header get_header(Reader& r) {
    r.magic();
    const auto version = r.get<std::uint32_t>();
    if (version != kContainerVersion)
        throw DatasetError(DatasetErrorKind::VersionMismatch,
                           "container version " + std::to_string(version) + " is not supported");
    Header h;
    h.a = r.get<std::uint32_t>();
    h.b = r.get<std::uint32_t>();
    h.c = r.get<std::uint32_t>();
    h.dt = r.get<double>();
    h.t0 = r.get<double>();
    h.tag = r.get<std::uint8_t>();
    return h;
}

std::vector<Vec3> get_points(Reader& r, int dim) {
    const auto n = r.get<std::uint32_t>();
    r.need(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim) * 8);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) {
        p.x = r.get_finite();
        p.y = r.get_finite();
        if (dim == 3) p.z = r.get_finite();
    }
    return pts;
}

void put_points(Writer& w, const std::vector<Vec3>& pts, int dim) {
    w.put_u32(pts.size());
    for (const auto& p : pts) {
        w.put(p.x);
        w.put(p.y);
        if (dim == 3) w.put(p.z);
    }
}

void put_relay(Writer& w, const RelaySampling& relay) {
    if (const auto* g = std::get_if<UniformGrid2D>(&relay)) {
        w.put_u32(g->nx);
        w.put_u32(g->ny);
        for (double v : {g->dx, g->dy, g->x0, g->y0, g->z}) w.put(v);
    } else if (const auto* p = std::get_if<NonUniformPlanar>(&relay)) {
        w.put_u32(p->points.size());
        w.put(p->z);
        for (const auto& q : p->points.points) {
            w.put(q.x);
            w.put(q.y);
        }
    } else {
        put_points(w, std::get<NonPlanar>(relay).points.points, 3);
    }
}

RelaySampling get_relay(Reader& r, std::uint8_t kind) {
    switch (kind) {
    case 0: {
        UniformGrid2D g;
        g.nx = r.get<std::uint32_t>();
        g.ny = r.get<std::uint32_t>();
        g.dx = r.get_finite();
        g.dy = r.get_finite();
        g.x0 = r.get_finite();
        g.y0 = r.get_finite();
        g.z = r.get_finite();
        return g;
    }
    case 1: {
        NonUniformPlanar p;
        const auto n = r.get<std::uint32_t>();
        p.z = r.get_finite();
        r.need(static_cast<std::size_t>(n) * 16);
        p.points.dim = 2;
        p.points.points.resize(n);
        for (auto& q : p.points.points) {
            q.x = r.get_finite();
            q.y = r.get_finite();
        }
        return p;
    }
    case 2: {
        NonPlanar p;
        p.points.dim = 3;
        p.points.points = get_points(r, 3);
        return p;
    }
    default:
        throw DatasetError(DatasetErrorKind::Malformed, "unknown relay kind tag " + std::to_string(kind));
    }
}

void put_grid(Writer& w, const VoxelGrid& grid) {
    if (const auto* c = std::get_if<CuboidGrid>(&grid)) {
        w.put_u32(c->nx);
        w.put_u32(c->ny);
        w.put_u32(c->nz);
        for (double v : {c->dx, c->dy, c->dz, c->x0, c->y0, c->z0}) w.put(v);
    } else if (const auto* f = std::get_if<FrustumGrid>(&grid)) {
        put_relay(w, f->base);
        w.put_u32(f->planes.size());
        for (const auto& p : f->planes) {
            w.put(p.z);
            w.put(p.alpha);
            w.put(p.beta);
        }
    } else {
        const auto& e = std::get<ExplicitGrid>(grid);
        w.put_u32(e.groups.size());
        for (const auto& g : e.groups) {
            w.put(g.z);
            w.put(g.alpha);
            w.put(g.beta);
            w.put_u32(g.xy.size());
            for (const auto& xy : g.xy) {
                w.put(xy[0]);
                w.put(xy[1]);
            }
        }
    }
}

VoxelGrid get_grid(Reader& r, std::uint8_t kind) {
    switch (kind) {
    case 0: {
        CuboidGrid c;
        c.nx = r.get<std::uint32_t>();
        c.ny = r.get<std::uint32_t>();
        c.nz = r.get<std::uint32_t>();
        c.dx = r.get_finite();
        c.dy = r.get_finite();
        c.dz = r.get_finite();
        c.x0 = r.get_finite();
        c.y0 = r.get_finite();
        c.z0 = r.get_finite();
        return c;
    }
    case 1: {
        FrustumGrid f;
        f.base = std::get<UniformGrid2D>(get_relay(r, 0));
        const auto n = r.get<std::uint32_t>();
        r.need(static_cast<std::size_t>(n) * 24);
        f.planes.resize(n);
        for (auto& p : f.planes) {
            p.z = r.get_finite();
            p.alpha = r.get_finite();
            p.beta = r.get_finite();
        }
        return f;
    }
    case 2: {
        ExplicitGrid e;
        const auto n = r.get<std::uint32_t>();
        e.groups.resize(n);
        for (auto& g : e.groups) {
            g.z = r.get_finite();
            g.alpha = r.get_finite();
            g.beta = r.get_finite();
            const auto count = r.get<std::uint32_t>();
            r.need(static_cast<std::size_t>(count) * 16);
            g.xy.resize(count);
            for (auto& xy : g.xy) {
                xy[0] = r.get_finite();
                xy[1] = r.get_finite();
            }
        }
        return e;
    }
    default:
        throw DatasetError(DatasetErrorKind::Malformed, "unknown grid kind tag " + std::to_string(kind));
    }
}

nlohmann::json points_json(const std::vector<Vec3>& pts, int dim) {
    auto arr = nlohmann::json::array();
    for (const auto& p : pts) {
        if (dim == 2)
            arr.push_back({p.x, p.y});
        else
            arr.push_back({p.x, p.y, p.z});
    }
    return arr;
}

nlohmann::json relay_json(const RelaySampling& relay) {
    if (const auto* g = std::get_if<UniformGrid2D>(&relay))
        return {{"kind", "uniform"}, {"nx", g->nx}, {"ny", g->ny}, {"dx", g->dx}, {"dy", g->dy},
                {"x0", g->x0},       {"y0", g->y0}, {"z", g->z}};
    if (const auto* p = std::get_if<NonUniformPlanar>(&relay))
        return {{"kind", "planar"}, {"z", p->z}, {"points", points_json(p->points.points, 2)}};
    return {{"kind", "nonplanar"}, {"points", points_json(std::get<NonPlanar>(relay).points.points, 3)}};
}

} // namespace

void write_dataset(const TransientMeasurement& m, const std::filesystem::path& path) {
    m.validate();
    Writer w;
    auto tag = static_cast<std::uint8_t>(relay_kind(m.relay));
    if (m.confocal) tag |= kConfocalFlag;
    put_header(w, m.n_illum(), m.n_detect(), m.n_bins, m.dt, m.t0, tag);
    put_relay(w, m.relay);
    put_points(w, m.confocal ? std::vector<Vec3>{} : m.illuminations, 3);
    for (float v : m.histograms) w.put(v);
    w.flush(path);

    nlohmann::json side = {
        {"format", "NLS1"},
        {"version", kContainerVersion},
        {"n_illum", m.n_illum()},
        {"n_detect", m.n_detect()},
        {"n_bins", m.n_bins},
        {"dt", m.dt},
        {"t0", m.t0},
        {"confocal", m.confocal},
        {"relay", relay_json(m.relay)},
        {"illuminations", points_json(m.confocal ? std::vector<Vec3>{} : m.illuminations, 3)},
    };
    std::ofstream js(path.string() + ".json", std::ios::trunc);
    if (!js) throw IoError("cannot write sidecar for '" + path.string() + "'");
    js << side.dump(2) << '\n';
}

TransientMeasurement read_dataset(const std::filesystem::path& path) {
    Reader r(path);
    const Header h = get_header(r);
    if (h.tag & kVolumeTagBase)
        throw DatasetError(DatasetErrorKind::Malformed, "file holds a reconstruction volume, not a measurement");
    TransientMeasurement m;
    m.confocal = (h.tag & kConfocalFlag) != 0;
    m.n_bins = h.c;
    m.dt = h.dt;
    m.t0 = h.t0;
    if (!std::isfinite(m.dt) || !std::isfinite(m.t0))
        throw DatasetError(DatasetErrorKind::NonFinite, "non-finite time axis");
    m.relay = get_relay(r, static_cast<std::uint8_t>(h.tag & ~kConfocalFlag));
    m.illuminations = get_points(r, 3);
    if (m.n_detect() != h.b || m.n_illum() != h.a)
        throw DatasetError(DatasetErrorKind::Malformed, "header counts disagree with the geometry blocks");
    const std::size_t n = static_cast<std::size_t>(h.a) * h.b * h.c;
    r.need(n * sizeof(float));
    m.histograms.resize(n);
    for (auto& v : m.histograms) {
        v = r.get<float>();
        if (!std::isfinite(v)) throw DatasetError(DatasetErrorKind::NonFinite, "non-finite histogram value");
    }
    if (!r.at_end()) throw DatasetError(DatasetErrorKind::Malformed, "trailing bytes after the payload");
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw DatasetError(DatasetErrorKind::Malformed, e.what());
    }
    return m;
}

void write_volume(const ReconstructionVolume& v, const std::filesystem::path& path) {
    v.validate();
    Writer w;
    const auto tag = static_cast<std::uint8_t>(kVolumeTagBase + static_cast<std::uint8_t>(grid_kind(v.grid)));
    put_header(w, v.frames(), voxel_count(v.grid), 2, 0.0, 0.0, tag);
    put_grid(w, v.grid);
    w.put_u32(v.times.size());
    for (double t : v.times) w.put(t);
    for (const auto& c : v.field) {
        w.put(static_cast<float>(c.real()));
        w.put(static_cast<float>(c.imag()));
    }
    w.flush(path);
}

ReconstructionVolume read_volume(const std::filesystem::path& path) {
    Reader r(path);
    const Header h = get_header(r);
    if (!(h.tag & kVolumeTagBase) || (h.tag & kConfocalFlag))
        throw DatasetError(DatasetErrorKind::Malformed, "file does not hold a reconstruction volume");
    ReconstructionVolume v;
    v.grid = get_grid(r, static_cast<std::uint8_t>(h.tag - kVolumeTagBase));
    const auto nt = r.get<std::uint32_t>();
    v.times.resize(nt);
    for (auto& t : v.times) t = r.get_finite();
    if (voxel_count(v.grid) != h.b || v.frames() != h.a || h.c != 2)
        throw DatasetError(DatasetErrorKind::Malformed, "volume header disagrees with its grid");
    const std::size_t n = static_cast<std::size_t>(h.a) * h.b;
    r.need(n * 2 * sizeof(float));
    v.field.resize(n);
    for (auto& c : v.field) {
        const float re = r.get<float>();
        const float im = r.get<float>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw DatasetError(DatasetErrorKind::NonFinite, "non-finite volume value");
        c = {re, im};
    }
    if (!r.at_end()) throw DatasetError(DatasetErrorKind::Malformed, "trailing bytes after the payload");
    return v;
}

bool is_volume_file(const std::filesystem::path& path) {
    Reader r(path);
    const Header h = get_header(r);
    return (h.tag & kVolumeTagBase) && !(h.tag & kConfocalFlag);
}

} // namespace nlos
