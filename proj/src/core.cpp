#include "nlos/core.hpp"

#include <cmath>
#include <string>

namespace nlos {

namespace {

bool finite(const Vec3& p) noexcept {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

double distance(const Vec3& a, const Vec3& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void UniformGrid2D::validate() const {
    if (nx == 0 || ny == 0)
        throw ValidationError("uniform grid needs at least one sample per axis");
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
        throw ValidationError("uniform grid spacing must be positive and finite");
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(z))
        throw ValidationError("uniform grid origin must be finite");
}

void PointList::validate() const {
    if (points.empty())
        throw ValidationError("point list is empty");
    if (dim != 2 && dim != 3)
        throw ValidationError("point list dimensionality must be 2 or 3");
    for (const auto& p : points)
        if (!finite(p))
            throw ValidationError("point list holds a non-finite coordinate");
}

PointList grid_coordinates(const UniformGrid2D& g) {
    g.validate();
    PointList out;
    out.dim = 2;
    out.points.reserve(g.size());
    for (std::size_t n = 0; n < g.ny; ++n)
        for (std::size_t m = 0; m < g.nx; ++m)
            out.points.push_back({g.x(m), g.y(n), 0.0});
    return out;
}

RelayKind relay_kind(const RelaySampling& r) noexcept {
    return static_cast<RelayKind>(r.index());
}

std::size_t relay_size(const RelaySampling& r) noexcept {
    return std::visit(overloaded{
                          [](const UniformGrid2D& g) { return g.size(); },
                          [](const NonUniformPlanar& p) { return p.points.size(); },
                          [](const NonPlanar& p) { return p.points.size(); },
                      },
                      r);
}

std::vector<Vec3> relay_points(const RelaySampling& r) {
    return std::visit(overloaded{
                          [](const UniformGrid2D& g) {
                              auto pts = grid_coordinates(g).points;
                              for (auto& p : pts) p.z = g.z;
                              return pts;
                          },
                          [](const NonUniformPlanar& p) {
                              auto pts = p.points.points;
                              for (auto& q : pts) q.z = p.z;
                              return pts;
                          },
                          [](const NonPlanar& p) { return p.points.points; },
                      },
                      r);
}

void validate_relay(const RelaySampling& r) {
    std::visit(overloaded{
                   [](const UniformGrid2D& g) { g.validate(); },
                   [](const NonUniformPlanar& p) {
                       p.points.validate();
                       if (!std::isfinite(p.z))
                           throw ValidationError("planar relay height must be finite");
                   },
                   [](const NonPlanar& p) {
                       p.points.validate();
                       if (p.points.dim != 3)
                           throw ValidationError("non-planar relay needs 3D points");
                   },
               },
               r);
}

void TransientMeasurement::validate() const {
    validate_relay(relay);
    if (n_bins == 0)
        throw ValidationError("measurement needs at least one time bin");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("bin width must be positive and finite");
    if (!std::isfinite(t0))
        throw ValidationError("time offset must be finite");
    if (!confocal && illuminations.empty())
        throw ValidationError("non-confocal measurement needs illumination positions");
    for (const auto& p : illuminations)
        if (!finite(p))
            throw ValidationError("illumination position is not finite");
    if (histograms.size() != n_illum() * n_detect() * n_bins)
        throw ValidationError("histogram payload size does not match the header counts");
    for (float v : histograms)
        if (!std::isfinite(v) || v < 0.0f)
            throw ValidationError("histogram values must be finite and non-negative");
}

std::vector<cplx> FrequencySlices::relay_field(std::size_t p, std::size_t f) const {
    const std::size_t nd = n_detect();
    std::vector<cplx> out(nd);
    for (std::size_t c = 0; c < nd; ++c)
        out[c] = coefficients[index(p, c, f)];
    return out;
}

void FrequencySlices::validate() const {
    validate_relay(relay);
    if (frequencies.empty())
        throw ValidationError("frequency slices are empty");
    for (std::size_t i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1]))
            throw ValidationError("frequencies must be strictly increasing");
    if (!confocal && illuminations.empty())
        throw ValidationError("non-confocal slices need illumination positions");
    if (coefficients.size() != n_illum() * n_detect() * n_freq())
        throw ValidationError("coefficient count does not match illumination/detection/frequency counts");
}

UniformGrid2D FrustumGrid::plane(std::size_t k) const {
    const auto& pl = planes.at(k);
    UniformGrid2D g = base;
    g.dx = base.dx / pl.alpha;
    g.dy = base.dy / pl.beta;
    g.x0 = base.center_x() - 0.5 * static_cast<double>(base.nx - 1) * g.dx;
    g.y0 = base.center_y() - 0.5 * static_cast<double>(base.ny - 1) * g.dy;
    g.z = pl.z;
    return g;
}

FrustumGrid FrustumGrid::linear(const UniformGrid2D& base, std::size_t nz, double dz, double alpha0,
                                double beta0) {
    base.validate();
    if (nz == 0 || !(dz > 0.0))
        throw ValidationError("frustum needs at least one plane and positive depth spacing");
    if (!(alpha0 > 0.0) || !(beta0 > 0.0))
        throw ValidationError("frustum growth factors must be positive");
    FrustumGrid f{base, {}};
    const double x_in = static_cast<double>(base.nx) * base.dx;
    const double y_in = static_cast<double>(base.ny) * base.dy;
    for (std::size_t k = 0; k < nz; ++k) {
        const double h = static_cast<double>(k) * dz;
        f.planes.push_back({base.z + h, x_in / (x_in + h / alpha0), y_in / (y_in + h / beta0)});
    }
    return f;
}

std::size_t ExplicitGrid::size() const noexcept {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.xy.size();
    return n;
}

GridKind grid_kind(const VoxelGrid& g) noexcept {
    return static_cast<GridKind>(g.index());
}

std::size_t voxel_count(const VoxelGrid& g) noexcept {
    return std::visit([](const auto& v) { return v.size(); }, g);
}

std::size_t plane_count(const VoxelGrid& g) noexcept {
    return std::visit(overloaded{
                          [](const CuboidGrid& c) { return c.nz; },
                          [](const FrustumGrid& f) { return f.planes.size(); },
                          [](const ExplicitGrid& e) { return e.groups.size(); },
                      },
                      g);
}

std::vector<Vec3> voxel_positions(const VoxelGrid& g) {
    std::vector<Vec3> out;
    out.reserve(voxel_count(g));
    std::visit(overloaded{
                   [&](const CuboidGrid& c) {
                       for (std::size_t k = 0; k < c.nz; ++k)
                           for (std::size_t n = 0; n < c.ny; ++n)
                               for (std::size_t m = 0; m < c.nx; ++m)
                                   out.push_back({c.x0 + static_cast<double>(m) * c.dx,
                                                  c.y0 + static_cast<double>(n) * c.dy, c.z(k)});
                   },
                   [&](const FrustumGrid& f) {
                       for (std::size_t k = 0; k < f.planes.size(); ++k) {
                           const auto p = f.plane(k);
                           for (std::size_t n = 0; n < p.ny; ++n)
                               for (std::size_t m = 0; m < p.nx; ++m)
                                   out.push_back({p.x(m), p.y(n), p.z});
                       }
                   },
                   [&](const ExplicitGrid& e) {
                       for (const auto& grp : e.groups)
                           for (const auto& xy : grp.xy)
                               out.push_back({xy[0], xy[1], grp.z});
                   },
               },
               g);
    return out;
}

void validate_grid(const VoxelGrid& g) {
    std::visit(overloaded{
                   [](const CuboidGrid& c) {
                       if (c.nx == 0 || c.ny == 0 || c.nz == 0)
                           throw ValidationError("cuboid grid needs at least one voxel per axis");
                       if (!(c.dx > 0.0) || !(c.dy > 0.0) || !(c.dz > 0.0))
                           throw ValidationError("cuboid spacing must be positive");
                   },
                   [](const FrustumGrid& f) {
                       f.base.validate();
                       if (f.planes.empty())
                           throw ValidationError("frustum grid has no planes");
                       for (const auto& p : f.planes)
                           if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.z))
                               throw ValidationError("frustum plane scale factors must be positive");
                   },
                   [](const ExplicitGrid& e) {
                       if (e.groups.empty())
                           throw ValidationError("explicit grid has no voxel groups");
                       for (const auto& grp : e.groups) {
                           if (grp.xy.empty())
                               throw ValidationError("explicit voxel group is empty");
                           if (!(grp.alpha > 0.0) || !(grp.beta > 0.0))
                               throw ValidationError("explicit group scale factors must be positive");
                           for (const auto& xy : grp.xy)
                               if (!std::isfinite(xy[0]) || !std::isfinite(xy[1]))
                                   throw ValidationError("explicit voxel coordinate is not finite");
                       }
                   },
               },
               g);
}

void ReconstructionVolume::validate() const {
    validate_grid(grid);
    if (field.size() != voxel_count(grid) * frames())
        throw ValidationError("volume field length does not match the voxel grid");
    for (const auto& v : field)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("volume holds a non-finite value");
}

TorusMap::TorusMap(std::vector<AxisBox> box) : box_(std::move(box)) {
    for (const auto& a : box_)
        if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
            throw ValidationError("torus box has a degenerate axis");
}

double TorusMap::forward(std::size_t axis, double v) const noexcept {
    const auto& a = box_[axis];
    return 2.0 * kPi * (v - a.lo) / (a.hi - a.lo) - kPi;
}

double TorusMap::inverse(std::size_t axis, double t) const noexcept {
    const auto& a = box_[axis];
    return a.lo + (t + kPi) * (a.hi - a.lo) / (2.0 * kPi);
}

TorusPoints rescale_to_torus(std::span<const Vec3> points, std::vector<AxisBox> box) {
    if (box.empty() || box.size() > 3)
        throw ValidationError("torus box must have 1 to 3 axes");
    TorusPoints out{TorusMap(std::move(box)), {}};
    const std::size_t d = out.map.dims();
    out.coords.assign(d, std::vector<double>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double c[3] = {points[i].x, points[i].y, points[i].z};
        for (std::size_t a = 0; a < d; ++a) {
            const auto& ab = out.map.box()[a];
            if (!(c[a] >= ab.lo && c[a] < ab.hi))
                throw ValidationError("point " + std::to_string(i) + " lies outside the torus box on axis " +
                                      std::to_string(a));
            double t = out.map.forward(a, c[a]);
            // rounding can land exactly on +pi for points just below hi
            if (t >= kPi) t = std::nextafter(kPi, 0.0);
            out.coords[a][i] = t;
        }
    }
    return out;
}

} // namespace nlos
