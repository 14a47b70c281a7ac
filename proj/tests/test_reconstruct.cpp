#include "doctest.h"

#include <algorithm>
#include <random>

#include "nlos/metrics.hpp"
#include "nlos/oracle.hpp"
#include "nlos/reconstruct.hpp"
#include "test_scenes.hpp"
#include "test_support.hpp"

using namespace nlos;
using namespace nlos::testing;
namespace rc = nlos::reconstruct;

namespace {

const UniformGrid2D kWall = centered_wall(16, 0.04);
const CuboidGrid kBox = cuboid_over(kWall, 8, 0.3, 0.05);
const std::vector<Vec3> kLights = {{0.0, 0.0, 0.0}, {0.2, -0.1, 0.0}};

const Capture& scene() {
    static const Capture c = capture({{{0.06, -0.04, 0.5}, 1.0}, {{-0.12, 0.1, 0.6}, 0.7}}, kWall, kLights, 0.12);
    return c;
}

const Capture& confocal_scene() {
    static const Capture c = capture({{{0.06, -0.04, 0.5}, 1.0}}, kWall, {}, 0.12, true);
    return c;
}

FrustumGrid unit_frustum(const CuboidGrid& c) {
    FrustumGrid f;
    f.base = c.plane(0);
    for (std::size_t k = 0; k < c.nz; ++k) f.planes.push_back({c.z(k), 1.0, 1.0});
    return f;
}

} // namespace

TEST_CASE("zero measurement reconstructs to zero") {
    auto m = scene().slices;
    std::fill(m.coefficients.begin(), m.coefficients.end(), cplx{});
    const auto v = rc::rsd(m, kBox);
    for (auto x : v.field) CHECK(x == cplx{});
    const auto w = rc::nursd3d(with_relay(m, as_nonplanar(kWall)), kBox);
    for (auto x : w.field) CHECK(x == cplx{});
}

TEST_CASE("propagation kernel magnitude") {
    const rc::PropagationKernel g{30.0, true}, h{30.0, false};
    CHECK(std::abs(g(0.3, 0.4, 1.2)) == doctest::Approx(1.0 / 1.3).epsilon(1e-14));
    CHECK(std::abs(h(0.3, 0.4, 1.2)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("srsd at unit scale equals rsd") {
    for (const Capture* c : {&scene(), &confocal_scene()}) {
        const auto a = rc::rsd(c->slices, kBox);
        const auto b = rc::srsd(c->slices, unit_frustum(kBox));
        CHECK(rel_l2(b.field, a.field) <= 1e-8);
    }
}

TEST_CASE("nursd paths on uniform data equal rsd") {
    const rc::Options o;
    const auto& m = scene().slices;
    const auto ref = rc::rsd(m, kBox);
    const auto planar = with_relay(m, as_planar(kWall));
    const auto v1 = rc::nursd1(planar, kBox);
    CHECK(rel_l2(v1.field, ref.field) <= o.eps + 1e-8);
    const auto targets = explicit_from(kBox);
    const auto v2 = rc::nursd2(m, targets);
    CHECK(rel_l2(v2.field, ref.field) <= o.eps + 1e-8);
    const auto v3 = rc::nursd3(planar, targets);
    CHECK(rel_l2(v3.field, ref.field) <= 2 * o.eps + 1e-8);
}

TEST_CASE("nursd3d on a flat relay equals nursd1") {
    const rc::Options o;
    const auto& m = scene().slices;
    const auto a = rc::nursd1(with_relay(m, as_planar(kWall)), kBox);
    const auto b = rc::nursd3d(with_relay(m, as_nonplanar(kWall)), kBox);
    CHECK(rel_l2(b.field, a.field) <= o.eps + 1e-8);
}

TEST_CASE("rsd3d on a flat relay matches rsd") {
    const auto& m = scene().slices;
    const auto a = rc::rsd(m, kBox);
    const auto b = rc::rsd3d(with_relay(m, as_nonplanar(kWall)), kBox);
    CHECK(metrics::ncc(b.field, a.field) >= 0.98);
    CHECK(rel_l2(b.field, a.field) <= 1e-8);
}

namespace {

FrustumGrid shrinking_frustum() {
    FrustumGrid f;
    f.base = kWall;
    for (std::size_t k = 0; k < 6; ++k) {
        const double a = 1.0 - 0.1 * static_cast<double>(k);
        f.planes.push_back({0.35 + 0.06 * static_cast<double>(k), a, 0.9 * a + 0.1});
    }
    return f;
}

ExplicitGrid explicit_from(const FrustumGrid& f) {
    ExplicitGrid e;
    for (std::size_t k = 0; k < f.planes.size(); ++k) {
        const auto p = f.plane(k);
        VoxelGroup g;
        g.z = p.z;
        g.alpha = f.planes[k].alpha;
        g.beta = f.planes[k].beta;
        for (const auto& q : grid_coordinates(p).points) g.xy.push_back({q.x, q.y});
        e.groups.push_back(std::move(g));
    }
    return e;
}

NonPlanar curved_wall() {
    NonPlanar r;
    r.points.dim = 3;
    for (const auto& q : grid_coordinates(kWall).points)
        r.points.points.push_back({q.x, q.y, 0.1 * std::sin(kPi * q.x)});
    return r;
}

// lambda_c of two relay pitches keeps the axial response within a couple of planes
const Capture& curved_scene() {
    static const Capture c = capture({{{0.04, -0.06, 0.55}, 1.0}}, curved_wall(), kLights, 0.08);
    return c;
}

} // namespace

TEST_CASE("srsd with shrinking planes tracks the oracle at the scaled voxels") {
    const auto f = shrinking_frustum();
    const auto& m = scene().slices;
    const auto v = rc::srsd(m, f);
    const auto o = oracle::backproject(m, voxel_positions(f));
    CHECK(metrics::ncc(v.field, o) >= 0.95);
}

TEST_CASE("srsd-nursd2 on the full scaled grid equals srsd") {
    const auto f = shrinking_frustum();
    const auto& m = scene().slices;
    const auto a = rc::srsd(m, f);
    const auto b = rc::srsd_nursd2(m, explicit_from(f));
    CHECK(rel_l2(b.field, a.field) <= rc::Options{}.eps + 1e-8);
}

TEST_CASE("srsd-nursd2 at unit scale equals nursd2 on arbitrary targets") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    ExplicitGrid e;
    for (double z : {0.42, 0.55}) {
        VoxelGroup g;
        g.z = z;
        for (int i = 0; i < 40; ++i) g.xy.push_back({u(rng), u(rng)});
        e.groups.push_back(g);
    }
    const auto& m = scene().slices;
    const auto a = rc::nursd2(m, e);
    const auto b = rc::srsd_nursd2(m, e);
    CHECK(rel_l2(b.field, a.field) <= 1e-12);
    const auto o = oracle::backproject(m, voxel_positions(e));
    CHECK(metrics::ncc(a.field, o) >= 0.95);
}

TEST_CASE("nursd2 on a quarter of the voxels agrees with the rsd subset") {
    const auto& m = scene().slices;
    const auto ref = rc::rsd(m, kBox);
    ExplicitGrid e;
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < kBox.nz; ++k) {
        VoxelGroup g;
        g.z = kBox.z(k);
        for (std::size_t y = 0; y < kBox.ny; y += 2)
            for (std::size_t x = 0; x < kBox.nx; x += 2) {
                g.xy.push_back({kBox.x0 + static_cast<double>(x) * kBox.dx, kBox.y0 + static_cast<double>(y) * kBox.dy});
                picked.push_back((k * kBox.ny + y) * kBox.nx + x);
            }
        e.groups.push_back(g);
    }
    const auto v = rc::nursd2(m, e);
    std::vector<cplx> subset;
    for (auto i : picked) subset.push_back(ref.field[i]);
    CHECK(rel_l2(v.field, subset) <= rc::Options{}.eps + 1e-8);
}

TEST_CASE("single relay sample and single voxel") {
    const auto& full = scene().slices;
    FrequencySlices m;
    m.frequencies = full.frequencies;
    m.illuminations = {kLights[0]};
    NonUniformPlanar r;
    r.points.dim = 2;
    r.points.points = {{0.02, -0.05, 0.0}};
    m.relay = r;
    for (std::size_t f = 0; f < m.n_freq(); ++f) m.coefficients.push_back(full.coefficients[full.index(0, 100, f)]);

    ExplicitGrid e;
    e.groups.push_back({0.5, 1.0, 1.0, {{0.1, 0.07}}});
    rc::Options o;
    o.falloff = false;
    const auto v = rc::nursd3(m, e, o);
    const auto ref = oracle::backproject(m, voxel_positions(e));
    CHECK(std::abs(v.field[0] - ref[0]) <= 1e-5 * std::abs(ref[0]));

    // rank one: every voxel holds the sample's phasors spread by the kernel
    const auto w = rc::nursd1(m, kBox, o);
    CHECK(metrics::ncc(w.field, oracle::backproject(m, voxel_positions(kBox))) >= 0.999);
}

TEST_CASE("curved relay: both 3D paths agree with the oracle and each other") {
    const auto& c = curved_scene();
    const auto o = oracle::backproject(c.slices, voxel_positions(kBox));
    const auto a = rc::rsd3d(c.slices, kBox);
    const auto b = rc::nursd3d(c.slices, kBox);
    CHECK(metrics::ncc(a.field, o) >= 0.9);
    CHECK(metrics::ncc(b.field, o) >= 0.9);
    CHECK(metrics::ncc(a.field, b.field) >= 0.9);
    rc::Options nearest;
    nearest.interp = Interpolation::Nearest;
    CHECK(metrics::ncc(rc::rsd3d(c.slices, kBox, nearest).field, o) >= 0.85);

    // argmax within one voxel of the truth
    const auto i = argmax_abs(b.field);
    const long x = static_cast<long>(i % kBox.nx), y = static_cast<long>((i / kBox.nx) % kBox.ny);
    const long z = static_cast<long>(i / (kBox.nx * kBox.ny));
    CHECK(std::abs(kBox.x0 + static_cast<double>(x) * kBox.dx - 0.04) <= kBox.dx * 1.01);
    CHECK(std::abs(kBox.y0 + static_cast<double>(y) * kBox.dy + 0.06) <= kBox.dy * 1.01);
    CHECK(std::abs(kBox.z(static_cast<std::size_t>(z)) - 0.55) <= kBox.dz * 1.01);
}

TEST_CASE("explicit targets on a curved relay") {
    const auto& c = curved_scene();
    const auto e = explicit_from(kBox);
    const auto a = rc::nursd3d(c.slices, kBox);
    const auto b = rc::nursd3d(c.slices, e);
    CHECK(rel_l2(b.field, a.field) <= 1e-4);
    CHECK(metrics::ncc(rc::rsd3d(c.slices, e).field, rc::rsd3d(c.slices, kBox).field) >= 0.99);
}

TEST_CASE("every algorithm is linear in the measurement") {
    const auto& m1 = scene().slices;
    auto m2 = m1;
    std::mt19937_64 rng(3);
    m2.coefficients = random_complex(m1.coefficients.size(), rng);
    const cplx a{0.7, -1.3}, b{-0.2, 0.5};
    auto mix = m1;
    for (std::size_t i = 0; i < mix.coefficients.size(); ++i)
        mix.coefficients[i] = a * m1.coefficients[i] + b * m2.coefficients[i];

    auto check = [&](auto run) {
        const auto v1 = run(m1), v2 = run(m2), vm = run(mix);
        std::vector<cplx> expect(v1.field.size());
        for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = a * v1.field[i] + b * v2.field[i];
        CHECK(rel_l2(vm.field, expect) <= 1e-8);
    };
    check([](const FrequencySlices& m) { return rc::rsd(m, kBox); });
    check([](const FrequencySlices& m) { return rc::srsd(m, shrinking_frustum()); });
    check([](const FrequencySlices& m) { return rc::nursd1(with_relay(m, as_planar(kWall)), kBox); });
    check([](const FrequencySlices& m) { return rc::nursd3d(with_relay(m, curved_wall()), kBox); });
    check([](const FrequencySlices& m) { return rc::rsd3d(with_relay(m, curved_wall()), kBox); });
}

TEST_CASE("results do not depend on the thread count") {
    const auto& m = scene().slices;
    rc::Options one, many;
    many.threads = 4;
    CHECK(rc::rsd(m, kBox, one).field == rc::rsd(m, kBox, many).field);
    CHECK(rc::srsd(m, shrinking_frustum(), one).field == rc::srsd(m, shrinking_frustum(), many).field);
    const auto curved = with_relay(m, curved_wall());
    CHECK(rc::nursd3d(curved, kBox, one).field == rc::nursd3d(curved, kBox, many).field);
}

TEST_CASE("compatibility table is enforced") {
    const auto& m = scene().slices;
    CHECK_THROWS_AS((void)rc::reconstruct(with_relay(m, as_planar(kWall)), kBox, rc::Algorithm::Rsd, {}),
                    ValidationError);
    CHECK_THROWS_AS((void)rc::reconstruct(m, kBox, rc::Algorithm::Nursd1, {}), ValidationError);
    CHECK_THROWS_AS((void)rc::reconstruct(m, kBox, rc::Algorithm::Srsd, {}), ValidationError);
    CHECK_THROWS_AS((void)rc::reconstruct(m, explicit_from(kBox), rc::Algorithm::Rsd3d, {}), ValidationError);
    try {
        (void)rc::reconstruct(with_relay(m, as_planar(kWall)), kBox, rc::Algorithm::Rsd, {});
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nursd1") != std::string::npos);
    }
    for (auto a : {rc::Algorithm::Rsd, rc::Algorithm::Srsd, rc::Algorithm::Nursd1, rc::Algorithm::Nursd2,
                   rc::Algorithm::Nursd3, rc::Algorithm::Rsd3d, rc::Algorithm::Nursd3d, rc::Algorithm::SrsdNursd2})
        CHECK(rc::parse_algorithm(rc::algorithm_name(a)) == a);
    CHECK_THROWS_AS((void)rc::parse_algorithm("fbp"), ValidationError);
}

TEST_CASE("invalid geometry is rejected") {
    const auto& m = scene().slices;
    auto box = kBox;
    box.dx = 0.03;
    CHECK_THROWS_AS((void)rc::rsd(m, box), ValidationError);
    box = kBox;
    box.z0 = -0.1;
    CHECK_THROWS_AS((void)rc::rsd(m, box), ValidationError);
    auto f = shrinking_frustum();
    f.planes[1].alpha = 1.5;
    CHECK_THROWS_AS((void)rc::srsd(m, f), ValidationError);
    ExplicitGrid e;
    e.groups.push_back({0.5, 1.0, 1.0, {}});
    CHECK_THROWS_AS((void)rc::nursd2(m, e), ValidationError);
    rc::Options o;
    o.eps = 0.5;
    CHECK_THROWS_AS((void)rc::nursd1(with_relay(m, as_planar(kWall)), kBox, o), ValidationError);
}

TEST_CASE("light transport video") {
    const auto& m = scene().slices;
    rc::Options o;
    const auto still = rc::rsd(m, kBox, o);
    const auto one = rc::light_transport_video(m, kBox, rc::Algorithm::Rsd, {0.0}, o);
    CHECK(one.field == still.field);

    // one frequency: frame magnitudes do not change with time
    auto single = m;
    single.frequencies = {m.frequencies[1]};
    single.coefficients.clear();
    for (std::size_t p = 0; p < m.n_illum(); ++p)
        for (std::size_t c = 0; c < m.n_detect(); ++c) single.coefficients.push_back(m.coefficients[m.index(p, c, 1)]);
    const auto v = rc::light_transport_video(single, kBox, rc::Algorithm::Rsd, {0.0, 1e-9, 3.3e-9}, o);
    for (std::size_t t = 1; t < 3; ++t)
        for (std::size_t i = 0; i < v.frame(0).size(); ++i)
            CHECK(std::abs(v.frame(t)[i]) == doctest::Approx(std::abs(v.frame(0)[i])).epsilon(1e-9));
    CHECK_THROWS_AS((void)rc::light_transport_video(m, kBox, rc::Algorithm::Rsd, {}, o), ValidationError);
}

TEST_CASE("max-depth projection") {
    CuboidGrid g{3, 2, 4, 1, 1, 1, 0, 0, 1};
    ReconstructionVolume v;
    v.grid = g;
    v.field.assign(g.size(), cplx{});
    v.field[2 * 6 + 4] = {0.0, 2.0};
    auto p = rc::project_max_depth(v);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(p.image[i] == (i == 4 ? 2.0 : 0.0));
        CHECK(p.depth[i] == (i == 4 ? 2u : 0u));
    }

    std::fill(v.field.begin(), v.field.end(), cplx{1.5, 0.0});
    p = rc::project_max_depth(v);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(p.image[i] == 1.5);
        CHECK(p.depth[i] == 0u);
    }

    // threshold against a sort-based cut
    std::mt19937_64 rng(11);
    v.field = random_complex(g.size(), rng);
    std::vector<double> mags;
    for (auto x : v.field) mags.push_back(std::abs(x));
    auto sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    const double cut = sorted[static_cast<std::size_t>(0.3 * 24)];
    p = rc::project_max_depth(v, 0.3);
    for (std::size_t i = 0; i < 6; ++i) {
        double best = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double x = mags[k * 6 + i];
            if (x >= cut) best = std::max(best, x);
        }
        CHECK(p.image[i] == best);
    }
    CHECK_THROWS_AS((void)rc::project_max_depth(v, 1.0), ValidationError);
}
