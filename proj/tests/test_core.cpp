#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <cstring>
#include <random>

#include "nlos/dataset.hpp"
#include "test_support.hpp"

using namespace nlos;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "nlos_core_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

TransientMeasurement small_measurement(RelaySampling relay, bool confocal) {
    TransientMeasurement m;
    m.relay = std::move(relay);
    m.confocal = confocal;
    if (!confocal) m.illuminations = {{0.1, 0.2, 0.0}, {-0.3, 0.0, 0.05}};
    m.n_bins = 7;
    m.dt = 1.5e-11;
    m.t0 = 2e-10;
    m.histograms.resize(m.n_illum() * m.n_detect() * m.n_bins);
    std::mt19937 rng(5);
    std::uniform_real_distribution<float> u(0.0f, 10.0f);
    for (auto& h : m.histograms) h = u(rng);
    return m;
}

std::vector<char> bytes_of(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& b) {
    std::ofstream os(p, std::ios::binary);
    os.write(b.data(), static_cast<std::streamsize>(b.size()));
}

} // namespace

TEST_CASE("uniform grid coordinates are row-major, x fastest") {
    const UniformGrid2D g{3, 2, 0.5, 0.25, -1.0, 2.0, 0.0};
    const auto pts = grid_coordinates(g);
    REQUIRE(pts.size() == 6);
    CHECK(pts.points[1].x == -0.5);
    CHECK(pts.points[1].y == 2.0);
    CHECK(pts.points[3].x == -1.0);
    CHECK(pts.points[3].y == 2.25);
    CHECK(pts.points[5].x == 0.0);
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS((UniformGrid2D{0, 2, 1, 1, 0, 0, 0}.validate()), ValidationError);
    CHECK_THROWS_AS((UniformGrid2D{2, 2, -1, 1, 0, 0, 0}.validate()), ValidationError);
    CHECK_THROWS_AS((UniformGrid2D{2, 2, 1, 1, NAN, 0, 0}.validate()), ValidationError);
    PointList empty;
    CHECK_THROWS_AS(empty.validate(), ValidationError);
    NonPlanar flat;
    flat.points.dim = 2;
    flat.points.points = {{0, 0, 0}};
    CHECK_THROWS_AS(validate_relay(flat), ValidationError);

    CuboidGrid c{2, 2, 3, 0.1, 0.1, 0.2, 0, 0, 0.5};
    CHECK(voxel_count(c) == 12);
    CHECK(plane_count(c) == 3);
    CHECK(voxel_positions(c)[11].z == doctest::Approx(0.9));
    CHECK(grid_kind(c) == GridKind::Cuboid);
}

TEST_CASE("frustum planes grow about the base center") {
    const UniformGrid2D base{4, 4, 1.0, 1.0, 0.0, 0.0, 0.0};
    const auto f = FrustumGrid::linear(base, 3, 1.0, 0.5, 0.5);
    REQUIRE(f.planes.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto p = f.plane(k);
        CHECK(p.x0 + 0.5 * p.dx * 3.0 == doctest::Approx(1.5));
        CHECK(p.dx == doctest::Approx(1.0 / f.planes[k].alpha));
    }
    CHECK(f.planes[0].alpha == doctest::Approx(1.0));
}

TEST_CASE("distance") {
    CHECK(distance({0, 0, 0}, {3, 4, 12}) == doctest::Approx(13.0));
}

TEST_CASE("measurement container round trips every relay kind") {
    NonUniformPlanar planar;
    planar.points.dim = 2;
    planar.points.points = {{0.1, 0.2, 0}, {-0.4, 0.3, 0}, {0.0, 0.0, 0}};
    planar.z = 0.25;
    NonPlanar curved;
    curved.points.points = {{0.1, 0.2, 0.01}, {-0.4, 0.3, -0.02}};
    const std::vector<RelaySampling> relays = {UniformGrid2D{3, 2, 0.1, 0.2, -0.1, -0.2, 0.0}, planar, curved};
    for (const auto& relay : relays)
        for (bool confocal : {false, true}) {
            const auto m = small_measurement(relay, confocal);
            const auto path = scratch("m.nls1");
            write_dataset(m, path);
            const auto r = read_dataset(path);
            CHECK(r.histograms == m.histograms);
            CHECK(r.confocal == confocal);
            CHECK(r.n_bins == m.n_bins);
            CHECK(r.dt == m.dt);
            CHECK(r.t0 == m.t0);
            CHECK(relay_kind(r.relay) == relay_kind(m.relay));
            CHECK(r.illuminations.size() == m.illuminations.size());
            const auto a = relay_points(r.relay), b = relay_points(m.relay);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].x == b[i].x);
                CHECK(a[i].y == b[i].y);
                CHECK(a[i].z == b[i].z);
            }
            CHECK(std::filesystem::exists(path.string() + ".json"));
            CHECK_FALSE(is_volume_file(path));
        }
}

TEST_CASE("container decoding errors are typed") {
    const auto m = small_measurement(UniformGrid2D{2, 2, 0.1, 0.1, 0, 0, 0}, false);
    const auto path = scratch("bad.nls1");
    write_dataset(m, path);
    const auto good = bytes_of(path);

    auto kind_of = [&](const std::vector<char>& b) {
        write_bytes(path, b);
        try {
            (void)read_dataset(path);
        } catch (const DatasetError& e) {
            return e.kind();
        }
        FAIL("expected a decoding error");
        return DatasetErrorKind::Malformed;
    };
    auto b = good;
    b[0] = 'X';
    CHECK(kind_of(b) == DatasetErrorKind::BadMagic);
    b = good;
    b[4] = 9;
    CHECK(kind_of(b) == DatasetErrorKind::VersionMismatch);
    b = good;
    b.resize(b.size() - 3);
    CHECK(kind_of(b) == DatasetErrorKind::Truncated);
    b = good;
    b.push_back(0);
    CHECK(kind_of(b) == DatasetErrorKind::Malformed);
    b = good;
    const float nan = NAN;
    std::memcpy(b.data() + b.size() - 4, &nan, 4);
    CHECK(kind_of(b) == DatasetErrorKind::NonFinite);

    CHECK_THROWS_AS((void)read_dataset(scratch("missing.nls1")), IoError);
}

TEST_CASE("volume container round trips with frames") {
    ReconstructionVolume v;
    v.grid = CuboidGrid{2, 3, 2, 0.1, 0.1, 0.1, 0, 0, 0.5};
    v.times = {0.0, 1e-9};
    std::mt19937_64 rng(9);
    v.field = testing::random_complex(24, rng);
    for (auto& x : v.field) x = {static_cast<float>(x.real()), static_cast<float>(x.imag())};
    const auto path = scratch("v.nls1");
    write_volume(v, path);
    CHECK(is_volume_file(path));
    const auto r = read_volume(path);
    CHECK(r.field == v.field);
    CHECK(r.times == v.times);
    CHECK(grid_kind(r.grid) == GridKind::Cuboid);
    CHECK_THROWS_AS((void)read_dataset(path), DatasetError);

    ExplicitGrid e;
    e.groups.push_back({0.4, 0.5, 0.7, {{0.0, 0.1}, {0.2, -0.3}}});
    v.grid = e;
    v.times = {};
    v.field.resize(2);
    write_volume(v, path);
    const auto r2 = read_volume(path);
    const auto& g = std::get<ExplicitGrid>(r2.grid);
    CHECK(g.groups[0].alpha == 0.5);
    CHECK(g.groups[0].beta == 0.7);
    CHECK(g.groups[0].xy[1][1] == -0.3);
}
