#include "support/cli_harness.hpp"
#include "support/random_spaces.hpp"

#include "ugw/bounds.hpp"
#include "ugw/io.hpp"
#include "ugw/mds.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace ugw;
using testing::run_cli;

namespace {

std::string two_point_json(double a) {
    return "{\"u\": [[0, " + format_double(a) + "], [" + format_double(a) + ", 0]], \"mu\": [0.5, 0.5]}";
}

double coord_dist(const Matrix& c, Eigen::Index i, Eigen::Index j) { return (c.row(i) - c.row(j)).norm(); }

}  // namespace

TEST_CASE("mds on small configurations") {
    const auto two = classical_mds(Matrix{{0, 1}, {1, 0}}, 1);
    CHECK(std::abs(std::abs(two.coordinates(0, 0)) - 0.5) <= 1e-12);
    CHECK(two.coordinates(0, 0) == doctest::Approx(-two.coordinates(1, 0)));
    CHECK(two.warnings.empty());

    const auto tri = classical_mds(Matrix{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, 2);
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) CHECK(std::abs(coord_dist(tri.coordinates, i, j) - 1.0) <= 1e-10);

    CHECK_THROWS(classical_mds(Matrix{{0, 1}, {1, 0}}, 3));
    CHECK_THROWS(classical_mds(Matrix{{0, 1}, {2, 0}}, 1));
    CHECK_THROWS(classical_mds(Matrix{{0, -1}, {-1, 0}}, 1));

    // Star metric: not Euclidean, so the spectrum has a negative part.
    const Matrix star{{0, 1, 1, 1}, {1, 0, 2, 2}, {1, 2, 0, 2}, {1, 2, 2, 0}};
    const auto s = classical_mds(star, 4);
    CHECK_FALSE(s.warnings.empty());
    CHECK(s.eigenvalues.minCoeff() < 0.0);
    for (Eigen::Index k = 0; k < 4; ++k)
        if (s.eigenvalues(k) < 0.0) CHECK(s.coordinates.col(k).isZero());
}

TEST_CASE("mds recovers Euclidean distances") {
    SplitMix64 rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(10)), dim = 1 + static_cast<Eigen::Index>(rng.below(3));
        Matrix pts(n, dim);
        for (Eigen::Index k = 0; k < pts.size(); ++k) pts.data()[k] = rng.normal();
        Matrix d(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) d(i, j) = coord_dist(pts, i, j);
        const auto r = classical_mds(d, static_cast<std::size_t>(dim));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) CHECK(std::abs(coord_dist(r.coordinates, i, j) - d(i, j)) <= 1e-8);
    }
}

TEST_CASE("csv matrices round trip exactly") {
    SplitMix64 rng(92);
    LabelledMatrix m{{"a", "b", "c"}, Matrix(3, 3)};
    for (Eigen::Index k = 0; k < 9; ++k) m.values.data()[k] = rng.uniform(0, 1) / 3.0;
    const std::string text = write_matrix_csv(m, "note");
    CHECK(text.rfind("# note\n", 0) == 0);
    const LabelledMatrix back = read_matrix_csv(text);
    CHECK(back.ids == m.ids);
    CHECK(back.values == m.values);
    CHECK_THROWS_AS(read_matrix_csv("id,a\nb,1\n"), ParseError);
}

TEST_CASE("exit codes") {
    testing::TempDir dir("exit");
    const auto good = dir.write("good.json", two_point_json(1.0));
    const auto bad = dir.write("bad.json", "{\"u\": [[0, 1], [2, 0]], \"mu\": [0.5, 0.5]}");
    const auto broken = dir.write("broken.json", "{\"u\": [[0, 1]");
    const auto big = dir.write("big.json", space_to_json(equidistant_space(9, 1.0)).dump());
    CHECK(run_cli({"validate", good}).code == cli::kOk);
    CHECK(run_cli({"validate", bad}).code == cli::kInvalid);
    CHECK(run_cli({"validate", broken}).code == cli::kParseFailure);
    CHECK(run_cli({"usturm", big, good}).code == cli::kRefused);
    CHECK(run_cli({"ugw", good, good, "--bogus"}).code == cli::kInvalid);
    CHECK(run_cli({}).code == cli::kInvalid);
    CHECK(run_cli({"wasserstein", "--ground", "quantile", "--alpha", R"({"x":[1],"m":[1]})", "--beta",
                   R"({"x":[2],"m":[1]})", "--p", "1", "--q", "2"}).code == cli::kRefused);
    CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("matrix examples") {
    testing::TempDir dir("matrix");
    const auto a = dir.write("a.json", two_point_json(1.0));
    const auto a2 = dir.write("a2.json", two_point_json(1.0));
    const auto b = dir.write("b.json", two_point_json(2.0));

    const auto same = run_cli({"matrix", a, a2, "--which", "uslb"});
    REQUIRE(same.code == 0);
    CHECK(parse_json(same.out)["matrix"] == parse_json("[[0.0,0.0],[0.0,0.0]]"));

    const auto inf = run_cli({"matrix", a, b, "--which", "ugw-inf", "--format", "csv"});
    REQUIRE(inf.code == 0);
    const auto m = read_matrix_csv(inf.out);
    CHECK(m.ids == std::vector<std::string>{"a", "b"});
    CHECK(m.values(0, 1) == 2.0);
    CHECK(m.values(1, 0) == 2.0);

    // Entries match pairwise bound calls bit for bit.
    SplitMix64 rng(93);
    std::vector<std::string> files;
    std::vector<UmSpace> spaces;
    for (int k = 0; k < 4; ++k) {
        spaces.push_back(testing::random_ultrametric(rng, 3 + rng.below(4)));
        files.push_back(dir.write("r" + std::to_string(k) + ".json", space_to_json(spaces.back()).dump()));
    }
    std::vector<std::string> args{"matrix"};
    args.insert(args.end(), files.begin(), files.end());
    args.insert(args.end(), {"--which", "uslb", "--p", "2"});
    const auto out = parse_json(run_cli(args).out);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const double v = out["matrix"][i][j].get<double>();
            CHECK(v == (i == j ? 0.0 : uslb(spaces[i], spaces[j], 2.0)));
            const auto pair = parse_json(run_cli({"bounds", files[i], files[j], "--which", "uslb", "--p", "2"}).out);
            if (i != j) CHECK(pair["uslb"].get<double>() == v);
        }

    // A matrix is directly usable by mds.
    dir.write("m.csv", inf.out);
    const auto mds = run_cli({"mds", dir.file("m.csv"), "--dim", "1"});
    REQUIRE(mds.code == 0);
    CHECK(std::abs(parse_json(mds.out)["coordinates"][0][0].get<double>()) == doctest::Approx(1.0));
}

TEST_CASE("invalid corpus entries") {
    testing::TempDir dir("skip");
    const auto a = dir.write("a.json", two_point_json(1.0));
    const auto b = dir.write("b.json", two_point_json(2.0));
    const auto bad = dir.write("bad.json", "{\"u\": [[0, 1], [2, 0]], \"mu\": [0.5, 0.5]}");
    const auto fail = run_cli({"matrix", a, b, bad, "--which", "uslb"});
    CHECK(fail.code == cli::kInvalid);
    CHECK(fail.err.find("bad.json") != std::string::npos);
    const auto skip = run_cli({"matrix", a, b, bad, "--which", "uslb", "--skip-invalid"});
    REQUIRE(skip.code == 0);
    CHECK(parse_json(skip.out)["skipped"].size() == 1);
}

TEST_CASE("config file precedence") {
    testing::TempDir dir("config");
    const auto a = dir.write("a.json", two_point_json(1.0));
    const auto b = dir.write("b.json", two_point_json(2.0));
    const auto cfg = dir.write("cfg.json", R"({"p": 2, "which": "uslb"})");
    const auto from_file = parse_json(run_cli({"bounds", a, b, "--config", cfg}).out);
    CHECK(from_file["config"]["p"] == 2);
    CHECK(from_file.contains("uslb"));
    CHECK_FALSE(from_file.contains("utlb"));
    CHECK(from_file["uslb"].get<double>() == doctest::Approx(std::sqrt(0.5) * 2.0));
    const auto flag = parse_json(run_cli({"bounds", a, b, "--config", cfg, "--p", "1"}).out);
    CHECK(flag["config"]["p"] == 1);
    CHECK(flag["uslb"].get<double>() == doctest::Approx(1.0));
    const auto defaults = parse_json(run_cli({"bounds", a, b}).out);
    CHECK(defaults["config"]["p"] == 1);
    CHECK(defaults.contains("utlb"));
}

TEST_CASE("outputs are deterministic and record the seed") {
    testing::TempDir dir("determinism");
    for (int k = 0; k < 4; ++k)
        REQUIRE(run_cli({"gen", "--seed", std::to_string(k), "--subsample", "6", "--samples-per-block", "20", "--k", "2",
                         "--out", dir.file("g" + std::to_string(k) + ".json")})
                    .code == 0);
    const std::vector<std::string> base{"matrix", "--dir", dir.path().string(), "--which", "ugw-fw", "--restarts", "3",
                                        "--iterations", "100", "--seed", "11"};
    auto with_threads = [&](const std::string& t) {
        auto args = base;
        args.insert(args.end(), {"--threads", t});
        return run_cli(args);
    };
    const auto r1 = with_threads("1"), r2 = with_threads("1"), r4 = with_threads("4");
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out == r4.out);
    CHECK(parse_json(r1.out)["config"]["seed"] == 11);
    CHECK(parse_json(run_cli({"gen", "--seed", "5"}).out)["config"]["seed"] == 5);
}

TEST_CASE("ingest, quotient and perturb subcommands") {
    testing::TempDir dir("ingest");
    const auto tree = dir.write("t.nwk", "(((A,B),C),D);");
    const auto ingest = run_cli({"ingest", "--newick", tree, "--unit-edges"});
    REQUIRE(ingest.code == 0);
    const UmSpace s = space_from_json(parse_json(ingest.out));
    CHECK(s.u()(3, 3) == 2.0);
    CHECK(run_cli({"ingest", "--newick", tree}).code == cli::kInvalid);
    CHECK(run_cli({"ingest", "--newick", dir.write("bad.nwk", "((A,B);")}).code == cli::kParseFailure);

    const auto space = dir.write("s.json", space_to_json(testing::random_ultrametric(*std::make_shared<SplitMix64>(4), 6)).dump());
    CHECK(run_cli({"quotient", space, "--t", "1"}).code == 0);
    const auto pert = run_cli({"perturb", space, "--t", "0.5", "--seed", "3", "--out", dir.file("p.json")});
    REQUIRE(pert.code == 0);
    const auto inf = parse_json(run_cli({"ugw-inf", space, dir.file("p.json")}).out);
    CHECK(inf["value"].get<double>() <= 0.5);
}
