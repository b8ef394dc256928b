// Acceptance runner: one line per criterion, nonzero exit if any fails.

#include "support/cli_harness.hpp"
#include "support/oracles.hpp"
#include "support/random_spaces.hpp"
#include "support/random_trees.hpp"

#include "ugw/bounds.hpp"
#include "ugw/canonical.hpp"
#include "ugw/gw.hpp"
#include "ugw/io.hpp"
#include "ugw/phylo.hpp"
#include "ugw/synth.hpp"
#include "ugw/transport.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace ugw;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

Matrix pow_cost(const Matrix& c, double p) {
    return c.unaryExpr([p](double v) { return std::pow(v, p); });
}

double transport_norm(const Matrix& c, const Vector& a, const Vector& b, double p) {
    if (is_inf(p)) return exact_ot(c, a, b, OtMode::max).value;
    return std::pow(exact_ot(pow_cost(c, p), a, b).value, 1.0 / p);
}

ScalarMeasure random_measure(SplitMix64& rng, std::size_t atoms) {
    std::vector<double> x, m;
    for (std::size_t k = 0; k < atoms; ++k) {
        x.push_back(rng.below(4) == 0 ? 0.5 * static_cast<double>(rng.below(5)) : rng.uniform(0.0, 3.0));
        m.push_back(rng.uniform(0.05, 1.0));
    }
    double total = 0.0;
    for (double v : m) total += v;
    for (double& v : m) v /= total;
    return ScalarMeasure(x, m);
}

double scalar_exact(const ScalarMeasure& a, const ScalarMeasure& b, double p, const std::function<double(double, double)>& c) {
    Matrix cost(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    Vector ma(cost.rows()), mb(cost.cols());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma(static_cast<Eigen::Index>(i)) = a.atoms()[i].mass;
        for (std::size_t j = 0; j < b.size(); ++j)
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(a.atoms()[i].x, b.atoms()[j].x);
    }
    for (std::size_t j = 0; j < b.size(); ++j) mb(static_cast<Eigen::Index>(j)) = b.atoms()[j].mass;
    return transport_norm(cost, ma, mb, p);
}

FwConfig fw_config(std::uint64_t seed, std::size_t restarts = 10, std::size_t iterations = 1000) {
    FwConfig c;
    c.restarts = restarts;
    c.iterations = iterations;
    c.seed = seed;
    return c;
}

Outcome closed_forms() {
    Outcome o;
    SplitMix64 rng(1001);
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const UmSpace x = testing::random_ultrametric(rng, n, {.grid = trial % 2 ? 0.25 : 0.0});
        const Vector a = testing::random_mass(rng, n), b = testing::random_mass(rng, n);
        for (double p : {1.0, 2.0, kInf})
            o.require(std::abs(w_ultrametric(x, a, b, p) - transport_norm(x.u(), a, b, p)) <= 1e-8, "w_ultrametric");
    }
    for (int trial = 0; trial < 200; ++trial) {
        const ScalarMeasure a = random_measure(rng, 1 + rng.below(8)), b = random_measure(rng, 1 + rng.below(8));
        for (double p : {1.0, 2.0, kInf})
            o.require(std::abs(w_halfline(a, b, p) - scalar_exact(a, b, p, testing::ultra_cost)) <= 1e-8, "w_halfline");
    }
    for (int trial = 0; trial < 200; ++trial) {
        const ScalarMeasure a = random_measure(rng, 1 + rng.below(8)), b = random_measure(rng, 1 + rng.below(8));
        for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {2.0, 2.0}, {3.0, 2.0}, {kInf, 1.0}, {kInf, 3.0}}) {
            const double v = scalar_exact(a, b, p, [q = q](double s, double t) { return lambda(s, t, q); });
            o.require(std::abs(w_quantile(a, b, p, q) - v) <= 1e-8, "w_quantile");
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 30.0, "runtime over 30 s");
    return o;
}

Outcome two_point_family() {
    Outcome o;
    SplitMix64 rng(1002);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = rng.uniform(1, 2);
        double b = rng.uniform(1, 2);
        while (b == a) b = rng.uniform(1, 2);
        const UmSpace x = testing::two_point(a), y = testing::two_point(b);
        o.require(ugw_inf_exact(x, y).value == std::max(a, b), "ugw_inf != max(a, b)");
        o.require(std::abs(ugw_fw(x, y, 1.0, fw_config(static_cast<std::uint64_t>(trial))).value - 0.5 * std::max(a, b)) <= 1e-6,
                  "ugw_fw != max(a, b) / 2");
    }
    return o;
}

Outcome diameter_gap() {
    Outcome o;
    SplitMix64 rng(1003);
    int pairs = 0;
    while (pairs < 50) {
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(7), {.max_height = 1.5});
        const UmSpace y = testing::random_ultrametric(rng, 2 + rng.below(7), {.max_height = 2.5});
        const double dy = diam_p(y, kInf);
        if (!(diam_p(x, kInf) < dy)) continue;
        ++pairs;
        o.require(quantize(ugw_inf_exact(x, y).value) == quantize(dy), "ugw_inf != diam Y");
        o.require(quantize(ugh_exact(x, y).value) == quantize(dy), "ugh != diam Y");
    }
    return o;
}

Outcome one_point() {
    Outcome o;
    SplitMix64 rng(1004);
    for (int trial = 0; trial < 50; ++trial) {
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(10));
        for (double p : {1.0, 2.0})
            o.require(ugw_fw(x, one_point_space(), p, fw_config(static_cast<std::uint64_t>(trial), 4, 200)).value == diam_p(x, p),
                      "ugw_fw(X, point) != diam_p(X)");
    }
    return o;
}

Outcome sturm() {
    Outcome o;
    const UmSpace x = testing::two_point(1.0);
    for (int n = 1; n <= 5; ++n)
        for (double p : {1.0, 2.0, kInf}) {
            const double expected = (is_inf(p) ? 1.0 : std::pow(2.0, -1.0 / p)) * (1.0 + 1.0 / n);
            o.require(std::abs(usturm_bruteforce(x, testing::two_point(1.0 + 1.0 / n), p).value - expected) <= 1e-9,
                      "two-point family value");
        }
    SplitMix64 rng(1005);
    for (int trial = 0; trial < 50; ++trial) {
        const testing::RandomSpaceOptions opt{.grid = 0.5};
        const UmSpace a = testing::random_ultrametric(rng, 1 + rng.below(5), opt);
        const UmSpace b = testing::random_ultrametric(rng, 1 + rng.below(5), opt);
        o.require(std::abs(usturm_bruteforce(a, b, kInf).value - ugw_inf_exact(a, b).value) <= 1e-9,
                  "p = inf differs from ugw_inf");
    }
    return o;
}

Outcome bound_chain() {
    Outcome o;
    SplitMix64 rng(1006);
    for (int trial = 0; trial < 200; ++trial) {
        const testing::RandomSpaceOptions opt{.grid = trial % 2 ? 0.5 : 0.0};
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(7), opt);
        const UmSpace y = testing::random_ultrametric(rng, 1 + rng.below(7), opt);
        const double s1 = uslb(x, y, 1.0), t1 = utlb(x, y, 1.0);
        const double fw = ugw_fw(x, y, 1.0, fw_config(static_cast<std::uint64_t>(trial), 4, 300)).value;
        o.require(s1 <= t1 + 1e-9 && t1 <= fw + 1e-9, "p = 1 chain");
        const double inf = ugw_inf_exact(x, y).value;
        o.require(uslb(x, y, kInf) <= utlb(x, y, kInf) && utlb(x, y, kInf) <= inf, "p = inf chain");
        const double f = uflb(x, y, kInf);
        o.require(f == lambda(diam_p(x, kInf), diam_p(y, kInf), kInf) && f <= inf, "uflb_inf");
    }
    return o;
}

Outcome slb_decomposition() {
    Outcome o;
    SplitMix64 rng(1007);
    for (int trial = 0; trial < 200; ++trial) {
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(8), {.grid = trial % 2 ? 0.25 : 0.0});
        const UmSpace y = testing::random_ultrametric(rng, 1 + rng.below(8), {.grid = trial % 2 ? 0.25 : 0.0});
        const auto d = uslb1_decomposition(x, y);
        o.require(std::abs(d.uslb1 - (d.slb1 + d.weighted_tv)) <= 1e-10, "decomposition");
    }
    Vector m1(3), m2(3);
    m1 << 2.0 / 3, 1.0 / 6, 1.0 / 6;
    const double c = 0.5 / std::sqrt(3.0);
    m2 << 1.0 / 3, 1.0 / 3 - c, 1.0 / 3 + c;
    const UmSpace x = equidistant_space(1.0, m1), y = equidistant_space(1.0, m2);
    for (double p : {1.0, 2.0, kInf}) o.require(uslb(x, y, p) == 0.0 && utlb(x, y, p) > 0.0, "uslb = 0 < utlb pair");
    return o;
}

Outcome first_bound_counterexample() {
    Outcome o;
    const int n = 4;
    Matrix ux = Matrix::Constant(n, n, 2.0), uy = Matrix::Constant(n, n, 2.0);
    ux.diagonal().setZero();
    uy.diagonal().setZero();
    ux(0, 1) = ux(1, 0) = 1.0;
    const UmSpace x(ux, uniform_mass(n)), y(uy, uniform_mass(n));
    const double f = uflb(x, y, 1.0);
    o.require(std::abs(f - 0.75) <= 1e-10, "uFLB_1 != 0.75");
    const Matrix diag = Matrix::Identity(n, n) / n;
    const double upper = dis_ult(x, y, diag, 1.0);
    o.require(is_coupling(diag, x.mu(), y.mu()) && upper <= 0.25 + 1e-12, "certified upper bound above 0.25");
    o.require(f > upper, "uFLB_1 does not exceed the upper bound");
    return o;
}

Outcome gradient() {
    Outcome o;
    SplitMix64 rng(1009);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const UmSpace x = testing::random_ultrametric(rng, 2 + rng.below(4));
        const UmSpace y = testing::random_ultrametric(rng, 2 + rng.below(4));
        const Matrix pi = hitrun_couplings(x.mu(), y.mu(), 1, 20, rng())[0];
        for (double p : {1.0, 2.0}) {
            const Matrix g = distortion_gradient(x, y, pi, p);
            Matrix fd(g.rows(), g.cols());
            const double h = 1e-6;
            for (Eigen::Index k = 0; k < pi.size(); ++k) {
                Matrix up = pi, down = pi;
                up.data()[k] += h;
                down.data()[k] -= h;
                fd.data()[k] = (testing::distortion_functional(x, y, up, p, true) -
                                testing::distortion_functional(x, y, down, p, true)) / (2 * h);
            }
            const double rel = (g - fd).norm() / fd.norm();
            worst = std::max(worst, rel);
            o.require(rel <= 1e-5, "relative error above 1e-5");
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max relative error %.1e", worst);
    if (o.pass) o.detail = buf;
    return o;
}

Outcome metric_axioms() {
    Outcome o;
    SplitMix64 rng(1010);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const testing::RandomSpaceOptions opt{.grid = trial % 2 ? 0.5 : 0.0};
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(6), opt);
        const UmSpace y = trial % 5 == 0 ? testing::permuted(x, testing::random_permutation(rng, x.size()))
                                         : testing::random_ultrametric(rng, 1 + rng.below(6), opt);
        const UmSpace z = testing::random_ultrametric(rng, 1 + rng.below(6), opt);
        const double xy = ugw_inf_exact(x, y).value, yz = ugw_inf_exact(y, z).value, xz = ugw_inf_exact(x, z).value;
        if (xy != ugw_inf_exact(y, x).value || xz > std::max(xy, yz) || ugw_inf_exact(x, x).value != 0.0) ++failures;
    }
    o.require(failures == 0, std::to_string(failures) + " failures");
    return o;
}

Outcome block_matching_suite() {
    Outcome o;
    SplitMix64 rng(1011);
    std::vector<UmSpace> suite;
    while (suite.size() < 30) {
        if (!suite.empty() && rng.below(4) == 0) {
            const UmSpace& base = suite[rng.below(suite.size())];
            suite.push_back(testing::permuted(base, testing::random_permutation(rng, base.size())));
            continue;
        }
        const std::size_t n = 1 + rng.below(5);
        suite.emplace_back(testing::random_ultrametric_matrix(rng, n, {.grid = 0.5, .max_height = 2.0}),
                           rng.below(2) ? uniform_mass(n) : testing::grid_mass(rng, n, n + 1));
    }
    int pairs = 0;
    for (std::size_t i = 0; i < suite.size(); ++i)
        for (std::size_t j = 0; j < suite.size(); ++j, ++pairs)
            o.require(ugw_inf_exact(suite[i], suite[j]).value == testing::ugw_inf_bruteforce(suite[i], suite[j]),
                      "pair " + std::to_string(i) + "," + std::to_string(j));
    if (o.pass) o.detail = std::to_string(pairs) + " ordered pairs";
    return o;
}

Outcome phylo_pipeline() {
    Outcome o;
    const Matrix caterpillar{{0, 1, 2, 3}, {1, 0, 2, 3}, {2, 2, 1, 3}, {3, 3, 3, 2}};
    const Matrix balanced{{0, 1, 2, 2}, {1, 0, 2, 2}, {2, 2, 0, 1}, {2, 2, 1, 0}};
    o.require(tree_shape_space(parse_newick("(((A,B),C),D);"), true).u() == caterpillar, "caterpillar");
    o.require(tree_shape_space(parse_newick("((A,B),(C,D));"), true).u() == balanced, "balanced tree");
    SplitMix64 rng(1012);
    for (int trial = 0; trial < 500; ++trial) {
        const PhyloTree t = testing::random_phylo_tree(rng);
        const std::string text = write_newick(t);
        const PhyloTree back = parse_newick(text);
        o.require(same_tree(t, back) && write_newick(back) == text, "Newick round trip");
    }
    for (int trial = 0; trial < 100; ++trial) {
        const UmSpace x = testing::random_ultrametric(rng, 1 + rng.below(10));
        const double t = rng.uniform(0.0, 2.5);
        o.require(ugw_inf_exact(x, perturb(x, t, rng())).value <= t, "perturbation exceeds t");
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    testing::TempDir dir("acceptance");
    for (int k = 0; k < 20; ++k) {
        const auto r = testing::run_cli({"gen", "--seed", std::to_string(100 + k), "--k", std::to_string(1 + k % 4),
                                         "--samples-per-block", "25", "--subsample", "8", "--out",
                                         dir.file("space" + std::string(k < 10 ? "0" : "") + std::to_string(k) + ".json")});
        o.require(r.code == 0, "gen failed: " + r.err);
    }
    auto run = [&](const std::string& threads, const std::string& format) {
        return testing::run_cli({"matrix", "--dir", dir.path().string(), "--which", "ugw-fw", "--p", "1", "--restarts", "4",
                                 "--iterations", "200", "--seed", "7", "--threads", threads, "--format", format});
    };
    for (const std::string format : {"json", "csv"}) {
        const auto a = run("1", format), b = run("1", format), c = run("8", format);
        o.require(a.code == 0 && !a.out.empty(), "matrix failed: " + a.err);
        o.require(a.out == b.out, format + " differs between runs");
        o.require(a.out == c.out, format + " differs between 1 and 8 threads");
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"closed-form transport agrees with exact transport", closed_forms},
        {"two-point family: ugw_inf = max(a,b), Frank-Wolfe p=1 = max(a,b)/2", two_point_family},
        {"diameter gap: ugw_inf = ugh = diam Y", diameter_gap},
        {"one-point reference: Frank-Wolfe = diam_p", one_point},
        {"Sturm brute force: two-point family and p=inf agreement", sturm},
        {"lower-bound chain", bound_chain},
        {"second lower bound decomposition and uslb=0<utlb pair", slb_decomposition},
        {"first lower bound exceeds a certified ugw_1 upper bound", first_bound_counterexample},
        {"distortion gradient matches finite differences", gradient},
        {"ugw_inf symmetry and max-triangle inequality", metric_axioms},
        {"ugw_inf equals exhaustive block matching", block_matching_suite},
        {"phylo pipeline: hand examples, round trip, perturbation", phylo_pipeline},
        {"matrix output byte-identical across runs and thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2zu: %s (%s%s%.2f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str(), o.detail.empty() ? "" : "; ", secs);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
