#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "ccsketch/ccsketch.hpp"

using namespace ccsketch;

namespace {

std::vector<StreamUpdate> random_stream(std::size_t n, std::uint64_t domain, std::uint32_t seed)
{
    // Insertions only, so every prefix is strict-turnstile.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> idx(0, domain - 1);
    std::uniform_int_distribution<int> inc(1, 50);
    std::vector<StreamUpdate> out(n);
    for (auto& u : out)
        u = {idx(rng), double(inc(rng))};
    return out;
}

std::vector<double> densify(const std::vector<StreamUpdate>& s, std::uint64_t domain)
{
    std::vector<double> v(domain, 0.0);
    for (const auto& u : s)
        v[u.index] += u.increment;
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST(NewSketch, StartsEmpty)
{
    const CCSketch s = new_sketch({1e-4, 3, 7, 100});
    ASSERT_EQ(s.x().size(), 3u);
    for (double x : s.x())
        EXPECT_EQ(x, 0.0);
    EXPECT_EQ(s.f1(), 0.0);
}

TEST(NewSketch, RejectsBadConfig)
{
    EXPECT_THROW(new_sketch({1e-4, 0, 7, 100}), config_error);
    EXPECT_THROW(new_sketch({0.6, 3, 7, 100}), config_error);
    EXPECT_THROW(new_sketch({-1e-3, 3, 7, 100}), config_error);
}

TEST(Update, SingleTerm)
{
    const SketchConfig c{1e-4, 3, 7, 100};
    CCSketch s(c);
    s.update(3, 5.0);
    for (std::uint32_t j = 0; j < 3; ++j)
        EXPECT_EQ(s.x()[j], 5.0 * projection_weight(c, 3, j));
    EXPECT_EQ(s.f1(), 5.0);
}

TEST(Update, InsertThenDeleteCancels)
{
    CCSketch s({1e-4, 3, 7, 100});
    s.update(3, 5.0);
    s.update(3, -5.0);
    for (double x : s.x())
        EXPECT_NEAR(x, 0.0, 1e-14);
    EXPECT_EQ(s.f1(), 0.0);
}

TEST(Update, OutOfDomain)
{
    CCSketch s({1e-4, 2, 7, 100});
    EXPECT_THROW(s.update(100, 1.0), index_error);
    CCSketch u({1e-4, 2, 7, 0});
    EXPECT_NO_THROW(u.update(std::uint64_t{1} << 63, 1.0));
}

TEST(Update, MatchesDenseProjection)
{
    const SketchConfig c{1e-3, 4, 9, 200};
    const auto stream = random_stream(1000, c.domain_size, 1);
    CCSketch s(c);
    for (const auto& u : stream)
        s.update(u);
    const CCSketch d = dense_project(densify(stream, c.domain_size), c);
    for (std::uint32_t j = 0; j < c.k; ++j)
        EXPECT_LE(rel(s.x()[j], d.x()[j]), 1e-10);
    EXPECT_EQ(s.f1(), d.f1());
}

TEST(Update, PermutationTolerance)
{
    const SketchConfig c{1e-3, 4, 9, 500};
    auto stream = random_stream(10000, c.domain_size, 2);
    CCSketch a(c);
    for (const auto& u : stream)
        a.update(u);
    std::shuffle(stream.begin(), stream.end(), std::mt19937_64(3));
    CCSketch b(c);
    for (const auto& u : stream)
        b.update(u);
    for (std::uint32_t j = 0; j < c.k; ++j)
        EXPECT_LE(rel(a.x()[j], b.x()[j]), 1e-10);
    EXPECT_EQ(a.f1(), b.f1());
}

TEST(Update, IntegerFirstMomentIsExact)
{
    const SketchConfig c{1e-3, 1, 9, 1000};
    const auto stream = random_stream(5000, c.domain_size, 4);
    CCSketch s(c);
    double oracle = 0.0;
    for (const auto& u : stream) {
        s.update(u);
        oracle += u.increment;
    }
    EXPECT_EQ(s.f1(), oracle);
}

TEST(Merge, Identity)
{
    const SketchConfig c{1e-4, 3, 7, 100};
    CCSketch s(c);
    s.update(1, 2.0);
    const CCSketch m = merge(s, new_sketch(c));
    EXPECT_TRUE(std::equal(m.x().begin(), m.x().end(), s.x().begin()));
    EXPECT_EQ(m.f1(), s.f1());
}

TEST(Merge, Commutative)
{
    const SketchConfig c{1e-4, 3, 7, 100};
    CCSketch a(c), b(c);
    a.update(1, 2.0);
    b.update(2, 3.5);
    const CCSketch ab = merge(a, b);
    const CCSketch ba = merge(b, a);
    for (std::uint32_t j = 0; j < 3; ++j)
        EXPECT_EQ(ab.x()[j], ba.x()[j]);
}

TEST(Merge, HalvesEqualSinglePass)
{
    const SketchConfig c{1e-4, 5, 11, 300};
    const auto stream = random_stream(1000, c.domain_size, 5);
    CCSketch whole(c), first(c), second(c);
    for (std::size_t t = 0; t < stream.size(); ++t) {
        whole.update(stream[t]);
        (t < stream.size() / 2 ? first : second).update(stream[t]);
    }
    const CCSketch m = merge(first, second);
    for (std::uint32_t j = 0; j < c.k; ++j)
        EXPECT_LE(rel(m.x()[j], whole.x()[j]), 1e-12);
    EXPECT_EQ(m.f1(), whole.f1());
}

TEST(Merge, ConfigMismatch)
{
    CCSketch a({1e-4, 3, 7, 100});
    EXPECT_THROW(a.merge(CCSketch({1e-4, 3, 8, 100})), incompatible_sketch_error);
    EXPECT_THROW(a.merge(CCSketch({1e-4, 2, 7, 100})), incompatible_sketch_error);
    EXPECT_THROW(a.merge(CCSketch({1e-3, 3, 7, 100})), incompatible_sketch_error);
}

TEST(EstimateMoment, SingleSample)
{
    CCSketch s({1e-2, 1, 3, 10});
    s.update(4, 3.0);
    const auto e = s.estimate_moment();
    EXPECT_NEAR(e.value, std::pow(s.x()[0], 1.0 - 1e-2), 1e-14 * e.value);
    EXPECT_EQ(e.k_used, 1u);
    EXPECT_EQ(e.alpha, 1.0 - 1e-2);
}

TEST(EstimateMoment, EmptySketch)
{
    EXPECT_THROW(estimate_moment(new_sketch({1e-4, 2, 1, 10})), non_positive_minimum_error);
}

TEST(EstimateMoment, NetNegativeStream)
{
    CCSketch s({1e-4, 2, 1, 10});
    s.update(1, -2.0);
    EXPECT_THROW(s.estimate_moment(), non_positive_minimum_error);
}

TEST(EstimateMoment, ConcentratesAtSmallGap)
{
    const std::vector<double> ones(100, 1.0);
    const double exact = exact_moment(ones, 1.0 - 1e-5);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double est = dense_project(ones, {1e-5, 2, seed, 100}).estimate_moment().value;
        EXPECT_GE(est, 0.99 * exact) << seed;
        EXPECT_LE(est, 1.01 * exact) << seed;
    }
}

TEST(DenseProject, ZeroAndOneHot)
{
    const SketchConfig c{1e-3, 3, 4, 8};
    const CCSketch z = dense_project(std::vector<double>(8, 0.0), c);
    for (double x : z.x())
        EXPECT_EQ(x, 0.0);
    std::vector<double> e(8, 0.0);
    e[5] = 2.5;
    const CCSketch h = dense_project(e, c);
    for (std::uint32_t j = 0; j < 3; ++j)
        EXPECT_EQ(h.x()[j], 2.5 * projection_weight(c, 5, j));
}

TEST(DenseProject, LengthMismatch)
{
    EXPECT_THROW(dense_project(std::vector<double>(7, 1.0), {1e-3, 3, 4, 8}), dimension_error);
}

// x_j / F^(1/alpha) is standard maximally skewed stable.
TEST(DenseProject, StandardizedLawMatchesCdf)
{
    const double delta = 0.3;
    const double alpha = 1.0 - delta;
    std::vector<double> vec{3.0, 1.0, 0.0, 2.0, 5.0};
    const double scale = std::pow(exact_moment(vec, alpha), 1.0 / alpha);
    constexpr std::size_t n = 100000;
    std::vector<double> z(n);
    for (std::size_t s = 0; s < n; ++s)
        z[s] = dense_project(vec, {delta, 1, s, vec.size()}).x()[0] / scale;
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = stable_cdf(z[i], delta);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    EXPECT_LE(d, 0.006);
}

TEST(ExactMoment, Examples)
{
    EXPECT_EQ(exact_moment(std::vector<double>(37, 1.0), 0.73), 37.0);
    EXPECT_NEAR(exact_moment(std::vector<double>{2.0}, 0.5), std::sqrt(2.0), 1e-15);
    const std::vector<double> v{0.0, 1.5, 2.25, 7.0};
    EXPECT_EQ(exact_moment(v, 1.0), std::accumulate(v.begin(), v.end(), 0.0));
    EXPECT_THROW(exact_moment(std::vector<double>(4, 0.0), 0.9), degenerate_input_error);
    EXPECT_THROW(exact_moment(std::vector<double>{1.0, -1.0}, 0.9), domain_error);
}

TEST(Serialize, RoundTrip)
{
    CCSketch s({1e-6, 4, 0xDEADBEEF, 0});
    s.update(123456789, 2.0);
    s.update(9, 0.5);
    std::stringstream buf;
    write_sketch(buf, s);
    EXPECT_EQ(buf.str().size(), 4 + 1 + 8 + 4 + 8 + 8 + 8 + 4 * 8u);
    const CCSketch r = read_sketch(buf);
    EXPECT_EQ(r.config(), s.config());
    EXPECT_EQ(r.f1(), s.f1());
    EXPECT_TRUE(std::equal(r.x().begin(), r.x().end(), s.x().begin()));
}

TEST(Serialize, LittleEndianLayout)
{
    CCSketch s({0.25, 1, 2, 3});
    std::stringstream buf;
    write_sketch(buf, s);
    const std::string b = buf.str();
    EXPECT_EQ(b.substr(0, 4), "CCSK");
    EXPECT_EQ(b[4], '\x01');
    // 0.25 = 0x3FD0000000000000
    EXPECT_EQ(static_cast<unsigned char>(b[12]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(b[11]), 0xD0);
    EXPECT_EQ(b[13], '\x01'); // k
    EXPECT_EQ(b[17], '\x02'); // seed
    EXPECT_EQ(b[25], '\x03'); // domain
}

TEST(Serialize, RejectsCorruption)
{
    CCSketch s({1e-4, 2, 2, 3});
    std::stringstream good;
    write_sketch(good, s);
    const std::string b = good.str();

    auto read = [](std::string bytes) {
        std::stringstream in(bytes);
        return read_sketch(in);
    };
    std::string bad = b;
    bad[0] = 'X';
    EXPECT_THROW(read(bad), format_error);
    bad = b;
    bad[4] = 2;
    EXPECT_THROW(read(bad), format_error);
    EXPECT_THROW(read(b.substr(0, b.size() - 3)), format_error);
    EXPECT_THROW(read(b + "x"), format_error);
    bad = b;
    bad[13] = 0; // k = 0
    EXPECT_THROW(read(bad), format_error);
}

TEST(StreamIo, ParsesLinesAndComments)
{
    std::istringstream in("# header\n\n3 5\n  7\t-2.5 \n1 +4\n");
    std::vector<StreamUpdate> got;
    const auto n = for_each_update(in, [&](const StreamUpdate& u, std::size_t) { got.push_back(u); });
    ASSERT_EQ(n, 3u);
    EXPECT_EQ(got[1].index, 7u);
    EXPECT_EQ(got[1].increment, -2.5);
    EXPECT_EQ(got[2].increment, 4.0);
}

TEST(StreamIo, MalformedLineIsNumbered)
{
    std::istringstream in("1 1\n2 oops\n");
    try {
        for_each_update(in, [](const StreamUpdate&, std::size_t) {});
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(StreamIo, MaterializeChecksTurnstile)
{
    std::istringstream ok("0 2\n1 3\n0 -1\n");
    const auto v = materialize_stream(ok, 3);
    EXPECT_EQ(v, (std::vector<double>{1.0, 3.0, 0.0}));
    std::istringstream neg("0 2\n0 -3\n");
    EXPECT_THROW(materialize_stream(neg, 3), turnstile_violation_error);
    std::istringstream out("5 1\n");
    EXPECT_THROW(materialize_stream(out, 3), parse_error);
}
