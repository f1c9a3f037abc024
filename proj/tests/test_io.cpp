#include <gtest/gtest.h>

#include "fionf/io.hpp"
#include "support.hpp"

using namespace fionf;

namespace {

exact q(long p, long d = 1) { return exact(make_rational(p, d)); }

std::string pointer_of(const std::function<void()>& f)
{
    try {
        f();
    }
    catch (const schema_violation& e) {
        return e.pointer;
    }
    return "<none>";
}

} // namespace

TEST(Codec, ExactScalars)
{
    for (const exact& c : {q(3, 7), q(-5), exact::i() * q(2, 3) + q(1), exact::tau(), q(1) / (exact::tau() + q(2))}) {
        const json j = codec<exact>::encode(c);
        EXPECT_EQ(codec<exact>::decode(json::parse(j.dump()), ""), c);
    }
}

TEST(Codec, FloatScalars)
{
    const cplx c(0.25, -1.5);
    EXPECT_EQ(codec<cplx>::decode(codec<cplx>::encode(c), ""), c);
    EXPECT_EQ(codec<cplx>::decode(json(2.5), ""), cplx(2.5));
    EXPECT_EQ(codec<cplx>::encode(cplx(-0.0, 0.0)).dump(), codec<cplx>::encode(cplx(0.0, 0.0)).dump());
}

TEST(Codec, JetRoundTrip)
{
    const xjet s = xjet::semiclassical(1, 6, 2);
    const xjet a = test::rand_jet(s, 0, 6, 0.5, 2);
    EXPECT_EQ(jet_from_json<exact>(json::parse(jet_to_json(a).dump())), a);

    const fjet fs = fjet::phase(2, 4);
    const fjet b = test::rand_jet(fs, 1, 4);
    EXPECT_EQ(jet_from_json<cplx>(jet_to_json(b)), b);
}

TEST(Codec, MapAndMatrixRoundTrip)
{
    const xjet s = xjet::phase(1, 4);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const xmap m{{x + xi * xi, xi.scaled(q(2, 3))}};
    EXPECT_EQ(map_from_json<exact>(map_to_json(m)), m);

    xmatrix a(2, 2);
    a(0, 0) = exact::tau();
    a(1, 1) = exact::tau_pow(-1);
    EXPECT_EQ(matrix_from_json<exact>(matrix_to_json(a)), a);
}

TEST(Codec, SchemaPointers)
{
    const json bad_exp = json::parse(R"({"n": 1, "trunc": 3, "terms": [{"exp": [1, 0], "num": 1}, {"exp": [1], "num": 1}]})");
    EXPECT_EQ(pointer_of([&] { jet_from_json<exact>(bad_exp); }), "/terms/1/exp");
    EXPECT_EQ(pointer_of([&] { jet_from_json<exact>(json::parse(R"({"trunc": 3, "terms": []})")); }), "/n");
    EXPECT_EQ(pointer_of([&] { matrix_from_json<cplx>(json::parse("[]")); }), "");
    EXPECT_EQ(pointer_of([&] { io::parse_rational("1/0", "/x"); }), "/x");
    EXPECT_EQ(pointer_of([&] { codec<exact>::decode(json::parse(R"({"num": "2", "den": "0"})"), "/c"); }), "/c/den");
}
