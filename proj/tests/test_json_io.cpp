// SPDX-License-Identifier: Apache-2.0
#include <cstring>

#include "doctest.h"
#include "effcap/error.hpp"
#include "effcap/json_io.hpp"

using namespace effcap;
using namespace effcap::json_io;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("channel JSON round-trips value-exact") {
    channels::ChannelParams p;
    p.alpha = 0.1 + 0.2;  // not exactly 0.3
    p.eta = 1.0 / 3.0;
    p.mu = 0.7000000000000001;
    p.b = 5.0;
    p.omega = 12345.678901234567;
    p.format = channels::Format::format2;
    p.eta = 0.3333333333333333;
    const auto q = channel_from_json(to_json(p));
    CHECK(bit_equal(q.alpha, p.alpha));
    CHECK(bit_equal(q.eta, p.eta));
    CHECK(bit_equal(q.mu, p.mu));
    CHECK(bit_equal(q.b, p.b));
    CHECK(bit_equal(q.omega, p.omega));
    CHECK(q.format == p.format);
}

TEST_CASE("model JSON round-trips value-exact") {
    mixfit::MGModel m;
    m.terms = {{1.0 / 7.0, 2.0000000000000004, 78.58746996226394},
               {3.152750309074115e-07, 0.5, 0.1271324998342107}};
    const auto m2 = mg_from_json(to_json(m));
    REQUIRE(m2.terms.size() == m.terms.size());
    for (std::size_t i = 0; i < m.terms.size(); ++i) {
        CHECK(bit_equal(m2.terms[i].phi, m.terms[i].phi));
        CHECK(bit_equal(m2.terms[i].vartheta, m.terms[i].vartheta));
        CHECK(bit_equal(m2.terms[i].xi, m.terms[i].xi));
    }

    mixfit::MoGModel g;
    g.gamma_bar = 99.00000000000001;
    g.comps = {{0.25, 0.1, 0.037}, {0.75, 1.4142135623730951, 0.2}};
    const auto g2 = mog_from_json(to_json(g));
    CHECK(bit_equal(g2.gamma_bar, g.gamma_bar));
    REQUIRE(g2.comps.size() == g.comps.size());
    for (std::size_t i = 0; i < g.comps.size(); ++i) {
        CHECK(bit_equal(g2.comps[i].rho, g.comps[i].rho));
        CHECK(bit_equal(g2.comps[i].upsilon, g.comps[i].upsilon));
        CHECK(bit_equal(g2.comps[i].psi, g.comps[i].psi));
    }
}

TEST_CASE("serialized keys match the documented schemas") {
    channels::ChannelParams p;
    const auto cj = to_json(p);
    for (const char* key : {"\"alpha\"", "\"eta\"", "\"mu\"", "\"b\"", "\"omega\"",
                            "\"format\":\"format1\""})
        CHECK(cj.find(key) != std::string::npos);

    mixfit::MGModel m;
    m.terms = {{1.0, 1.0, 1.0}};
    const auto mj = to_json(m);
    for (const char* key : {"\"type\":\"mg\"", "\"terms\"", "\"phi\"", "\"vartheta\"", "\"xi\""})
        CHECK(mj.find(key) != std::string::npos);

    mixfit::MoGModel g;
    g.comps = {{1.0, 1.0, 0.1}};
    const auto gj = to_json(g);
    for (const char* key :
         {"\"type\":\"mog\"", "\"gamma_bar\"", "\"comps\"", "\"rho\"", "\"upsilon\"", "\"psi\""})
        CHECK(gj.find(key) != std::string::npos);
}

TEST_CASE("malformed or out-of-domain input is a parse_error") {
    CHECK_THROWS_AS(channel_from_json("{"), parse_error);
    CHECK_THROWS_AS(channel_from_json("[]"), parse_error);
    CHECK_THROWS_AS(channel_from_json(R"({"alpha":2,"eta":0.5,"mu":1,"b":2,"omega":1})"),
                    parse_error);  // missing format
    CHECK_THROWS_AS(
        channel_from_json(
            R"({"alpha":2,"eta":0.5,"mu":1,"b":2,"omega":1,"format":"format3"})"),
        parse_error);
    CHECK_THROWS_AS(
        channel_from_json(
            R"({"alpha":-2,"eta":0.5,"mu":1,"b":2,"omega":1,"format":"format1"})"),
        parse_error);  // domain violation surfaces as a parse error
    CHECK_THROWS_AS(
        channel_from_json(
            R"({"alpha":"2","eta":0.5,"mu":1,"b":2,"omega":1,"format":"format1"})"),
        parse_error);  // mistyped field

    CHECK_THROWS_AS(mg_from_json(R"({"type":"mog","terms":[]})"), parse_error);
    CHECK_THROWS_AS(mg_from_json(R"({"type":"mg","terms":[]})"), parse_error);
    CHECK_THROWS_AS(mg_from_json(R"({"type":"mg","terms":[{"phi":1,"vartheta":0,"xi":1}]})"),
                    parse_error);
    CHECK_THROWS_AS(mog_from_json(R"({"type":"mog","gamma_bar":0,"comps":[]})"), parse_error);
    CHECK_THROWS_AS(
        mog_from_json(R"({"type":"mog","gamma_bar":1,"comps":[{"rho":1,"upsilon":1}]})"),
        parse_error);  // missing psi
}
