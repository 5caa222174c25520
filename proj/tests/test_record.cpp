#include <doctest.h>

#include <cmath>

#include "hamm/errors.hpp"
#include "hamm/record.hpp"

using namespace hamm;

TEST_CASE("record round trip") {
    Record r;
    r.set("verdict", "certified").set("lhs", 0.1 + 0.2).set("n", 256).set("ok", true);
    r.set("note", std::string("two\nlines \\ slash"));
    r.set("e", std::exp(2.0));
    const auto back = Record::parse(r.str());
    CHECK(back == r);
    CHECK(back.number("lhs") == 0.1 + 0.2);
    CHECK(back.number("e") == std::exp(2.0));
    CHECK(*back.get("note") == "two\nlines \\ slash");
    CHECK(*back.get("ok") == "true");
    CHECK_FALSE(back.get("missing"));
}

TEST_CASE("record errors") {
    Record r;
    CHECK_THROWS_AS(r.set("bad key", 1.0), ParameterError);
    CHECK_THROWS_AS(Record::parse("novalue\n"), ParseError);
    r.set("word", "abc");
    CHECK_THROWS_AS(r.number("word"), ParseError);
    CHECK_THROWS_AS(r.number("absent"), ParameterError);
}

TEST_CASE("format_double") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
}
