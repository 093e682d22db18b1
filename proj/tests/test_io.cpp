#include "doctest.h"
#include "support.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <fstream>
#include <limits>

using namespace trendop;

TEST_CASE("format_double round-trips every bit") {
    for (double x : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.0}) {
        double y = 0.0;
        REQUIRE(io::parse_double(io::format_double(x), y));
        CHECK(y == x);
    }
    CHECK(io::format_double(1.0) == "1.00000000000000000e+00");
}

TEST_CASE("split_fields accepts tabs, commas and runs of spaces") {
    const auto f = io::split_fields("  1\t2,3   4\r");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "1");
    CHECK(f[3] == "4");
    CHECK(io::split_fields("").empty());
}

TEST_CASE("parse_double rejects trailing garbage") {
    double v = 0.0;
    CHECK(io::parse_double("+2.5", v));
    CHECK(v == 2.5);
    CHECK_FALSE(io::parse_double("2.5x", v));
    CHECK_FALSE(io::parse_double("", v));
    CHECK(io::parse_double("inf", v));
    CHECK(v == std::numeric_limits<double>::infinity());
}

TEST_CASE("TableWriter output reads back with metadata and labels") {
    const auto dir = testing::scratch_dir("io");
    {
        io::TableWriter w(dir / "t.tsv");
        w.meta("step", 7.0);
        w.meta("unit", "kyr");
        w.header({"a", "b", "kind"});
        const double r[] = {1.5, -2.0};
        w.row(r, "trend");
        w.row({3.0, std::numeric_limits<double>::infinity()});
    }
    const auto t = io::read_table(dir / "t.tsv");
    REQUIRE(t.columns.size() == 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<double>{1.5, -2.0});
    CHECK(t.labels[0] == "trend");
    CHECK(std::isinf(t.rows[1][1]));
    REQUIRE(t.find_meta("unit") != nullptr);
    CHECK(*t.find_meta("unit") == "kyr");
    CHECK(t.find_meta("missing") == nullptr);
}

TEST_CASE("read_table reports the offending line") {
    const auto dir = testing::scratch_dir("io_bad");
    std::ofstream(dir / "bad.tsv") << "a\tb\n1\t2\nx\t3\n";
    try {
        io::read_table(dir / "bad.tsv");
        FAIL("expected a ValidationError");
    } catch (const ValidationError &e) {
        CHECK(std::string(e.what()).find("bad.tsv:3") != std::string::npos);
    }
    CHECK_THROWS_AS(io::read_table(dir / "absent.tsv"), ValidationError);
}
