#include <doctest.h>

#include "memesent/csv.hpp"

using namespace memesent;

TEST_CASE("rfc4180 quoting") {
    const auto t = parse_csv("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n2,\"multi\nline\",\r\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x, y");
    CHECK(t.rows[0][2] == "say \"hi\"");
    CHECK(t.rows[1][1] == "multi\nline");
    CHECK(t.rows[1][2].empty());
    CHECK(t.row_lines[1] == 3);
}

TEST_CASE("bom and trailing blank lines") {
    const auto t = parse_csv("\xEF\xBB\xBFid,x\n1,2\n\n");
    CHECK(t.header[0] == "id");
    CHECK(t.rows.size() == 1);
}

TEST_CASE("malformed quoting is rejected with a line number") {
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,\"open\n"), doctest::Contains("unterminated"), CsvError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,x\"y\n"), doctest::Contains("line 2"), CsvError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,\"x\"y\n"), doctest::Contains("after closing quote"), CsvError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1\n"), doctest::Contains("expected 2 fields"), CsvError);
}

TEST_CASE("escape round trip") {
    const std::vector<std::string> row = {"plain", "with,comma", "with \"quote\"", "two\nlines", ""};
    const auto t = parse_csv(csv_row({"a", "b", "c", "d", "e"}) + csv_row(row));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == row);
}
