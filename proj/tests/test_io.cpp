#include "doctest.h"

#include <cmath>
#include <sstream>

#include "gralab/error.hpp"
#include "gralab/io/csv.hpp"
#include "gralab/io/svg_plot.hpp"

using namespace gralab;
using namespace gralab::io;

TEST_CASE("number formatting") {
    CHECK(format_number(0.75) == "0.75");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV round trip") {
    std::ostringstream s;
    CsvWriter w(s);
    w.meta("seed", "7");
    w.meta("f", 0.9);
    w.header({"x", "y"});
    w.row({1.0, 2.5});
    w.row({-3.0, 1e-9});
    CHECK(s.str() == "# seed: 7\n# f: 0.9\nx,y\n1,2.5\n-3,1e-09\n");

    const auto t = parse_csv(s.str());
    CHECK(t.meta.size() == 2);
    REQUIRE(t.columns.size() == 2);
    CHECK(t.rows.size() == 2);
    CHECK(t.column("y")[1] == doctest::Approx(1e-9));
    CHECK_THROWS_AS(t.column("z"), InvalidArgument);
}

TEST_CASE("SVG rendering") {
    PlotSeries line{"curve", {0.01, 0.1, 1.0}, {0.0, 0.5, 1.0}, false};
    PlotSeries dots{"points & more", {0.0, 0.1}, {0.2, NAN}, true};
    const std::string svg = render_svg({line, dots}, {"A <title>", "x", "y", true});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("A &lt;title&gt;") != std::string::npos);
    CHECK(svg.find("points &amp; more") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    // Zero x on a log axis and the NaN point are both dropped.
    CHECK(svg.find("<circle") == std::string::npos);

    const std::string empty = render_svg({}, {});
    CHECK(empty.find("</svg>") != std::string::npos);
}
