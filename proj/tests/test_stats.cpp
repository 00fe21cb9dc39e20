#include <doctest.h>

#include <cmath>
#include <vector>

#include "hazardlab/stats.hpp"

using namespace hazardlab;

TEST_SUITE("stats") {

TEST_CASE("median conventions") {
    CHECK(stats::median({10.0}) == 10.0);
    CHECK(stats::median({100.0, 400.0, 200.0}) == 200.0);
    CHECK(stats::median({100.0, 400.0}) == 250.0);
    CHECK_THROWS(stats::median({}));
}

TEST_CASE("type-7 quantiles interpolate order statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::quantile_sorted(v, 0.0) == 1.0);
    CHECK(stats::quantile_sorted(v, 1.0) == 4.0);
    CHECK(stats::quantile_sorted(v, 0.5) == doctest::Approx(2.5));
    CHECK(stats::quantile_sorted(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("student t two-sided p matches reference values") {
    // Reference values computed with an independent statistics package.
    CHECK(stats::student_t_two_sided_p(1.0954451150103321, 3) ==
          doctest::Approx(0.3533874662886982).epsilon(1e-12));
    CHECK(stats::student_t_two_sided_p(2.5, 9) ==
          doctest::Approx(0.03386182768298571).epsilon(1e-12));
    CHECK(stats::student_t_two_sided_p(0.3, 1) ==
          doctest::Approx(0.8144528418445154).epsilon(1e-12));
    CHECK(stats::student_t_two_sided_p(5.0, 29) ==
          doctest::Approx(2.5366315735423254e-05).epsilon(1e-10));
    CHECK(stats::student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("regularized incomplete beta endpoints and symmetry") {
    CHECK(stats::reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(stats::reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(a,b) = 1 - I_{1-x}(b,a)
    for (double x : {0.1, 0.37, 0.5, 0.81}) {
        CHECK(stats::reg_inc_beta(1.7, 4.2, x) ==
              doctest::Approx(1.0 - stats::reg_inc_beta(4.2, 1.7, 1.0 - x)).epsilon(1e-13));
    }
    // I_x(1,1) = x
    CHECK(stats::reg_inc_beta(1.0, 1.0, 0.42) == doctest::Approx(0.42).epsilon(1e-14));
}

} // TEST_SUITE
