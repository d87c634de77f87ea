#include "acar/distributions.hpp"

#include "acar/types.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace acar {

namespace {

void check_df(double df) {
    if (!(df >= 1.0) || !std::isfinite(df)) throw InputError("degrees of freedom must be >= 1");
}

void check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("level must lie in (0, 1)");
}

}  // namespace

double chi_square_upper_tail(double x, double df) {
    check_df(df);
    if (std::isnan(x)) throw InputError("chi-square argument is NaN");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_critical(double alpha, double df) {
    check_df(df);
    check_level(alpha);
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), alpha));
}

double normal_upper_tail(double z) {
    if (std::isnan(z)) throw InputError("normal argument is NaN");
    return 0.5 * boost::math::erfc(z / std::sqrt(2.0));
}

double normal_two_sided(double z) { return 2.0 * normal_upper_tail(std::abs(z)); }

double normal_critical(double alpha) {
    check_level(alpha);
    return boost::math::quantile(boost::math::complement(boost::math::normal(), 0.5 * alpha));
}

}  // namespace acar
