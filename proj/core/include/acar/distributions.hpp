#pragma once

namespace acar {

/// P(X > x) for X ~ chi-square(df). x <= 0 gives 1.
double chi_square_upper_tail(double x, double df);

/// (1 - alpha) quantile of chi-square(df), i.e. the rejection cutoff at level alpha.
double chi_square_critical(double alpha, double df);

/// P(Z > z) for a standard normal Z.
double normal_upper_tail(double z);

/// Two-sided p-value 2 P(Z > |z|).
double normal_two_sided(double z);

/// (1 - alpha/2) standard normal quantile.
double normal_critical(double alpha);

}  // namespace acar
