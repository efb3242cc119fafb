#pragma once

#include <string>
#include <vector>

namespace dofde::cli {

// One resolution of a convergence study. Rates attach to the finer of two
// adjacent rows; the coarsest row of each (scheme, gamma) group has none.
struct StudyRow {
  std::string scheme;
  double gamma = 1.0;
  int n = 0;
  double h = 0.0;
  double error = 0.0;
  bool has_rate = false;
  double rate = 0.0;
  bool plateau = false;  // error moved by less than 10%: excluded from fitting
};

// Fills rate/plateau in place. Rows must be grouped by (scheme, gamma) and
// ordered by increasing n within each group; rates come from adjacent rows
// only, never from a fit across the whole series.
void annotate_rates(std::vector<StudyRow>& rows);

// Median of the final three non-plateau rates of the group containing
// rows[first..last). NaN when the group has no usable rate.
double asymptotic_rate(const std::vector<StudyRow>& rows, std::size_t first, std::size_t last);

std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace dofde::cli
