#include "study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "run_config.hpp"

namespace dofde::cli {

void annotate_rates(std::vector<StudyRow>& rows) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    StudyRow& r = rows[k];
    r.has_rate = false;
    r.plateau = false;
    if (k == 0) continue;
    const StudyRow& p = rows[k - 1];
    if (p.scheme != r.scheme || p.gamma != r.gamma) continue;
    if (!(p.error > 0.0) || !(r.error >= 0.0)) continue;
    if (std::abs(r.error - p.error) < 0.1 * p.error) {
      r.plateau = true;
      continue;
    }
    if (!(r.error > 0.0) || r.n <= p.n) continue;
    r.rate = std::log(p.error / r.error) / std::log(double(r.n) / double(p.n));
    r.has_rate = true;
  }
}

double asymptotic_rate(const std::vector<StudyRow>& rows, std::size_t first, std::size_t last) {
  std::vector<double> rates;
  for (std::size_t k = first; k < last && k < rows.size(); ++k)
    if (rows[k].has_rate) rates.push_back(rows[k].rate);
  if (rates.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (rates.size() > 3) rates.erase(rates.begin(), rates.end() - 3);
  std::sort(rates.begin(), rates.end());
  return rates[rates.size() / 2];
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::string csv = "scheme,gamma,N,h,error,observed_rate\n";
  for (const StudyRow& r : rows) {
    csv += r.scheme;
    csv += ',';
    csv += fmt17(r.gamma);
    csv += ',';
    csv += std::to_string(r.n);
    csv += ',';
    csv += fmt17(r.h);
    csv += ',';
    csv += fmt17(r.error);
    csv += ',';
    if (r.plateau)
      csv += "plateau";
    else if (r.has_rate)
      csv += fmt17(r.rate);
    csv += '\n';
  }
  return csv;
}

}  // namespace dofde::cli
