#include "diachron/lexstats.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>

#include "diachron/error.h"

namespace diachron {

namespace {

void require_shared_support(const UnigramDistribution &p, const UnigramDistribution &q) {
  if (p.support != q.support) {
    throw DataError("distributions for " + p.period.label() + " and " + q.period.label() +
                    " are built over different supports");
  }
}

// x * ln(x / y) with the 0 * ln(0 / y) = 0 convention.
double plogp_ratio(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

std::vector<std::string> union_support(const PeriodCorpus &a, const PeriodCorpus &b) {
  std::set<std::string> words;
  for (const auto &[w, c] : a.vocabulary()) words.insert(w);
  for (const auto &[w, c] : b.vocabulary()) words.insert(w);
  return {words.begin(), words.end()};
}

UnigramDistribution unigram_distribution(const PeriodCorpus &pc,
                                         const std::vector<std::string> &support,
                                         double smoothing) {
  if (support.empty()) throw DataError("unigram distribution needs a non-empty support");
  if (pc.token_count() == 0) {
    throw DataError("period " + pc.period().label() + " has no tokens");
  }
  if (smoothing < 0.0) throw DataError("smoothing must be non-negative");

  UnigramDistribution dist;
  dist.period = pc.period();
  dist.support = support;
  dist.probabilities.reserve(support.size());
  const double denom = static_cast<double>(pc.token_count()) +
                       smoothing * static_cast<double>(support.size());
  for (const auto &w : support) {
    dist.probabilities.push_back((static_cast<double>(pc.count(w)) + smoothing) / denom);
  }
  return dist;
}

double kl_divergence(const UnigramDistribution &p, const UnigramDistribution &a) {
  require_shared_support(p, a);
  double total = 0.0;
  for (size_t i = 0; i < p.probabilities.size(); ++i) {
    const double pi = p.probabilities[i];
    const double ai = a.probabilities[i];
    if (pi > 0.0 && ai == 0.0) {
      throw NumericError("KL divergence is infinite: '" + p.support[i] +
                         "' has zero reference probability");
    }
    total += plogp_ratio(pi, ai);
  }
  return total;
}

DivergenceReport jsd(const UnigramDistribution &target, const UnigramDistribution &base) {
  require_shared_support(target, base);
  UnigramDistribution mixture;
  mixture.support = target.support;
  mixture.probabilities.resize(target.probabilities.size());
  for (size_t i = 0; i < mixture.probabilities.size(); ++i) {
    mixture.probabilities[i] = 0.5 * (target.probabilities[i] + base.probabilities[i]);
  }

  DivergenceReport report;
  report.jsd = 0.5 * kl_divergence(target, mixture) + 0.5 * kl_divergence(base, mixture);
  report.contributions.reserve(target.support.size());
  for (size_t i = 0; i < target.support.size(); ++i) {
    const double m = mixture.probabilities[i];
    double c = 0.5 * (plogp_ratio(target.probabilities[i], m) +
                      plogp_ratio(base.probabilities[i], m));
    // the pairwise term is non-negative; clear rounding residue
    c = std::max(c, 0.0);
    report.contributions.emplace_back(target.support[i], c);
  }
  std::sort(report.contributions.begin(), report.contributions.end(),
            [](const auto &x, const auto &y) {
              if (x.second != y.second) return x.second > y.second;
              return x.first < y.first;
            });
  return report;
}

std::vector<std::string> top_divergence_words(const DivergenceReport &report, size_t n) {
  if (n == 0) throw DataError("top-n must be at least 1");
  const size_t count = std::min(n, report.contributions.size());
  std::vector<std::string> words;
  words.reserve(count);
  for (size_t i = 0; i < count; ++i) words.push_back(report.contributions[i].first);
  return words;
}

FrequencyShift categorize_shift(const FrequencySeries &series, const TimePeriod &base,
                                const TimePeriod &target, const ShiftThresholds &thresholds) {
  const auto index_of = [&](const TimePeriod &p) {
    auto it = std::find(series.periods.begin(), series.periods.end(), p);
    if (it == series.periods.end()) {
      throw DataError("frequency series of '" + series.word + "' does not cover " + p.label());
    }
    return static_cast<size_t>(it - series.periods.begin());
  };
  const double b = series.values[index_of(base)];
  const double t = series.values[index_of(target)];

  if (b < thresholds.absent_below && t >= thresholds.present_above) return FrequencyShift::kEmerged;
  if (t < thresholds.absent_below && b >= thresholds.present_above) return FrequencyShift::kVanished;
  if (t > b && t >= thresholds.ratio * b) return FrequencyShift::kRose;
  if (b > t && b >= thresholds.ratio * t) return FrequencyShift::kFell;
  return FrequencyShift::kStable;
}

const char *to_string(FrequencyShift shift) {
  switch (shift) {
    case FrequencyShift::kEmerged: return "emerged";
    case FrequencyShift::kVanished: return "vanished";
    case FrequencyShift::kRose: return "rose";
    case FrequencyShift::kFell: return "fell";
    case FrequencyShift::kStable: return "stable";
  }
  return "unknown";
}

void write_divergence_tsv(std::ostream &out, const DivergenceReport &report) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# jsd=" << report.jsd << "\tlog_base=e\n";
  out << "token\tcontribution\n";
  for (const auto &[token, c] : report.contributions) out << token << '\t' << c << '\n';
  out.precision(precision);
}

nlohmann::json to_json(const DivergenceReport &report, size_t max_items) {
  nlohmann::json j;
  j["jsd"] = report.jsd;
  j["log_base"] = "e";
  j["contributions"] = nlohmann::json::array();
  const size_t n = std::min(max_items, report.contributions.size());
  for (size_t i = 0; i < n; ++i) {
    j["contributions"].push_back(
        {{"token", report.contributions[i].first}, {"contribution", report.contributions[i].second}});
  }
  return j;
}

}  // namespace diachron
