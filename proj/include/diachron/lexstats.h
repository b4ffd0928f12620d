#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diachron/corpus.h"

namespace diachron {

// Probabilities over an explicit, ordered support. probabilities[i] belongs
// to support[i].
struct UnigramDistribution {
  TimePeriod period;
  std::vector<std::string> support;
  std::vector<double> probabilities;
};

struct DivergenceReport {
  double jsd = 0.0;
  // Sorted by contribution descending, ties by token.
  std::vector<std::pair<std::string, double>> contributions;
};

enum class FrequencyShift { kEmerged, kVanished, kRose, kFell, kStable };

struct ShiftThresholds {
  double absent_below = 1e-8;   // epsilon: relative frequency treated as absent
  double present_above = 1e-6;  // theta: relative frequency treated as established
  double ratio = 5.0;           // rose/fell factor
};

// Sorted union of both periods' vocabularies.
std::vector<std::string> union_support(const PeriodCorpus &a, const PeriodCorpus &b);

// P(w) = (count(w) + smoothing) / (token_count + smoothing * |support|)
UnigramDistribution unigram_distribution(const PeriodCorpus &pc,
                                         const std::vector<std::string> &support,
                                         double smoothing = 0.0);

// Natural-log KL(p || a). Throws NumericError where p > 0 and a == 0.
double kl_divergence(const UnigramDistribution &p, const UnigramDistribution &a);

// Jensen-Shannon divergence against the mixture A = (P_T + P_B) / 2, with the
// per-word breakdown of the sum.
DivergenceReport jsd(const UnigramDistribution &target, const UnigramDistribution &base);

std::vector<std::string> top_divergence_words(const DivergenceReport &report, size_t n = 5000);

FrequencyShift categorize_shift(const FrequencySeries &series, const TimePeriod &base,
                                const TimePeriod &target, const ShiftThresholds &thresholds = {});

const char *to_string(FrequencyShift shift);

// Header record "# jsd=<value>\tlog_base=e" then token TAB contribution.
void write_divergence_tsv(std::ostream &out, const DivergenceReport &report);
nlohmann::json to_json(const DivergenceReport &report, size_t max_items = SIZE_MAX);

}  // namespace diachron
