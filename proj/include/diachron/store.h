#pragma once

#include <filesystem>

#include "diachron/corpus.h"

namespace diachron {

// On-disk period store written by `ingest`:
//   <dir>/periods.tsv          label, start_year, end_year, documents, tokens
//   <dir>/<label>.tok          one document per line: year TAB space-joined tokens
void save_store(const std::filesystem::path &dir, const PeriodMap &periods);
PeriodMap load_store(const std::filesystem::path &dir);

// Looks up the period whose start year (or full label) matches `key`.
const PeriodCorpus &find_period(const PeriodMap &periods, std::string_view key);

}  // namespace diachron
