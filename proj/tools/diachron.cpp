// diachron: per-period embeddings, cross-period alignment and counterpart
// retrieval from the command line.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "diachron/align.h"
#include "diachron/cbow.h"
#include "diachron/corpus.h"
#include "diachron/error.h"
#include "diachron/evaluate.h"
#include "diachron/lexstats.h"
#include "diachron/manifest.h"
#include "diachron/ppmi_svd.h"
#include "diachron/retrieve.h"
#include "diachron/store.h"

namespace fs = std::filesystem;
using namespace diachron;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config;
  bool force = false;
  int workers = 1;
  std::string command_line;
};

void guard_output(const fs::path &path, const GlobalOptions &g) {
  if (!g.force && fs::exists(path)) {
    throw UsageError("refusing to overwrite " + path.string() + " (pass --force)");
  }
}

std::vector<std::string> split_list(const std::string &text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Snapshot of every option of a subcommand as key -> value.
std::map<std::string, std::string> snapshot(const CLI::App *sub) {
  std::map<std::string, std::string> config;
  for (const CLI::Option *opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    std::string key = opt->get_single_name();
    std::string value;
    for (const auto &r : opt->results()) value += (value.empty() ? "" : ",") + r;
    if (value.empty()) value = opt->get_default_str();
    config[key] = value;
  }
  return config;
}

// Fills options the command line left unset from the key=value file.
void apply_config(CLI::App *sub, const std::map<std::string, std::string> &values) {
  for (const auto &[key, value] : values) {
    CLI::Option *opt = sub->get_option_no_throw("--" + key);
    if (!opt) {
      std::cerr << "note: config key '" << key << "' is not used by '" << sub->get_name() << "'\n";
      continue;
    }
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") opt->add_result("true");
    } else {
      for (const auto &item : opt->get_expected_max() > 1 ? split_list(value)
                                                          : std::vector<std::string>{value}) {
        opt->add_result(item);
      }
    }
    opt->run_callback();
  }
}

RunManifest base_manifest(const CLI::App *sub, const GlobalOptions &g, uint64_t seed = 0) {
  RunManifest m;
  m.command = g.command_line;
  m.config = snapshot(sub);
  m.seed = seed;
  return m;
}

void add_digest(RunManifest &m, const fs::path &p) { m.input_digests[p.string()] = sha256_hex(p); }

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string corpus;
  std::string format = "jsonl";
  int epoch = 1920;
  std::string out;
};

void run_ingest(const IngestArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  guard_output(a.out, g);
  const auto format = a.format == "year_dirs" ? CorpusFormat::kYearDirs : CorpusFormat::kJsonl;
  const auto result = ingest(a.corpus, format);
  for (const auto &doc : result.documents) {
    if (doc.year < a.epoch) {
      throw DataError("document year " + std::to_string(doc.year) + " precedes epoch " +
                      std::to_string(a.epoch));
    }
  }
  const auto periods = bucket_by_decade(result.documents, a.epoch);
  save_store(a.out, periods);

  auto m = base_manifest(sub, g);
  add_digest(m, a.corpus);
  m.outputs.push_back(a.out);
  m.metadata["documents"] = std::to_string(result.documents.size());
  m.metadata["skipped_records"] = std::to_string(result.skipped);
  write_manifest(m, manifest_path_for(a.out));

  std::cout << "ingested " << result.documents.size() << " documents (" << result.skipped
            << " malformed skipped) into " << periods.size() << " periods\n";
  for (const auto &[period, pc] : periods) {
    std::cout << "  " << period.label() << "\t" << pc.documents().size() << " docs\t"
              << pc.token_count() << " tokens\n";
  }
}

struct JsdArgs {
  std::string store;
  std::string base;
  std::string target;
  size_t top = 5000;
  double smoothing = 0.0;
  std::string out;
};

void run_jsd(const JsdArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  const fs::path tsv = a.out + ".tsv";
  const fs::path json = a.out + ".json";
  guard_output(tsv, g);
  guard_output(json, g);
  const auto periods = load_store(a.store);
  const auto &base = find_period(periods, a.base);
  const auto &target = find_period(periods, a.target);
  const auto support = union_support(target, base);
  const auto report = jsd(unigram_distribution(target, support, a.smoothing),
                          unigram_distribution(base, support, a.smoothing));

  {
    std::ofstream out(tsv);
    write_divergence_tsv(out, report);
  }
  auto j = to_json(report, a.top);
  j["base"] = base.period().label();
  j["target"] = target.period().label();
  j["top"] = top_divergence_words(report, a.top);
  {
    std::ofstream out(json);
    out << j.dump(2) << '\n';
  }
  auto m = base_manifest(sub, g);
  add_digest(m, a.store);
  m.outputs = {tsv.string(), json.string()};
  write_manifest(m, fs::path(a.out + ".manifest.json"));
  std::cout << "jsd(" << target.period().label() << " || " << base.period().label()
            << ") = " << std::setprecision(6) << report.jsd << " (natural log)\n";
}

struct FreqArgs {
  std::string store;
  std::vector<std::string> words;
  std::string base;
  std::string target;
  std::string out;
};

void run_freq(const FreqArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  const auto periods = load_store(a.store);
  std::vector<FrequencySeries> series;
  for (const auto &w : a.words) {
    const auto toks = tokenize(w);
    series.push_back(frequency_series(toks.empty() ? w : toks.front(), periods));
  }
  if (a.out.empty()) {
    write_frequency_tsv(std::cout, series);
  } else {
    guard_output(a.out, g);
    std::ofstream out(a.out);
    write_frequency_tsv(out, series);
    auto m = base_manifest(sub, g);
    add_digest(m, a.store);
    m.outputs.push_back(a.out);
    write_manifest(m, manifest_path_for(a.out));
  }
  if (!a.base.empty() && !a.target.empty()) {
    const auto b = find_period(periods, a.base).period();
    const auto t = find_period(periods, a.target).period();
    for (const auto &s : series) {
      std::cerr << s.word << "\t" << to_string(categorize_shift(s, b, t)) << "\n";
    }
  }
}

struct TrainArgs {
  std::string method;
  std::string store;
  std::string period;
  int dim = 300;
  int window = 2;
  int64_t min_count = 10;
  double alpha = 0.75;
  double sigma_exponent = 0.5;
  int negatives = 5;
  double downsample = 1e-5;
  int epochs = 5;
  double learning_rate = 0.025;
  uint64_t seed = 1;
  std::string out;
};

void run_train(const TrainArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  guard_output(a.out, g);
  const auto periods = load_store(a.store);
  const auto &pc = find_period(periods, a.period);
  EmbeddingSpace space;
  if (a.method == "svd") {
    SvdEmbeddingConfig cfg;
    cfg.dim = a.dim;
    cfg.window = a.window;
    cfg.min_count = a.min_count;
    cfg.alpha = a.alpha;
    cfg.sigma_exponent = a.sigma_exponent;
    space = train_svd(pc, cfg);
  } else {
    CbowConfig cfg;
    cfg.dim = a.dim;
    cfg.window = a.window;
    cfg.min_count = a.min_count;
    cfg.noise_exponent = a.alpha;
    cfg.negatives = a.negatives;
    cfg.downsample = a.downsample;
    cfg.epochs = a.epochs;
    cfg.learning_rate = a.learning_rate;
    cfg.seed = a.seed;
    cfg.workers = g.workers;
    CbowStats stats;
    space = train_cbow(pc, cfg, &stats);
    std::string losses;
    for (double l : stats.epoch_mean_loss) losses += (losses.empty() ? "" : ",") + std::to_string(l);
    space.metadata()["epoch_mean_loss"] = losses;
  }
  save_embeddings(space, a.out);

  auto m = base_manifest(sub, g, a.seed);
  add_digest(m, a.store);
  m.outputs.push_back(a.out);
  m.metadata = space.metadata();
  write_manifest(m, manifest_path_for(a.out));
  std::cout << "trained " << a.method << " embeddings for " << pc.period().label() << ": "
            << space.size() << " words x " << space.dim() << " dims -> " << a.out << "\n";
  if (space.metadata().count("rank_limited") && space.metadata().at("rank_limited") == "true") {
    std::cerr << "warning: fewer dimensions than requested survived the SVD\n";
  }
}

struct AlignArgs {
  std::string kind;
  std::string base_emb;
  std::string target_emb;
  std::string store;
  std::string base;
  std::string target;
  size_t top_n = 1000;
  double ridge_alpha = 0.2;
  std::string preprocess = "l2_normalize";
  std::string out;
};

void run_align(const AlignArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  guard_output(a.out, g);
  const auto base = load_embeddings(a.base_emb);
  const auto target = load_embeddings(a.target_emb);
  const auto mode = parse_preprocess(a.preprocess);
  AlignmentMap map;
  auto m = base_manifest(sub, g);
  add_digest(m, a.base_emb);
  add_digest(m, a.target_emb);
  if (a.kind == "op") {
    map = orthogonal_procrustes(intersect(base, target, mode));
  } else {
    if (a.store.empty() || a.base.empty() || a.target.empty()) {
      throw UsageError("align lt needs --store, --base and --target for seed-pair frequencies");
    }
    const auto periods = load_store(a.store);
    add_digest(m, a.store);
    const auto seeds = select_seed_pairs(base, target, find_period(periods, a.base).vocabulary(),
                                         find_period(periods, a.target).vocabulary(), a.top_n, mode);
    map = ridge_linear_map(seeds, a.ridge_alpha);
  }
  if (!a.base.empty()) map.base_period = TimePeriod::parse(a.base).label();
  if (!a.target.empty()) map.target_period = TimePeriod::parse(a.target).label();
  save_alignment(map, a.out);
  m.outputs.push_back(a.out);
  write_manifest(m, manifest_path_for(a.out));
  for (const auto &w : map.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "fitted " << a.kind << " map on " << map.fit_size << " words, residual "
            << std::setprecision(6) << map.residual << " -> " << a.out << "\n";
}

struct QueryArgs {
  std::string word;
  std::string base_emb;
  std::string target_emb;
  std::string map;
  std::string store;
  std::string method = "op";
  size_t k = 10;
  size_t pool = 0;
  std::string order = "anti";
  bool json = false;
  std::string out;
};

void run_query(const QueryArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  const auto base = load_embeddings(a.base_emb);
  const auto target = load_embeddings(a.target_emb);
  auto map = load_alignment(a.map);
  std::optional<FrequencyStore> freqs;
  if (!a.store.empty()) freqs.emplace(load_store(a.store));
  QueryOptions q;
  q.method = parse_method(a.method);
  q.k = a.k;
  q.pool = a.pool;
  q.order = parse_order(a.order);
  const auto toks = tokenize(a.word);
  const std::string word = toks.empty() ? a.word : toks.front();
  const auto result = query_counterparts(word, base, target, map, q, freqs ? &*freqs : nullptr);

  std::ostringstream rendered;
  if (a.json) rendered << to_json(result).dump(2) << '\n';
  else write_candidates_tsv(rendered, result);
  if (a.out.empty()) {
    std::cout << rendered.str();
  } else {
    guard_output(a.out, g);
    std::ofstream(a.out) << rendered.str();
    auto m = base_manifest(sub, g);
    add_digest(m, a.base_emb);
    add_digest(m, a.target_emb);
    add_digest(m, a.map);
    m.outputs.push_back(a.out);
    write_manifest(m, manifest_path_for(a.out));
  }
  for (const auto &w : result.warnings) std::cerr << "warning: " << w << "\n";
}

struct EvalArgs {
  std::string store;
  std::string gold;
  std::string base_emb;
  std::string target_emb;
  std::string base;
  std::string target;
  std::string methods = "op,opsc,lt";
  std::string ks = "1,10,100";
  std::string embedding = "svd";
  std::string order = "anti";
  std::string oov = "skip";
  size_t top_n = 1000;
  double ridge_alpha = 0.2;
  std::string preprocess = "l2_normalize";
  std::string out;
};

std::vector<Method> parse_methods(const std::string &list) {
  std::vector<Method> methods;
  for (const auto &m : split_list(list)) methods.push_back(parse_method(m));
  if (methods.empty()) throw UsageError("no methods given");
  return methods;
}

std::vector<size_t> parse_ks(const std::string &list) {
  std::vector<size_t> ks;
  for (const auto &k : split_list(list)) {
    try {
      ks.push_back(std::stoul(k));
    } catch (const std::exception &) {
      throw UsageError("bad cutoff '" + k + "'");
    }
    if (ks.back() == 0) throw UsageError("cutoffs must be positive");
  }
  if (ks.empty()) throw UsageError("no cutoffs given");
  return ks;
}

OovPolicy parse_oov(const std::string &s) {
  if (s == "skip") return OovPolicy::kSkip;
  if (s == "miss") return OovPolicy::kCountAsMiss;
  throw UsageError("--oov must be skip or miss");
}

void print_report(const EvalReport &report) {
  std::cout << std::setprecision(6);
  for (const auto &c : report.cells) {
    std::cout << to_string(c.method) << "\t" << c.embedding << "\t" << c.base_period << " -> "
              << c.target_period << "\tqueries=" << c.n_queries << " oov=" << c.n_skipped_oov;
    for (const auto &[k, r] : c.recall_at) std::cout << "\tR@" << k << "=" << r;
    std::cout << "\tMRR=" << c.mrr << "\n";
  }
}

void write_report_files(const EvalReport &report, const std::string &prefix, RunManifest m,
                        const GlobalOptions &g) {
  const fs::path json = prefix + ".json";
  const fs::path csv = prefix + ".csv";
  guard_output(json, g);
  guard_output(csv, g);
  std::ofstream(json) << to_json(report).dump(2) << '\n';
  {
    std::ofstream out(csv);
    write_report_csv(out, report);
  }
  m.outputs = {json.string(), csv.string()};
  write_manifest(m, fs::path(prefix + ".manifest.json"));
}

void run_eval(const EvalArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  const auto periods = load_store(a.store);
  const auto gold = load_gold_pairs(a.gold);
  const auto base = load_embeddings(a.base_emb);
  const auto target = load_embeddings(a.target_emb);
  const FrequencyStore freqs(periods);

  AlignmentSettings alignment;
  alignment.preprocess = parse_preprocess(a.preprocess);
  alignment.seed_top_n = a.top_n;
  alignment.ridge_alpha = a.ridge_alpha;
  EvalOptions options;
  options.ks = parse_ks(a.ks);
  options.order = parse_order(a.order);
  options.oov_policy = parse_oov(a.oov);

  EvalReport report;
  report.oov_policy = options.oov_policy;
  report.cells = evaluate_pair(base, target, find_period(periods, a.base), find_period(periods, a.target),
                               freqs, gold, parse_methods(a.methods), a.embedding, alignment, options);
  print_report(report);
  if (!a.out.empty()) {
    auto m = base_manifest(sub, g);
    for (const auto &p : {a.store, a.gold, a.base_emb, a.target_emb}) add_digest(m, p);
    write_report_files(report, a.out, std::move(m), g);
  }
}

struct SweepArgs {
  std::string store;
  std::string gold;
  std::string base;
  std::string targets;
  std::string kind = "svd";
  std::string methods = "op,opsc,lt";
  std::string ks = "10";
  bool balance = false;
  uint64_t seed = 1;
  int dim = 300;
  int window = 2;
  int64_t min_count = 10;
  int epochs = 5;
  std::string order = "anti";
  std::string out;
};

void run_sweep(const SweepArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  const auto periods = load_store(a.store);
  const auto gold = load_gold_pairs(a.gold);
  SweepConfig cfg;
  cfg.base = a.base;
  cfg.targets = split_list(a.targets);
  cfg.methods = parse_methods(a.methods);
  cfg.embedding = a.kind;
  cfg.balance_tokens = a.balance;
  cfg.seed = a.seed;
  cfg.eval.ks = parse_ks(a.ks);
  cfg.eval.order = parse_order(a.order);

  Trainer trainer;
  if (a.kind == "svd") {
    SvdEmbeddingConfig svd;
    svd.dim = a.dim;
    svd.window = a.window;
    svd.min_count = a.min_count;
    trainer = [svd](const PeriodCorpus &pc) { return train_svd(pc, svd); };
  } else if (a.kind == "cbow") {
    CbowConfig cbow;
    cbow.dim = a.dim;
    cbow.window = a.window;
    cbow.min_count = a.min_count;
    cbow.epochs = a.epochs;
    cbow.seed = a.seed;
    cbow.workers = g.workers;
    trainer = [cbow](const PeriodCorpus &pc) { return train_cbow(pc, cbow); };
  } else {
    throw UsageError("--kind must be svd or cbow");
  }
  const auto report = temporal_sweep(periods, gold, cfg, trainer);
  print_report(report);
  if (!a.out.empty()) {
    auto m = base_manifest(sub, g, a.seed);
    add_digest(m, a.store);
    add_digest(m, a.gold);
    write_report_files(report, a.out, std::move(m), g);
  }
}

struct SynthArgs {
  size_t pairs = 20;
  size_t fillers = 200;
  size_t docs_per_period = 5000;
  std::string periods = "1930,1940,1950,1960,1970,1980";
  uint64_t seed = 7;
  std::string out;
};

void run_synth(const SynthArgs &a, const CLI::App *sub, const GlobalOptions &g) {
  guard_output(fs::path(a.out) / "corpus.jsonl", g);
  SyntheticSpec spec;
  spec.n_pairs = a.pairs;
  spec.n_filler_words = a.fillers;
  spec.docs_per_period = a.docs_per_period;
  spec.seed = a.seed;
  spec.periods.clear();
  for (const auto &p : split_list(a.periods)) spec.periods.push_back(TimePeriod::parse(p).start_year);
  const auto corpus = generate_synthetic_replacement_corpus(spec);
  write_synthetic_corpus(corpus, a.out);
  auto m = base_manifest(sub, g, a.seed);
  m.outputs = {(fs::path(a.out) / "corpus.jsonl").string(), (fs::path(a.out) / "gold.tsv").string()};
  write_manifest(m, fs::path(a.out) / "manifest.json");
  std::cout << "wrote " << corpus.jsonl_lines.size() << " documents and " << corpus.gold.pairs.size()
            << " gold pairs to " << a.out << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Diachronic word embeddings: train, align, retrieve counterparts, evaluate"};
  app.require_subcommand(1);
  // global flags may also follow the subcommand
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "flat key=value file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
  app.add_flag("--force", g.force, "overwrite existing outputs");
  app.add_option("--workers", g.workers, "training threads (1 = deterministic)")->check(CLI::PositiveNumber);
  for (int i = 0; i < argc; ++i) g.command_line += (i ? " " : "") + std::string(argv[i]);

  IngestArgs ingest_args;
  auto *ingest_cmd = app.add_subcommand("ingest", "bucket a time-stamped corpus into decades");
  ingest_cmd->add_option("corpus", ingest_args.corpus, "JSONL file or <root>/<year>/*.txt")->required();
  ingest_cmd->add_option("--format", ingest_args.format)->check(CLI::IsMember({"jsonl", "year_dirs"}));
  ingest_cmd->add_option("--epoch", ingest_args.epoch, "first year of the decade grid");
  ingest_cmd->add_option("--out", ingest_args.out, "period store directory")->required();

  auto *stats_cmd = app.add_subcommand("stats", "vocabulary statistics");
  stats_cmd->require_subcommand(1);
  JsdArgs jsd_args;
  auto *jsd_cmd = stats_cmd->add_subcommand("jsd", "Jensen-Shannon divergence between two periods");
  jsd_cmd->add_option("--store", jsd_args.store)->required();
  jsd_cmd->add_option("--base", jsd_args.base)->required();
  jsd_cmd->add_option("--target", jsd_args.target)->required();
  jsd_cmd->add_option("--top", jsd_args.top, "candidate pool size")->check(CLI::PositiveNumber);
  jsd_cmd->add_option("--smoothing", jsd_args.smoothing, "additive smoothing")->check(CLI::NonNegativeNumber);
  jsd_cmd->add_option("--out", jsd_args.out, "output prefix (.tsv, .json)")->required();
  FreqArgs freq_args;
  auto *freq_cmd = stats_cmd->add_subcommand("freq", "relative frequency series");
  freq_cmd->add_option("words", freq_args.words)->required();
  freq_cmd->add_option("--store", freq_args.store)->required();
  freq_cmd->add_option("--base", freq_args.base, "with --target, print a shift category per word");
  freq_cmd->add_option("--target", freq_args.target);
  freq_cmd->add_option("--out", freq_args.out, "TSV file (default stdout)");

  TrainArgs train_args;
  auto *train_cmd = app.add_subcommand("train", "train embeddings for one period");
  train_cmd->add_option("method", train_args.method)->required()->check(CLI::IsMember({"svd", "cbow"}));
  train_cmd->add_option("--store", train_args.store)->required();
  train_cmd->add_option("--period", train_args.period)->required();
  train_cmd->add_option("--dim", train_args.dim)->check(CLI::PositiveNumber);
  train_cmd->add_option("--window", train_args.window)->check(CLI::PositiveNumber);
  train_cmd->add_option("--min-count", train_args.min_count);
  train_cmd->add_option("--alpha", train_args.alpha, "context / noise smoothing exponent");
  train_cmd->add_option("--sigma-exponent", train_args.sigma_exponent);
  train_cmd->add_option("--negatives", train_args.negatives);
  train_cmd->add_option("--downsample", train_args.downsample);
  train_cmd->add_option("--epochs", train_args.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--learning-rate", train_args.learning_rate);
  train_cmd->add_option("--seed", train_args.seed);
  train_cmd->add_option("--out", train_args.out)->required();

  AlignArgs align_args;
  auto *align_cmd = app.add_subcommand("align", "fit a base-to-target alignment map");
  align_cmd->add_option("kind", align_args.kind)->required()->check(CLI::IsMember({"op", "lt"}));
  align_cmd->add_option("--base-emb", align_args.base_emb)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--target-emb", align_args.target_emb)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--store", align_args.store);
  align_cmd->add_option("--base", align_args.base);
  align_cmd->add_option("--target", align_args.target);
  align_cmd->add_option("--top-n", align_args.top_n);
  align_cmd->add_option("--ridge-alpha", align_args.ridge_alpha);
  align_cmd->add_option("--preprocess", align_args.preprocess);
  align_cmd->add_option("--out", align_args.out)->required();

  QueryArgs query_args;
  auto *query_cmd = app.add_subcommand("query", "rank target-period counterparts of a word");
  query_cmd->add_option("word", query_args.word)->required();
  query_cmd->add_option("--base-emb", query_args.base_emb)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--target-emb", query_args.target_emb)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--map", query_args.map)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--store", query_args.store, "period store (needed for opsc)");
  query_cmd->add_option("--method", query_args.method)->check(CLI::IsMember({"op", "opsc", "lt"}));
  query_cmd->add_option("--k", query_args.k)->check(CLI::PositiveNumber);
  query_cmd->add_option("--pool", query_args.pool, "opsc neighbour pool (default from k)");
  query_cmd->add_option("--order", query_args.order)->check(CLI::IsMember({"anti", "desc"}));
  query_cmd->add_flag("--json", query_args.json);
  query_cmd->add_option("--out", query_args.out);

  EvalArgs eval_args;
  auto *eval_cmd = app.add_subcommand("eval", "score methods against gold pairs");
  eval_cmd->add_option("--store", eval_args.store)->required();
  eval_cmd->add_option("--gold", eval_args.gold)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--base-emb", eval_args.base_emb)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--target-emb", eval_args.target_emb)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--base", eval_args.base)->required();
  eval_cmd->add_option("--target", eval_args.target)->required();
  eval_cmd->add_option("--methods", eval_args.methods);
  eval_cmd->add_option("--k", eval_args.ks, "comma-separated cutoffs");
  eval_cmd->add_option("--embedding", eval_args.embedding, "label for the report");
  eval_cmd->add_option("--order", eval_args.order)->check(CLI::IsMember({"anti", "desc"}));
  eval_cmd->add_option("--oov", eval_args.oov)->check(CLI::IsMember({"skip", "miss"}));
  eval_cmd->add_option("--top-n", eval_args.top_n);
  eval_cmd->add_option("--ridge-alpha", eval_args.ridge_alpha);
  eval_cmd->add_option("--preprocess", eval_args.preprocess);
  eval_cmd->add_option("--out", eval_args.out, "report prefix (.json, .csv)");

  SweepArgs sweep_args;
  auto *sweep_cmd = app.add_subcommand("sweep", "evaluate one base period against several targets");
  sweep_cmd->add_option("--store", sweep_args.store)->required();
  sweep_cmd->add_option("--gold", sweep_args.gold)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--base", sweep_args.base)->required();
  sweep_cmd->add_option("--targets", sweep_args.targets)->required();
  sweep_cmd->add_option("--kind", sweep_args.kind)->check(CLI::IsMember({"svd", "cbow"}));
  sweep_cmd->add_option("--methods", sweep_args.methods);
  sweep_cmd->add_option("--k", sweep_args.ks);
  sweep_cmd->add_flag("--balance-tokens", sweep_args.balance);
  sweep_cmd->add_option("--seed", sweep_args.seed);
  sweep_cmd->add_option("--dim", sweep_args.dim)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--window", sweep_args.window)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--min-count", sweep_args.min_count);
  sweep_cmd->add_option("--epochs", sweep_args.epochs);
  sweep_cmd->add_option("--order", sweep_args.order)->check(CLI::IsMember({"anti", "desc"}));
  sweep_cmd->add_option("--out", sweep_args.out, "report prefix (.json, .csv)");

  SynthArgs synth_args;
  auto *synth_cmd = app.add_subcommand("synth", "generate a synthetic replacement corpus");
  synth_cmd->add_option("--pairs", synth_args.pairs)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--fillers", synth_args.fillers);
  synth_cmd->add_option("--docs-per-period", synth_args.docs_per_period);
  synth_cmd->add_option("--periods", synth_args.periods);
  synth_cmd->add_option("--seed", synth_args.seed);
  synth_cmd->add_option("--out", synth_args.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  // deepest selected subcommand
  CLI::App *active = &app;
  while (!active->get_subcommands().empty()) active = active->get_subcommands().front();

  try {
    if (!g.config.empty()) apply_config(active, read_key_value_file(g.config));
    if (*ingest_cmd) run_ingest(ingest_args, active, g);
    else if (*jsd_cmd) run_jsd(jsd_args, active, g);
    else if (*freq_cmd) run_freq(freq_args, active, g);
    else if (*train_cmd) run_train(train_args, active, g);
    else if (*align_cmd) run_align(align_args, active, g);
    else if (*query_cmd) run_query(query_args, active, g);
    else if (*eval_cmd) run_eval(eval_args, active, g);
    else if (*sweep_cmd) run_sweep(sweep_args, active, g);
    else if (*synth_cmd) run_synth(synth_args, active, g);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError &e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
