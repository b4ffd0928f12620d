#include "diachron/cbow.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "diachron/error.h"

namespace diachron {

namespace {

double log_sigmoid(double x) {
  // ln s(x) = -ln(1 + e^-x), stable for both signs
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

// Samples word ids from count^exponent.
class NoiseSampler {
 public:
  NoiseSampler(const std::vector<int64_t> &counts, double exponent) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), exponent);
      cumulative_.push_back(total);
    }
    for (auto &x : cumulative_) x /= total;
  }

  int sample(std::mt19937_64 &rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

double cbow_loss_and_gradient(const CbowParameters &params, std::span<const int> context,
                              int center, std::span<const int> negatives, CbowScratch &scratch) {
  const Eigen::Index d = params.input.cols();
  scratch.hidden.setZero(d);
  for (int c : context) scratch.hidden += params.input.row(c).transpose();
  scratch.hidden /= static_cast<double>(context.size());

  scratch.grad_hidden.setZero(d);
  scratch.grad_output.resize(static_cast<Eigen::Index>(negatives.size()) + 1, d);

  double loss = 0.0;
  for (size_t k = 0; k <= negatives.size(); ++k) {
    const int word = (k == 0) ? center : negatives[k - 1];
    const double label = (k == 0) ? 1.0 : 0.0;
    const double score = params.output.row(word).dot(scratch.hidden);
    loss -= (k == 0) ? log_sigmoid(score) : log_sigmoid(-score);
    // d/dscore of the logistic loss
    const double g = sigmoid(score) - label;
    scratch.grad_hidden += g * params.output.row(word).transpose();
    scratch.grad_output.row(static_cast<Eigen::Index>(k)) = g * scratch.hidden.transpose();
  }
  return loss;
}

EmbeddingSpace train_cbow(const PeriodCorpus &pc, const CbowConfig &cfg, CbowStats *stats) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 0 || cfg.epochs < 1) {
    throw DataError("CBOW needs dim, window and epochs >= 1 and negatives >= 0");
  }

  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto &[tok, c] : pc.vocabulary()) {
    if (c >= cfg.min_count) kept.emplace_back(tok, c);
  }
  if (kept.empty()) {
    throw DataError("CBOW vocabulary for " + pc.period().label() + " is empty at min_count " +
                    std::to_string(cfg.min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> vocab;
  std::vector<int64_t> counts;
  std::unordered_map<std::string, int> index;
  for (const auto &[tok, c] : kept) {
    index.emplace(tok, static_cast<int>(vocab.size()));
    vocab.push_back(tok);
    counts.push_back(c);
  }
  const auto v = static_cast<Eigen::Index>(vocab.size());

  // documents as id streams; pruned words vanish
  std::vector<std::vector<int>> docs;
  int64_t train_words = 0;
  for (const auto &doc : pc.documents()) {
    std::vector<int> ids;
    for (const auto &tok : doc.tokens) {
      auto it = index.find(tok);
      if (it != index.end()) ids.push_back(it->second);
    }
    train_words += static_cast<int64_t>(ids.size());
    if (ids.size() > 1) docs.push_back(std::move(ids));
  }

  std::vector<double> keep_prob(vocab.size(), 1.0);
  if (cfg.downsample > 0.0) {
    for (size_t i = 0; i < vocab.size(); ++i) {
      const double f = static_cast<double>(counts[i]) / static_cast<double>(train_words);
      keep_prob[i] = std::clamp(std::sqrt(cfg.downsample / f), 0.0, 1.0);
    }
  }
  const NoiseSampler noise(counts, cfg.noise_exponent);

  CbowParameters params;
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-0.5 / cfg.dim, 0.5 / cfg.dim);
    params.input.resize(v, cfg.dim);
    for (Eigen::Index i = 0; i < v; ++i) {
      for (Eigen::Index j = 0; j < cfg.dim; ++j) params.input(i, j) = init(rng);
    }
    params.output = Matrix::Zero(v, cfg.dim);
  }

  const int workers = std::max(1, cfg.workers);
  const double total_progress = static_cast<double>(cfg.epochs) * static_cast<double>(train_words);
  std::atomic<int64_t> words_done{0};
  if (stats) stats->epoch_mean_loss.clear();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> loss_sum(workers, 0.0);
    std::vector<int64_t> example_count(workers, 0);

    auto run_shard = [&](int worker) {
      std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ull * (epoch * workers + worker + 1));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      CbowScratch scratch;
      std::vector<int> stream, context, negs;
      for (size_t di = worker; di < docs.size(); di += workers) {
        const auto &doc = docs[di];
        stream.clear();
        for (int id : doc) {
          if (keep_prob[id] >= 1.0 || unit(rng) < keep_prob[id]) stream.push_back(id);
        }
        const double progress = static_cast<double>(words_done.load(std::memory_order_relaxed));
        const double lr = std::max(cfg.min_learning_rate,
                                   cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) *
                                                           progress / total_progress);
        const int n = static_cast<int>(stream.size());
        for (int i = 0; i < n; ++i) {
          context.clear();
          for (int j = std::max(0, i - cfg.window); j <= std::min(n - 1, i + cfg.window); ++j) {
            if (j != i) context.push_back(stream[j]);
          }
          if (context.empty()) continue;
          const int center = stream[i];
          negs.clear();
          while (static_cast<int>(negs.size()) < cfg.negatives) {
            const int w = noise.sample(rng);
            if (w != center) negs.push_back(w);
            else if (v == 1) break;
          }
          loss_sum[worker] += cbow_loss_and_gradient(params, context, center, negs, scratch);
          ++example_count[worker];
          for (size_t k = 0; k <= negs.size(); ++k) {
            const int word = (k == 0) ? center : negs[k - 1];
            params.output.row(word) -= lr * scratch.grad_output.row(static_cast<Eigen::Index>(k));
          }
          const double share = lr / static_cast<double>(context.size());
          for (int c : context) params.input.row(c) -= share * scratch.grad_hidden.transpose();
        }
        words_done.fetch_add(static_cast<int64_t>(doc.size()), std::memory_order_relaxed);
      }
    };

    if (workers == 1) {
      run_shard(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_shard, w);
      for (auto &t : threads) t.join();
    }

    double loss = 0.0;
    int64_t examples = 0;
    for (int w = 0; w < workers; ++w) {
      loss += loss_sum[w];
      examples += example_count[w];
    }
    if (stats) {
      stats->epoch_mean_loss.push_back(examples ? loss / static_cast<double>(examples) : 0.0);
      stats->examples += examples;
    }
  }

  std::map<std::string, std::string> meta;
  meta["method"] = "cbow";
  meta["period"] = pc.period().label();
  meta["dim"] = std::to_string(cfg.dim);
  meta["window"] = std::to_string(cfg.window);
  meta["negatives"] = std::to_string(cfg.negatives);
  meta["downsample"] = format_double(cfg.downsample);
  meta["epochs"] = std::to_string(cfg.epochs);
  meta["learning_rate"] = format_double(cfg.learning_rate);
  meta["min_learning_rate"] = format_double(cfg.min_learning_rate);
  meta["min_count"] = std::to_string(cfg.min_count);
  meta["noise_exponent"] = format_double(cfg.noise_exponent);
  meta["seed"] = std::to_string(cfg.seed);
  meta["workers"] = std::to_string(workers);
  return EmbeddingSpace(std::move(vocab), std::move(params.input), std::move(meta));
}

}  // namespace diachron
