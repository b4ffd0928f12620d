#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "diachron/corpus.h"
#include "diachron/embedding.h"

namespace diachron {

struct CbowConfig {
  int dim = 300;
  int window = 2;
  int negatives = 5;
  double downsample = 1e-5;
  int epochs = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  int64_t min_count = 10;
  double noise_exponent = 0.75;
  uint64_t seed = 1;
  // 1 is deterministic; more workers update the shared parameters without locks.
  int workers = 1;
};

struct CbowParameters {
  Matrix input;   // |V| x d, the word vectors returned by training
  Matrix output;  // |V| x d, negative-sampling output vectors
};

// Scratch space for one training example.
struct CbowScratch {
  Vector hidden;       // mean of the context input vectors
  Vector grad_hidden;  // dLoss/dhidden
  Matrix grad_output;  // row 0: center word, rows 1..: negatives
};

// Loss of one example,
//   -ln s(o_center . h) - sum_neg ln s(-o_neg . h),  h = mean of context inputs,
// and its gradient. dLoss/d input_c = grad_hidden / |context| for every
// context occurrence; dLoss/d output_row = grad_output row.
double cbow_loss_and_gradient(const CbowParameters &params, std::span<const int> context,
                              int center, std::span<const int> negatives, CbowScratch &scratch);

struct CbowStats {
  std::vector<double> epoch_mean_loss;
  int64_t examples = 0;
};

// Vocabulary is ordered by count then token; words below min_count are
// removed from the token stream before windowing.
EmbeddingSpace train_cbow(const PeriodCorpus &pc, const CbowConfig &cfg, CbowStats *stats = nullptr);

}  // namespace diachron
