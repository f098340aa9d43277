#include "wordconf/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "wordconf/error.hpp"
#include "wordconf/kernels.hpp"

namespace wordconf {
namespace {

constexpr double kMassTolerance = 1e-6;

std::string prefix(const std::string& where) {
  return where.empty() ? std::string() : where + ": ";
}

bool valid_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const Vocabulary& vocab, const std::string& where) {
  if (vocab.size() < 2) {
    throw data_error(prefix(where) + "vocab_size must be >= 2, got " +
                     std::to_string(vocab.size()));
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& tok = vocab.tokens[i];
    if (tok.empty()) {
      throw data_error(prefix(where) + "token " + std::to_string(i) + " is empty");
    }
    if (!seen.insert(tok).second) {
      throw data_error(prefix(where) + "duplicate token '" + tok + "' at index " +
                       std::to_string(i));
    }
  }
}

void validate(const TokenPosterior& p, std::size_t vocab_size,
              const std::string& where) {
  if (p.kind == TokenPosterior::Kind::Dense) {
    if (p.dense.size() != vocab_size) {
      throw data_error(prefix(where) + "dense step has " +
                       std::to_string(p.dense.size()) + " entries, expected " +
                       std::to_string(vocab_size));
    }
    double sum = 0.0;
    for (double v : p.dense) {
      if (!valid_probability(v)) {
        throw data_error(prefix(where) + "probability out of [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
      throw data_error(prefix(where) + "probability mass of dense step is " +
                       std::to_string(sum) + ", expected 1 within 1e-6");
    }
  } else {
    if (p.topk.size() > vocab_size) {
      throw data_error(prefix(where) + "topk step lists more entries than vocab_size");
    }
    if (!valid_probability(p.rest)) {
      throw data_error(prefix(where) + "rest mass out of [0,1]");
    }
    std::unordered_set<uint32_t> seen;
    seen.reserve(p.topk.size());
    double sum = 0.0;
    for (const auto& [idx, v] : p.topk) {
      if (idx >= vocab_size) {
        throw data_error(prefix(where) + "topk index " + std::to_string(idx) +
                         " out of range (vocab_size " + std::to_string(vocab_size) + ")");
      }
      if (!seen.insert(idx).second) {
        throw data_error(prefix(where) + "duplicate topk index " + std::to_string(idx));
      }
      if (!valid_probability(v)) {
        throw data_error(prefix(where) + "probability out of [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum + p.rest - 1.0) > kMassTolerance) {
      throw data_error(prefix(where) + "probability mass of topk step is " +
                       std::to_string(sum + p.rest) + ", expected 1 within 1e-6");
    }
    if (p.topk.size() == vocab_size && p.rest > kMassTolerance) {
      throw data_error(prefix(where) +
                       "topk step covers the whole vocabulary but rest mass is nonzero");
    }
  }
}

void validate(const UtteranceRecord& rec, std::size_t vocab_size,
              const std::string& where) {
  const std::string at = prefix(where) + "utt '" + rec.utt_id + "': ";
  if (rec.utt_id.empty()) {
    throw data_error(prefix(where) + "utt_id is empty");
  }
  const std::size_t n_tok = rec.hyp_tokens.size();
  for (uint32_t t : rec.hyp_tokens) {
    if (t >= vocab_size) {
      throw data_error(at + "hyp_tokens index " + std::to_string(t) +
                       " out of range (vocab_size " + std::to_string(vocab_size) + ")");
    }
  }
  if (rec.word_boundaries.size() != rec.hyp_words.size()) {
    throw data_error(at + "word_boundaries and hyp_words differ in length (" +
                     std::to_string(rec.word_boundaries.size()) + " vs " +
                     std::to_string(rec.hyp_words.size()) + ")");
  }
  uint32_t prev_end = 0;
  for (std::size_t j = 0; j < rec.word_boundaries.size(); ++j) {
    const WordSpan& span = rec.word_boundaries[j];
    if (span.end <= span.begin) {
      throw data_error(at + "word_boundaries[" + std::to_string(j) + "] is empty");
    }
    if (j > 0 && span.begin < prev_end) {
      throw data_error(at + "word_boundaries[" + std::to_string(j) +
                       "] overlaps or is out of order");
    }
    if (span.end > n_tok) {
      throw data_error(at + "word_boundaries[" + std::to_string(j) +
                       "] exceeds the token count " + std::to_string(n_tok));
    }
    prev_end = span.end;
  }
  if (rec.runs.empty()) {
    throw data_error(at + "runs must be non-empty");
  }
  for (const PosteriorRun& run : rec.runs) {
    if (run.steps.size() != n_tok) {
      throw data_error(at + "run '" + run.run_id + "' has " +
                       std::to_string(run.steps.size()) + " steps, expected " +
                       std::to_string(n_tok));
    }
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
      validate(run.steps[k],
               vocab_size, at + "run '" + run.run_id + "' step " + std::to_string(k));
    }
  }
}

void validate(const Dataset& ds) {
  validate(ds.vocab);
  std::unordered_set<std::string_view> ids;
  ids.reserve(ds.utterances.size());
  for (const UtteranceRecord& rec : ds.utterances) {
    if (!ids.insert(rec.utt_id).second) {
      throw data_error("duplicate utt_id '" + rec.utt_id + "'");
    }
    validate(rec, ds.vocab.size());
  }
}

void densify(const TokenPosterior& p, std::size_t vocab_size,
             std::span<double> out) {
  if (p.kind == TokenPosterior::Kind::Dense) {
    std::copy(p.dense.begin(), p.dense.end(), out.begin());
  } else {
    const std::size_t unlisted = vocab_size - p.topk.size();
    const double fill = unlisted > 0 ? p.rest / static_cast<double>(unlisted) : 0.0;
    std::fill(out.begin(), out.end(), fill);
    for (const auto& [idx, v] : p.topk) out[idx] = v;
  }
  const double sum = kern::ops().sum(out.data(), out.size());
  if (sum > 0.0 && sum != 1.0) {
    kern::ops().scale(out.data(), 1.0 / sum, out.size());
  }
}

std::vector<double> densify(const TokenPosterior& p, std::size_t vocab_size) {
  std::vector<double> out(vocab_size);
  densify(p, vocab_size, out);
  return out;
}

}  // namespace wordconf
