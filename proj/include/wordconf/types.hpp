#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wordconf {

// Token inventory of the recognizer. Index in `tokens` is the token id.
struct Vocabulary {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
};

// Distribution over the vocabulary at one decoding step. Either a full dense
// row or the top-k entries plus the leftover mass. The leftover mass is
// treated as spread uniformly over the unlisted tokens; that is exact for
// dense rows and a documented approximation for sparse ones.
struct TokenPosterior {
  enum class Kind { Dense, Sparse };

  Kind kind = Kind::Dense;
  std::vector<double> dense;                            // Kind::Dense
  std::vector<std::pair<uint32_t, double>> topk;        // Kind::Sparse
  double rest = 0.0;                                    // Kind::Sparse

  static TokenPosterior make_dense(std::vector<double> values) {
    TokenPosterior p;
    p.kind = Kind::Dense;
    p.dense = std::move(values);
    return p;
  }
  static TokenPosterior make_sparse(std::vector<std::pair<uint32_t, double>> entries,
                                    double rest_mass) {
    TokenPosterior p;
    p.kind = Kind::Sparse;
    p.topk = std::move(entries);
    p.rest = rest_mass;
    return p;
  }
};

// One pass of the model over an utterance: dropout sample, ensemble member,
// or the single deterministic run. `run_id` is a provenance label only.
struct PosteriorRun {
  std::string run_id;
  std::vector<TokenPosterior> steps;
};

// Half-open token range [begin, end) forming one output word.
struct WordSpan {
  uint32_t begin = 0;
  uint32_t end = 0;

  uint32_t length() const { return end - begin; }
  bool operator==(const WordSpan&) const = default;
};

struct UtteranceRecord {
  std::string utt_id;
  std::vector<uint32_t> hyp_tokens;
  std::vector<WordSpan> word_boundaries;
  std::vector<std::string> hyp_words;
  std::vector<std::string> ref_words;
  std::vector<PosteriorRun> runs;

  std::size_t n_tokens() const { return hyp_tokens.size(); }
  std::size_t n_words() const { return word_boundaries.size(); }
};

struct Dataset {
  Vocabulary vocab;
  std::vector<UtteranceRecord> utterances;
};

// Validation. Throws Error(kind=Data) naming the offending field (and utt_id
// where there is one). `where` prefixes messages, e.g. "records.jsonl:12".
void validate(const Vocabulary& vocab, const std::string& where = {});
void validate(const TokenPosterior& p, std::size_t vocab_size,
              const std::string& where = {});
void validate(const UtteranceRecord& rec, std::size_t vocab_size,
              const std::string& where = {});
void validate(const Dataset& ds);

// Expands a posterior to a dense length-V row, spreading sparse leftover mass
// uniformly over the unlisted tokens, and renormalizes to unit sum. `out`
// must have size V.
void densify(const TokenPosterior& p, std::size_t vocab_size,
             std::span<double> out);
std::vector<double> densify(const TokenPosterior& p, std::size_t vocab_size);

}  // namespace wordconf
