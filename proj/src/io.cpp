#include "wordconf/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wordconf/error.hpp"
#include "wordconf/parallel.hpp"

namespace wordconf::io {
namespace {

using nlohmann::json;

std::string at_line(const std::string& name, std::size_t line_no) {
  return name + ":" + std::to_string(line_no);
}

// --- serialization ---------------------------------------------------------

void append_double(double v, std::string& out) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_uint(uint64_t v, std::string& out) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_string(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void append_step(const TokenPosterior& step, std::string& out) {
  if (step.kind == TokenPosterior::Kind::Dense) {
    out += "{\"dense\":[";
    for (std::size_t i = 0; i < step.dense.size(); ++i) {
      if (i) out.push_back(',');
      append_double(step.dense[i], out);
    }
    out += "]}";
  } else {
    out += "{\"topk\":[";
    for (std::size_t i = 0; i < step.topk.size(); ++i) {
      if (i) out.push_back(',');
      out.push_back('[');
      append_uint(step.topk[i].first, out);
      out.push_back(',');
      append_double(step.topk[i].second, out);
      out.push_back(']');
    }
    out += "],\"rest\":";
    append_double(step.rest, out);
    out.push_back('}');
  }
}

// --- parsing ---------------------------------------------------------------

TokenPosterior parse_step(const json& j) {
  TokenPosterior step;
  if (auto it = j.find("dense"); it != j.end()) {
    step.kind = TokenPosterior::Kind::Dense;
    step.dense.reserve(it->size());
    for (const json& v : *it) step.dense.push_back(v.get<double>());
    return step;
  }
  if (auto it = j.find("topk"); it != j.end()) {
    step.kind = TokenPosterior::Kind::Sparse;
    step.topk.reserve(it->size());
    for (const json& pair : *it) {
      if (!pair.is_array() || pair.size() != 2) {
        throw data_error("topk entry must be an [index, probability] pair");
      }
      step.topk.emplace_back(pair[0].get<uint32_t>(), pair[1].get<double>());
    }
    step.rest = j.at("rest").get<double>();
    return step;
  }
  throw data_error("step must contain either 'dense' or 'topk'");
}

UtteranceRecord parse_record_line(const std::string& line,
                                  std::size_t vocab_size,
                                  const std::string& where) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw data_error(where + ": malformed JSON: " + e.what());
  }
  UtteranceRecord rec;
  try {
    rec.utt_id = j.at("utt_id").get<std::string>();
    const json& toks = j.at("hyp_tokens");
    rec.hyp_tokens.reserve(toks.size());
    for (const json& t : toks) rec.hyp_tokens.push_back(t.get<uint32_t>());
    for (const json& b : j.at("word_boundaries")) {
      if (!b.is_array() || b.size() != 2) {
        throw data_error("word boundary must be a [begin, end) pair");
      }
      rec.word_boundaries.push_back({b[0].get<uint32_t>(), b[1].get<uint32_t>()});
    }
    for (const json& w : j.at("hyp_words")) {
      rec.hyp_words.push_back(w.get<std::string>());
    }
    for (const json& w : j.at("ref_words")) {
      rec.ref_words.push_back(w.get<std::string>());
    }
    for (const json& r : j.at("runs")) {
      PosteriorRun run;
      run.run_id = r.at("run_id").get<std::string>();
      const json& steps = r.at("steps");
      run.steps.reserve(steps.size());
      for (const json& s : steps) run.steps.push_back(parse_step(s));
      rec.runs.push_back(std::move(run));
    }
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw data_error(where + ": " + e.what());
  }
  validate(rec, vocab_size, where);
  return rec;
}

}  // namespace

Vocabulary parse_vocabulary(std::istream& in, const std::string& name) {
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.tokens.push_back(line);
  }
  validate(vocab, name);
  return vocab;
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open vocabulary file '" + path + "'");
  return parse_vocabulary(in, path);
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const std::string& tok : vocab.tokens) out << tok << '\n';
}

void for_each_record(std::istream& in, const Vocabulary& vocab,
                     const std::string& name,
                     const std::function<void(UtteranceRecord&&)>& sink) {
  constexpr std::size_t kBatch = 256;
  const std::size_t vocab_size = vocab.size();

  std::unordered_set<std::string> seen_ids;
  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
  lines.reserve(kBatch);

  struct Slot {
    UtteranceRecord rec;
    std::string error;
  };
  std::vector<Slot> slots;

  std::size_t line_no = 0;
  std::string line;
  bool eof = false;
  while (!eof) {
    lines.clear();
    line_numbers.clear();
    while (lines.size() < kBatch) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;  // blank lines are permitted
      lines.push_back(std::move(line));
      line_numbers.push_back(line_no);
    }
    if (lines.empty()) continue;

    slots.assign(lines.size(), Slot{});
    par::for_each_chunk(lines.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          slots[i].rec = parse_record_line(lines[i], vocab_size,
                                           at_line(name, line_numbers[i]));
        } catch (const Error& e) {
          slots[i].error = e.what();
        }
      }
    });

    // Deliver in input order; the first bad line wins no matter how the
    // batch was split across workers.
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].error.empty()) throw data_error(slots[i].error);
      if (!seen_ids.insert(slots[i].rec.utt_id).second) {
        throw data_error(at_line(name, line_numbers[i]) + ": duplicate utt_id '" +
                         slots[i].rec.utt_id + "'");
      }
      sink(std::move(slots[i].rec));
    }
  }
}

Dataset load_dataset(const std::string& vocab_path,
                     const std::string& records_path) {
  Dataset ds;
  ds.vocab = load_vocabulary(vocab_path);
  std::ifstream in(records_path);
  if (!in) throw data_error("cannot open records file '" + records_path + "'");
  for_each_record(in, ds.vocab, records_path, [&](UtteranceRecord&& rec) {
    ds.utterances.push_back(std::move(rec));
  });
  return ds;
}

void append_record_json(const UtteranceRecord& rec, std::string& out) {
  out += "{\"utt_id\":";
  append_string(rec.utt_id, out);
  out += ",\"hyp_tokens\":[";
  for (std::size_t i = 0; i < rec.hyp_tokens.size(); ++i) {
    if (i) out.push_back(',');
    append_uint(rec.hyp_tokens[i], out);
  }
  out += "],\"word_boundaries\":[";
  for (std::size_t i = 0; i < rec.word_boundaries.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back('[');
    append_uint(rec.word_boundaries[i].begin, out);
    out.push_back(',');
    append_uint(rec.word_boundaries[i].end, out);
    out.push_back(']');
  }
  out += "],\"hyp_words\":[";
  for (std::size_t i = 0; i < rec.hyp_words.size(); ++i) {
    if (i) out.push_back(',');
    append_string(rec.hyp_words[i], out);
  }
  out += "],\"ref_words\":[";
  for (std::size_t i = 0; i < rec.ref_words.size(); ++i) {
    if (i) out.push_back(',');
    append_string(rec.ref_words[i], out);
  }
  out += "],\"runs\":[";
  for (std::size_t r = 0; r < rec.runs.size(); ++r) {
    if (r) out.push_back(',');
    out += "{\"run_id\":";
    append_string(rec.runs[r].run_id, out);
    out += ",\"steps\":[";
    for (std::size_t k = 0; k < rec.runs[r].steps.size(); ++k) {
      if (k) out.push_back(',');
      append_step(rec.runs[r].steps[k], out);
    }
    out += "]}";
  }
  out += "]}";
}

std::string record_json(const UtteranceRecord& rec) {
  std::string out;
  out.reserve(256);
  append_record_json(rec, out);
  return out;
}

void write_dataset(const Dataset& ds, const std::string& vocab_path,
                   const std::string& records_path) {
  {
    std::ofstream out(vocab_path, std::ios::binary);
    if (!out) throw data_error("cannot write vocabulary file '" + vocab_path + "'");
    write_vocabulary(out, ds.vocab);
  }
  std::ofstream out(records_path, std::ios::binary);
  if (!out) throw data_error("cannot write records file '" + records_path + "'");
  std::string buf;
  for (const UtteranceRecord& rec : ds.utterances) {
    buf.clear();
    append_record_json(rec, buf);
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

}  // namespace wordconf::io
