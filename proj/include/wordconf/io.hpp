#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "wordconf/types.hpp"

namespace wordconf::io {

// Vocabulary file: one token per line, UTF-8; 0-based line number = token id.
Vocabulary parse_vocabulary(std::istream& in, const std::string& name = "vocab");
Vocabulary load_vocabulary(const std::string& path);
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);

// Records file: JSONL, one utterance per line. Parses, validates against the
// vocabulary and delivers records in input order; lines may be parsed in
// parallel but delivery stays sequential. Errors carry "<name>:<line>".
void for_each_record(std::istream& in, const Vocabulary& vocab,
                     const std::string& name,
                     const std::function<void(UtteranceRecord&&)>& sink);

Dataset load_dataset(const std::string& vocab_path,
                     const std::string& records_path);

// Serializes one record as a single JSON line (no trailing newline). Doubles
// are written in shortest round-trip form, so parse(serialize(x)) == x.
void append_record_json(const UtteranceRecord& rec, std::string& out);
std::string record_json(const UtteranceRecord& rec);

void write_dataset(const Dataset& ds, const std::string& vocab_path,
                   const std::string& records_path);

}  // namespace wordconf::io
