#pragma once

#include <stdexcept>
#include <string>

namespace bharti {

// Base class for all translator errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Mapping-table parse or validation failure; carries the 1-based line number.
class table_error : public error {
 public:
  table_error(const std::string& what, int line)
      : error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Model or data file parse failure; carries the offending block name.
class format_error : public error {
 public:
  explicit format_error(const std::string& what, std::string block = "")
      : error(block.empty() ? what : "block '" + block + "': " + what),
        block_(std::move(block)) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

// Input contains no codepoint from any supported script.
class detection_error : public error {
 public:
  using error::error;
};

// An ambiguous site was hit but no tagger model was supplied.
class missing_model_error : public error {
 public:
  using error::error;
};

// Training loss became non-finite.
class divergence_error : public error {
 public:
  using error::error;
};

// A candidate tag is missing from the model's tag inventory.
class unknown_tag_error : public error {
 public:
  using error::error;
};

// Training corpus parse failure; carries the 1-based line number.
class corpus_error : public error {
 public:
  corpus_error(const std::string& what, int line)
      : error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace bharti
