#ifndef TREEALIGN_ERROR_HPP
#define TREEALIGN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treealign {

// Malformed input text (bracketed parses, JSON records). `offset` is the
// character offset into the offending string, or npos when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset = std::string::npos)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A tree or boundary sequence that violates the structural conditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that are individually fine but inconsistent with each other
// (corpus length mismatch, word/leaf mismatch, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treealign

#endif  // TREEALIGN_ERROR_HPP
