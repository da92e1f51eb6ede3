#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sedgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownLanguage : public Error {
 public:
  explicit UnknownLanguage(const std::string& lang) : Error("unknown language: " + lang) {}
};

class UnknownSense : public Error {
 public:
  explicit UnknownSense(const std::string& id) : Error("unknown sense: " + id) {}
};

class UnknownEdge : public Error {
 public:
  explicit UnknownEdge(const std::string& from, const std::string& to)
      : Error("unknown edge: " + from + " -> " + to) {}
};

class UnknownHead : public Error {
 public:
  explicit UnknownHead(const std::string& id) : Error("unknown head: " + id) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t locus, const std::string& reason)
      : Error("line " + std::to_string(locus) + ": " + reason), locus_(locus), reason_(reason) {}

  std::size_t locus() const noexcept { return locus_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t locus_;
  std::string reason_;
};

// Raised when a record stream cannot form a two-language graph at all.
class FatalFormat : public Error {
 public:
  using Error::Error;
};

}  // namespace sedgraph
