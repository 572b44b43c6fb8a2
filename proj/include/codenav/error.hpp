#pragma once

#include <stdexcept>
#include <string>

namespace codenav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(what + ": " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Per-file syntax failure. Indexing records the file and keeps going.
class ParseError : public Error {
 public:
  ParseError(std::string path, int line, const std::string& msg)
      : Error(path + ":" + std::to_string(line) + ": " + msg),
        path_(std::move(path)),
        line_(line),
        detail_(msg) {}
  const std::string& path() const { return path_; }
  int line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  int line_;
  std::string detail_;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class FileNotInGraph : public Error {
 public:
  explicit FileNotInGraph(std::string path)
      : Error("file not found in graph: " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Malformed persisted documents (graph files, task specs, trial files).
class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyTranscript : public Error {
 public:
  using Error::Error;
};

class EmptyResultSet : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

}  // namespace codenav
