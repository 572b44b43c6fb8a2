#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace codenav {

// Repo-relative, "/"-separated path. Never absolute, no "." or ".." segments.
class ModulePath {
 public:
  ModulePath() = default;
  // Throws std::invalid_argument on a non-canonical path.
  explicit ModulePath(std::string value);

  static std::optional<ModulePath> parse(std::string_view value);
  static bool is_canonical(std::string_view value);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }
  bool is_python() const;
  // "app/db/base.py" -> "app/db"; top-level files -> "".
  std::string parent_dir() const;

  auto operator<=>(const ModulePath&) const = default;
  bool operator==(const ModulePath&) const = default;

 private:
  std::string value_;
};

inline std::ostream& operator<<(std::ostream& os, const ModulePath& p) {
  return os << p.str();
}

}  // namespace codenav

template <>
struct std::hash<codenav::ModulePath> {
  std::size_t operator()(const codenav::ModulePath& p) const noexcept {
    return std::hash<std::string>{}(p.str());
  }
};
