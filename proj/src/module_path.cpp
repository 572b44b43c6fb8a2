#include "codenav/module_path.hpp"

#include <stdexcept>

namespace codenav {

bool ModulePath::is_canonical(std::string_view v) {
  if (v.empty() || v.front() == '/' || v.back() == '/') return false;
  if (v.find('\\') != std::string_view::npos) return false;
  if (v.find('\0') != std::string_view::npos) return false;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t end = v.find('/', start);
    if (end == std::string_view::npos) end = v.size();
    std::string_view seg = v.substr(start, end - start);
    if (seg.empty() || seg == "." || seg == "..") return false;
    start = end + 1;
  }
  return true;
}

ModulePath::ModulePath(std::string value) : value_(std::move(value)) {
  if (!is_canonical(value_)) {
    throw std::invalid_argument("not a canonical repo-relative path: '" +
                                value_ + "'");
  }
}

std::optional<ModulePath> ModulePath::parse(std::string_view value) {
  if (!is_canonical(value)) return std::nullopt;
  return ModulePath(std::string(value));
}

bool ModulePath::is_python() const {
  return value_.size() > 3 && value_.ends_with(".py");
}

std::string ModulePath::parent_dir() const {
  auto slash = value_.rfind('/');
  return slash == std::string::npos ? std::string() : value_.substr(0, slash);
}

}  // namespace codenav
