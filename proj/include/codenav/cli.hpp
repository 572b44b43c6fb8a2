#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace codenav {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kInput = 2;
inline constexpr int kNotFound = 3;
inline constexpr int kEmptyData = 4;
}  // namespace exit_code

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace codenav
