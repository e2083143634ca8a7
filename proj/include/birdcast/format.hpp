#ifndef BIRDCAST_FORMAT_HPP
#define BIRDCAST_FORMAT_HPP

#include <charconv>
#include <string>
#include <system_error>

namespace birdcast {

// Shortest decimal form that round-trips to the same double. Keeps CSV and
// JSON artifacts diffable without losing precision.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

}  // namespace birdcast

#endif  // BIRDCAST_FORMAT_HPP
