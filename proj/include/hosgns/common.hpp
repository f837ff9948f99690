// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hosgns {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyGraphError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ResourceError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class InfeasibleError : public Error { using Error::Error; };

class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t iteration, double lr)
      : Error("non-finite loss at iteration " + std::to_string(iteration) +
              " (lr=" + std::to_string(lr) + ")"),
        iteration_(iteration), lr_(lr) {}
  std::int64_t iteration() const noexcept { return iteration_; }
  double lr() const noexcept { return lr_; }

 private:
  std::int64_t iteration_;
  double lr_;
};

/// Role of a tensor mode / embedding factor.
enum class Role { Node, Context, Time, ContextTime };

std::string_view role_name(Role r);
Role role_from_name(std::string_view name);
/// Single-letter factor tag: W, C, T, S.
char role_letter(Role r);

// Seeds -------------------------------------------------------------------

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stable sub-seed for (master, stage, index); independent of call order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(master ^ fnv1a(stage)) + mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return mix64(mix64(master + mix64(a)) ^ mix64(b ^ 0x2545f4914f6cdd1dULL));
}

}  // namespace hosgns
