#pragma once

// Plumbing shared by the command implementations and the argument parser.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>

#include "csflab/cli.hpp"

namespace csflab::cli::detail {

struct ParamSpec {
  std::string name;
  std::string fallback;  // empty: the command picks a default
  std::string help;
};

class Params {
 public:
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  std::vector<double> grid(const std::string& key) const;
  std::vector<double> grid_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> list_or(const std::string& key, std::vector<double> fallback) const;

  /// Linear SNR from --snr-linear or --snr-db (default_db when neither is set).
  double snr(double default_db) const;

 private:
  std::map<std::string, std::string> values_;
};

struct Context {
  Params params;
  std::uint64_t seed;
  int jobs;
};

using CommandFn = std::function<std::vector<TradeoffCurve>(const Context&)>;

struct CommandSpec {
  std::string path;  // space-separated subcommand chain
  std::string description;
  std::vector<ParamSpec> params;
  CommandFn fn;
  bool positional_name = false;  // takes a positional "name" argument
};

const std::vector<CommandSpec>& command_table();

/// f(i) for i in [0, count) on up to `jobs` threads; results in index order.
/// The exception of the lowest failing index is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int jobs, const F& f) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)),
                                                      1, std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace csflab::cli::detail
