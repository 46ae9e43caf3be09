#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <type_traits>
#include <vector>

namespace mtforge {

// Applies fn to every element and collects results in input order.
// fn must be pure; work is split into contiguous ranges, one per shard.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In> &items, Fn fn, std::size_t shards)
    -> std::vector<std::invoke_result_t<Fn &, const In &>> {
  using Out = std::invoke_result_t<Fn &, const In &>;
  std::vector<Out> out(items.size());
  if (items.empty())
    return out;
  if (shards <= 1 || items.size() == 1) {
    for (std::size_t i = 0; i < items.size(); ++i)
      out[i] = fn(items[i]);
    return out;
  }
  if (shards > items.size())
    shards = items.size();
  std::vector<std::thread> workers;
  workers.reserve(shards);
  const std::size_t chunk = (items.size() + shards - 1) / shards;
  for (std::size_t w = 0; w < shards; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(items.size(), begin + chunk);
    if (begin >= end)
      break;
    workers.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i)
        out[i] = fn(items[i]);
    });
  }
  for (auto &t : workers)
    t.join();
  return out;
}

} // namespace mtforge
