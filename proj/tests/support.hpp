#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "uip/errors.hpp"
#include "uip/linalg_spd.hpp"
#include "uip/market_model.hpp"
#include "uip/rng.hpp"

// ErrorCode thrown by fn, or nullopt if it returns normally.
inline std::optional<uip::ErrorCode> error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const uip::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// B B^T + 0.2 I with B entries uniform in [-1, 1].
inline uip::SpdMatrix random_spd(std::size_t d, std::uint64_t seed) {
  uip::CounterRng rng(0xabcdef, seed);
  uip::Matrix b(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) b(i, j) = 2.0 * rng.uniform() - 1.0;
  uip::Matrix m = b * uip::transpose(b);
  for (std::size_t i = 0; i < d; ++i) m(i, i) += 0.2;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  return uip::make_spd(m);
}

// The one-dimensional at-the-money setup: s0 = 8, sigma = 1, T = 1, mu = 0.
inline uip::BachelierModel atm_model(double mu = 0.0) {
  return uip::BachelierModel::make({8.0}, {mu}, uip::make_spd(uip::Matrix{{1.0}}), 1.0);
}

inline uip::Payoff atm_call() { return uip::Payoff::basket_call({1.0}, -8.0); }
