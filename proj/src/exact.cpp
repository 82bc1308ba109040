#include "contab/exact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>

namespace contab {
namespace {

// Fixed-width unsigned integers stored as `limbs` little-endian words. The
// width is chosen per instance from an a-priori bound on every DP value, so
// the arithmetic stays exact; a carry out of the top limb is a logic error.
void add_limbs(std::uint64_t* dst, const std::uint64_t* src, std::size_t limbs) {
  unsigned char carry = 0;
  for (std::size_t i = 0; i < limbs; ++i) {
    const std::uint64_t a = dst[i];
    const std::uint64_t sum = a + src[i];
    const unsigned char c1 = sum < a;
    const std::uint64_t out = sum + carry;
    const unsigned char c2 = out < sum;
    dst[i] = out;
    carry = c1 | c2;
  }
  if (carry) throw std::logic_error("exact DP: limb overflow (width bound violated)");
}

BigInt limbs_to_big(const std::uint64_t* src, std::size_t limbs) {
  BigInt out;
  mpz_import(out.get_mpz_t(), limbs, -1, sizeof(std::uint64_t), 0, 0, src);
  return out;
}

// Open-addressing map from fixed-width digit keys to fixed-width integers.
// Entries are stored densely in insertion order.
template <typename Digit>
class StateMap {
 public:
  StateMap(std::size_t width, std::size_t limbs) : width_(width), limbs_(limbs) { rehash(64); }

  std::size_t size() const noexcept { return count_; }
  const Digit* key(std::size_t i) const { return keys_.data() + i * width_; }
  const std::uint64_t* value(std::size_t i) const { return values_.data() + i * limbs_; }

  void add(const Digit* key, const std::uint64_t* value) {
    if ((count_ + 1) * 10 > slots_.size() * 7) rehash(slots_.size() * 2);
    std::size_t slot = hash(key) & mask_;
    while (true) {
      const std::uint32_t idx = slots_[slot];
      if (idx == 0) break;
      if (std::memcmp(this->key(idx - 1), key, width_ * sizeof(Digit)) == 0) {
        add_limbs(values_.data() + (idx - 1) * limbs_, value, limbs_);
        return;
      }
      slot = (slot + 1) & mask_;
    }
    if (count_ >= std::numeric_limits<std::uint32_t>::max() - 1) {
      throw ResourceLimitError("exact DP: state index space exhausted",
                               std::numeric_limits<std::uint32_t>::max());
    }
    keys_.insert(keys_.end(), key, key + width_);
    values_.insert(values_.end(), value, value + limbs_);
    ++count_;
    slots_[slot] = static_cast<std::uint32_t>(count_);
  }

  const std::uint64_t* find(const Digit* key) const {
    std::size_t slot = hash(key) & mask_;
    while (true) {
      const std::uint32_t idx = slots_[slot];
      if (idx == 0) return nullptr;
      if (std::memcmp(this->key(idx - 1), key, width_ * sizeof(Digit)) == 0) {
        return value(idx - 1);
      }
      slot = (slot + 1) & mask_;
    }
  }

 private:
  std::size_t hash(const Digit* key) const {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(key), width_ * sizeof(Digit)));
  }

  void rehash(std::size_t slot_count) {
    slots_.assign(slot_count, 0);
    mask_ = slot_count - 1;
    for (std::size_t i = 0; i < count_; ++i) {
      std::size_t slot = hash(key(i)) & mask_;
      while (slots_[slot] != 0) slot = (slot + 1) & mask_;
      slots_[slot] = static_cast<std::uint32_t>(i + 1);
    }
  }

  std::size_t width_;
  std::size_t limbs_;
  std::size_t count_ = 0;
  std::size_t mask_ = 0;
  std::vector<Digit> keys_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint32_t> slots_;
};

// The instance after normalization: `rows` tracked rows with sum `row_sum`,
// `columns` column steps with sum `column_sum`, rows <= columns.
struct Normalized {
  std::int64_t rows;
  std::int64_t row_sum;
  std::int64_t columns;
  std::int64_t column_sum;
};

Normalized normalize(const TableSpec& spec) {
  const TableSpec oriented = spec.m <= spec.n ? spec : transpose(spec);
  return Normalized{oriented.m, oriented.s, oriented.n, oriented.t};
}

// Limbs needed for any value reached within `layers` column steps: the total
// weight of a layer is at most C(rows + column_sum - 1, column_sum)^layers.
std::size_t limb_width(const Normalized& inst, std::int64_t layers) {
  const double per_column =
      log_binomial(static_cast<std::uint64_t>(inst.rows + inst.column_sum - 1),
                   static_cast<std::uint64_t>(inst.column_sum)) /
      std::numbers::ln2;
  const double bits = per_column * static_cast<double>(std::max<std::int64_t>(layers, 1)) + 2.0;
  return static_cast<std::size_t>(std::ceil(bits / 64.0)) + 1;
}

template <typename Digit>
class LayeredCounter {
 public:
  LayeredCounter(const Normalized& inst, std::size_t limbs, std::uint64_t max_states)
      : inst_(inst), width_(static_cast<std::size_t>(inst.rows)), limbs_(limbs),
        max_states_(max_states), current_(width_, limbs_) {
    std::vector<Digit> start(width_, static_cast<Digit>(inst.row_sum));
    std::vector<std::uint64_t> one(limbs_, 0);
    one[0] = 1;
    current_.add(start.data(), one.data());
  }

  std::int64_t layer() const noexcept { return layer_; }
  const StateMap<Digit>& current() const noexcept { return current_; }

  /// Fills one more column. `retained` counts states held elsewhere
  /// (snapshots) against the cap.
  void step(std::size_t retained) {
    const std::int64_t target = (inst_.columns - layer_ - 1) * inst_.column_sum;
    StateMap<Digit> stage = std::move(current_);
    std::vector<Digit> scratch(width_);

    for (std::size_t processed = 0; processed < width_; ++processed) {
      StateMap<Digit> next(width_, limbs_);
      for (std::size_t e = 0; e < stage.size(); ++e) {
        const Digit* key = stage.key(e);
        const std::uint64_t* weight = stage.value(e);
        std::int64_t sum_done = 0;
        std::int64_t sum_open = 0;
        for (std::size_t j = 0; j < processed; ++j) sum_done += key[j];
        for (std::size_t j = processed; j < width_; ++j) sum_open += key[j];
        const std::int64_t remaining = sum_done + sum_open - target;
        const std::int64_t deficit = key[processed];
        const std::int64_t rest = sum_open - deficit;
        const std::int64_t lo = std::max<std::int64_t>(0, remaining - rest);
        const std::int64_t hi = std::min(deficit, remaining);

        // Tail (unprocessed rows after this one) is shared by every choice.
        std::copy(key + processed + 1, key + width_, scratch.begin() + processed + 1);
        for (std::int64_t x = lo; x <= hi; ++x) {
          const auto placed = static_cast<Digit>(deficit - x);
          std::size_t pos = processed;
          while (pos > 0 && key[pos - 1] > placed) {
            scratch[pos] = key[pos - 1];
            --pos;
          }
          std::copy(key, key + pos, scratch.begin());
          scratch[pos] = placed;
          next.add(scratch.data(), weight);
        }
        check_cap(next.size() + stage.size() + retained);
      }
      stage = std::move(next);
    }
    current_ = std::move(stage);
    ++layer_;
#ifndef NDEBUG
    const std::int64_t expected = (inst_.columns - layer_) * inst_.column_sum;
    for (std::size_t e = 0; e < current_.size(); ++e) {
      std::int64_t total = 0;
      for (std::size_t j = 0; j < width_; ++j) total += current_.key(e)[j];
      assert(total == expected && "mass conservation");
    }
#endif
  }

 private:
  void check_cap(std::uint64_t stored) const {
    if (stored > max_states_) {
      throw ResourceLimitError("exact DP exceeded the state cap of " +
                                   std::to_string(max_states_) + " stored states",
                               max_states_);
    }
  }

  Normalized inst_;
  std::size_t width_;
  std::size_t limbs_;
  std::uint64_t max_states_;
  std::int64_t layer_ = 0;
  StateMap<Digit> current_;
};

// Number of labelled deficit vectors with the multiset of this sorted key.
template <typename Digit>
BigInt arrangements(const Digit* key, std::size_t width) {
  BigInt out = factorial(width);
  std::size_t run = 1;
  for (std::size_t j = 1; j <= width; ++j) {
    if (j < width && key[j] == key[j - 1]) {
      ++run;
    } else {
      out /= factorial(run);
      run = 1;
    }
  }
  return out;
}

template <typename Digit>
BigInt count_with(const Normalized& inst, const CountOptions& options) {
  const std::int64_t lo = inst.columns / 2;
  const std::int64_t hi = inst.columns - lo;
  const std::size_t limbs = limb_width(inst, hi);
  LayeredCounter<Digit> counter(inst, limbs, options.max_states);

  std::optional<StateMap<Digit>> half;
  if (lo == 0) half = counter.current();
  while (counter.layer() < hi) {
    counter.step(half ? half->size() : 0);
    if (counter.layer() == lo) half = counter.current();
  }

  // M = sum_D F_lo(D) F_hi(S - D) / arrangements(D).
  const std::size_t width = static_cast<std::size_t>(inst.rows);
  std::vector<Digit> complement(width);
  BigInt total = 0;
  for (std::size_t e = 0; e < half->size(); ++e) {
    const Digit* key = half->key(e);
    for (std::size_t j = 0; j < width; ++j) {
      complement[width - 1 - j] = static_cast<Digit>(inst.row_sum - key[j]);
    }
    const std::uint64_t* other = counter.current().find(complement.data());
    if (other == nullptr) continue;
    BigInt term = limbs_to_big(half->value(e), limbs) * limbs_to_big(other, limbs);
    const BigInt arr = arrangements(key, width);
    assert(term % arr == 0);
    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), arr.get_mpz_t());
    total += term;
  }
  return total;
}

template <typename Digit>
std::vector<std::pair<DpState, BigInt>> layer_with(const Normalized& inst, std::int64_t columns,
                                                   const CountOptions& options) {
  LayeredCounter<Digit> counter(inst, limb_width(inst, columns), options.max_states);
  while (counter.layer() < columns) counter.step(0);
  const auto& states = counter.current();
  std::vector<std::pair<DpState, BigInt>> out;
  out.reserve(states.size());
  const std::size_t limbs = limb_width(inst, columns);
  for (std::size_t e = 0; e < states.size(); ++e) {
    DpState state;
    state.sorted_deficits.assign(states.key(e), states.key(e) + inst.rows);
    std::sort(state.sorted_deficits.rbegin(), state.sorted_deficits.rend());
    state.columns_remaining = inst.columns - columns;
    out.emplace_back(std::move(state), limbs_to_big(states.value(e), limbs));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first.sorted_deficits > b.first.sorted_deficits;
  });
  return out;
}

}  // namespace

BigInt count_exact(const TableSpec& spec, const CountOptions& options) {
  const TableSpec checked = make_spec(spec.m, spec.s, spec.n, spec.t);
  const Normalized inst = normalize(checked);
  if (inst.row_sum <= std::numeric_limits<std::uint8_t>::max()) {
    return count_with<std::uint8_t>(inst, options);
  }
  if (inst.row_sum <= std::numeric_limits<std::uint16_t>::max()) {
    return count_with<std::uint16_t>(inst, options);
  }
  return count_with<std::uint32_t>(inst, options);
}

std::vector<std::pair<DpState, BigInt>> count_layer(const TableSpec& spec, std::int64_t columns,
                                                    const CountOptions& options) {
  const TableSpec checked = make_spec(spec.m, spec.s, spec.n, spec.t);
  const Normalized inst = normalize(checked);
  if (columns < 0 || columns > inst.columns) {
    throw DomainError("count_layer: column index out of range");
  }
  if (inst.row_sum <= std::numeric_limits<std::uint8_t>::max()) {
    return layer_with<std::uint8_t>(inst, columns, options);
  }
  if (inst.row_sum <= std::numeric_limits<std::uint16_t>::max()) {
    return layer_with<std::uint16_t>(inst, columns, options);
  }
  return layer_with<std::uint32_t>(inst, columns, options);
}

// ---------------------------------------------------------------------------

namespace {

struct Enumerator {
  std::int64_t m, s, n;
  std::vector<std::int64_t> column_left;
  std::vector<std::int64_t> row;
  std::uint64_t found = 0;

  // Enumerate entry `k` of row `i`; every composition of s into n parts is
  // visited, pruned only where an entry would overshoot its column.
  void visit(std::int64_t i, std::int64_t k, std::int64_t row_left) {
    if (i == m) {
      if (std::all_of(column_left.begin(), column_left.end(),
                      [](std::int64_t c) { return c == 0; })) {
        ++found;
      }
      return;
    }
    if (k == n - 1) {
      if (row_left > column_left[k]) return;
      column_left[k] -= row_left;
      visit(i + 1, 0, s);
      column_left[k] += row_left;
      return;
    }
    for (std::int64_t x = 0; x <= std::min(row_left, column_left[k]); ++x) {
      column_left[k] -= x;
      visit(i, k + 1, row_left - x);
      column_left[k] += x;
    }
  }
};

}  // namespace

BigInt count_bruteforce(const TableSpec& spec) {
  const TableSpec checked = make_spec(spec.m, spec.s, spec.n, spec.t);
  if (checked.m * checked.n > kBruteforceMaxCells || checked.s > kBruteforceMaxLineSum) {
    throw DomainError("count_bruteforce: instance " + to_string(checked) +
                      " exceeds the cap m*n <= 12, s <= 20");
  }
  Enumerator e{checked.m, checked.s, checked.n,
               std::vector<std::int64_t>(static_cast<std::size_t>(checked.n), checked.t), {}, 0};
  e.visit(0, 0, checked.s);
  return BigInt(static_cast<unsigned long>(e.found));
}

}  // namespace contab
