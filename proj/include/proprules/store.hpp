#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace proprules {

// Subset of a universe's values, packed as a 64-bit mask.
class DomainSet {
public:
    constexpr DomainSet() = default;

    static constexpr DomainSet none() { return DomainSet{0}; }
    static constexpr DomainSet full(std::size_t width) {
        return DomainSet{width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1};
    }
    static constexpr DomainSet single(std::uint32_t v) { return DomainSet{std::uint64_t{1} << v}; }
    static constexpr DomainSet from_bits(std::uint64_t bits) { return DomainSet{bits}; }

    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(std::uint32_t v) const { return (bits_ >> v) & 1u; }
    constexpr bool subset_of(DomainSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(DomainSet o) const { return (bits_ & o.bits_) != 0; }
    constexpr bool is_singleton() const { return bits_ != 0 && (bits_ & (bits_ - 1)) == 0; }

    std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    std::uint32_t lowest() const { return static_cast<std::uint32_t>(std::countr_zero(bits_)); }

    constexpr DomainSet with(std::uint32_t v) const { return DomainSet{bits_ | (std::uint64_t{1} << v)}; }
    constexpr DomainSet without(std::uint32_t v) const { return DomainSet{bits_ & ~(std::uint64_t{1} << v)}; }
    constexpr DomainSet intersect(DomainSet o) const { return DomainSet{bits_ & o.bits_}; }
    constexpr DomainSet unite(DomainSet o) const { return DomainSet{bits_ | o.bits_}; }

    constexpr std::uint64_t bits() const { return bits_; }
    std::vector<std::uint32_t> values() const;

    friend constexpr bool operator==(DomainSet, DomainSet) = default;

private:
    constexpr explicit DomainSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

// Ordered set of named values a variable ranges over. At most 64 values.
class Universe {
public:
    explicit Universe(std::vector<std::string> symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& symbol(std::uint32_t i) const { return symbols_[i]; }
    std::span<const std::string> symbols() const { return symbols_; }
    std::optional<std::uint32_t> index_of(std::string_view name) const;
    DomainSet full() const { return DomainSet::full(symbols_.size()); }

    friend bool operator==(const Universe& a, const Universe& b) { return a.symbols_ == b.symbols_; }

private:
    std::vector<std::string> symbols_;
};

using Signature = std::vector<Universe>;

// A sequence of nonempty variable domains, or the failed element Top.
// Any operation that would empty a domain collapses the whole store to Top,
// so a non-Top store never holds an empty component.
class Store {
public:
    Store() = default; // zero-variable store (not Top)

    static Store top();
    static Store of(std::vector<DomainSet> domains); // collapses to Top if any domain is empty

    bool is_top() const { return top_; }
    std::size_t arity() const { return domains_.size(); }
    DomainSet domain(std::size_t var) const { return domains_[var]; }
    std::span<const DomainSet> domains() const { return domains_; }

    Store remove_value(std::uint32_t var, std::uint32_t value) const;
    Store with_domain(std::uint32_t var, DomainSet d) const;
    bool all_singleton() const;

    friend bool operator==(const Store&, const Store&) = default;

private:
    bool top_ = false;
    std::vector<DomainSet> domains_;
};

// s is below t in the component-wise reversed subset ordering; Top is greatest.
// Throws std::invalid_argument when the arities of two non-Top stores differ.
bool store_leq(const Store& s, const Store& t);

// The least element: every variable at its full universe.
Store store_bottom(const Signature& sig);

std::size_t carrier_size(const Signature& sig); // non-Top store count

// All stores of the quotient lattice in a fixed deterministic order,
// optionally with Top appended last. Guarded by a size cap.
std::vector<Store> enumerate_stores(const Signature& sig, bool include_top = true);

struct StoreHash {
    std::size_t operator()(const Store& s) const;
};

// Debug rendering: "{a,b} {c} ..." or "TOP" (no variable names).
std::string store_to_text(const Store& s, const Signature& sig);

} // namespace proprules
