#include "proprules/store.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "proprules/errors.hpp"

namespace proprules {

std::vector<std::uint32_t> DomainSet::values() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for (std::uint64_t b = bits_; b; b &= b - 1)
        out.push_back(static_cast<std::uint32_t>(std::countr_zero(b)));
    return out;
}

Universe::Universe(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty())
        throw std::invalid_argument("universe must contain at least one value");
    if (symbols_.size() > 64)
        throw SizeLimitError("universe exceeds 64 values");
    std::unordered_set<std::string_view> seen;
    for (const auto& s : symbols_) {
        if (s.empty())
            throw std::invalid_argument("universe value name is empty");
        if (!seen.insert(s).second)
            throw std::invalid_argument("duplicate universe value: " + s);
    }
}

std::optional<std::uint32_t> Universe::index_of(std::string_view name) const {
    for (std::uint32_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == name)
            return i;
    return std::nullopt;
}

Store Store::top() {
    Store s;
    s.top_ = true;
    return s;
}

Store Store::of(std::vector<DomainSet> domains) {
    for (const auto& d : domains)
        if (d.empty())
            return top();
    Store s;
    s.domains_ = std::move(domains);
    return s;
}

Store Store::remove_value(std::uint32_t var, std::uint32_t value) const {
    if (top_)
        return *this;
    DomainSet d = domains_[var].without(value);
    if (d.empty())
        return top();
    Store s = *this;
    s.domains_[var] = d;
    return s;
}

Store Store::with_domain(std::uint32_t var, DomainSet d) const {
    if (top_)
        return *this;
    if (d.empty())
        return top();
    Store s = *this;
    s.domains_[var] = d;
    return s;
}

bool Store::all_singleton() const {
    if (top_)
        return false;
    return std::all_of(domains_.begin(), domains_.end(),
                       [](DomainSet d) { return d.is_singleton(); });
}

bool store_leq(const Store& s, const Store& t) {
    if (t.is_top())
        return true;
    if (s.is_top())
        return false;
    if (s.arity() != t.arity())
        throw std::invalid_argument("store_leq: arity mismatch");
    for (std::size_t i = 0; i < s.arity(); ++i)
        if (!t.domain(i).subset_of(s.domain(i)))
            return false;
    return true;
}

Store store_bottom(const Signature& sig) {
    std::vector<DomainSet> doms;
    doms.reserve(sig.size());
    for (const auto& u : sig)
        doms.push_back(u.full());
    return Store::of(std::move(doms));
}

std::size_t carrier_size(const Signature& sig) {
    std::size_t total = 1;
    for (const auto& u : sig) {
        const std::size_t per_var = (std::size_t{1} << u.size()) - 1;
        if (total > (std::size_t{1} << 40) / per_var)
            throw SizeLimitError("store carrier too large to enumerate");
        total *= per_var;
    }
    return total;
}

std::vector<Store> enumerate_stores(const Signature& sig, bool include_top) {
    constexpr std::size_t kCap = 4u << 20;
    const std::size_t n = carrier_size(sig);
    if (n > kCap)
        throw SizeLimitError("store carrier too large to enumerate");

    std::vector<Store> out;
    out.reserve(n + (include_top ? 1 : 0));
    std::vector<std::uint64_t> masks(sig.size(), 1);
    for (;;) {
        std::vector<DomainSet> doms;
        doms.reserve(sig.size());
        for (std::size_t i = 0; i < sig.size(); ++i)
            doms.push_back(DomainSet::from_bits(masks[i]));
        out.push_back(Store::of(std::move(doms)));
        // next mixed-radix step over nonempty masks
        std::size_t i = 0;
        for (; i < sig.size(); ++i) {
            const std::uint64_t last = sig[i].full().bits();
            if (masks[i] < last) {
                ++masks[i];
                break;
            }
            masks[i] = 1;
        }
        if (i == sig.size())
            break;
    }
    if (include_top)
        out.push_back(Store::top());
    return out;
}

std::size_t StoreHash::operator()(const Store& s) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mix(s.is_top() ? 0x9e3779b97f4a7c15ull : 0);
    if (!s.is_top())
        for (const auto& d : s.domains())
            mix(d.bits());
    return static_cast<std::size_t>(h);
}

std::string store_to_text(const Store& s, const Signature& sig) {
    if (s.is_top())
        return "TOP";
    std::string out;
    for (std::size_t i = 0; i < s.arity(); ++i) {
        if (i)
            out += ' ';
        out += '{';
        bool first = true;
        for (auto v : s.domain(i).values()) {
            if (!first)
                out += ',';
            first = false;
            out += sig[i].symbol(v);
        }
        out += '}';
    }
    return out;
}

} // namespace proprules
