#ifndef LFGDOP_CHART_HPP
#define LFGDOP_CHART_HPP

// Bottom-up chart over fragment shapes. Only the category-matching
// condition is enforced here; unification happens during decoding.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/bank.hpp"

namespace lfgdop {

struct ItemKey {
    int start = 0;
    int end = 0;
    std::string category;
    friend auto operator<=>(const ItemKey&, const ItemKey&) = default;
};

// One way a shape covers an item's span; children align left-to-right
// with the shape's frontier slots.
struct ChartApp {
    const ShapeClass* shape = nullptr;
    std::vector<ItemKey> children;
};

struct Chart {
    std::vector<std::string> tokens;
    std::string initial_category;
    std::map<ItemKey, std::vector<ChartApp>> items;

    ItemKey root_key() const {
        return {0, static_cast<int>(tokens.size()), initial_category};
    }
    bool has_root() const {
        auto it = items.find(root_key());
        return it != items.end() && !it->second.empty();
    }
    const std::vector<ChartApp>& apps(const ItemKey& key) const {
        static const std::vector<ChartApp> none;
        auto it = items.find(key);
        return it == items.end() ? none : it->second;
    }
};

struct ChartOptions {
    std::string initial_category = "S";
    bool check_vocabulary = true;
};

namespace detail {

// All segmentations of [i,j) by the shape's yield; every slot consumes
// an existing item, every word consumes its token.
inline void match_yield(const Chart& chart, const ShapeClass& shape, int i, int j,
                        size_t k, int pos, std::vector<ItemKey>& children,
                        std::vector<ChartApp>& out) {
    if (k == shape.yield.size()) {
        if (pos == j) out.push_back({&shape, children});
        return;
    }
    const YieldElem& e = shape.yield[k];
    if (e.kind == YieldElem::Word) {
        if (pos < j && chart.tokens[pos] == e.text)
            match_yield(chart, shape, i, j, k + 1, pos + 1, children, out);
        return;
    }
    for (int q = pos + 1; q <= j; ++q) {
        ItemKey key{pos, q, e.text};
        auto it = chart.items.find(key);
        if (it == chart.items.end() || it->second.empty()) continue;
        children.push_back(key);
        match_yield(chart, shape, i, j, k + 1, q, children, out);
        children.pop_back();
    }
}

} // namespace detail

// Spans are filled in increasing length; within a span, shapes whose
// yield is a single slot are iterated to a fixpoint (assumes no unary
// category cycles, which Nonbranching Dominance rules out for corpora
// without mutually recursive unary productions).
inline Chart build_chart(const std::vector<std::string>& tokens, const FragmentBank& bank,
                         const ChartOptions& opts = {}) {
    if (tokens.empty()) throw Error(ErrorKind::Usage, "build_chart: empty sentence");
    if (opts.check_vocabulary) {
        std::set<std::string> vocab;
        for (const auto& [key, shape] : bank.shapes)
            for (const auto& e : shape.yield)
                if (e.kind == YieldElem::Word) vocab.insert(e.text);
        for (const auto& t : tokens)
            if (!vocab.count(t))
                throw Error(ErrorKind::Data, "out-of-vocabulary token '" + t + "'");
    }

    Chart chart;
    chart.tokens = tokens;
    chart.initial_category = opts.initial_category;
    int n = static_cast<int>(tokens.size());

    for (int len = 1; len <= n; ++len) {
        for (int i = 0; i + len <= n; ++i) {
            int j = i + len;
            // multi-element yields first: their slots cover shorter spans
            for (const auto& [key, shape] : bank.shapes) {
                if (shape.yield.size() == 1 && shape.yield[0].kind == YieldElem::Slot) continue;
                std::vector<ItemKey> children;
                std::vector<ChartApp> found;
                detail::match_yield(chart, shape, i, j, 0, i, children, found);
                if (found.empty()) continue;
                auto& apps = chart.items[{i, j, shape.root_category}];
                apps.insert(apps.end(), found.begin(), found.end());
            }
            // unary-yield closure
            bool changed = true;
            int rounds = 0;
            while (changed) {
                changed = false;
                if (++rounds > static_cast<int>(bank.by_root.size()) + 2)
                    throw Error(ErrorKind::Data, "unary fragment cycle in chart");
                for (const auto& [key, shape] : bank.shapes) {
                    if (shape.yield.size() != 1 || shape.yield[0].kind != YieldElem::Slot) continue;
                    ItemKey child{i, j, shape.yield[0].text};
                    auto it = chart.items.find(child);
                    if (it == chart.items.end() || it->second.empty()) continue;
                    auto& apps = chart.items[{i, j, shape.root_category}];
                    bool present = false;
                    for (const auto& a : apps)
                        if (a.shape == &shape && a.children.size() == 1 && a.children[0] == child) {
                            present = true;
                            break;
                        }
                    if (!present) {
                        apps.push_back({&shape, {child}});
                        changed = true;
                    }
                }
            }
        }
    }
    return chart;
}

// Category-matching derivations below each item (member choices
// included); saturates at `cap`.
inline long count_derivations(const Chart& chart, long cap = 1000000,
                              std::map<ItemKey, long>* memo_out = nullptr) {
    std::map<ItemKey, long> memo;
    struct Counter {
        const Chart& chart;
        std::map<ItemKey, long>& memo;
        long cap;
        long count(const ItemKey& key) {
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            memo[key] = 0;   // cycles contribute nothing new
            long total = 0;
            for (const ChartApp& app : chart.apps(key)) {
                long ways = static_cast<long>(app.shape->members.size());
                for (const ItemKey& c : app.children) {
                    long cc = count(c);
                    if (cc == 0) { ways = 0; break; }
                    if (ways > cap / cc) { ways = cap; break; }
                    ways *= cc;
                }
                total += ways;
                if (total >= cap) { total = cap; break; }
            }
            memo[key] = total;
            return total;
        }
    } counter{chart, memo, cap};
    long n = counter.count(chart.root_key());
    if (memo_out) *memo_out = std::move(memo);
    return n;
}

} // namespace lfgdop

#endif
