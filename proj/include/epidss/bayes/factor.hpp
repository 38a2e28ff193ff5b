#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace epidss::bayes {

// Dense table over a list of variables, row-major with the last variable
// varying fastest. Variable identities are CompiledNetwork indices.
struct Factor {
    std::vector<std::size_t> vars;
    std::vector<std::size_t> cards;
    std::vector<double> values;

    bool contains(std::size_t v) const { return std::find(vars.begin(), vars.end(), v) != vars.end(); }

    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(vars.size(), 1);
        for (std::size_t k = vars.size(); k-- > 1;) s[k - 1] = s[k] * cards[k];
        return s;
    }

    double total() const {
        double z = 0.0;
        for (double x : values) z += x;
        return z;
    }
};

namespace detail {

// Stride of each of `target` vars inside `f`, 0 when f does not mention it.
inline std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::size_t>& target) {
    auto fs = f.strides();
    std::vector<std::size_t> out(target.size(), 0);
    for (std::size_t k = 0; k < target.size(); ++k) {
        auto it = std::find(f.vars.begin(), f.vars.end(), target[k]);
        if (it != f.vars.end()) out[k] = fs[static_cast<std::size_t>(it - f.vars.begin())];
    }
    return out;
}

} // namespace detail

inline Factor multiply(const Factor& a, const Factor& b) {
    Factor r;
    for (std::size_t k = 0; k < a.vars.size(); ++k) {
        r.vars.push_back(a.vars[k]);
        r.cards.push_back(a.cards[k]);
    }
    for (std::size_t k = 0; k < b.vars.size(); ++k) {
        if (!a.contains(b.vars[k])) {
            r.vars.push_back(b.vars[k]);
            r.cards.push_back(b.cards[k]);
        }
    }
    std::size_t size = 1;
    for (std::size_t c : r.cards) size *= c;
    r.values.assign(size, 0.0);

    auto sa = detail::strides_in(a, r.vars);
    auto sb = detail::strides_in(b, r.vars);
    std::vector<std::size_t> digit(r.vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t j = 0; j < size; ++j) {
        r.values[j] = a.values[ia] * b.values[ib];
        for (std::size_t k = r.vars.size(); k-- > 0;) {
            ++digit[k];
            ia += sa[k];
            ib += sb[k];
            if (digit[k] < r.cards[k]) break;
            ia -= sa[k] * r.cards[k];
            ib -= sb[k] * r.cards[k];
            digit[k] = 0;
        }
    }
    return r;
}

inline Factor sum_out(const Factor& f, std::size_t var) {
    Factor r;
    for (std::size_t k = 0; k < f.vars.size(); ++k) {
        if (f.vars[k] == var) continue;
        r.vars.push_back(f.vars[k]);
        r.cards.push_back(f.cards[k]);
    }
    std::size_t size = 1;
    for (std::size_t c : r.cards) size *= c;
    r.values.assign(size, 0.0);

    auto sr = detail::strides_in(r, f.vars);
    std::vector<std::size_t> digit(f.vars.size(), 0);
    std::size_t ir = 0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        r.values[ir] += f.values[j];
        for (std::size_t k = f.vars.size(); k-- > 0;) {
            ++digit[k];
            ir += sr[k];
            if (digit[k] < f.cards[k]) break;
            ir -= sr[k] * f.cards[k];
            digit[k] = 0;
        }
    }
    return r;
}

} // namespace epidss::bayes
