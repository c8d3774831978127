#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modfusion/errors.hpp"
#include "modfusion/intmat.hpp"

namespace modfusion {

/// Element of a finite abelian group, as a residue vector relative to a
/// declared parent group.
using GroupElement = std::vector<std::int64_t>;

inline constexpr std::uint64_t kDefaultEnumerationLimit = 4096;

/// Finite abelian group presented as an explicit list of cyclic factor
/// orders: Z/n_1 x ... x Z/n_k. Canonical form has every factor >= 2;
/// the trivial group is the empty list. Elements are coordinate vectors
/// with 0 <= c_i < n_i.
class AbelianGroup {
public:
    AbelianGroup() = default;

    explicit AbelianGroup(std::vector<std::int64_t> factors)
    {
        factors_.reserve(factors.size());
        for (std::int64_t f : factors) {
            if (f < 1)
                throw invalid_input_error("group factor must be a positive integer, got " + std::to_string(f));
            if (f > 1)
                factors_.push_back(f); // factors of 1 contribute nothing
        }
    }

    const std::vector<std::int64_t>& factors() const { return factors_; }
    int rank() const { return static_cast<int>(factors_.size()); }

    std::uint64_t order() const
    {
        std::uint64_t n = 1;
        for (std::int64_t f : factors_)
            n = checked_umul(n, static_cast<std::uint64_t>(f));
        return n;
    }

    bool operator==(const AbelianGroup&) const = default;

    GroupElement zero() const { return GroupElement(factors_.size(), 0); }

    /// Validating constructor for user-supplied coordinates.
    GroupElement element(const std::vector<std::int64_t>& coords) const
    {
        if (coords.size() != factors_.size())
            throw invalid_input_error("element has " + std::to_string(coords.size()) + " coordinates, group has rank " +
                                      std::to_string(factors_.size()));
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (coords[i] < 0 || coords[i] >= factors_[i])
                throw invalid_input_error("coordinate " + std::to_string(i) + " out of range: " +
                                          std::to_string(coords[i]) + " not in [0, " + std::to_string(factors_[i]) + ")");
        return coords;
    }

    void check_element(const GroupElement& x) const
    {
        element(x);
    }

    /// Wrap arbitrary integer coordinates into canonical range.
    GroupElement reduce(const std::vector<std::int64_t>& coords) const
    {
        if (coords.size() != factors_.size())
            throw invalid_input_error("coordinate vector length does not match group rank");
        GroupElement out(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const std::int64_t n = factors_[i];
            out[i] = ((coords[i] % n) + n) % n;
        }
        return out;
    }

    GroupElement add(const GroupElement& a, const GroupElement& b) const
    {
        check_pair(a, b);
        GroupElement out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = (a[i] + b[i]) % factors_[i];
        return out;
    }

    GroupElement negate(const GroupElement& a) const
    {
        check_element(a);
        GroupElement out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = a[i] == 0 ? 0 : factors_[i] - a[i];
        return out;
    }

    GroupElement scale(std::int64_t k, const GroupElement& a) const
    {
        check_element(a);
        GroupElement out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::int64_t n = factors_[i];
            out[i] = ((checked_mul(k % n, a[i]) % n) + n) % n;
        }
        return out;
    }

    std::uint64_t element_order(const GroupElement& a) const
    {
        check_element(a);
        std::uint64_t ord = 1;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::int64_t n = factors_[i];
            const std::int64_t o = n / std::gcd(n, a[i]);
            ord = std::lcm(ord, static_cast<std::uint64_t>(o));
        }
        return ord;
    }

    /// All elements in odometer order (last coordinate fastest), zero first.
    std::vector<GroupElement> elements(std::uint64_t limit = kDefaultEnumerationLimit) const
    {
        if (order() > limit)
            throw resource_limit_error("group of order " + std::to_string(order()) +
                                       " exceeds the enumeration limit " + std::to_string(limit));
        std::vector<GroupElement> out;
        out.reserve(static_cast<std::size_t>(order()));
        GroupElement cur = zero();
        out.push_back(cur);
        while (increment(cur))
            out.push_back(cur);
        return out;
    }

    /// Odometer step; false once the zero vector comes back around.
    bool increment(GroupElement& cur) const
    {
        for (std::size_t i = cur.size(); i-- > 0;) {
            if (++cur[i] < factors_[i])
                return true;
            cur[i] = 0;
        }
        return false;
    }

private:
    std::vector<std::int64_t> factors_;

    static std::uint64_t checked_umul(std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t r;
        if (__builtin_mul_overflow(a, b, &r))
            throw internal_invariant_error("group order overflows the integer carrier");
        return r;
    }

    void check_pair(const GroupElement& a, const GroupElement& b) const
    {
        check_element(a);
        check_element(b);
    }
};

/// Canonically represented subgroup of an ambient group.
///
/// gen_matrix is the unique Hermite normal form of the lattice spanned
/// by the generators together with the ambient relations n_i * e_i, so
/// two subgroups are equal iff their canonical data are identical.
/// inv_factors d_1 | d_2 | ... give the abstract structure + Z/d_i, and
/// row i of basis_embed is the ambient image of the i-th abstract basis
/// vector (an element of order exactly d_i).
struct Subgroup {
    AbelianGroup ambient;
    IntMatrix gen_matrix;
    std::vector<std::int64_t> inv_factors;
    IntMatrix basis_embed;
    std::uint64_t order = 1;

    int rank() const { return static_cast<int>(inv_factors.size()); }
    AbelianGroup abstract_group() const { return AbelianGroup(inv_factors); }

    GroupElement basis_element(int i) const { return basis_embed.row(i); }

    /// Ambient image of abstract coordinates.
    GroupElement embed(const GroupElement& coords) const
    {
        if (static_cast<int>(coords.size()) != rank())
            throw invalid_input_error("abstract coordinate vector length does not match subgroup rank");
        std::vector<std::int64_t> acc(static_cast<std::size_t>(ambient.rank()), 0);
        for (int i = 0; i < rank(); ++i)
            for (int j = 0; j < ambient.rank(); ++j)
                acc[static_cast<std::size_t>(j)] =
                    checked_add(acc[static_cast<std::size_t>(j)], checked_mul(coords[static_cast<std::size_t>(i)], basis_embed.at(i, j)));
        return ambient.reduce(acc);
    }

    bool operator==(const Subgroup&) const = default;
};

namespace detail {

inline IntMatrix relation_matrix(const AbelianGroup& g)
{
    IntMatrix m(g.rank(), g.rank());
    for (int i = 0; i < g.rank(); ++i)
        m.at(i, i) = g.factors()[static_cast<std::size_t>(i)];
    return m;
}

// Solve c * b = t for upper-triangular full-rank b by forward
// substitution; divisions must be exact.
inline std::vector<std::int64_t> solve_upper_triangular(const IntMatrix& b, const std::vector<std::int64_t>& t)
{
    const int n = b.rows;
    std::vector<std::int64_t> c(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j) {
        std::int64_t acc = t[static_cast<std::size_t>(j)];
        for (int i = 0; i < j; ++i)
            acc = checked_sub(acc, checked_mul(c[static_cast<std::size_t>(i)], b.at(i, j)));
        if (b.at(j, j) == 0 || acc % b.at(j, j) != 0)
            throw internal_invariant_error("relation lattice is not contained in the generator lattice");
        c[static_cast<std::size_t>(j)] = acc / b.at(j, j);
    }
    return c;
}

} // namespace detail

/// Canonical subgroup generated by the given ambient elements.
inline Subgroup canonicalize_subgroup(const AbelianGroup& ambient, const std::vector<GroupElement>& gens)
{
    for (const GroupElement& g : gens)
        ambient.check_element(g);

    const int m = ambient.rank();
    IntMatrix stacked(static_cast<int>(gens.size()) + m, m);
    for (int i = 0; i < static_cast<int>(gens.size()); ++i)
        for (int j = 0; j < m; ++j)
            stacked.at(i, j) = gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i)
        stacked.at(static_cast<int>(gens.size()) + i, i) = ambient.factors()[static_cast<std::size_t>(i)];

    const HermiteForm hf = hermite_normal_form(stacked);
    if (hf.rank != m)
        throw internal_invariant_error("stacked generator lattice lost full rank");

    Subgroup s;
    s.ambient = ambient;
    s.gen_matrix = IntMatrix(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s.gen_matrix.at(i, j) = hf.h.at(i, j);

    // Structure of L/N where L = row lattice of gen_matrix and
    // N = relation lattice: write the relations in the basis of L and
    // read the invariant factors off the Smith form.
    IntMatrix rel_coeffs(m, m);
    for (int i = 0; i < m; ++i) {
        std::vector<std::int64_t> target(static_cast<std::size_t>(m), 0);
        target[static_cast<std::size_t>(i)] = ambient.factors()[static_cast<std::size_t>(i)];
        const auto c = detail::solve_upper_triangular(s.gen_matrix, target);
        for (int j = 0; j < m; ++j)
            rel_coeffs.at(i, j) = c[static_cast<std::size_t>(j)];
    }
    const SNFDecomposition snf = smith_normal_form(rel_coeffs);
    const IntMatrix adapted = snf.v_inv.multiplied(s.gen_matrix);

    const auto diag = snf.diagonal();
    std::uint64_t order = 1;
    std::vector<std::int64_t> inv;
    std::vector<int> keep;
    for (int i = 0; i < m; ++i) {
        const std::int64_t d = diag[static_cast<std::size_t>(i)];
        if (d <= 0)
            throw internal_invariant_error("subgroup structure matrix is singular");
        if (d > 1) {
            inv.push_back(d);
            keep.push_back(i);
            order *= static_cast<std::uint64_t>(d);
        }
    }
    s.inv_factors = std::move(inv);
    s.order = order;
    s.basis_embed = IntMatrix(static_cast<int>(keep.size()), m);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const GroupElement row = ambient.reduce(adapted.row(keep[r]));
        for (int j = 0; j < m; ++j)
            s.basis_embed.at(static_cast<int>(r), j) = row[static_cast<std::size_t>(j)];
    }
    return s;
}

inline Subgroup trivial_subgroup(const AbelianGroup& ambient)
{
    return canonicalize_subgroup(ambient, {});
}

inline Subgroup whole_group(const AbelianGroup& ambient)
{
    std::vector<GroupElement> gens;
    for (int i = 0; i < ambient.rank(); ++i) {
        GroupElement e = ambient.zero();
        e[static_cast<std::size_t>(i)] = 1;
        gens.push_back(e);
    }
    return canonicalize_subgroup(ambient, gens);
}

/// Abstract coordinates of x in the subgroup's invariant-factor basis,
/// or nullopt when x is not a member. Decided by congruence solving.
inline std::optional<GroupElement> subgroup_coordinates(const Subgroup& s, const GroupElement& x)
{
    if (x.size() != static_cast<std::size_t>(s.ambient.rank()))
        throw invalid_input_error("element does not live in the subgroup's ambient group");
    s.ambient.check_element(x);
    const int r = s.rank();
    const int m = s.ambient.rank();
    IntMatrix sys(r + m, m);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < m; ++j)
            sys.at(i, j) = s.basis_embed.at(i, j);
    for (int i = 0; i < m; ++i)
        sys.at(r + i, i) = s.ambient.factors()[static_cast<std::size_t>(i)];
    const auto sol = solve_row_system(sys, x);
    if (!sol)
        return std::nullopt;
    GroupElement coords(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        const std::int64_t d = s.inv_factors[static_cast<std::size_t>(i)];
        coords[static_cast<std::size_t>(i)] = (((*sol)[static_cast<std::size_t>(i)] % d) + d) % d;
    }
    return coords;
}

inline bool member(const Subgroup& s, const GroupElement& x)
{
    return subgroup_coordinates(s, x).has_value();
}

/// All |S| elements, in odometer order over the abstract basis.
inline std::vector<GroupElement> subgroup_elements(const Subgroup& s, std::uint64_t limit = kDefaultEnumerationLimit)
{
    if (s.order > limit)
        throw resource_limit_error("subgroup of order " + std::to_string(s.order) +
                                   " exceeds the enumeration limit " + std::to_string(limit));
    const AbelianGroup abs = s.abstract_group();
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(s.order));
    GroupElement cur = abs.zero();
    out.push_back(s.embed(cur));
    while (abs.increment(cur))
        out.push_back(s.embed(cur));
    return out;
}

inline void require_same_ambient(const Subgroup& s, const Subgroup& t, const char* op)
{
    if (!(s.ambient == t.ambient))
        throw invalid_input_error(std::string(op) + ": subgroups live in different ambient groups");
}

inline Subgroup intersect(const Subgroup& s, const Subgroup& t)
{
    require_same_ambient(s, t, "intersect");
    const int m = s.ambient.rank();
    IntMatrix paired(2 * m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            paired.at(i, j) = s.gen_matrix.at(i, j);
            paired.at(m + i, j) = checked_neg(t.gen_matrix.at(i, j));
        }
    const IntMatrix ker = kernel_basis(paired);
    std::vector<GroupElement> gens;
    for (int k = 0; k < ker.rows; ++k) {
        std::vector<std::int64_t> acc(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                acc[static_cast<std::size_t>(j)] =
                    checked_add(acc[static_cast<std::size_t>(j)], checked_mul(ker.at(k, i), s.gen_matrix.at(i, j)));
        gens.push_back(s.ambient.reduce(acc));
    }
    return canonicalize_subgroup(s.ambient, gens);
}

/// Join (subgroup generated by both).
inline Subgroup join(const Subgroup& s, const Subgroup& t)
{
    require_same_ambient(s, t, "join");
    std::vector<GroupElement> gens;
    for (int i = 0; i < s.basis_embed.rows; ++i)
        gens.push_back(s.basis_embed.row(i));
    for (int i = 0; i < t.basis_embed.rows; ++i)
        gens.push_back(t.basis_embed.row(i));
    return canonicalize_subgroup(s.ambient, gens);
}

/// Declared direct sum E (+) F of two subgroups of a common ambient
/// group, the carrier on which pair forms live. Coordinates are the
/// concatenation of the two abstract coordinate vectors, and the
/// canonical map to the ambient group is (e, f) |-> e + f.
struct DirectSumAmbient {
    Subgroup left;
    Subgroup right;
    AbelianGroup group; // Z/d_1 x ... x Z/d_r x Z/e_1 x ... x Z/e_s

    const AbelianGroup& target() const { return left.ambient; }

    GroupElement left_part(const GroupElement& x) const
    {
        return GroupElement(x.begin(), x.begin() + left.rank());
    }

    GroupElement right_part(const GroupElement& x) const
    {
        return GroupElement(x.begin() + left.rank(), x.end());
    }

    /// (e, f) |-> e + f in the ambient group.
    GroupElement sum_map(const GroupElement& x) const
    {
        group.check_element(x);
        return target().add(left.embed(left_part(x)), right.embed(right_part(x)));
    }

    bool operator==(const DirectSumAmbient&) const = default;
};

inline DirectSumAmbient direct_sum(const Subgroup& left, const Subgroup& right)
{
    require_same_ambient(left, right, "direct_sum");
    std::vector<std::int64_t> factors = left.inv_factors;
    factors.insert(factors.end(), right.inv_factors.begin(), right.inv_factors.end());
    return DirectSumAmbient{left, right, AbelianGroup(std::move(factors))};
}

/// Image of K <= E (+) F under the canonical map to the ambient group.
inline Subgroup image_under_sum(const DirectSumAmbient& ds, const Subgroup& k)
{
    if (!(k.ambient == ds.group))
        throw invalid_input_error("image_under_sum: subgroup does not live in the declared direct sum");
    std::vector<GroupElement> gens;
    for (int i = 0; i < k.basis_embed.rows; ++i)
        gens.push_back(ds.sum_map(k.basis_embed.row(i)));
    return canonicalize_subgroup(ds.target(), gens);
}

inline bool subgroup_less(const Subgroup& a, const Subgroup& b)
{
    if (a.order != b.order)
        return a.order < b.order;
    return a.gen_matrix.data < b.gen_matrix.data;
}

/// All subgroups in canonical form, sorted by order then by canonical
/// generator matrix. Closure search: every subgroup is reachable from
/// the trivial one by repeatedly adjoining a single element.
inline std::vector<Subgroup> enumerate_subgroups(const AbelianGroup& g,
                                                 std::uint64_t limit = kDefaultEnumerationLimit)
{
    if (g.order() > limit)
        throw resource_limit_error("group of order " + std::to_string(g.order()) +
                                   " exceeds the enumeration limit " + std::to_string(limit));
    const std::vector<GroupElement> all = g.elements(limit);
    std::vector<Subgroup> found;
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::size_t> queue;

    auto try_add = [&](const Subgroup& s) {
        if (seen.insert(s.gen_matrix.data).second) {
            found.push_back(s);
            queue.push_back(found.size() - 1);
        }
    };
    try_add(trivial_subgroup(g));
    while (!queue.empty()) {
        const std::size_t idx = queue.back();
        queue.pop_back();
        const Subgroup base = found[idx];
        std::vector<GroupElement> gens;
        for (int i = 0; i < base.basis_embed.rows; ++i)
            gens.push_back(base.basis_embed.row(i));
        for (const GroupElement& x : all) {
            gens.push_back(x);
            try_add(canonicalize_subgroup(g, gens));
            gens.pop_back();
        }
    }
    std::sort(found.begin(), found.end(), subgroup_less);
    return found;
}

} // namespace modfusion
