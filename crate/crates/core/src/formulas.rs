//! Arbitrary-precision evaluation of the closed-form enumerations, with
//! equivalent forms kept separate so they can cross-check each other.
//!
//! Division steps (1/k, 1/n, r/n, i/(n-i)) are performed exactly: either
//! the product is divided with a zero-remainder assertion, or the sum is
//! accumulated as a rational and asserted integral at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::pattern_lang::PatternMetrics;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("the multiset formulas need m >= 1; use count_leaf_only for m = 0")]
    EmptyMultiset,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

/// Binomial coefficient with the conventions the summations rely on:
/// C(x, 0) = 1 for every x (including negative x), zero for k < 0, for
/// negative x with k > 0, and for k > x >= 0.
pub fn binom(x: i64, k: i64) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    if k < 0 || x < 0 || k > x {
        return BigInt::zero();
    }
    let k = k.min(x - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(x - i) / BigInt::from(i + 1);
    }
    r
}

/// Multinomial coefficient of `sum(parts)` over `parts`; zero if any
/// part is negative.
pub fn multinomial(parts: &[i64]) -> BigInt {
    if parts.iter().any(|&p| p < 0) {
        return BigInt::zero();
    }
    let mut total = 0i64;
    let mut r = BigInt::one();
    for &p in parts {
        total += p;
        r *= binom(total, p);
    }
    r
}

pub fn catalan(n: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    exact_div(binom(2 * n, n), &BigInt::from(n + 1))
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(&num, den);
    assert!(r.is_zero(), "non-exact division: {num} / {den}");
    q
}

fn rational_to_int(sum: BigRational) -> BigInt {
    assert!(sum.is_integer(), "sum is not an integer: {sum}");
    sum.to_integer()
}

fn ratio(num: BigInt, den: i64) -> BigRational {
    BigRational::new(num, BigInt::from(den))
}

/// The symbol bundle of a whole query: edge count `n`, loose leaves,
/// per-pattern multiplicities, and the summed shape counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryParams {
    pub edges: i64,
    pub loose_leaves: i64,
    pub multiplicities: Vec<i64>,
    pub v: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl QueryParams {
    pub fn new(
        edges: i64,
        loose_leaves: i64,
        entries: impl IntoIterator<Item = (PatternMetrics, u32)>,
    ) -> Self {
        let mut p = QueryParams {
            edges,
            loose_leaves,
            multiplicities: Vec::new(),
            v: 0,
            a: 0,
            b: 0,
            c: 0,
            d: 0,
        };
        for (m, mult) in entries {
            let mult = mult as i64;
            p.multiplicities.push(mult);
            p.v += mult * m.v;
            p.a += mult * m.a;
            p.b += mult * m.b;
            p.c += mult * m.c;
            p.d += mult * m.d;
        }
        p
    }

    /// m: total number of composite patterns.
    pub fn m(&self) -> i64 {
        self.multiplicities.iter().sum()
    }

    /// e: edges not accounted for by the patterns.
    pub fn e(&self) -> i64 {
        self.edges + self.m() - self.v - self.c - self.a
    }

    pub fn u(&self) -> i64 {
        self.edges + self.m() - self.v + 1
    }

    fn require_nonempty(&self) -> Result<(), FormulaError> {
        if self.m() >= 1 {
            Ok(())
        } else {
            Err(FormulaError::EmptyMultiset)
        }
    }
}

/// The general multiset enumeration: sum over the number of loose tree
/// leaves k, with an inner sum splitting the unaccounted edges between
/// dark and light slots.
pub fn count_multiset(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.e() == 0 {
        // with no free edges the ellipses are all empty and the sum
        // degenerates; the collapsed closed form is the defined value
        return count_edges_covered(p);
    }
    let (m, e, u) = (p.m(), p.e(), p.u());
    let (l, a, b, d) = (p.loose_leaves, p.a, p.b, p.d);
    let mut sum = BigInt::zero();
    for k in m.max(1)..=(u - l).max(m.max(1) - 1) {
        let mut inner = BigInt::zero();
        for i in 0..=(m + e - k).max(-1) {
            inner += binom(d + i - 1, i) * binom(e + b - i - 1, b - m + k - 1) * binom(e + a - i, u - k);
        }
        // (1/k) C(k, m) = (1/m) C(k-1, m-1)
        sum += binom(k - 1, m - 1) * binom(u - k, l) * inner;
    }
    Ok(exact_div(multinomial(&p.multiplicities) * sum, &BigInt::from(m)))
}

/// The same enumeration with the k-summation in the pre-reversal order;
/// kept as an independent evaluation route.
pub fn count_multiset_alt(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.e() == 0 {
        return count_edges_covered(p);
    }
    let (m, e, u, n) = (p.m(), p.e(), p.u(), p.edges);
    let (l, a, b, d, v) = (p.loose_leaves, p.a, p.b, p.d, p.v);
    let mut sum = BigInt::zero();
    for k in l..=(u - m).max(l - 1) {
        let mut inner = BigInt::zero();
        for i in 0..=(m + e - u + k).max(-1) {
            inner += binom(d + i - 1, i) * binom(e + b - i - 1, n - v + b - k) * binom(e + a - i, k);
        }
        // (1/(u-k)) C(u-k, m) = (1/m) C(u-k-1, m-1)
        sum += binom(u - k - 1, m - 1) * binom(k, l) * inner;
    }
    Ok(exact_div(multinomial(&p.multiplicities) * sum, &BigInt::from(m)))
}

/// Specialization for queries with no dark ellipses (d = 0), where the
/// inner edge split collapses.
pub fn count_multiset_no_dark_ellipsis(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.d != 0 {
        return Err(FormulaError::Precondition("d = 0"));
    }
    if p.e() == 0 {
        return count_edges_covered(p);
    }
    let (m, e, u, n) = (p.m(), p.e(), p.u(), p.edges);
    let (l, a, b, v) = (p.loose_leaves, p.a, p.b, p.v);
    let mut sum = BigInt::zero();
    for k in (u - m - e).max(l)..=(u - m).max((u - m - e).max(l) - 1) {
        sum += binom(u - k - 1, m - 1) * binom(e + a - l, k - l) * binom(e + b - 1, n - v + b - k);
    }
    let total = multinomial(&p.multiplicities) * binom(e + a, l) * sum;
    Ok(exact_div(total, &BigInt::from(m)))
}

/// Closed form for queries with neither dark triangles nor dark ellipses
/// (c = d = 0).
pub fn count_multiset_no_dark(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.c != 0 || p.d != 0 {
        return Err(FormulaError::Precondition("c = d = 0"));
    }
    if p.e() < 0 {
        return Ok(BigInt::zero());
    }
    if p.e() == 0 {
        return count_edges_covered(p);
    }
    let (n, v, l, a, b, m) = (p.edges, p.v, p.loose_leaves, p.a, p.b, p.m());
    if n - v - l < 0 {
        // the closed form's 1/(n-v-l+1) prefactor degenerates; fall back
        // to the equivalent no-dark-ellipsis sum
        return count_multiset_no_dark_ellipsis(p);
    }
    let mut parts = p.multiplicities.clone();
    parts.push(l);
    parts.push(n - v - l);
    let total = multinomial(&parts) * binom(2 * n + m - 2 * v - l - a + b, n - v - l + b);
    Ok(exact_div(total, &BigInt::from(n - v - l + 1)))
}

/// Occurrences of `l` leaf patterns alone among n-edge trees.
pub fn count_leaf_only(n: i64, l: i64) -> BigInt {
    if n == 0 {
        // the lone node of the 0-edge tree is a leaf
        return if (0..=1).contains(&l) { BigInt::one() } else { BigInt::zero() };
    }
    exact_div(binom(n, l) * binom(2 * n - l, n - 1), &BigInt::from(n))
}

/// Specialization when the patterns and loose leaves cover every node
/// (v + l = n + 1).
pub fn count_all_nodes_covered(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.v + p.loose_leaves != p.edges + 1 {
        return Err(FormulaError::Precondition("v + l = n + 1"));
    }
    let (m, e) = (p.m(), p.e());
    let (l, a, b, d) = (p.loose_leaves, p.a, p.b, p.d);
    let mut sum = BigInt::zero();
    // the i = 0 term is always present (empty dark-ellipsis fill)
    for i in 0..=(e - l).max(0) {
        sum += binom(d + i - 1, i) * binom(e + b - i - 1, b - 1) * binom(e + a - i, l);
    }
    Ok(exact_div(multinomial(&p.multiplicities) * sum, &BigInt::from(m)))
}

/// Specialization when the patterns cover every edge (e = 0).
pub fn count_edges_covered(p: &QueryParams) -> Result<BigInt, FormulaError> {
    p.require_nonempty()?;
    if p.e() != 0 {
        return Err(FormulaError::Precondition("e = 0"));
    }
    let (m, l, a, c) = (p.m(), p.loose_leaves, p.a, p.c);
    let total = multinomial(&p.multiplicities) * binom(a, l) * binom(a - l, m - c - 1);
    Ok(exact_div(total, &BigInt::from(m)))
}

/// Number of n-edge ordered trees with exactly `l` leaves.
pub fn narayana(n: i64, l: i64) -> BigInt {
    if n < 1 {
        return if n == 0 && l == 1 { BigInt::one() } else { BigInt::zero() };
    }
    exact_div(binom(n + 1, l) * binom(n - 1, l - 1), &BigInt::from(n + 1))
}

/// Occurrences of a single composite pattern plus `l` loose leaves.
pub fn count_single(pm: PatternMetrics, l: i64, n: i64) -> BigInt {
    let (v, a, b, c, d) = (pm.v, pm.a, pm.b, pm.c, pm.d);
    let e = n + 1 - v - c - a;
    if e < 0 {
        return BigInt::zero();
    }
    if e == 0 {
        // no free edges: the sum degenerates to the edge-covered form
        let p = QueryParams { edges: n, loose_leaves: l, multiplicities: vec![1], v, a, b, c, d };
        return count_edges_covered(&p).expect("e = 0 checked above");
    }
    let w = n - v - c + 1;
    let mut sum = BigInt::zero();
    for i in 0..=(w - a).max(-1) {
        // a negative upper index marks an empty lattice-path count, not
        // the conventional C(x, 0) = 1
        if 2 * w - a + b - l - 2 * i - 1 < 0 {
            continue;
        }
        sum += binom(d + i - 1, i)
            * binom(w - i, l)
            * binom(2 * w - a + b - l - 2 * i - 1, w + b + c - l - 1);
    }
    sum
}

/// Single composite pattern with no loose leaves.
pub fn count_single_leafless(pm: PatternMetrics, n: i64) -> BigInt {
    let (v, a, b, c, d) = (pm.v, pm.a, pm.b, pm.c, pm.d);
    let e = n + 1 - v - c - a;
    if e < 0 {
        return BigInt::zero();
    }
    if e == 0 {
        let p = QueryParams { edges: n, loose_leaves: 0, multiplicities: vec![1], v, a, b, c, d };
        return count_edges_covered(&p).expect("e = 0 checked above");
    }
    let mut sum = BigInt::zero();
    for i in 0..=(n - v - c - a + 1).max(-1) {
        if 2 * n - 2 * v - a + b - 2 * c - 2 * i + 1 < 0 {
            continue;
        }
        sum += binom(d + i - 1, i)
            * binom(2 * n - 2 * v - a + b - 2 * c - 2 * i + 1, n - v + b);
    }
    sum
}

/// Single composite pattern without dark ellipses (d = 0).
pub fn count_single_no_dark_ellipsis(
    pm: PatternMetrics,
    l: i64,
    n: i64,
) -> Result<BigInt, FormulaError> {
    if pm.d != 0 {
        return Err(FormulaError::Precondition("d = 0"));
    }
    let (v, a, b, c) = (pm.v, pm.a, pm.b, pm.c);
    Ok(binom(n - v - c + 1, l)
        * binom(2 * (n - v - c) - a + b - l + 1, n - v + b - l))
}

/// Root-anchored enumeration: trees with an occurrence of an unambiguous
/// pattern at the root (root occurrences in general).
pub fn count_root(pm: PatternMetrics, n: i64) -> BigInt {
    let (v, a, b, c, d) = (pm.v, pm.a, pm.b, pm.c, pm.d);
    let w = n - v - c + 1;
    let mut sum = BigRational::zero();
    let mut i = 0;
    loop {
        let den = 2 * w - a + b - 2 * i;
        if den < 0 {
            break;
        }
        if den > 0 {
            let num = (a + b + 2 * c + 2 * i) * binom(d + i - 1, i) * binom(den, w + b + c);
            sum += ratio(num, den);
        }
        // den == 0 forces the numerator factor to zero as well; skip
        i += 1;
    }
    rational_to_int(sum)
}

/// The same root enumeration as the difference between a pattern and its
/// `<s p s>` embedding; an independent route for validation.
pub fn count_root_diff(pm: PatternMetrics, n: i64) -> BigInt {
    let (v, a, b, c, d) = (pm.v, pm.a, pm.b, pm.c, pm.d);
    let w = n - v - c + 1;
    let mut sum = BigInt::zero();
    for i in 0..=(w - a).max(-1) {
        sum += binom(d + i - 1, i)
            * (binom(2 * w - a + b - 2 * i - 1, w + b + c - 1)
                - binom(2 * w - a + b - 2 * i - 1, w + b + c));
    }
    sum
}

/// Trees with n edges and no protected nodes.
pub fn trees_no_protected(n: i64) -> BigInt {
    assert!(n >= 1);
    let mut sum = BigRational::zero();
    for j in 0..=n {
        let mut inner = BigInt::zero();
        for i in 0..=(n - j - 1).max(-1) {
            inner += binom(j + i, j) * binom(n - i - 1, j) * binom(n - j - i - 1, n - 2 * j - 1);
        }
        sum += ratio(inner, j + 1);
    }
    rational_to_int(sum)
}

/// Trees with n edges and exactly r protected nodes. The r = 0 case is
/// served by `trees_no_protected`.
pub fn trees_with_r_protected(n: i64, r: i64) -> BigInt {
    assert!(n >= 1 && r >= 0);
    if r == 0 {
        return trees_no_protected(n);
    }
    let mut sum = BigRational::zero();
    for j in (r + 1)..=n {
        let mut inner = BigInt::zero();
        for i in j..=(2 * j - r - 1) {
            inner += binom(i - 1, j - 1)
                * binom(n - r - i + j - 1, j - r - 1)
                * binom(n - i, n + r - 2 * j + 1);
        }
        sum += ratio(binom(j, r) * inner, j);
    }
    rational_to_int(sum)
}

/// Trees with n edges and exactly s unprotected nodes. Every tree with
/// n >= 1 edges has at least one, so s = 0 counts nothing.
pub fn trees_with_s_unprotected(n: i64, s: i64) -> BigInt {
    assert!(n >= 1 && s >= 0);
    let mut sum = BigRational::zero();
    for j in s.max(1)..=n {
        let mut inner = BigInt::zero();
        for i in j..=(s + j - 1) {
            inner += binom(i - 1, j - 1)
                * binom(n + s - i - 1, s - 1)
                * binom(n - i, n - s - j + 1);
        }
        sum += ratio(binom(j, s) * inner, j);
    }
    rational_to_int(sum)
}

/// The Fine numbers: protected (stump-free) trees with n edges.
pub fn fine(n: i64) -> BigInt {
    assert!(n >= 1);
    let mut sum = BigRational::zero();
    for i in 1..=(n - 1) {
        sum += ratio(BigInt::from(i) * binom(2 * n - 2 * i, n), n - i);
    }
    rational_to_int(sum)
}

/// Fine numbers as a sum of ballot-number differences; an independent
/// evaluation route.
pub fn fine_ballot(n: i64) -> BigInt {
    assert!(n >= 1);
    let mut sum = BigInt::zero();
    for i in 1..=n {
        sum += binom(2 * n - 2 * i - 1, n - 1) - binom(2 * n - 2 * i - 1, n);
    }
    sum
}

pub fn protected_trees(n: i64) -> BigInt {
    fine(n)
}

/// 3-protected trees (no childless children or grandchildren of the
/// root) via the root-pattern difference, summed over root degrees.
pub fn three_protected(n: i64) -> Result<BigInt, FormulaError> {
    if n < 3 {
        return Err(FormulaError::Precondition("n >= 3"));
    }
    let mut sum = BigInt::zero();
    for c in 1..=(n / 2) {
        for i in 0..=(n - 2 * c) {
            sum += binom(c + i - 1, i)
                * (binom(2 * n - 4 * c - 2 * i - 1, n - c - 1)
                    - binom(2 * n - 4 * c - 2 * i - 1, n - c));
        }
    }
    Ok(sum)
}

/// 3-protected trees via the alternating closed form.
pub fn three_protected_closed(n: i64) -> BigInt {
    let mut sum = BigInt::zero();
    for c in 1..=((2 * n - 1) / 5).max(0) {
        let term = binom(2 * n - 5 * c - 1, n - c - 2) - binom(2 * n - 5 * c - 1, n - c + 1);
        if c % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Ordered forests of r nonleaf trees with n edges altogether:
/// Catalan's triangle (r/n) C(2n, n-r).
pub fn forests(n: i64, r: i64) -> Result<BigInt, FormulaError> {
    if !(1..=n).contains(&r) {
        return Err(FormulaError::Precondition("1 <= r <= n"));
    }
    Ok(exact_div(BigInt::from(r) * binom(2 * n, n - r), &BigInt::from(n)))
}

/// Forest counts as a ballot-number difference; an independent route.
pub fn forests_ballot(n: i64, r: i64) -> BigInt {
    binom(2 * n - 1, n - r) - binom(2 * n - 1, n - r - 1)
}

/// Trees with an unprotected root (at least one stump), n > 1.
pub fn unprotected_trees(n: i64) -> Result<BigInt, FormulaError> {
    if n <= 1 {
        return Err(FormulaError::Precondition("n > 1"));
    }
    let mut sum = BigInt::zero();
    for i in 0..=n {
        sum += binom(2 * n - 2 * i - 2, n - 1) - binom(2 * n - 2 * i - 2, n);
    }
    Ok(sum)
}

/// Trees with n edges and exactly r stumps.
pub fn trees_with_r_stumps(n: i64, r: i64) -> BigInt {
    assert!((0..=n).contains(&r));
    if r == n {
        return BigInt::one();
    }
    if r == n - 1 {
        return BigInt::zero();
    }
    let mut sum = BigRational::zero();
    for i in 1..=(n - r - 1) {
        sum += ratio(
            BigInt::from(i) * binom(r + i, r) * binom(2 * n - 2 * r - 2 * i, n - r),
            n - r - i,
        );
    }
    rational_to_int(sum)
}

/// Total number of stumps over all n-edge trees: C_n for n >= 1 (a
/// 0-edge tree has no level-one node).
pub fn stumps_total(n: i64) -> BigInt {
    if n == 0 {
        BigInt::zero()
    } else {
        catalan(n)
    }
}

/// The shifted stump-total variant (1/(n+1)) C(2n+2, n). It does not
/// agree with the brute-force stump totals; kept so the cross-check
/// harness can flag the disagreement.
pub fn stumps_total_shifted(n: i64) -> BigInt {
    exact_div(binom(2 * n + 2, n), &BigInt::from(n + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern_lang::{metrics, parse_pattern};

    fn pm(text: &str) -> PatternMetrics {
        metrics(&parse_pattern(text).unwrap())
    }

    fn params(specs: &[(&str, u32)], l: i64, n: i64) -> QueryParams {
        QueryParams::new(n, l, specs.iter().map(|&(s, m)| (pm(s), m)))
    }

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn binom_convention() {
        assert_eq!(binom(5, 2), int(10));
        assert_eq!(binom(-1, 0), int(1));
        assert_eq!(binom(-3, 0), int(1));
        assert_eq!(binom(3, 5), int(0));
        assert_eq!(binom(-1, 2), int(0));
        assert_eq!(binom(4, -1), int(0));
        assert_eq!(binom(0, 0), int(1));
    }

    #[test]
    fn multinomial_and_catalan() {
        assert_eq!(multinomial(&[1, 1]), int(2));
        assert_eq!(multinomial(&[2, 3]), int(10));
        assert_eq!(multinomial(&[2, 1, 1]), int(12));
        assert_eq!(multinomial(&[2, -1]), int(0));
        let expect = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(catalan(n as i64), int(c));
        }
    }

    #[test]
    fn query_params_derived_symbols() {
        // <SoSoS>: v=3, d=3, so e = 4+1-3 = 2, u = 3
        let p = params(&[("<SoSoS>", 1)], 0, 4);
        assert_eq!((p.m(), p.e(), p.u()), (1, 2, 3));
        assert_eq!((p.v, p.a, p.b, p.c, p.d), (3, 0, 0, 0, 3));
    }

    #[test]
    fn worked_example_two_leaf_parents() {
        let p = params(&[("<SoSoS>", 1)], 0, 4);
        assert_eq!(count_multiset(&p).unwrap(), int(6));
        assert_eq!(count_multiset_alt(&p).unwrap(), int(6));
    }

    #[test]
    fn single_pattern_examples() {
        assert_eq!(count_single(pm("<TSst>"), 3, 4), int(2));
        assert_eq!(count_single(pm("<TSst>"), 0, 4), int(5));
        assert_eq!(count_single_leafless(pm("<TSst>"), 4), int(5));
        assert_eq!(count_single(pm("<Tst>"), 3, 4), int(2));
        assert_eq!(count_single_leafless(pm("<Tst>"), 4), int(5));
        assert_eq!(
            count_single_no_dark_ellipsis(pm("<Tst>"), 3, 4).unwrap(),
            int(2)
        );
        assert!(count_single_no_dark_ellipsis(pm("<TSst>"), 0, 4).is_err());
    }

    #[test]
    fn leaf_only_examples() {
        assert_eq!(count_leaf_only(4, 3), int(10));
        assert_eq!(count_leaf_only(4, 0), int(14));
        assert_eq!(count_leaf_only(1, 1), int(1));
        assert_eq!(count_leaf_only(0, 0), int(1));
        assert_eq!(count_leaf_only(0, 1), int(1));
        assert_eq!(count_leaf_only(0, 2), int(0));
    }

    #[test]
    fn binary_tree_identities() {
        for r in 1..=5i64 {
            let cr = catalan(r);
            // r binary nodes <tt> with all r+1 leaves named
            let p = params(&[("<tt>", r as u32)], r + 1, 2 * r);
            assert_eq!(p.e(), 0);
            assert_eq!(count_multiset(&p).unwrap(), cr);
            assert_eq!(count_edges_covered(&p).unwrap(), cr);
            // the same with no loose leaves
            let p0 = params(&[("<tt>", r as u32)], 0, 2 * r);
            assert_eq!(count_multiset(&p0).unwrap(), cr);
            assert_eq!(count_edges_covered(&p0).unwrap(), cr);
            // <TT> x r and <oo> x (r+1): leaf-avoiding binary nodes
            let p2 = params(&[("<TT>", r as u32), ("<oo>", r as u32 + 1)], 0, 4 * r + 2);
            assert_eq!(p2.e(), 0);
            assert_eq!(count_edges_covered(&p2).unwrap(), cr);
            assert_eq!(count_multiset(&p2).unwrap(), cr);
        }
    }

    #[test]
    fn narayana_values() {
        assert_eq!(narayana(4, 2), int(6));
        assert_eq!(narayana(4, 1), int(1));
        assert_eq!(narayana(4, 4), int(1));
        assert_eq!(narayana(4, 0), int(0));
        for n in 1..=10i64 {
            let row: BigInt = (0..=n).map(|l| narayana(n, l)).sum();
            assert_eq!(row, catalan(n), "Narayana row {n}");
        }
    }

    #[test]
    fn all_nodes_covered_matches_narayana() {
        // l-leaf trees: n+1-l internal nodes <ts> plus l loose leaves
        for n in 1..=8i64 {
            for l in 1..=n {
                let p = params(&[("<ts>", (n + 1 - l) as u32)], l, n);
                assert_eq!(count_all_nodes_covered(&p).unwrap(), narayana(n, l));
                assert_eq!(count_multiset(&p).unwrap(), narayana(n, l));
            }
        }
    }

    #[test]
    fn no_dark_ellipsis_agrees() {
        for (spec, l, n) in [("<tsos>", 0i64, 4i64), ("<tt>", 3, 4), ("<ts>", 1, 5), ("<oo>", 0, 5)] {
            let p = params(&[(spec, 1)], l, n);
            assert_eq!(
                count_multiset_no_dark_ellipsis(&p).unwrap(),
                count_multiset(&p).unwrap(),
                "{spec} l={l} n={n}"
            );
        }
        let dark = params(&[("<So>", 1)], 0, 4);
        assert!(count_multiset_no_dark_ellipsis(&dark).is_err());
    }

    #[test]
    fn no_dark_closed_form_agrees() {
        for (spec, l, n) in [("<tsos>", 0i64, 4i64), ("<tt>", 3, 4), ("<ts>", 1, 5)] {
            let p = params(&[(spec, 1)], l, n);
            assert_eq!(
                count_multiset_no_dark(&p).unwrap(),
                count_multiset(&p).unwrap(),
                "{spec} l={l} n={n}"
            );
        }
    }

    #[test]
    fn root_examples() {
        for n in 2..=8i64 {
            assert_eq!(count_root(pm("<t>"), n), catalan(n - 1), "planted via <t>");
            assert_eq!(count_root(pm("<T>"), n), catalan(n - 1), "planted via <T>");
            assert_eq!(count_root(pm("<s>"), n), catalan(n), "all nonleaf trees");
        }
        assert_eq!(count_root(pm("<S>"), 4), int(6));
        assert_eq!(count_root(pm("<sos>"), 4), int(14));
        assert_eq!(count_root_diff(pm("<sos>"), 4), int(14));
    }

    #[test]
    fn root_diff_agrees_with_rooted() {
        for spec in ["<t>", "<T>", "<s>", "<S>", "<sos>", "<TS>", "<SoS>", "<tsts>"] {
            let m = pm(spec);
            // below v + c + d the difference form's binomial sums
            // degenerate; the rooted form alone stays valid there
            for n in (m.v + m.c + m.d).max(2)..=8i64 {
                assert_eq!(count_root(m, n), count_root_diff(m, n), "{spec} n={n}");
            }
        }
    }

    #[test]
    fn protected_distributions() {
        assert_eq!(trees_no_protected(4), int(6));
        assert_eq!(trees_no_protected(1), int(1));
        assert_eq!(trees_with_r_protected(4, 1), int(6));
        assert_eq!(trees_with_r_protected(4, 2), int(1));
        assert_eq!(trees_with_r_protected(4, 3), int(1));
        assert_eq!(trees_with_s_unprotected(4, 1), int(4));
        assert_eq!(trees_with_s_unprotected(4, 2), int(10));
        assert_eq!(trees_with_s_unprotected(4, 0), int(0));
        for n in 2..=8i64 {
            let by_r: BigInt = (0..=n).map(|r| trees_with_r_protected(n, r)).sum();
            let by_s: BigInt = (0..=n).map(|s| trees_with_s_unprotected(n, s)).sum();
            assert_eq!(by_r, catalan(n), "protected row {n}");
            assert_eq!(by_s, catalan(n), "unprotected row {n}");
        }
    }

    #[test]
    fn fine_values() {
        assert_eq!(fine(1), int(0));
        let expect = [1i64, 2, 6, 18, 57, 186];
        for (idx, &f) in expect.iter().enumerate() {
            let n = idx as i64 + 2;
            assert_eq!(fine(n), int(f), "fine({n})");
            assert_eq!(fine_ballot(n), int(f), "fine_ballot({n})");
        }
        for n in 2..=10i64 {
            assert_eq!(fine(n) + unprotected_trees(n).unwrap(), catalan(n), "n={n}");
        }
        assert_eq!(protected_trees(4), int(6));
    }

    #[test]
    fn unprotected_values() {
        assert_eq!(unprotected_trees(4).unwrap(), int(8));
        assert_eq!(unprotected_trees(2).unwrap(), int(1));
        assert!(unprotected_trees(1).is_err());
        assert_eq!(unprotected_trees(7).unwrap(), catalan(7) - fine(7));
    }

    #[test]
    fn three_protected_values() {
        assert_eq!(three_protected(4).unwrap(), int(2));
        assert_eq!(three_protected_closed(4), int(2));
        assert_eq!(three_protected(3).unwrap(), int(1));
        assert_eq!(three_protected_closed(3), int(1));
        assert!(three_protected(2).is_err());
        for n in 3..=10i64 {
            assert_eq!(three_protected(n).unwrap(), three_protected_closed(n), "n={n}");
        }
    }

    #[test]
    fn forest_values() {
        assert_eq!(forests(4, 1).unwrap(), int(14));
        assert_eq!(forests(4, 4).unwrap(), int(1));
        assert!(forests(4, 0).is_err());
        assert!(forests(4, 5).is_err());
        for n in 1..=8i64 {
            let mut row = BigInt::zero();
            for r in 1..=n {
                let f = forests(n, r).unwrap();
                assert_eq!(f, forests_ballot(n, r), "forests({n},{r})");
                row += f;
            }
            assert_eq!(row, binom(2 * n - 1, n), "forest row {n}");
            assert_eq!(forests(n, n).unwrap(), int(1));
            assert_eq!(forests(n, 1).unwrap(), catalan(n));
        }
    }

    #[test]
    fn stump_distribution() {
        let row: Vec<BigInt> = (0..=4).map(|r| trees_with_r_stumps(4, r)).collect();
        assert_eq!(row, vec![int(6), int(4), int(3), int(0), int(1)]);
        assert_eq!(trees_with_r_stumps(5, 3), int(4)); // r = n-2 gives n-1
        assert_eq!(trees_with_r_stumps(6, 3), int(8)); // r = n-3 gives 2(n-2)
        for n in 2..=8i64 {
            assert_eq!(trees_with_r_stumps(n, 0), fine(n), "r=0 is Fine({n})");
            let total: BigInt = (0..=n).map(|r| trees_with_r_stumps(n, r)).sum();
            assert_eq!(total, catalan(n), "stump row {n}");
            let weighted: BigInt = (0..=n)
                .map(|r| BigInt::from(r) * trees_with_r_stumps(n, r))
                .sum();
            assert_eq!(weighted, stumps_total(n), "stump total {n}");
        }
    }

    #[test]
    fn stump_totals() {
        assert_eq!(stumps_total(0), int(0));
        assert_eq!(stumps_total(4), int(14));
        assert_eq!(stumps_total(5), int(42));
        // the shifted variant disagrees: 42 instead of 14 at n = 4
        assert_eq!(stumps_total_shifted(4), int(42));
        assert_ne!(stumps_total_shifted(4), stumps_total(4));
    }

    #[test]
    fn m_zero_is_rejected() {
        let p = params(&[], 2, 4);
        assert_eq!(count_multiset(&p), Err(FormulaError::EmptyMultiset));
        assert_eq!(count_multiset_alt(&p), Err(FormulaError::EmptyMultiset));
    }

    #[test]
    fn impossible_queries_count_zero() {
        // pattern larger than the tree: e < 0
        let p = params(&[("<SoSoS>", 2)], 0, 3);
        assert!(p.e() < 0);
        assert_eq!(count_multiset(&p).unwrap(), int(0));
        assert_eq!(count_multiset_alt(&p).unwrap(), int(0));
        // too many loose leaves: u - l < m
        let q = params(&[("<tt>", 1)], 9, 4);
        assert_eq!(count_multiset(&q).unwrap(), int(0));
    }
}
