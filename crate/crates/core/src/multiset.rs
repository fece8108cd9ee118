//! Enumeration of integer multisets (partitions with restricted parts).

/// Partitions of `n` into parts in `[lo, hi]`, each non-increasing, in
/// reverse-lexicographic order. `n = 0` yields the single empty partition.
pub fn partitions_in_range(n: u64, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    fn go(left: u64, max_part: u64, lo: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (lo..=max_part.min(left)).rev() {
            cur.push(p);
            go(left - p, p, lo, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if lo == 0 {
        return out;
    }
    go(n, hi, lo, &mut Vec::new(), &mut out);
    out
}

/// Every multiset with parts in `[lo, hi]` and sum below `sum_below`,
/// ordered by sum, then reverse-lexicographically. Includes the empty
/// multiset.
pub fn multisets_below(sum_below: u64, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    (0..sum_below).flat_map(|n| partitions_in_range(n, lo, hi)).collect()
}
