//! Word-level helpers for `u64` bitsets.

#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn test(set: &[u64], i: usize) -> bool {
    set[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub fn set(set: &mut [u64], i: usize) {
    set[i >> 6] |= 1 << (i & 63);
}

#[inline]
pub fn clear(set: &mut [u64], i: usize) {
    set[i >> 6] &= !(1 << (i & 63));
}

pub fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

/// Iterates the indices of set bits in ascending order.
pub fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Clears every bit with index `<= i`.
pub fn clear_upto(set: &mut [u64], i: usize) {
    let wi = i >> 6;
    for w in set.iter_mut().take(wi) {
        *w = 0;
    }
    if wi < set.len() {
        let b = i & 63;
        set[wi] &= if b == 63 { 0 } else { !0u64 << (b + 1) };
    }
}
