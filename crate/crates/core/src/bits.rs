/// Fixed-length bit set backed by 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> BitSet {
        BitSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// `self[i] &= other[i + shift]`, treating bits past the end as zero.
    pub fn and_shifted(&mut self, other: &BitSet, shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        let n = self.words.len();
        for i in 0..n {
            let lo = other.words.get(i + ws).copied().unwrap_or(0);
            let word = if bs == 0 {
                lo
            } else {
                let hi = other.words.get(i + ws + 1).copied().unwrap_or(0);
                (lo >> bs) | (hi << (64 - bs))
            };
            self.words[i] &= word;
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut b = BitSet::new(130);
        for i in [0, 63, 64, 129] {
            b.set(i, true);
        }
        assert_eq!(b.count_ones(), 4);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        b.set(63, false);
        assert!(!b.get(63));
    }

    #[test]
    fn shifted_and_matches_naive() {
        let mut a = BitSet::new(200);
        let mut other = BitSet::new(200);
        for i in 0..200 {
            a.set(i, true);
            other.set(i, i % 3 == 0);
        }
        for shift in [0, 1, 5, 64, 65, 130, 199, 250] {
            let mut x = a.clone();
            x.and_shifted(&other, shift);
            for i in 0..200 {
                let want = i + shift < 200 && other.get(i + shift);
                assert_eq!(x.get(i), want, "shift {shift} bit {i}");
            }
        }
    }
}
