//! Range-minimum queries over a static array.
//!
//! A sparse table over block minima plus direct scans inside the two
//! boundary blocks. Memory is `O(n + (n / B) log n)` instead of the
//! `O(n log n)` of a plain sparse table, which matters for Euler tours of
//! million-vertex trees.

const BLOCK: usize = 16;

#[derive(Debug, Clone)]
pub struct RangeMin<T> {
    values: Vec<T>,
    /// `table[k][b]` = min over blocks `b .. b + 2^k`.
    table: Vec<Vec<T>>,
}

impl<T: Copy + PartialOrd> RangeMin<T> {
    pub fn new(values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "range-min over an empty array");
        let level0: Vec<T> = values.chunks(BLOCK).map(|c| min_of(c)).collect();
        let blocks = level0.len();
        let mut table = vec![level0];
        let mut width = 1;
        while 2 * width <= blocks {
            let prev = table.last().unwrap();
            let next: Vec<T> = (0..=blocks - 2 * width).map(|b| pick(prev[b], prev[b + width])).collect();
            table.push(next);
            width *= 2;
        }
        RangeMin { values, table }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Minimum over the closed range `[lo, hi]` (arguments may come in any order).
    pub fn min(&self, lo: usize, hi: usize) -> T {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let (bl, bh) = (lo / BLOCK, hi / BLOCK);
        if bh <= bl + 1 {
            return min_of(&self.values[lo..=hi]);
        }
        let head = min_of(&self.values[lo..(bl + 1) * BLOCK]);
        let tail = min_of(&self.values[bh * BLOCK..=hi]);
        let (a, b) = (bl + 1, bh - 1);
        let k = usize::BITS as usize - 1 - (b - a + 1).leading_zeros() as usize;
        let mid = pick(self.table[k][a], self.table[k][b + 1 - (1 << k)]);
        pick(pick(head, mid), tail)
    }
}

#[inline]
fn pick<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

#[inline]
fn min_of<T: Copy + PartialOrd>(xs: &[T]) -> T {
    let mut best = xs[0];
    for &x in &xs[1..] {
        if x < best {
            best = x;
        }
    }
    best
}
