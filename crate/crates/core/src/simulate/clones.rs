//! Clone bookkeeping with size-proportional sampling.

/// Chooses a clone with probability proportional to its size.
pub trait CloneSelector: Default {
    fn push(&mut self, size: u64);
    fn add(&mut self, index: usize, delta: i64);
    /// Index `i` minimizing `sizes[0] + ... + sizes[i] > target`; `target < total`.
    fn select(&self, target: u64) -> usize;
    fn total(&self) -> u64;
}

/// Fenwick tree over clone sizes: `O(log k)` updates and selection.
#[derive(Debug, Default, Clone)]
pub struct FenwickSelector {
    tree: Vec<u64>,
    total: u64,
}

impl FenwickSelector {
    fn prefix(&self, mut i: usize) -> u64 {
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i - 1];
            i &= i - 1;
        }
        sum
    }
}

impl CloneSelector for FenwickSelector {
    fn push(&mut self, size: u64) {
        let i = self.tree.len() + 1;
        let low = i & i.wrapping_neg();
        let covered = self.prefix(i - 1) - self.prefix(i - low);
        self.tree.push(size + covered);
        self.total += size;
    }

    fn add(&mut self, index: usize, delta: i64) {
        let mut i = index + 1;
        while i <= self.tree.len() {
            self.tree[i - 1] = self.tree[i - 1].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
        self.total = self.total.wrapping_add_signed(delta);
    }

    fn select(&self, mut target: u64) -> usize {
        let len = self.tree.len();
        let mut pos = 0;
        let mut step = if len == 0 { 0 } else { 1 << (usize::BITS - 1 - len.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= len && self.tree[next - 1] <= target {
                pos = next;
                target -= self.tree[next - 1];
            }
            step >>= 1;
        }
        pos
    }

    fn total(&self) -> u64 {
        self.total
    }
}

/// Reference selector: linear scan of a plain size list.
#[derive(Debug, Default, Clone)]
pub struct LinearSelector {
    sizes: Vec<u64>,
    total: u64,
}

impl CloneSelector for LinearSelector {
    fn push(&mut self, size: u64) {
        self.sizes.push(size);
        self.total += size;
    }

    fn add(&mut self, index: usize, delta: i64) {
        self.sizes[index] = self.sizes[index].wrapping_add_signed(delta);
        self.total = self.total.wrapping_add_signed(delta);
    }

    fn select(&self, target: u64) -> usize {
        let mut acc = 0;
        for (i, &s) in self.sizes.iter().enumerate() {
            acc += s;
            if acc > target {
                return i;
            }
        }
        self.sizes.len() - 1
    }

    fn total(&self) -> u64 {
        self.total
    }
}
