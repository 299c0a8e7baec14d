/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    /// Resets to `n` singletons, reusing the allocation.
    pub fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as u32);
        self.size.clear();
        self.size.resize(n, 1);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_unions() {
        let mut ds = DisjointSet::new(5);
        assert!(ds.union(0, 1));
        assert!(ds.union(3, 4));
        assert!(!ds.union(1, 0));
        assert!(ds.same(0, 1));
        assert!(!ds.same(1, 3));
        assert_eq!(ds.set_size(4), 2);
        ds.reset(3);
        assert_eq!(ds.len(), 3);
        assert!(!ds.same(0, 1));
    }

    proptest! {
        #[test]
        fn agrees_with_label_propagation(edges in proptest::collection::vec((0usize..20, 0usize..20), 0..40)) {
            let mut ds = DisjointSet::new(20);
            for &(a, b) in &edges {
                ds.union(a, b);
            }
            // Naive closure.
            let mut label: Vec<usize> = (0..20).collect();
            loop {
                let mut changed = false;
                for &(a, b) in &edges {
                    let m = label[a].min(label[b]);
                    if label[a] != m || label[b] != m {
                        label[a] = m;
                        label[b] = m;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for a in 0..20 {
                for b in 0..20 {
                    prop_assert_eq!(ds.same(a, b), label[a] == label[b]);
                }
            }
        }
    }
}
