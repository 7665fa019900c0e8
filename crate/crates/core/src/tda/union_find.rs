/// Disjoint sets keyed by point index. Each root remembers the smallest
/// point index in its component, which decides the survivor of a merge.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    min_index: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            min_index: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    #[cfg(test)]
    pub(crate) fn min_index(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.min_index[r]
    }

    /// Merges the components of `a` and `b`. Returns the minimum index of the
    /// component that stops existing (the younger one under the elder rule),
    /// or `None` when they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let dying = self.min_index[ra].max(self.min_index[rb]);
        let survivor_min = self.min_index[ra].min(self.min_index[rb]);
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.min_index[big] = survivor_min;
        Some(dying)
    }
}
