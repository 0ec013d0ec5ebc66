/// Disjoint sets over `0..len` with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        assert!(len <= u32::MAX as usize, "union-find domain too large");
        UnionFind { parent: (0..len as u32).collect(), size: vec![1; len] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    /// Labels every element by the smallest member of its set.
    pub fn min_labels(&mut self) -> Vec<u32> {
        let n = self.len();
        let mut min_of_root = vec![u32::MAX; n];
        let mut labels = vec![0; n];
        for x in 0..n as u32 {
            let r = self.find(x) as usize;
            if min_of_root[r] == u32::MAX {
                min_of_root[r] = x;
            }
            labels[x as usize] = min_of_root[r];
        }
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_minima() {
        let mut uf = UnionFind::new(8);
        uf.union(5, 7);
        uf.union(7, 2);
        uf.union(3, 4);
        assert!(!uf.union(2, 5));
        assert_eq!(uf.min_labels(), vec![0, 1, 2, 3, 3, 2, 6, 2]);
    }
}
