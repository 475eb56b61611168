/// Union-find over individual indices where the representative of a class
/// is always its least member.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn grow(&mut self, i: u32) {
        while self.parent.len() <= i as usize {
            let n = self.parent.len() as u32;
            self.parent.push(n);
        }
    }

    pub fn find(&self, mut i: u32) -> u32 {
        while let Some(&p) = self.parent.get(i as usize) {
            if p == i {
                break;
            }
            i = p;
        }
        i
    }

    /// Merges the classes of `a` and `b`; returns `(kept, absorbed)`
    /// representatives when they were distinct.
    pub fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        self.grow(a.max(b));
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop as usize] = keep;
        Some((keep, drop))
    }
}
