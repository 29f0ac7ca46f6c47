use std::collections::HashMap;

pub type VertexId = u32;

pub const ROOT: VertexId = 0;
const NO_PARENT: VertexId = VertexId::MAX;

/// The part of an infinite tree that has been touched so far.
///
/// A vertex is a path of child indices from the root; paths are interned to
/// dense ids the first time they are colonized.
#[derive(Debug, Default)]
pub struct LazyTree {
    parent: Vec<VertexId>,
    index: Vec<u32>,
    depth: Vec<u32>,
    occupied: Vec<bool>,
    occupied_count: usize,
    children: HashMap<(VertexId, u32), VertexId>,
}

impl LazyTree {
    pub fn new() -> Self {
        let mut t = Self::default();
        t.parent.push(NO_PARENT);
        t.index.push(0);
        t.depth.push(0);
        t.occupied.push(false);
        t
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn child(&mut self, v: VertexId, i: u32) -> VertexId {
        if let Some(&c) = self.children.get(&(v, i)) {
            return c;
        }
        let id = VertexId::try_from(self.parent.len()).expect("vertex arena overflow");
        self.parent.push(v);
        self.index.push(i);
        self.depth.push(self.depth[v as usize] + 1);
        self.occupied.push(false);
        self.children.insert((v, i), id);
        id
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        let p = self.parent[v as usize];
        (p != NO_PARENT).then_some(p)
    }

    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v as usize]
    }

    pub fn is_occupied(&self, v: VertexId) -> bool {
        self.occupied[v as usize]
    }

    pub fn set_occupied(&mut self, v: VertexId, on: bool) {
        let slot = &mut self.occupied[v as usize];
        match (*slot, on) {
            (false, true) => self.occupied_count += 1,
            (true, false) => self.occupied_count -= 1,
            _ => panic!("vertex {v} already in state {on}"),
        }
        *slot = on;
    }

    /// Child indices from the root down to `v`.
    pub fn path(&self, mut v: VertexId) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.depth(v) as usize);
        while let Some(p) = self.parent(v) {
            out.push(self.index[v as usize]);
            v = p;
        }
        out.reverse();
        out
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied_count
    }
}
