//! Strongly connected components via Tarjan's algorithm.

use super::Digraph;

/// Component labeling produced by [`Digraph::strongly_connected_components`].
#[derive(Debug, Clone)]
pub struct SccResult {
    /// Component id per vertex. Ids are arbitrary but contiguous from 0.
    pub component: Vec<usize>,
    /// Number of vertices in each component.
    pub sizes: Vec<usize>,
}

impl SccResult {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Vertices of the largest component, sorted ascending. Size ties break
    /// toward the component whose smallest vertex index is smallest.
    pub fn largest_component_vertices(&self) -> Vec<usize> {
        let mut best: Option<usize> = None;
        // Scanning vertices in order means the first component reaching the
        // maximal size is the one with the smallest minimum vertex.
        let mut seen = vec![false; self.sizes.len()];
        for &c in &self.component {
            if !seen[c] {
                seen[c] = true;
                if best.map_or(true, |b| self.sizes[c] > self.sizes[b]) {
                    best = Some(c);
                }
            }
        }
        match best {
            Some(c) => (0..self.component.len())
                .filter(|&v| self.component[v] == c)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Iterative Tarjan; recursion would overflow the stack on long paths.
pub(super) fn tarjan(g: &Digraph) -> SccResult {
    let n = g.n();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component = vec![UNSET; n];
    let mut sizes = Vec::new();
    let mut next_index = 0usize;

    // Call frames: (vertex, position within its adjacency list).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            let nbrs = g.out_neighbors(v);
            if *pos < nbrs.len() {
                let w = nbrs[*pos];
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let id = sizes.len();
                    let mut size = 0usize;
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component[w] = id;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                }
            }
        }
    }

    SccResult { component, sizes }
}
