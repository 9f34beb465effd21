//! Elementary circuit enumeration (Johnson 1975) over a dense index graph.
//!
//! Every circuit is reported once, starting at its smallest vertex index.

/// Elementary cycles of an arbitrary edge list, each rotated to start at
/// its smallest node, sorted.
pub fn elementary_cycles_of<N: Ord + Clone>(edges: impl IntoIterator<Item = (N, N)>) -> Vec<Vec<N>> {
    let edges: Vec<(N, N)> = edges.into_iter().collect();
    let nodes: std::collections::BTreeSet<&N> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
    let nodes: Vec<&N> = nodes.into_iter().collect();
    let index = |n: &N| nodes.binary_search(&n).expect("node collected above");
    let mut adj = vec![Vec::new(); nodes.len()];
    for (a, b) in &edges {
        adj[index(a)].push(index(b));
    }
    for targets in &mut adj {
        targets.sort_unstable();
        targets.dedup();
    }
    let mut found: Vec<Vec<N>> = elementary_cycles(&adj)
        .into_iter()
        .map(|c| c.into_iter().map(|i| nodes[i].clone()).collect())
        .collect();
    found.sort();
    found
}

/// Enumerates all elementary cycles of `adj`. Parallel edges must already be
/// removed. A self-loop yields the one-vertex cycle `[v]`.
pub fn elementary_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut result = Vec::new();
    let mut blocked = vec![false; n];
    let mut b: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::new();
    let mut s = 0;
    while s < n {
        let Some(component) = least_nontrivial_component(adj, s) else {
            break;
        };
        let start = component[0];
        let mut in_component = vec![false; n];
        for &v in &component {
            in_component[v] = true;
            blocked[v] = false;
            b[v].clear();
        }
        let mut search = Search {
            adj,
            start,
            in_component: &in_component,
            blocked: &mut blocked,
            b: &mut b,
            stack: &mut stack,
            result: &mut result,
        };
        search.circuit(start);
        s = start + 1;
    }
    result
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    start: usize,
    in_component: &'a [bool],
    blocked: &'a mut Vec<bool>,
    b: &'a mut Vec<Vec<usize>>,
    stack: &'a mut Vec<usize>,
    result: &'a mut Vec<Vec<usize>>,
}

impl Search<'_> {
    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if !self.in_component[w] {
                continue;
            }
            if w == self.start {
                self.result.push(self.stack.clone());
                found = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.in_component[w] && !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }

    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        while let Some(w) = self.b[u].pop() {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// Strongly connected component, within the subgraph induced by vertices
/// `>= from`, that contains a cycle and has the smallest least vertex.
/// Returned sorted ascending.
fn least_nontrivial_component(adj: &[Vec<usize>], from: usize) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for mut component in strongly_connected(adj, from) {
        component.sort_unstable();
        let v = component[0];
        let cyclic = component.len() > 1 || adj[v].contains(&v);
        if cyclic && best.as_ref().is_none_or(|b| v < b[0]) {
            best = Some(component);
        }
    }
    best
}

/// Tarjan's algorithm restricted to vertices `>= from`.
pub(crate) fn strongly_connected(adj: &[Vec<usize>], from: usize) -> Vec<Vec<usize>> {
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(v: usize, adj: &[Vec<usize>], from: usize, st: &mut State) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &adj[v] {
            if w < from {
                continue;
            }
            match st.index[w] {
                None => {
                    visit(w, adj, from, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut component = Vec::new();
            while let Some(w) = st.stack.pop() {
                st.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(component);
        }
    }

    let n = adj.len();
    let mut st = State {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in from..n {
        if st.index[v].is_none() {
            visit(v, adj, from, &mut st);
        }
    }
    st.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_nodes() {
        let cycles = elementary_cycles_of([("b", "a"), ("a", "b"), ("b", "c")]);
        assert_eq!(cycles, vec![vec!["a", "b"]]);
    }

    #[test]
    fn two_cycle() {
        assert_eq!(elementary_cycles(&[vec![1], vec![0]]), vec![vec![0, 1]]);
    }

    #[test]
    fn self_loop_and_dag() {
        assert_eq!(elementary_cycles(&[vec![0, 1], vec![2], vec![]]), vec![vec![0]]);
        assert!(elementary_cycles(&[vec![1, 2], vec![2], vec![]]).is_empty());
    }

    #[test]
    fn complete_three() {
        let adj = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        let mut cycles = elementary_cycles(&adj);
        cycles.sort();
        // three 2-cycles and two 3-cycles
        assert_eq!(
            cycles,
            vec![vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![0, 2, 1], vec![1, 2]]
        );
    }
}
