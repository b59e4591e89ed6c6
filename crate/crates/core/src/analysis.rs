//! Structural analysis: linkage classes, strong and terminal strong linkage
//! classes, stoichiometric and kinetic dimensions, deficiencies, and the
//! conditions of the Deficiency One Theorem and its Boros generalization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rank_of_rows;
use crate::network::{build_matrices, Complex, MassActionSystem, Network, Reaction};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkageDecomposition {
    /// Connected components of the undirected reaction graph, each sorted,
    /// ordered by smallest member.
    pub linkage_classes: Vec<Vec<usize>>,
    /// Strongly connected components, ordered by smallest member.
    pub strong_classes: Vec<Vec<usize>>,
    pub terminal: Vec<bool>,
    /// Linkage class containing each strong class.
    pub strong_to_linkage: Vec<usize>,
}

impl LinkageDecomposition {
    /// `l`, the number of linkage classes.
    pub fn num_linkage_classes(&self) -> usize {
        self.linkage_classes.len()
    }

    /// `t`, the number of terminal strong linkage classes.
    pub fn num_terminal(&self) -> usize {
        self.terminal.iter().filter(|&&t| t).count()
    }

    pub fn terminal_classes(&self) -> Vec<&Vec<usize>> {
        self.strong_classes.iter().zip(&self.terminal).filter(|(_, &t)| t).map(|(c, _)| c).collect()
    }

    pub fn terminal_per_linkage(&self) -> Vec<usize> {
        let mut counts = vec![0; self.linkage_classes.len()];
        for (s, &t) in self.terminal.iter().enumerate() {
            if t {
                counts[self.strong_to_linkage[s]] += 1;
            }
        }
        counts
    }

    pub fn is_weakly_reversible(&self) -> bool {
        self.linkage_classes.len() == self.strong_classes.len()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn group(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = Vec::new();
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_insert_with(|| {
            order.push(l);
            Vec::new()
        });
        groups.get_mut(&l).unwrap().push(i);
    }
    order.into_iter().map(|l| groups.remove(&l).unwrap()).collect()
}

/// Tarjan's algorithm, iterative. Returns a component label per node.
pub fn strongly_connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b {
            adj[a].push(b);
        }
    }
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Linkage, strong linkage and terminal strong linkage classes. Self-loops
/// play no role in connectivity or terminality.
pub fn decompose(net: &Network) -> LinkageDecomposition {
    let n = net.num_complexes();
    let edges: Vec<(usize, usize)> =
        net.reactions().iter().filter(|r| !r.is_self_loop()).map(|r| (r.source, r.target)).collect();
    let mut uf = UnionFind((0..n).collect());
    for &(a, b) in &edges {
        uf.union(a, b);
    }
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let linkage_classes = group(&roots);
    let mut linkage_of = vec![0; n];
    for (l, class) in linkage_classes.iter().enumerate() {
        for &i in class {
            linkage_of[i] = l;
        }
    }
    let comp = strongly_connected_components(n, &edges);
    let strong_classes = group(&comp);
    let mut strong_of = vec![0; n];
    for (s, class) in strong_classes.iter().enumerate() {
        for &i in class {
            strong_of[i] = s;
        }
    }
    let mut terminal = vec![true; strong_classes.len()];
    for &(a, b) in &edges {
        if strong_of[a] != strong_of[b] {
            terminal[strong_of[a]] = false;
        }
    }
    let strong_to_linkage = strong_classes.iter().map(|c| linkage_of[c[0]]).collect();
    LinkageDecomposition { linkage_classes, strong_classes, terminal, strong_to_linkage }
}

fn difference(a: &Complex, b: &Complex) -> Vec<Rational> {
    a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| x - y).collect()
}

/// Dimension of the span of all reaction vectors.
pub fn stoichiometric_dim(net: &Network) -> usize {
    let rows: Vec<Vec<Rational>> = net
        .reactions()
        .iter()
        .filter(|r| !r.is_self_loop())
        .map(|r: &Reaction| net.reaction_vector(r))
        .collect();
    rank_of_rows(&rows)
}

/// Dimension of `span{y_j - y_i : C_i, C_j in class}`.
pub fn class_dim(net: &Network, class: &[usize]) -> usize {
    let Some((&first, rest)) = class.split_first() else { return 0 };
    let base = &net.complexes()[first];
    let rows: Vec<Vec<Rational>> = rest.iter().map(|&j| difference(&net.complexes()[j], base)).collect();
    rank_of_rows(&rows)
}

/// Overall `s` and per-linkage-class `s_theta`.
pub fn stoichiometric_dims(net: &Network) -> (usize, Vec<usize>) {
    let dec = decompose(net);
    let per_class = dec.linkage_classes.iter().map(|c| class_dim(net, c)).collect();
    (stoichiometric_dim(net), per_class)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub complexes: Vec<usize>,
    pub n: usize,
    pub s: usize,
    pub deficiency: usize,
    pub terminal_classes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DotConditions {
    /// `delta_theta <= 1` for every linkage class.
    pub class_deficiencies_at_most_one: bool,
    /// `sum delta_theta = delta`.
    pub deficiencies_add_up: bool,
    /// `t = l`.
    pub one_terminal_per_class: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeficiencyReport {
    pub n: usize,
    pub l: usize,
    pub s: usize,
    pub deficiency: usize,
    pub t: usize,
    pub classes: Vec<ClassReport>,
    pub strong_classes: Vec<Vec<usize>>,
    pub terminal_classes: Vec<Vec<usize>>,
    pub weakly_reversible: bool,
    pub dot_conditions: DotConditions,
    pub deficiency_one_theorem: bool,
    pub boros: bool,
    pub deficiency_zero_theorem: bool,
}

impl DeficiencyReport {
    pub fn class_deficiencies(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.deficiency).collect()
    }

    /// Complexes that form singleton linkage classes held by self-loops only.
    pub fn isolated_count(&self) -> usize {
        self.classes.iter().filter(|c| c.n == 1).count()
    }

    pub fn summary(&self) -> String {
        let defs: Vec<String> = self.class_deficiencies().iter().map(ToString::to_string).collect();
        let verdict = |b: bool| if b { "satisfied" } else { "not satisfied" };
        format!(
            "n={}, l={}, s={}, δ={}, δ_θ=[{}], t={}, weakly reversible: {}, DOT: {}, Boros: {}",
            self.n,
            self.l,
            self.s,
            self.deficiency,
            defs.join(","),
            self.t,
            if self.weakly_reversible { "yes" } else { "no" },
            verdict(self.deficiency_one_theorem),
            verdict(self.boros),
        )
    }
}

pub fn deficiency_report(net: &Network) -> DeficiencyReport {
    let dec = decompose(net);
    let n = net.num_complexes();
    let l = dec.num_linkage_classes();
    let s = stoichiometric_dim(net);
    let t = dec.num_terminal();
    let terminal_counts = dec.terminal_per_linkage();
    let classes: Vec<ClassReport> = dec
        .linkage_classes
        .iter()
        .zip(&terminal_counts)
        .map(|(c, &tc)| {
            let s_theta = class_dim(net, c);
            ClassReport { complexes: c.clone(), n: c.len(), s: s_theta, deficiency: c.len() - 1 - s_theta, terminal_classes: tc }
        })
        .collect();
    let deficiency = n - l - s;
    let sum: usize = classes.iter().map(|c| c.deficiency).sum();
    let dot_conditions = DotConditions {
        class_deficiencies_at_most_one: classes.iter().all(|c| c.deficiency <= 1),
        deficiencies_add_up: sum == deficiency,
        one_terminal_per_class: t == l,
    };
    let dot = dot_conditions.class_deficiencies_at_most_one
        && dot_conditions.deficiencies_add_up
        && dot_conditions.one_terminal_per_class;
    let weakly_reversible = dec.is_weakly_reversible();
    DeficiencyReport {
        n,
        l,
        s,
        deficiency,
        t,
        classes,
        terminal_classes: dec.terminal_classes().into_iter().cloned().collect(),
        strong_classes: dec.strong_classes,
        weakly_reversible,
        deficiency_one_theorem: dot,
        boros: dot_conditions.deficiencies_add_up,
        deficiency_zero_theorem: weakly_reversible && deficiency == 0,
        dot_conditions,
    }
}

/// Kinetic dimension: rank of `M = Y A(K)`.
pub fn kinetic_dim(sys: &MassActionSystem) -> usize {
    let s = build_matrices(sys).kinetic.rank();
    debug_assert!({
        let dec = decompose(sys.network());
        dec.num_terminal() != dec.num_linkage_classes() || s == stoichiometric_dim(sys.network())
    });
    s
}

/// Appends `c` as a new complex carrying only the self-loop `c -> c`.
pub fn add_isolated_complex(net: &Network, c: Complex) -> Result<Network> {
    if c.len() != net.num_species() {
        return Err(Error::DimensionMismatch(format!("complex has {} entries, expected {}", c.len(), net.num_species())));
    }
    if net.complex_index(&c).is_some() {
        return Err(Error::DuplicateComplex(c.render(net.species())));
    }
    let mut complexes = net.complexes().to_vec();
    complexes.push(c);
    let mut reactions = net.reactions().to_vec();
    let idx = complexes.len() - 1;
    reactions.push(Reaction::new(idx, idx));
    Network::new(net.species_names(), complexes, reactions)
}
