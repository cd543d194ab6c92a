//! The circle construction of weightings.
//!
//! Each index `i` is written `d_i` times around a regular `ms`-gon, in the
//! cyclic order `sigma`, with equal indices adjacent. Every chord joining
//! distinct indices gets weight 1, and every chord whose endpoints are
//! congruent modulo `m` gets an extra `-m`. Summing chord weights between the
//! occurrences of `i` and `j` gives `w(i-j)`. The result has flow
//! `d_i (m - d_i)` through every vertex and flow at least
//! `<d(I)>_m <d(J)>_m` across every proper partition, with equality exactly
//! when the partition is balanced.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::partition::{full_mask, ProperPartition};
use crate::problem::DegreeProblem;
use crate::rational::int;
use crate::tree::StableTree;
use crate::weighting::Weighting;

/// A cyclic order on `{1, ..., n}`, stored as a sequence starting anywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicOrder(Vec<usize>);

impl CyclicOrder {
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        let n = sequence.len();
        let mut seen = vec![false; n + 1];
        for &v in &sequence {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidOrder(format!(
                    "{sequence:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(CyclicOrder(sequence))
    }

    pub fn identity(n: usize) -> Self {
        CyclicOrder((1..=n).collect())
    }

    pub fn sequence(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// The `ms` slots of the circle; slot `t` holds an index in `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleArrangement {
    slots: Vec<usize>,
    modulus: i64,
    s: i64,
}

impl CircleArrangement {
    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// `x_k`: number of slots `t ≡ k (mod m)` holding an index from `mask`.
    pub fn occupancy(&self, mask: u32) -> Vec<i64> {
        let m = self.modulus as usize;
        let mut x = vec![0i64; m];
        for (t, &v) in self.slots.iter().enumerate() {
            if mask >> (v - 1) & 1 == 1 {
                x[t % m] += 1;
            }
        }
        x
    }

    /// Occupancies differ by at most one across residue classes.
    pub fn is_balanced_mask(&self, mask: u32) -> bool {
        let x = self.occupancy(mask);
        let lo = x.iter().min().copied().unwrap_or(0);
        let hi = x.iter().max().copied().unwrap_or(0);
        hi - lo <= 1
    }
}

pub fn build_circle(problem: &DegreeProblem, sigma: &CyclicOrder) -> Result<CircleArrangement> {
    problem.require_reduced()?;
    if sigma.n() != problem.n() {
        return Err(Error::AmbientMismatch {
            left: problem.n(),
            right: sigma.n(),
        });
    }
    let mut slots = Vec::with_capacity(problem.total() as usize);
    for &v in sigma.sequence() {
        slots.extend(std::iter::repeat_n(v, problem.degree(v) as usize));
    }
    Ok(CircleArrangement {
        slots,
        modulus: problem.modulus(),
        s: problem.s(),
    })
}

pub fn standard_weighting(problem: &DegreeProblem, sigma: &CyclicOrder) -> Result<Weighting> {
    let circle = build_circle(problem, sigma)?;
    Ok(weighting_from_circle(&circle, problem.n()))
}

pub(crate) fn weighting_from_circle(circle: &CircleArrangement, n: usize) -> Weighting {
    let m = circle.modulus as usize;
    let slots = &circle.slots;
    let mut acc = vec![vec![0i64; n + 1]; n + 1];
    for p in 0..slots.len() {
        for q in p + 1..slots.len() {
            let (i, j) = (slots[p], slots[q]);
            let same_class = (q - p) % m == 0;
            if i == j {
                assert!(
                    !same_class,
                    "index {i} occurs twice in one residue class; degrees must be below m"
                );
                continue;
            }
            let w = if same_class { 1 - m as i64 } else { 1 };
            acc[i.min(j)][i.max(j)] += w;
        }
    }
    let mut w = Weighting::zero(n);
    for (i, row) in acc.iter().enumerate().skip(1) {
        for (j, &x) in row.iter().enumerate().skip(i + 1) {
            if x != 0 {
                w.set(i, j, int(x)).expect("edge in range");
            }
        }
    }
    w
}

pub fn is_balanced(p: &ProperPartition, problem: &DegreeProblem, sigma: &CyclicOrder) -> Result<bool> {
    if p.n() != problem.n() {
        return Err(Error::AmbientMismatch {
            left: problem.n(),
            right: p.n(),
        });
    }
    Ok(build_circle(problem, sigma)?.is_balanced_mask(p.mask()))
}

/// A cyclic order in which every partition of `tree` has a contiguous block.
///
/// Blocks avoiding vertex 1 form a laminar family; the order starts at 1 and
/// walks that family depth-first, visiting children by smallest element.
pub fn sigma_for_stable_tree(tree: &StableTree, n: usize) -> Result<CyclicOrder> {
    if tree.n() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: tree.n(),
        });
    }
    let laminar = tree.laminar_sets();
    let mut seq = vec![1];
    walk_laminar(full_mask(n) & !1, &laminar, &mut seq);
    CyclicOrder::new(seq)
}

/// Maximal laminar members strictly inside `set`, plus leftover singletons,
/// ordered by smallest element.
fn laminar_children(set: u32, laminar: &[u32]) -> Vec<u32> {
    let inside: Vec<u32> = laminar
        .iter()
        .copied()
        .filter(|&l| l != set && l & !set == 0)
        .collect();
    let maximal: Vec<u32> = inside
        .iter()
        .copied()
        .filter(|&l| !inside.iter().any(|&o| o != l && l & !o == 0))
        .collect();
    let covered = maximal.iter().fold(0u32, |a, &b| a | b);
    let mut items: Vec<u32> = maximal;
    let mut rest = set & !covered;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        items.push(bit);
        rest &= !bit;
    }
    items.sort_by_key(|s| s.trailing_zeros());
    items
}

fn walk_laminar(set: u32, laminar: &[u32], seq: &mut Vec<usize>) {
    for item in laminar_children(set, laminar) {
        if item.count_ones() == 1 {
            seq.push(item.trailing_zeros() as usize + 1);
        } else {
            walk_laminar(item, laminar, seq);
        }
    }
}

/// Up to `cap` distinct tree-adapted orders, obtained by permuting children
/// at every level of the laminar walk. The first one is
/// [`sigma_for_stable_tree`].
pub fn tree_adapted_orders(tree: &StableTree, n: usize, cap: usize) -> Result<Vec<CyclicOrder>> {
    if tree.n() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: tree.n(),
        });
    }
    let laminar = tree.laminar_sets();
    let tails = orders_of(full_mask(n) & !1, &laminar, cap);
    tails
        .into_iter()
        .map(|t| {
            let mut seq = vec![1];
            seq.extend(t);
            CyclicOrder::new(seq)
        })
        .collect()
}

fn orders_of(set: u32, laminar: &[u32], cap: usize) -> Vec<Vec<usize>> {
    if set.count_ones() == 1 {
        return vec![vec![set.trailing_zeros() as usize + 1]];
    }
    let children = laminar_children(set, laminar);
    let child_orders: Vec<Vec<Vec<usize>>> = children.iter().map(|&c| orders_of(c, laminar, cap)).collect();
    let mut out = Vec::new();
    for perm in permutations(children.len()) {
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for &c in &perm {
            let mut next = Vec::new();
            'fill: for pre in &partial {
                for tail in &child_orders[c] {
                    let mut v = pre.clone();
                    v.extend(tail);
                    next.push(v);
                    if next.len() >= cap {
                        break 'fill;
                    }
                }
            }
            partial = next;
        }
        out.extend(partial);
        if out.len() >= cap {
            out.truncate(cap);
            break;
        }
    }
    out
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

const BFS_STATE_CAP: usize = 400_000;

/// A cyclic order with respect to which `p` is not balanced.
///
/// Lays out the block then the complement and swaps the two elements at the
/// seam. If that still balances `p`, tries every single-element move, then a
/// breadth-first search over adjacent transpositions.
pub fn sigma_unbalancing(p: &ProperPartition, problem: &DegreeProblem) -> Result<CyclicOrder> {
    problem.require_reduced()?;
    if p.n() != problem.n() {
        return Err(Error::AmbientMismatch {
            left: problem.n(),
            right: p.n(),
        });
    }
    if problem.s() < 2 {
        // every residue class holds a single slot, so all occupancies are 0 or 1
        return Err(Error::UnbalanceNotFound(format!(
            "{p}: degree sum equals m, every partition is balanced"
        )));
    }
    let unbalanced = |seq: &[usize]| -> bool {
        let sigma = CyclicOrder(seq.to_vec());
        build_circle(problem, &sigma)
            .map(|c| !c.is_balanced_mask(p.mask()))
            .unwrap_or(false)
    };

    let mut base = p.block();
    let k = base.len();
    base.extend(p.complement());
    let mut trick = base.clone();
    trick.swap(k - 1, k);
    if unbalanced(&trick) {
        return CyclicOrder::new(trick);
    }

    let n = base.len();
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let mut seq = base.clone();
            let v = seq.remove(from);
            seq.insert(to, v);
            if unbalanced(&seq) {
                return CyclicOrder::new(seq);
            }
        }
    }

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::from([trick.clone()]);
    seen.insert(trick);
    while let Some(seq) = queue.pop_front() {
        if unbalanced(&seq) {
            return CyclicOrder::new(seq);
        }
        if seen.len() >= BFS_STATE_CAP {
            continue;
        }
        for t in 0..n - 1 {
            let mut next = seq.clone();
            next.swap(t, t + 1);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Err(Error::UnbalanceNotFound(format!(
        "{p} for degrees {:?}, m = {}",
        problem.degrees(),
        problem.modulus()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_proper_partitions;
    use crate::problem::bracket;

    fn fig1() -> DegreeProblem {
        DegreeProblem::new(vec![3, 2, 1, 2, 4, 1, 1, 2, 3, 1, 1, 1], 11).unwrap()
    }

    /// `d(I)(ms - d(I)) - m sum_k x_k (s - x_k)`.
    fn quadratic_flow(circle: &CircleArrangement, d_i: i64, mask: u32) -> i64 {
        let (m, s) = (circle.modulus(), circle.s());
        let x = circle.occupancy(mask);
        d_i * (m * s - d_i) - m * x.iter().map(|&x| x * (s - x)).sum::<i64>()
    }

    #[test]
    fn circle_examples() {
        let c = build_circle(&fig1(), &CyclicOrder::identity(12)).unwrap();
        assert_eq!(c.slots().len(), 22);
        assert_eq!(&c.slots()[0..3], &[1, 1, 1]);
        assert_eq!(&c.slots()[8..12], &[5, 5, 5, 5]);
        assert_eq!(c.slots()[21], 12);

        let p = DegreeProblem::local(vec![1, 1, 1], 3).unwrap();
        let c = build_circle(&p, &CyclicOrder::identity(3)).unwrap();
        assert_eq!(c.slots(), &[1, 2, 3]);
        let p = DegreeProblem::local(vec![2, 1], 3).unwrap();
        let c = build_circle(&p, &CyclicOrder::identity(2)).unwrap();
        assert_eq!(c.slots(), &[1, 1, 2]);

        let p = DegreeProblem::new(vec![3, 1, 1, 1], 3).unwrap();
        assert!(matches!(
            build_circle(&p, &CyclicOrder::identity(4)),
            Err(Error::DegreesNotReduced(_))
        ));
    }

    #[test]
    fn twelve_point_weights() {
        let w = standard_weighting(&fig1(), &CyclicOrder::identity(12)).unwrap();
        assert_eq!(w.get(1, 2), &int(6));
        assert_eq!(w.get(4, 9), &int(-16));
        assert_eq!(w.vertex_flow(5).unwrap(), int(28));
    }

    #[test]
    fn cyclic_order_validation() {
        assert!(CyclicOrder::new(vec![1, 2, 2]).is_err());
        assert!(CyclicOrder::new(vec![1, 4, 2]).is_err());
        assert!(CyclicOrder::new(vec![3, 1, 2]).is_ok());
    }

    #[test]
    fn balanced_examples() {
        let p = DegreeProblem::new(vec![1; 6], 3).unwrap();
        let id = CyclicOrder::identity(6);
        let part = ProperPartition::new(&[1, 4], 6).unwrap();
        let c = build_circle(&p, &id).unwrap();
        assert_eq!(c.occupancy(part.mask()), vec![2, 0, 0]);
        assert!(!is_balanced(&part, &p, &id).unwrap());
        // the contiguous block {1,2} is balanced
        let part = ProperPartition::new(&[1, 2], 6).unwrap();
        assert!(is_balanced(&part, &p, &id).unwrap());
    }

    /// Valid reduced degree vectors (as multisets) for small n, m.
    fn small_problems() -> Vec<DegreeProblem> {
        let mut out = Vec::new();
        for n in 4..=7 {
            for m in 2..=5i64 {
                let mut d = vec![1i64; n];
                loop {
                    if d.iter().sum::<i64>() % m == 0 {
                        out.push(DegreeProblem::new(d.clone(), m).unwrap());
                    }
                    // next nondecreasing vector in [1, m-1]^n
                    let Some(k) = (0..n).rev().find(|&k| d[k] < m - 1) else {
                        break;
                    };
                    let v = d[k] + 1;
                    for x in d[k..].iter_mut() {
                        *x = v;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn flow_formula_and_guarantees() {
        for problem in small_problems() {
            let n = problem.n();
            let m = problem.modulus();
            let orders = [
                CyclicOrder::identity(n),
                CyclicOrder::new((1..=n).rev().collect()).unwrap(),
            ];
            for sigma in &orders {
                let circle = build_circle(&problem, sigma).unwrap();
                let w = weighting_from_circle(&circle, n);
                for i in 1..=n {
                    let d = problem.degree(i);
                    assert_eq!(w.vertex_flow(i).unwrap(), int(d * (m - d)));
                }
                for part in enumerate_proper_partitions(n).unwrap() {
                    let d_i = problem.mask_degree(part.mask());
                    let flow = w.partition_flow(&part).unwrap();
                    assert_eq!(flow, int(quadratic_flow(&circle, d_i, part.mask())));
                    let floor = bracket(d_i, m);
                    if circle.is_balanced_mask(part.mask()) {
                        assert_eq!(flow, int(floor));
                    } else {
                        assert!(flow >= int(2 * m + floor), "{problem:?} {part}");
                    }
                }
            }
        }
    }

    #[test]
    fn stable_tree_orders() {
        let t = StableTree::interior(5);
        assert_eq!(sigma_for_stable_tree(&t, 5).unwrap(), CyclicOrder::identity(5));
        let t = StableTree::from_blocks(&[vec![1, 2]], 5).unwrap();
        assert_eq!(sigma_for_stable_tree(&t, 5).unwrap(), CyclicOrder::identity(5));
        let t = StableTree::from_blocks(&[vec![1, 2], vec![1, 2, 3]], 6).unwrap();
        let sigma = sigma_for_stable_tree(&t, 6).unwrap();
        assert_eq!(sigma, CyclicOrder::identity(6));
        let p = DegreeProblem::new(vec![1; 6], 3).unwrap();
        for part in t.nodes() {
            assert!(is_balanced(part, &p, &sigma).unwrap());
        }
        let t = StableTree::from_blocks(&[vec![1, 3], vec![1, 3, 5]], 6).unwrap();
        let sigma = sigma_for_stable_tree(&t, 6).unwrap();
        assert_eq!(sigma.sequence(), &[1, 2, 4, 6, 5, 3]);
        assert!(sigma_for_stable_tree(&t, 7).is_err());
    }

    #[test]
    fn tree_adapted_orders_keep_blocks_contiguous() {
        let t = StableTree::from_blocks(&[vec![1, 3], vec![1, 3, 5]], 7).unwrap();
        let orders = tree_adapted_orders(&t, 7, 1000).unwrap();
        assert_eq!(orders[0], sigma_for_stable_tree(&t, 7).unwrap());
        assert!(orders.len() > 1);
        for sigma in &orders {
            for part in t.nodes() {
                let pos: Vec<usize> = part
                    .complement()
                    .iter()
                    .map(|v| sigma.sequence().iter().position(|x| x == v).unwrap())
                    .collect();
                let (lo, hi) = (pos.iter().min().unwrap(), pos.iter().max().unwrap());
                assert_eq!(hi - lo + 1, pos.len());
            }
        }
    }

    #[test]
    fn unbalancing_examples() {
        let p = DegreeProblem::new(vec![1; 6], 3).unwrap();
        let part = ProperPartition::new(&[1, 2, 3], 6).unwrap();
        let sigma = sigma_unbalancing(&part, &p).unwrap();
        assert_eq!(sigma.sequence(), &[1, 2, 4, 3, 5, 6]);
        let circle = build_circle(&p, &sigma).unwrap();
        assert_eq!(circle.occupancy(part.mask()), vec![2, 1, 0]);
        let w = standard_weighting(&p, &sigma).unwrap();
        assert_eq!(w.partition_flow(&part).unwrap(), int(6));

        let p = DegreeProblem::new(vec![1, 1, 1], 3);
        assert!(p.is_err());
        let p = DegreeProblem::new(vec![1, 1, 2, 2], 6).unwrap();
        let part = ProperPartition::new(&[1, 2], 4).unwrap();
        assert!(matches!(
            sigma_unbalancing(&part, &p),
            Err(Error::UnbalanceNotFound(_))
        ));
    }

    /// Every cyclic order with vertex 1 first.
    fn all_orders(n: usize) -> Vec<CyclicOrder> {
        permutations(n - 1)
            .into_iter()
            .map(|p| {
                let mut seq = vec![1];
                seq.extend(p.into_iter().map(|k| k + 2));
                CyclicOrder::new(seq).unwrap()
            })
            .collect()
    }

    #[test]
    fn some_partitions_cannot_be_unbalanced() {
        let p = DegreeProblem::new(vec![3, 3, 3, 3], 4).unwrap();
        let part = ProperPartition::new(&[1, 2], 4).unwrap();
        assert!(all_orders(4)
            .iter()
            .all(|sigma| is_balanced(&part, &p, sigma).unwrap()));
        assert!(matches!(
            sigma_unbalancing(&part, &p),
            Err(Error::UnbalanceNotFound(_))
        ));
    }

    #[test]
    fn unbalancing_found_whenever_some_order_exists() {
        for problem in small_problems() {
            let m = problem.modulus();
            let orders = all_orders(problem.n());
            for part in enumerate_proper_partitions(problem.n()).unwrap() {
                match sigma_unbalancing(&part, &problem) {
                    Ok(sigma) => {
                        assert!(!is_balanced(&part, &problem, &sigma).unwrap());
                        let w = standard_weighting(&problem, &sigma).unwrap();
                        let floor = bracket(problem.mask_degree(part.mask()), m);
                        assert!(w.partition_flow(&part).unwrap() >= int(2 * m + floor));
                    }
                    Err(Error::UnbalanceNotFound(_)) => {
                        assert!(
                            orders.iter().all(|s| is_balanced(&part, &problem, s).unwrap()),
                            "search missed an order for {problem:?} {part}"
                        );
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
