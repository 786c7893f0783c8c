//! Finite groups given by dense multiplication tables, and symmetric
//! generator sets over them.
//!
//! Elements are ids `0..order`. Everything downstream talks to a group only
//! through [`Group::mul`], [`Group::inv`] and [`Group::identity`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

/// Exhaustive associativity check up to this order; sampled above it.
const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 200_000;

/// How to build a group. Mirrors the `group` section of the run config.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    /// `Z_n` with `mul(x, y) = x + y mod n`.
    Cyclic { n: usize },
    /// Dihedral group of order `2n`; element `k + n f` is `r^k s^f`.
    Dihedral { n: usize },
    /// Explicit table, `table[x][y] = x·y`.
    Table { table: Vec<Vec<usize>> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order must be positive")]
    Empty,
    #[error("dihedral group needs n >= 1")]
    BadDihedral,
    #[error("group table failed validation: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("element {0} is not in the group")]
    OutOfRange(usize),
    #[error("generator set is not closed under inverses: inverse of {element} ({inverse}) is missing")]
    SymmetryViolation { element: usize, inverse: usize },
    #[error("element {0} appears more than once")]
    DuplicateElement(usize),
    #[error("generator sets may not contain the identity")]
    IdentityInSet,
    #[error("no symmetric set of size {delta} avoiding the identity fits in a group of order {order}")]
    Unsatisfiable { delta: usize, order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
}

impl Group {
    pub fn build(spec: &GroupSpec) -> Result<Self, GroupError> {
        match spec {
            GroupSpec::Cyclic { n } => Self::cyclic(*n),
            GroupSpec::Dihedral { n } => Self::dihedral(*n),
            GroupSpec::Table { table } => Self::from_table(table),
        }
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let inverse = (0..n).map(|x| (n - x) % n).collect();
        Ok(Self {
            order: n,
            table,
            inverse,
            identity: 0,
        })
    }

    pub fn dihedral(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::BadDihedral);
        }
        let order = 2 * n;
        let split = |x: usize| (x % n, x / n);
        let join = |k: usize, f: usize| k + n * f;
        let mut table = vec![0; order * order];
        for x in 0..order {
            let (k1, f1) = split(x);
            for y in 0..order {
                let (k2, f2) = split(y);
                // r^k1 s^f1 r^k2 s^f2 = r^(k1 ± k2) s^(f1+f2)
                let k = if f1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                table[x * order + y] = join(k, (f1 + f2) % 2);
            }
        }
        let inverse = (0..order)
            .map(|x| {
                let (k, f) = split(x);
                if f == 0 {
                    join((n - k) % n, 0)
                } else {
                    x
                }
            })
            .collect();
        Ok(Self {
            order,
            table,
            inverse,
            identity: 0,
        })
    }

    /// Validates a full multiplication table. Every failed axiom is reported.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut problems = Vec::new();
        for (x, row) in rows.iter().enumerate() {
            if row.len() != order {
                problems.push(format!("row {x} has {} entries, expected {order}", row.len()));
            } else if let Some(&bad) = row.iter().find(|&&v| v >= order) {
                problems.push(format!("row {x} contains out-of-range element {bad}"));
            }
        }
        if !problems.is_empty() {
            return Err(GroupError::Invalid(problems));
        }
        let table: Vec<usize> = rows.iter().flatten().copied().collect();
        let mul = |x: usize, y: usize| table[x * order + y];

        let identity = (0..order).find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x));
        let Some(identity) = identity else {
            return Err(GroupError::Invalid(vec!["no two-sided identity".into()]));
        };
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            match (0..order).find(|&y| mul(x, y) == identity && mul(y, x) == identity) {
                Some(y) => inverse[x] = y,
                None => problems.push(format!("element {x} has no inverse")),
            }
        }
        let group = Self {
            order,
            table,
            inverse,
            identity,
        };
        if let Some((x, y, z)) = group.associativity_counterexample() {
            problems.push(format!("not associative: ({x}·{y})·{z} != {x}·({y}·{z})"));
        }
        if problems.is_empty() {
            Ok(group)
        } else {
            Err(GroupError::Invalid(problems))
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// The full table as nested rows, e.g. for serialization.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// Exhaustive for small orders, sampled with a fixed seed above that.
    pub fn associativity_counterexample(&self) -> Option<(usize, usize, usize)> {
        let n = self.order;
        let check = |x, y, z| self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z));
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if check(x, y, z) {
                            return Some((x, y, z));
                        }
                    }
                }
            }
            None
        } else {
            let mut rng = SplitMix64::new(0xA550C);
            (0..SAMPLED_TRIPLES)
                .map(|_| (rng.below_usize(n), rng.below_usize(n), rng.below_usize(n)))
                .find(|&(x, y, z)| check(x, y, z))
        }
    }
}

/// Which side a generator set multiplies from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Left multiplication, `g ↦ a g`.
    A,
    /// Right multiplication, `g ↦ g b`.
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorDiagnostics {
    pub delta: usize,
    pub symmetric: bool,
    /// Whether the set generates the whole group (Cayley graph connected).
    pub connected: bool,
    /// Size of the subgroup generated.
    pub generated_order: usize,
    /// Whether the Cayley graph is bipartite.
    pub bipartite: bool,
    /// Number of self-inverse generators.
    pub involutions: usize,
}

/// Symmetric generator set `S = S^{-1}` without the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    elements: Vec<usize>,
    side: Side,
    /// `inverse_index[i]` is the position of `elements[i]^{-1}`.
    inverse_index: Vec<usize>,
}

impl GeneratorSet {
    pub fn new(group: &Group, elements: Vec<usize>, side: Side) -> Result<Self, GeneratorError> {
        validate_generators(group, &elements)?;
        let inverse_index = elements
            .iter()
            .map(|&a| {
                let ai = group.inv(a);
                elements.iter().position(|&x| x == ai).expect("validated symmetric")
            })
            .collect();
        Ok(Self {
            elements,
            side,
            inverse_index,
        })
    }

    /// Draws a random symmetric set of size `delta` by adding whole inverse pairs.
    pub fn random_symmetric(
        group: &Group,
        delta: usize,
        side: Side,
        rng: &mut SplitMix64,
    ) -> Result<Self, GeneratorError> {
        let orbits = inverse_orbits(group);
        let pairs = orbits.iter().filter(|o| o.len() == 2).count();
        let singles = orbits.len() - pairs;
        // Feasible iff we can use p pairs and s singles with 2p + s = delta.
        let feasible = (0..=pairs.min(delta / 2)).any(|p| delta - 2 * p <= singles);
        if !feasible {
            return Err(GeneratorError::Unsatisfiable {
                delta,
                order: group.order(),
            });
        }
        loop {
            let mut chosen = Vec::with_capacity(delta);
            for i in rng.sample_distinct(orbits.len(), orbits.len()) {
                let orbit = &orbits[i];
                if chosen.len() + orbit.len() <= delta {
                    chosen.extend_from_slice(orbit);
                }
                if chosen.len() == delta {
                    return Self::new(group, chosen, side);
                }
            }
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, index: usize) -> usize {
        self.elements[index]
    }

    /// Index of the inverse generator.
    pub fn inverse_index(&self, index: usize) -> usize {
        self.inverse_index[index]
    }

    pub fn index_of(&self, element: usize) -> Option<usize> {
        self.elements.iter().position(|&x| x == element)
    }
}

/// `{x, x^{-1}}` orbits of non-identity elements, ordered by smallest member.
fn inverse_orbits(group: &Group) -> Vec<Vec<usize>> {
    let mut seen = vec![false; group.order()];
    let mut orbits = Vec::new();
    for x in 0..group.order() {
        if x == group.identity() || seen[x] {
            continue;
        }
        let y = group.inv(x);
        seen[x] = true;
        seen[y] = true;
        orbits.push(if x == y { vec![x] } else { vec![x, y] });
    }
    orbits
}

/// Checks symmetry, distinctness and identity exclusion, then reports
/// connectivity and bipartiteness of the Cayley graph.
pub fn validate_generators(
    group: &Group,
    elements: &[usize],
) -> Result<GeneratorDiagnostics, GeneratorError> {
    let n = group.order();
    let mut present = vec![false; n];
    for &a in elements {
        if a >= n {
            return Err(GeneratorError::OutOfRange(a));
        }
        if a == group.identity() {
            return Err(GeneratorError::IdentityInSet);
        }
        if present[a] {
            return Err(GeneratorError::DuplicateElement(a));
        }
        present[a] = true;
    }
    for &a in elements {
        let inverse = group.inv(a);
        if !present[inverse] {
            return Err(GeneratorError::SymmetryViolation { element: a, inverse });
        }
    }

    // BFS from the identity by left multiplication, two-colouring as we go.
    // With a symmetric set, left and right Cayley graphs have the same
    // connectivity and bipartiteness (they are isomorphic via g ↦ g^{-1}).
    let mut colour = vec![u8::MAX; n];
    let mut queue = VecDeque::from([group.identity()]);
    colour[group.identity()] = 0;
    let mut bipartite = true;
    let mut reached = 1;
    while let Some(g) = queue.pop_front() {
        for &a in elements {
            let h = group.mul(a, g);
            if colour[h] == u8::MAX {
                colour[h] = 1 - colour[g];
                reached += 1;
                queue.push_back(h);
            } else if colour[h] == colour[g] {
                bipartite = false;
            }
        }
    }
    Ok(GeneratorDiagnostics {
        delta: elements.len(),
        symmetric: true,
        connected: reached == n,
        generated_order: reached,
        bipartite,
        involutions: elements.iter().filter(|&&a| group.inv(a) == a).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein_table() -> Vec<Vec<usize>> {
        (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect()
    }

    #[test]
    fn cyclic_four() {
        let g = Group::cyclic(4).unwrap();
        assert_eq!(g.mul(1, 3), 0);
        assert_eq!(g.inv(1), 3);
    }

    #[test]
    fn dihedral_three_has_order_six() {
        let g = Group::dihedral(3).unwrap();
        assert_eq!(g.order(), 6);
        // r·s != s·r in D_3
        assert_ne!(g.mul(1, 3), g.mul(3, 1));
    }

    #[test]
    fn klein_elements_are_self_inverse() {
        let g = Group::build(&GroupSpec::Table { table: klein_table() }).unwrap();
        for x in 0..4 {
            assert_eq!(g.inv(x), x);
        }
    }

    #[test]
    fn axioms_hold_exhaustively_for_small_constructors() {
        for n in 1..=32 {
            for g in [Group::cyclic(n).unwrap(), Group::dihedral(n).unwrap()] {
                if g.order() > EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
                    continue;
                }
                assert_eq!(g.associativity_counterexample(), None);
                for x in 0..g.order() {
                    assert_eq!(g.mul(g.identity(), x), x);
                    assert_eq!(g.mul(x, g.identity()), x);
                    assert_eq!(g.mul(g.inv(x), x), g.identity());
                }
                // The validated table path agrees with the constructor.
                assert_eq!(Group::from_table(&g.table_rows()).unwrap(), g);
            }
        }
    }

    #[test]
    fn rejects_broken_tables() {
        // Constant table: no identity.
        let constant = vec![vec![0, 0], vec![0, 0]];
        assert!(matches!(Group::from_table(&constant), Err(GroupError::Invalid(_))));
        // Latin square with identity 0 that is not associative.
        let quasigroup = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = Group::from_table(&quasigroup).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
        let ragged = vec![vec![0, 1], vec![1]];
        assert!(Group::from_table(&ragged).is_err());
    }

    #[test]
    fn z11_symmetric_set() {
        let g = Group::cyclic(11).unwrap();
        let d = validate_generators(&g, &[1, 10, 3, 8]).unwrap();
        assert_eq!(d.delta, 4);
        assert!(d.symmetric && d.connected);
        assert!(!d.bipartite);
    }

    #[test]
    fn z11_missing_inverse() {
        let g = Group::cyclic(11).unwrap();
        assert!(matches!(
            validate_generators(&g, &[1, 3]),
            Err(GeneratorError::SymmetryViolation { element: 1, inverse: 10 })
        ));
    }

    #[test]
    fn z12_even_subgroup_is_flagged_disconnected() {
        let g = Group::cyclic(12).unwrap();
        let d = validate_generators(&g, &[2, 10, 4, 8]).unwrap();
        assert!(d.symmetric);
        assert!(!d.connected);
        // Independent closure: the subgroup generated is the even residues.
        let mut closure = vec![0usize];
        let mut i = 0;
        while i < closure.len() {
            for a in [2, 10, 4, 8] {
                let h = (closure[i] + a) % 12;
                if !closure.contains(&h) {
                    closure.push(h);
                }
            }
            i += 1;
        }
        assert_eq!(d.generated_order, closure.len());
        assert_eq!(closure.len(), 6);
    }

    #[test]
    fn rejects_identity_and_duplicates() {
        let g = Group::cyclic(5).unwrap();
        assert_eq!(validate_generators(&g, &[0, 1, 4]), Err(GeneratorError::IdentityInSet));
        assert_eq!(
            validate_generators(&g, &[1, 4, 1]),
            Err(GeneratorError::DuplicateElement(1))
        );
        assert_eq!(validate_generators(&g, &[7]), Err(GeneratorError::OutOfRange(7)));
    }

    #[test]
    fn cycle_graph_bipartiteness() {
        let g = Group::cyclic(4).unwrap();
        assert!(validate_generators(&g, &[1, 3]).unwrap().bipartite);
        let g = Group::cyclic(5).unwrap();
        assert!(!validate_generators(&g, &[1, 4]).unwrap().bipartite);
    }

    #[test]
    fn random_symmetric_sets_validate() {
        let mut rng = SplitMix64::new(3);
        for n in 3..20 {
            let g = Group::dihedral(n).unwrap();
            for delta in 1..=4 {
                let s = GeneratorSet::random_symmetric(&g, delta, Side::A, &mut rng).unwrap();
                assert_eq!(s.len(), delta);
                for i in 0..delta {
                    assert_eq!(s.element(s.inverse_index(i)), g.inv(s.element(i)));
                }
            }
        }
        // Z_3 has a single inverse pair, so an odd size is impossible.
        let z3 = Group::cyclic(3).unwrap();
        assert!(GeneratorSet::random_symmetric(&z3, 1, Side::A, &mut rng).is_err());
    }
}
