//! Isomorphism types of finite groups and concrete models for small orders.
//!
//! A [`GroupKind`] names a group up to isomorphism. Small kinds can be
//! materialized as a Cayley table, which decides whether one type embeds in
//! another by searching for injective homomorphisms on a generating pair.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, pow_mod};

/// Largest model materialized as a Cayley table.
pub const MODEL_LIMIT: u64 = 512;

/// A finite group up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    Cyclic {
        order: u64,
    },
    /// C_kernel ⋊ C_quotient with y x y^{-1} = x^action.
    Metacyclic {
        kernel: u64,
        quotient: u64,
        action: u64,
    },
    Q8,
    D8,
    Q16,
    #[serde(rename = "sd16")]
    SD16,
    T24,
    O48,
    Product {
        factors: Vec<GroupKind>,
    },
    /// `normal ⋊ acting` for the specific composites named by the
    /// classification: C_3 ⋊ Q_8, C_3 ⋊ D_8 and T_24 ⋊ C_2 (see [`GroupKind::model`]).
    Semidirect {
        normal: Box<GroupKind>,
        acting: Box<GroupKind>,
    },
    /// An extension of `kernel` by some group of order `quotient_order`
    /// whose isomorphism type is not determined.
    Extension {
        kernel: Box<GroupKind>,
        quotient_order: u64,
    },
}

/// Outcome of a containment query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Yes,
    No,
    Unknown,
}

impl GroupKind {
    pub fn cyclic(order: u64) -> GroupKind {
        GroupKind::Cyclic { order }
    }

    pub fn metacyclic(kernel: u64, quotient: u64, action: u64) -> GroupKind {
        GroupKind::Metacyclic { kernel, quotient, action: action % kernel.max(1) }.canonical()
    }

    pub fn product(factors: Vec<GroupKind>) -> GroupKind {
        GroupKind::Product { factors }.canonical()
    }

    pub fn semidirect(normal: GroupKind, acting: GroupKind) -> GroupKind {
        GroupKind::Semidirect { normal: Box::new(normal), acting: Box::new(acting) }
    }

    pub fn extension(kernel: GroupKind, quotient_order: u64) -> GroupKind {
        if quotient_order == 1 {
            return kernel;
        }
        GroupKind::Extension { kernel: Box::new(kernel), quotient_order }
    }

    /// Group order.
    pub fn order(&self) -> u64 {
        match self {
            GroupKind::Cyclic { order } => *order,
            GroupKind::Metacyclic { kernel, quotient, .. } => kernel * quotient,
            GroupKind::Q8 | GroupKind::D8 => 8,
            GroupKind::Q16 | GroupKind::SD16 => 16,
            GroupKind::T24 => 24,
            GroupKind::O48 => 48,
            GroupKind::Product { factors } => factors.iter().map(GroupKind::order).product(),
            GroupKind::Semidirect { normal, acting } => normal.order() * acting.order(),
            GroupKind::Extension { kernel, quotient_order } => kernel.order() * quotient_order,
        }
    }

    /// Whether the kind pins down a single isomorphism type.
    pub fn is_exact(&self) -> bool {
        match self {
            GroupKind::Extension { .. } => false,
            GroupKind::Product { factors } => factors.iter().all(GroupKind::is_exact),
            _ => true,
        }
    }

    /// Normal form: trivial factors dropped, coprime cyclic factors merged,
    /// degenerate metacyclic groups rewritten, small named groups recognized.
    pub fn canonical(self) -> GroupKind {
        match self {
            GroupKind::Metacyclic { kernel, quotient, action } => {
                let action = action % kernel.max(1);
                if quotient == 1 {
                    GroupKind::cyclic(kernel)
                } else if kernel == 1 {
                    GroupKind::cyclic(quotient)
                } else if action == 1 % kernel {
                    GroupKind::Product { factors: vec![GroupKind::cyclic(kernel), GroupKind::cyclic(quotient)] }
                        .canonical()
                } else if (kernel, quotient, action) == (4, 2, 3) {
                    GroupKind::D8
                } else if (kernel, quotient, action) == (8, 2, 3) {
                    GroupKind::SD16
                } else {
                    GroupKind::Metacyclic { kernel, quotient, action }
                }
            }
            GroupKind::Product { factors } => {
                let mut flat = Vec::new();
                for f in factors {
                    match f.canonical() {
                        GroupKind::Product { factors } => flat.extend(factors),
                        GroupKind::Cyclic { order: 1 } => {}
                        other => flat.push(other),
                    }
                }
                // Merge cyclic factors of coprime order.
                let mut cyclic: Vec<u64> = Vec::new();
                let mut rest = Vec::new();
                for f in flat {
                    if let GroupKind::Cyclic { order } = f {
                        match cyclic.iter_mut().find(|c| gcd(**c, order) == 1) {
                            Some(c) => *c *= order,
                            None => cyclic.push(order),
                        }
                    } else {
                        rest.push(f);
                    }
                }
                rest.extend(cyclic.into_iter().map(GroupKind::cyclic));
                match rest.len() {
                    0 => GroupKind::cyclic(1),
                    1 => rest.pop().unwrap(),
                    _ => GroupKind::Product { factors: rest },
                }
            }
            GroupKind::Extension { kernel, quotient_order } => GroupKind::extension(kernel.canonical(), quotient_order),
            other => other,
        }
    }

    /// Cayley-table model, when the kind is exact and small.
    pub fn model(&self) -> Option<FiniteGroup> {
        if !self.is_exact() || self.order() > MODEL_LIMIT {
            return None;
        }
        match self {
            GroupKind::Cyclic { order } => Some(metacyclic_model(*order, 1, 1)),
            GroupKind::Metacyclic { kernel, quotient, action } => {
                if pow_mod(*action, *quotient, *kernel) != 1 % kernel {
                    return None;
                }
                Some(metacyclic_model(*kernel, *quotient, *action))
            }
            GroupKind::D8 => Some(metacyclic_model(4, 2, 3)),
            GroupKind::SD16 => Some(metacyclic_model(8, 2, 3)),
            GroupKind::Q8 => Some(dicyclic_model(2)),
            GroupKind::Q16 => Some(dicyclic_model(4)),
            GroupKind::T24 => Some(binary_polyhedral_model(false)),
            GroupKind::O48 => Some(binary_polyhedral_model(true)),
            GroupKind::Product { factors } => {
                let mut acc = metacyclic_model(1, 1, 1);
                for f in factors {
                    acc = acc.direct_product(&f.model()?);
                }
                Some(acc)
            }
            GroupKind::Semidirect { normal, acting } => match (normal.as_ref(), acting.as_ref()) {
                (GroupKind::Cyclic { order: 3 }, GroupKind::Q8) => Some(c3_by_sign(false)),
                (GroupKind::Cyclic { order: 3 }, GroupKind::D8) => Some(c3_by_sign(true)),
                (GroupKind::T24, GroupKind::Cyclic { order: 2 }) => Some(gl2_f3_model()),
                _ => None,
            },
            GroupKind::Extension { .. } => None,
        }
    }

    /// Whether a group of this type embeds in a group of type `other`.
    pub fn embeds_in(&self, other: &GroupKind) -> Containment {
        let (h, g) = (self.order(), other.order());
        if g % h != 0 {
            return Containment::No;
        }
        if h == 1 {
            return Containment::Yes;
        }
        if let GroupKind::Extension { kernel, .. } = other {
            if self.embeds_in(kernel) == Containment::Yes {
                return Containment::Yes;
            }
        }
        if let GroupKind::Cyclic { order } = self {
            if let Some(orders) = other.element_orders_cover(*order) {
                return if orders { Containment::Yes } else { Containment::No };
            }
        }
        match (self.model(), other.model()) {
            (Some(hm), Some(gm)) => {
                if hm.embeds_in(&gm) {
                    Containment::Yes
                } else {
                    Containment::No
                }
            }
            _ => Containment::Unknown,
        }
    }

    /// Whether some element has order `n`, for kinds where the element
    /// orders are known in closed form.
    fn element_orders_cover(&self, n: u64) -> Option<bool> {
        let orders: Vec<u64> = match self {
            GroupKind::Cyclic { order } => return Some(order % n == 0),
            GroupKind::T24 => vec![1, 2, 3, 4, 6],
            GroupKind::Product { factors } => {
                let mut acc = vec![1u64];
                for f in factors {
                    let fo: Vec<u64> = match f {
                        GroupKind::Cyclic { order } => crate::arith::divisors(*order),
                        GroupKind::T24 => vec![1, 2, 3, 4, 6],
                        _ => return None,
                    };
                    let mut next = Vec::new();
                    for a in &acc {
                        for b in &fo {
                            let l = a / gcd(*a, *b) * b;
                            if n.is_multiple_of(l) && !next.contains(&l) {
                                next.push(l);
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
            _ => return None,
        };
        Some(orders.contains(&n))
    }

    /// Whether a group of this type has a normal subgroup isomorphic to
    /// `kernel` with quotient of order `index`. `None` if undecidable here.
    pub fn has_normal_subgroup(&self, kernel: &GroupKind, index: u64) -> Option<bool> {
        if kernel.order() * index != self.order() {
            return Some(false);
        }
        let g = self.model()?;
        let k = kernel.model()?;
        Some(g.has_normal_copy(&k))
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Cyclic { order } => write!(f, "C_{order}"),
            GroupKind::Metacyclic { kernel, quotient, .. } => write!(f, "C_{kernel} ⋊ C_{quotient}"),
            GroupKind::Q8 => write!(f, "Q_8"),
            GroupKind::D8 => write!(f, "D_8"),
            GroupKind::Q16 => write!(f, "Q_16"),
            GroupKind::SD16 => write!(f, "SD_16"),
            GroupKind::T24 => write!(f, "T_24"),
            GroupKind::O48 => write!(f, "O_48"),
            GroupKind::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" × "))
            }
            GroupKind::Semidirect { normal, acting } => write!(f, "{normal} ⋊ {acting}"),
            GroupKind::Extension { kernel, quotient_order } => {
                let k = kernel.to_string();
                if k.contains(' ') {
                    write!(f, "({k}).[{quotient_order}]")
                } else {
                    write!(f, "{k}.[{quotient_order}]")
                }
            }
        }
    }
}

/// A finite group as a Cayley table; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    orders: Vec<u64>,
}

impl FiniteGroup {
    /// Closure of `gens` under `mul`, starting from `identity`.
    pub fn from_generators<E, F>(identity: E, gens: &[E], mul: F) -> FiniteGroup
    where
        E: Clone + Eq + std::hash::Hash,
        F: Fn(&E, &E) -> E,
    {
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<E, usize> = HashMap::from([(identity, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let y = mul(&elems[i], g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&mul(&elems[a], &elems[b])] as u32;
            }
        }
        FiniteGroup::from_table(n, table)
    }

    fn from_table(n: usize, table: Vec<u32>) -> FiniteGroup {
        let mut inverse = vec![0u32; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("not a group") as u32;
        }
        let mut orders = vec![1u64; n];
        for (a, o) in orders.iter_mut().enumerate() {
            let mut x = a;
            while x != 0 {
                x = table[x * n + a] as usize;
                *o += 1;
            }
        }
        FiniteGroup { n, table, inverse, orders }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.orders[a]
    }

    /// Number of elements of each order, sorted by order.
    pub fn order_statistics(&self) -> Vec<(u64, usize)> {
        let mut m: HashMap<u64, usize> = HashMap::new();
        for &o in &self.orders {
            *m.entry(o).or_default() += 1;
        }
        let mut v: Vec<_> = m.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Size of the subgroup generated by `gens`.
    pub fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut out = vec![0];
        seen[0] = true;
        let mut i = 0;
        while i < out.len() {
            for &g in gens {
                let y = self.mul(out[i], g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// A generating set with at most two elements, preferring high orders.
    pub fn generating_pair(&self) -> Option<Vec<usize>> {
        let mut by_order: Vec<usize> = (0..self.n).collect();
        by_order.sort_by_key(|&a| std::cmp::Reverse(self.orders[a]));
        if self.n == 1 {
            return Some(vec![]);
        }
        if self.orders[by_order[0]] as usize == self.n {
            return Some(vec![by_order[0]]);
        }
        for &a in &by_order {
            for &b in &by_order {
                if self.span(&[a, b]).len() == self.n {
                    return Some(vec![a, b]);
                }
            }
        }
        None
    }

    /// Direct product with elements (a, b) ↦ a·|other| + b.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let a = self.mul(x / n2, y / n2);
                let b = other.mul(x % n2, y % n2);
                table[x * n + y] = (a * n2 + b) as u32;
            }
        }
        FiniteGroup::from_table(n, table)
    }

    /// Images of injective homomorphisms `self → target`, one per choice of
    /// generator images; `visit` returns true to stop.
    fn for_each_embedding(&self, target: &FiniteGroup, mut visit: impl FnMut(&[usize]) -> bool) {
        if !target.n.is_multiple_of(self.n) {
            return;
        }
        let hs = self.order_statistics();
        let gs: HashMap<u64, usize> = target.order_statistics().into_iter().collect();
        if hs.iter().any(|(o, c)| gs.get(o).copied().unwrap_or(0) < *c) {
            return;
        }
        let Some(gens) = self.generating_pair() else { return };
        let candidates: Vec<Vec<usize>> =
            gens.iter().map(|&h| (0..target.n).filter(|&g| target.orders[g] == self.orders[h]).collect()).collect();
        let mut choice = vec![0usize; gens.len()];
        let mut map = vec![usize::MAX; self.n];
        'outer: loop {
            if gens.is_empty() {
                visit(&[0]);
                return;
            }
            let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if self.extend_hom(target, &gens, &images, &mut map) {
                let mut image: Vec<usize> = map.clone();
                image.sort_unstable();
                image.dedup();
                if image.len() == self.n && visit(&map) {
                    return;
                }
            }
            for (slot, c) in choice.iter_mut().zip(&candidates) {
                *slot += 1;
                if *slot < c.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            return;
        }
    }

    /// Extends generator images to a homomorphism along a breadth-first
    /// spanning tree; false on any inconsistency.
    fn extend_hom(&self, target: &FiniteGroup, gens: &[usize], images: &[usize], map: &mut [usize]) -> bool {
        map.fill(usize::MAX);
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&h, &g) in gens.iter().zip(images) {
                let y = self.mul(x, h);
                let img = target.mul(map[x], g);
                if map[y] == usize::MAX {
                    map[y] = img;
                    queue.push_back(y);
                } else if map[y] != img {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `self` is isomorphic to a subgroup of `target`.
    pub fn embeds_in(&self, target: &FiniteGroup) -> bool {
        let mut found = false;
        self.for_each_embedding(target, |_| {
            found = true;
            true
        });
        found
    }

    /// Whether `self` is isomorphic to `other`.
    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        self.n == other.n && self.embeds_in(other)
    }

    /// Whether `self` has a normal subgroup isomorphic to `kernel`.
    pub fn has_normal_copy(&self, kernel: &FiniteGroup) -> bool {
        let mut found = false;
        kernel.for_each_embedding(self, |map| {
            let mut member = vec![false; self.n];
            for &x in map {
                member[x] = true;
            }
            let normal = (0..self.n).all(|g| map.iter().all(|&x| member[self.mul(self.mul(g, x), self.inv(g))]));
            found = normal;
            normal
        });
        found
    }
}

/// C_a ⋊ C_b with y x y^{-1} = x^r; elements (i, j) = x^i y^j.
fn metacyclic_model(a: u64, b: u64, r: u64) -> FiniteGroup {
    let (a, b) = (a as i64, b as i64);
    let r = r as i64 % a.max(1);
    let powers: Vec<i64> = (0..b.max(1)).map(|j| pow_mod(r as u64, j as u64, a as u64) as i64).collect();
    let mul = move |x: &(i64, i64), y: &(i64, i64)| {
        ((x.0 + powers[x.1 as usize] * y.0).rem_euclid(a), (x.1 + y.1).rem_euclid(b))
    };
    FiniteGroup::from_generators((0, 0), &[(1 % a, 0), (0, 1 % b)], mul)
}

/// Dicyclic group of order 4m: x^{2m} = 1, y² = x^m, y x y^{-1} = x^{-1}.
fn dicyclic_model(m: i64) -> FiniteGroup {
    let n = 2 * m;
    let mul = move |x: &(i64, i64), y: &(i64, i64)| match (x.1, y.1) {
        (0, j) => ((x.0 + y.0).rem_euclid(n), j),
        (_, 0) => ((x.0 - y.0).rem_euclid(n), 1),
        _ => ((x.0 - y.0 + m).rem_euclid(n), 0),
    };
    FiniteGroup::from_generators((0, 0), &[(1, 0), (0, 1)], mul)
}

/// C_3 ⋊ Q_8 (the cyclic C_4 = ⟨x⟩ centralizes, y inverts) or C_3 ⋊ D_8
/// (the rotation inverts, the reflection centralizes).
fn c3_by_sign(dihedral: bool) -> FiniteGroup {
    // Elements (c, i, j) = z^c x^i y^j with z of order 3.
    let inner = move |a: (i64, i64), b: (i64, i64)| -> (i64, i64) {
        if dihedral {
            let s = if a.1 == 1 { -1 } else { 1 };
            ((a.0 + s * b.0).rem_euclid(4), (a.1 + b.1) % 2)
        } else {
            match (a.1, b.1) {
                (0, j) => ((a.0 + b.0).rem_euclid(4), j),
                (_, 0) => ((a.0 - b.0).rem_euclid(4), 1),
                _ => ((a.0 - b.0 + 2).rem_euclid(4), 0),
            }
        }
    };
    let sign = move |i: i64, j: i64| -> i64 {
        let odd = if dihedral { i % 2 == 1 } else { j == 1 };
        if odd {
            -1
        } else {
            1
        }
    };
    let mul = move |a: &(i64, i64, i64), b: &(i64, i64, i64)| {
        let (i, j) = inner((a.1, a.2), (b.1, b.2));
        ((a.0 + sign(a.1, a.2) * b.0).rem_euclid(3), i, j)
    };
    FiniteGroup::from_generators((0, 0, 0), &[(1, 0, 0), (0, 1, 0), (0, 0, 1)], mul)
}

/// Binary tetrahedral (T_24) or binary octahedral (O_48) group as unit
/// quaternions reduced modulo 7, where 1/2 = 4 and 1/√2 = 5.
fn binary_polyhedral_model(octahedral: bool) -> FiniteGroup {
    const P: i64 = 7;
    let mul = |a: &[i64; 4], b: &[i64; 4]| {
        let [a0, a1, a2, a3] = *a;
        let [b0, b1, b2, b3] = *b;
        [
            (a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3).rem_euclid(P),
            (a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2).rem_euclid(P),
            (a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1).rem_euclid(P),
            (a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0).rem_euclid(P),
        ]
    };
    let i = [0, 1, 0, 0];
    let j = [0, 0, 1, 0];
    let b = [4, 4, 4, 4];
    let mut gens = vec![i, j, b];
    if octahedral {
        gens.push([5, 5, 0, 0]);
    }
    FiniteGroup::from_generators([1, 0, 0, 0], &gens, mul)
}

/// GL_2(F_3) ≅ T_24 ⋊ C_2.
fn gl2_f3_model() -> FiniteGroup {
    let mul = |a: &[i64; 4], b: &[i64; 4]| {
        [
            (a[0] * b[0] + a[1] * b[2]).rem_euclid(3),
            (a[0] * b[1] + a[1] * b[3]).rem_euclid(3),
            (a[2] * b[0] + a[3] * b[2]).rem_euclid(3),
            (a[2] * b[1] + a[3] * b[3]).rem_euclid(3),
        ]
    };
    FiniteGroup::from_generators([1, 0, 0, 1], &[[1, 1, 0, 1], [0, 1, 2, 0], [2, 0, 0, 1]], mul)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_orders() {
        for k in [
            GroupKind::Q8,
            GroupKind::D8,
            GroupKind::Q16,
            GroupKind::SD16,
            GroupKind::T24,
            GroupKind::O48,
            GroupKind::semidirect(GroupKind::cyclic(3), GroupKind::Q8),
            GroupKind::semidirect(GroupKind::cyclic(3), GroupKind::D8),
            GroupKind::semidirect(GroupKind::T24, GroupKind::cyclic(2)),
            GroupKind::metacyclic(3, 4, 2),
        ] {
            assert_eq!(k.model().unwrap().order() as u64, k.order(), "{k}");
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(GroupKind::metacyclic(8, 2, 3), GroupKind::SD16);
        assert_eq!(GroupKind::metacyclic(4, 2, 3), GroupKind::D8);
        assert_eq!(GroupKind::metacyclic(3, 2, 1), GroupKind::cyclic(6));
        assert_eq!(GroupKind::product(vec![GroupKind::T24, GroupKind::cyclic(1)]), GroupKind::T24);
        assert_eq!(GroupKind::metacyclic(6, 2, 5).to_string(), "C_6 ⋊ C_2");
    }
}
