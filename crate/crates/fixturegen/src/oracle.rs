//! Independent ray class oracle: builds the narrow ray class group of a
//! validated base field by brute force — explicit residue enumeration,
//! explicit subgroup closure, and invariant factors extracted by the
//! elementary maximal-order-element algorithm. No Smith normal form, no
//! discrete logarithms; only element arithmetic is shared with the
//! library. Small moduli only.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use fontaine::fieldcore::{Elem, Field, ResidueRing};
use fontaine::rayclass::Modulus;

/// An element of (O/m)^x ⊕ {±1}^{r1}: canonical residue plus sign bits.
type GElem = (Elem, Vec<u8>);

struct ExplicitGroup {
    elements: Vec<GElem>,
    index: BTreeMap<GElem, usize>,
    /// mul[i][j] = index of element i * element j.
    mul: Vec<Vec<usize>>,
    identity: usize,
}

impl ExplicitGroup {
    fn order(&self) -> usize {
        self.elements.len()
    }

    fn pow(&self, i: usize, k: usize) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.mul[acc][i];
        }
        acc
    }

    fn element_order(&self, i: usize) -> usize {
        let mut acc = i;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul[acc][i];
            k += 1;
        }
        k
    }

    /// Quotient by the cyclic subgroup generated by `g`, as an explicit
    /// group on coset representatives.
    fn quotient_by_cyclic(&self, g: usize) -> ExplicitGroup {
        // Coset of x: orbit x * <g>.
        let ord_g = self.element_order(g);
        let mut coset_of: Vec<Option<usize>> = vec![None; self.order()];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..self.order() {
            if coset_of[x].is_some() {
                continue;
            }
            let c = reps.len();
            reps.push(x);
            let mut y = x;
            for _ in 0..ord_g {
                coset_of[y] = Some(c);
                y = self.mul[y][g];
            }
        }
        let n = reps.len();
        let mut mul = vec![vec![0usize; n]; n];
        for (ci, &ri) in reps.iter().enumerate() {
            for (cj, &rj) in reps.iter().enumerate() {
                mul[ci][cj] = coset_of[self.mul[ri][rj]].unwrap();
            }
        }
        let identity = coset_of[self.identity].unwrap();
        // Element payload no longer meaningful; keep rep payloads.
        let elements: Vec<GElem> = reps.iter().map(|&r| self.elements[r].clone()).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        ExplicitGroup { elements, index, mul, identity }
    }

    /// Invariant factors (ascending divisibility) by repeatedly splitting
    /// off a maximal-order cyclic factor.
    fn invariant_factors(&self) -> Vec<BigInt> {
        if self.order() == 1 {
            return vec![];
        }
        let (mut best, mut best_ord) = (0usize, 1usize);
        for i in 0..self.order() {
            let o = self.element_order(i);
            if o > best_ord {
                best = i;
                best_ord = o;
            }
        }
        let q = self.quotient_by_cyclic(best);
        let mut rest = q.invariant_factors();
        rest.push(BigInt::from(best_ord));
        // rest is ascending-divisibility with the largest last.
        rest
    }
}

/// Narrow ray class group of a validated base field at the given modulus,
/// computed explicitly. Returns ascending invariant factors (1s dropped).
pub fn brute_force_ray_class(field: &Field, modulus: &Modulus) -> Vec<BigInt> {
    let ideal = modulus.finite_ideal(field);
    let ring = ResidueRing::new(field, ideal);
    assert!(
        ring.size() <= BigInt::from(1u64 << 12),
        "oracle moduli must stay small"
    );
    let nsign = if modulus.infinite { field.r1 } else { 0 };

    // All units of the residue ring.
    let residues = ring.enumerate();
    let units: Vec<Elem> = residues
        .into_iter()
        .filter(|x| ring.inverse(field, x).is_some())
        .collect();

    // Ambient group: units × sign vectors.
    let mut elements: Vec<GElem> = Vec::new();
    for u in &units {
        for bits in 0..(1u32 << nsign) {
            let sv: Vec<u8> = (0..nsign).map(|k| ((bits >> k) & 1) as u8).collect();
            elements.push((u.clone(), sv));
        }
    }
    elements.sort();
    let index: BTreeMap<GElem, usize> =
        elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let mulop = |a: &GElem, b: &GElem| -> GElem {
        let res = ring.mul(field, &a.0, &b.0);
        let signs = a.1.iter().zip(&b.1).map(|(x, y)| x ^ y).collect();
        (res, signs)
    };
    let n = elements.len();
    let mut mul = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            mul[i][j] = index[&mulop(&elements[i], &elements[j])];
        }
    }
    let identity = index[&(ring.reduce(&field.one), vec![0u8; nsign])];
    let ambient = ExplicitGroup { elements, index, mul, identity };

    // Subgroup generated by the global unit images; quotient = ray class
    // group. Build the quotient by closing cosets: x ~ y iff x*y^{-1} in
    // the unit-image subgroup.
    let mut unit_gens: Vec<Elem> = vec![field.record.torsion_unit.clone()];
    unit_gens.extend(field.record.units.iter().cloned());
    let mut sub: Vec<usize> = vec![ambient.identity];
    let mut seen = vec![false; ambient.order()];
    seen[ambient.identity] = true;
    let gen_idx: Vec<usize> = unit_gens
        .iter()
        .map(|u| {
            let res = ring.reduce(u);
            let signs: Vec<u8> = if nsign > 0 {
                field.sign_bits(u).iter().map(|b| if b.is_one() { 1 } else { 0 }).collect()
            } else {
                vec![]
            };
            ambient.index[&(res, signs)]
        })
        .collect();
    let mut frontier = vec![ambient.identity];
    while let Some(x) = frontier.pop() {
        for &g in &gen_idx {
            let y = ambient.mul[x][g];
            if !seen[y] {
                seen[y] = true;
                sub.push(y);
                frontier.push(y);
            }
        }
    }
    sub.sort();

    // Quotient group on coset reps.
    let mut coset_of: Vec<Option<usize>> = vec![None; ambient.order()];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..ambient.order() {
        if coset_of[x].is_some() {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &s in &sub {
            coset_of[ambient.mul[x][s]] = Some(c);
        }
    }
    let qn = reps.len();
    let mut qmul = vec![vec![0usize; qn]; qn];
    for (ci, &ri) in reps.iter().enumerate() {
        for (cj, &rj) in reps.iter().enumerate() {
            qmul[ci][cj] = coset_of[ambient.mul[ri][rj]].unwrap();
        }
    }
    let qid = coset_of[ambient.identity].unwrap();
    let qelements: Vec<GElem> = reps.iter().map(|&r| ambient.elements[r].clone()).collect();
    let qindex = qelements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let quotient =
        ExplicitGroup { elements: qelements, index: qindex, mul: qmul, identity: qid };

    let mut inv = quotient.invariant_factors();
    inv.retain(|d| !d.is_one());
    inv.sort();
    // Ascending divisibility check.
    for w in inv.windows(2) {
        assert!((&w[1] % &w[0]).is_zero(), "invariant factors must divide");
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{build_q, build_quad};

    #[test]
    fn oracle_matches_classics() {
        let k = Field::new_base(build_q()).unwrap();
        // Q mod 8∞: C2 x C2 (the 8th cyclotomic field).
        let inv = brute_force_ray_class(&k, &Modulus::new(vec![3], true));
        assert_eq!(inv, vec![BigInt::from(2), BigInt::from(2)]);
        // Q mod 16∞: C2 x C4.
        let inv = brute_force_ray_class(&k, &Modulus::new(vec![4], true));
        assert_eq!(inv, vec![BigInt::from(2), BigInt::from(4)]);
        // Q(√17) mod pbar²∞: order 2.
        let k17 = Field::new_base(build_quad(17).record).unwrap();
        let inv = brute_force_ray_class(&k17, &Modulus::new(vec![0, 2], true));
        assert_eq!(inv, vec![BigInt::from(2)]);
    }
}
