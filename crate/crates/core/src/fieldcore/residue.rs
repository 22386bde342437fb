//! Residue rings O/m for moduli supported at primes over 2, and the unit
//! groups (O/m)^× with explicit generators and discrete logarithms.
//!
//! Units are resolved against the filtration by higher unit groups: the
//! prime-to-p part is cyclic (residue field), and each graded piece
//! (1 + p^i)/(1 + p^{i+1}) is an elementary 2-group identified with the
//! lattice quotient p^i/p^{i+1}. This stays valid for ramified primes and
//! non-principal primes, which extension records may carry.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::abgroup::FinAbGroup;
use crate::mat::{snf, snf_diagonal, solve_linear, Mat};

use super::{Elem, Field, FieldError, IdealHnf};

/// O/m with canonical representatives from the HNF of m.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub modulus: IdealHnf,
}

impl ResidueRing {
    pub fn new(field: &Field, modulus: IdealHnf) -> Self {
        debug_assert!(field.is_ideal(&modulus));
        ResidueRing { modulus }
    }

    pub fn size(&self) -> BigInt {
        self.modulus.norm()
    }

    /// Canonical representative: coordinate j lies in [0, H\[j\]\[j\]).
    pub fn reduce(&self, v: &Elem) -> Elem {
        let h = &self.modulus.basis;
        let n = h.rows;
        let mut out = v.clone();
        for j in (0..n).rev() {
            let q = num_integer::Integer::div_floor(&out[j], &h[(j, j)]);
            if q.is_zero() {
                continue;
            }
            for i in 0..=j {
                let t = &h[(i, j)] * &q;
                out[i] -= t;
            }
        }
        out
    }

    pub fn mul(&self, field: &Field, x: &Elem, y: &Elem) -> Elem {
        self.reduce(&field.mul(x, y))
    }

    pub fn pow(&self, field: &Field, x: &Elem, k: &BigInt) -> Elem {
        assert!(!k.is_negative());
        let mut acc = self.reduce(&field.one);
        let mut base = self.reduce(x);
        let mut e = k.clone();
        while e.is_positive() {
            if num_integer::Integer::is_odd(&e) {
                acc = self.mul(field, &acc, &base);
            }
            base = self.mul(field, &base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_one(&self, field: &Field, x: &Elem) -> bool {
        self.reduce(x) == self.reduce(&field.one)
    }

    /// Multiplicative inverse mod m, when x is a unit of the ring.
    pub fn inverse(&self, field: &Field, x: &Elem) -> Option<Elem> {
        // Solve M_x * y + H * t = 1 over Z.
        let mx = field.mul_matrix(x);
        let sys = mx.hcat(&self.modulus.basis);
        let sol = solve_linear(&sys, &field.one)?;
        let y: Elem = sol[..field.n].to_vec();
        Some(self.reduce(&y))
    }

    /// All canonical representatives; only for small rings (tests, oracles).
    pub fn enumerate(&self) -> Vec<Elem> {
        let h = &self.modulus.basis;
        let n = h.rows;
        let mut out: Vec<Elem> = vec![vec![]];
        for j in 0..n {
            let d = &h[(j, j)];
            let mut next = Vec::new();
            for partial in &out {
                let mut c = BigInt::zero();
                while &c < d {
                    let mut v = partial.clone();
                    v.push(c.clone());
                    next.push(v);
                    c += 1;
                }
            }
            out = next;
        }
        // The vectors built above list coordinates in order; reduce fixes
        // any drift from off-diagonal entries (it is the identity here
        // since each coordinate is already within range).
        out.into_iter().map(|v| self.reduce(&v)).collect()
    }
}

struct Level {
    power: IdealHnf,
    u_mat: Mat,
    two_positions: Vec<usize>,
    gens: Vec<Elem>,
    gens_inv: Vec<Elem>,
}

struct Component {
    prime_idx: usize,
    k: usize,
    ring: ResidueRing,
    ring1: ResidueRing,
    q_minus_1: BigInt,
    fq_dlog: BTreeMap<Elem, BigInt>,
    t: Option<Elem>,
    t_inv: Option<Elem>,
    levels: Vec<Level>,
    ngens: usize,
}

impl Component {
    fn dlog(&self, field: &Field, x: &Elem) -> Option<Vec<BigInt>> {
        let mut exps = Vec::with_capacity(self.ngens);
        let mut x = self.ring.reduce(x);
        if self.t.is_some() {
            let r1 = self.ring1.reduce(&x);
            let a = self.fq_dlog.get(&r1)?.clone();
            let tia = self.ring.pow(field, self.t_inv.as_ref().unwrap(), &a);
            x = self.ring.mul(field, &x, &tia);
            exps.push(a);
        } else {
            // Residue field F_2: x must be a unit, i.e. nonzero mod p.
            let r1 = self.ring1.reduce(&x);
            if r1.iter().all(|c| c.is_zero()) {
                return None;
            }
        }
        for level in &self.levels {
            let z = field.sub(&x, &field.one);
            let y = level
                .power
                .coordinates(&self.ring.reduce(&z))
                .or_else(|| level.power.coordinates(&z))?;
            let w = level.u_mat.mul_vec(&y);
            for (g, &pos) in level.two_positions.iter().enumerate() {
                let bit = num_integer::Integer::mod_floor(&w[pos], &BigInt::from(2));
                if bit.is_one() {
                    x = self.ring.mul(field, &x, &level.gens_inv[g]);
                }
                exps.push(bit);
            }
        }
        if self.ring.is_one(field, &x) {
            Some(exps)
        } else {
            None
        }
    }
}

/// (O/m)^× for a modulus supported at the primes over 2, as an abstract
/// abelian group with explicit generating residues and discrete logs.
pub struct ResidueUnitGroup {
    pub ring: ResidueRing,
    pub group: FinAbGroup,
    /// Generator residues (CRT-lifted), aligned with the group generators.
    pub gens: Vec<Elem>,
    components: Vec<Component>,
}

impl ResidueUnitGroup {
    /// Build for the modulus ∏ p_i^{exps\[i\]} over the field's primes
    /// above 2.
    pub fn new(field: &Field, exps: &[usize]) -> Result<Self, FieldError> {
        assert_eq!(exps.len(), field.num_primes());
        let n = field.n;
        // Full modulus.
        let mut modulus = IdealHnf::whole_ring(n);
        for (i, &k) in exps.iter().enumerate() {
            if k > 0 {
                modulus = field.ideal_mul(&modulus, &field.ideal_pow(field.prime_ideal(i), k));
            }
        }
        let ring = ResidueRing::new(field, modulus);

        let mut components = Vec::new();
        for (i, &k) in exps.iter().enumerate() {
            if k == 0 {
                continue;
            }
            components.push(Self::build_component(field, i, k)?);
        }

        // CRT idempotents and generator lifts.
        let mut gens: Vec<Elem> = Vec::new();
        let mut rel_blocks: Vec<Mat> = Vec::new();
        for ci in 0..components.len() {
            let comp = &components[ci];
            // B = product of the other components' prime powers.
            let mut other = IdealHnf::whole_ring(n);
            for (cj, compj) in components.iter().enumerate() {
                if cj != ci {
                    other = field.ideal_mul(
                        &other,
                        &field.ideal_pow(field.prime_ideal(compj.prime_idx), compj.k),
                    );
                }
            }
            let own = field.ideal_pow(field.prime_ideal(comp.prime_idx), comp.k);
            // e = B*y with B*y ≡ 1 mod A: solve [B | A] w = 1.
            let sys = other.basis.hcat(&own.basis);
            let sol = solve_linear(&sys, &field.one)
                .ok_or_else(|| FieldError::FactorizationMismatch("primes not comaximal".into()))?;
            let idem = other.basis.mul_vec(&sol[..n]);

            let mut local_gens: Vec<Elem> = Vec::new();
            if let Some(t) = &comp.t {
                local_gens.push(t.clone());
            }
            for level in &comp.levels {
                local_gens.extend(level.gens.iter().cloned());
            }
            for g in &local_gens {
                // 1 + (g - 1) * e ≡ g mod own, ≡ 1 mod other.
                let gm1 = field.sub(g, &field.one);
                let lifted = field.add(&field.one, &field.mul(&gm1, &idem));
                gens.push(ring.reduce(&lifted));
            }
            rel_blocks.push(Self::component_relations(field, comp));
        }

        // Assemble block-diagonal relation matrix.
        let total: usize = components.iter().map(|c| c.ngens).sum();
        let total_cols: usize = rel_blocks.iter().map(|b| b.cols).sum();
        let mut rels = Mat::zeros(total, total_cols);
        let mut roff = 0;
        let mut coff = 0;
        for b in &rel_blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    rels[(roff + i, coff + j)] = b[(i, j)].clone();
                }
            }
            roff += b.rows;
            coff += b.cols;
        }
        let group = FinAbGroup::new(total, rels);

        // The presented order must match ∏ N(p)^{k-1} (N(p) - 1).
        let mut expect = BigInt::one();
        for comp in &components {
            let q = field.prime_ideal(comp.prime_idx).norm();
            expect *= num_traits::pow::pow(q.clone(), comp.k - 1) * (&q - 1);
        }
        assert_eq!(group.order().as_ref(), Some(&expect), "unit group order mismatch");

        Ok(ResidueUnitGroup { ring, group, gens, components })
    }

    /// Factor an integral ideal over the primes above 2; BadModulus if any
    /// other prime divides it.
    pub fn from_ideal(field: &Field, ideal: &IdealHnf) -> Result<Self, FieldError> {
        let exps = factor_over_two(field, ideal)?;
        Self::new(field, &exps)
    }

    pub fn order(&self) -> BigInt {
        self.group.order().expect("unit group is finite")
    }

    /// Exponent vector of a residue over the stored generators; None when
    /// the element is not coprime to the modulus.
    pub fn dlog(&self, field: &Field, x: &Elem) -> Option<Vec<BigInt>> {
        let mut out = Vec::new();
        for comp in &self.components {
            out.extend(comp.dlog(field, x)?);
        }
        Some(out)
    }

    fn build_component(field: &Field, prime_idx: usize, k: usize) -> Result<Component, FieldError> {
        let p = field.prime_ideal(prime_idx).clone();
        let q = p.norm();
        assert!(q <= BigInt::from(4096), "residue field too large");
        let mut powers: Vec<IdealHnf> = vec![IdealHnf::whole_ring(field.n)];
        for i in 1..=k {
            powers.push(field.ideal_mul(&powers[i - 1], &p));
        }
        let ring = ResidueRing::new(field, powers[k].clone());
        let ring1 = ResidueRing::new(field, powers[1].clone());
        let q_minus_1: BigInt = &q - 1;

        // Odd part: a generator of the residue field's units, raised to the
        // full 2-part order so that it lands in (and generates) the
        // prime-to-2 part of (O/p^k)^×.
        let (t, t_inv, fq_dlog) = if q_minus_1.is_one() {
            (None, None, BTreeMap::new())
        } else {
            let mut gen: Option<Elem> = None;
            for cand in ring1.enumerate() {
                if cand.iter().all(|c| c.is_zero()) {
                    continue;
                }
                // Multiplicative order in the residue field.
                let mut ord = BigInt::one();
                let mut acc = ring1.reduce(&cand);
                let one1 = ring1.reduce(&field.one);
                while acc != one1 {
                    acc = ring1.mul(field, &acc, &cand);
                    ord += 1;
                    assert!(ord <= q_minus_1, "non-unit residue in residue field");
                }
                if ord == q_minus_1 {
                    gen = Some(cand);
                    break;
                }
            }
            let g = gen.expect("residue field has a multiplicative generator");
            let two_part = BigInt::one() << (log2_exact(&q) * (k as u64 - 1).max(0));
            let t = ring.pow(field, &g, &two_part);
            let t_inv = ring.pow(field, &t, &(&q_minus_1 - 1));
            let mut tbl = BTreeMap::new();
            let mut acc = ring1.reduce(&field.one);
            let tbar = ring1.reduce(&t);
            let mut e = BigInt::zero();
            while e < q_minus_1 {
                tbl.insert(acc.clone(), e.clone());
                acc = ring1.mul(field, &acc, &tbar);
                e += 1;
            }
            assert_eq!(tbl.len(), usize::try_from(q_minus_1.clone()).unwrap());
            (Some(t), Some(t_inv), tbl)
        };

        // Graded levels (1 + p^i)/(1 + p^{i+1}) ≅ p^i/p^{i+1}.
        let mut levels = Vec::new();
        for i in 1..k {
            let hi = &powers[i];
            let hnext = &powers[i + 1];
            let mut x = Mat::zeros(field.n, field.n);
            for j in 0..field.n {
                let col = hnext.basis.column(j);
                let y = hi.coordinates(&col).expect("p^{i+1} inside p^i");
                x.set_column(j, &y);
            }
            let s = snf(&x);
            let diag = snf_diagonal(&s.s);
            let mut two_positions = Vec::new();
            for (j, d) in diag.iter().enumerate() {
                if d.is_one() {
                    continue;
                }
                assert_eq!(*d, BigInt::from(2), "graded piece must be elementary");
                two_positions.push(j);
            }
            let u_inv = s.u.inv_unimodular();
            let basis_u = hi.basis.mul(&u_inv);
            let mut gens = Vec::new();
            let mut gens_inv = Vec::new();
            for &pos in &two_positions {
                let z = basis_u.column(pos);
                let u = ring.reduce(&field.add(&field.one, &z));
                let ui = ring
                    .inverse(field, &u)
                    .expect("one-units are invertible");
                gens.push(u);
                gens_inv.push(ui);
            }
            levels.push(Level { power: hi.clone(), u_mat: s.u, two_positions, gens, gens_inv });
        }

        let ngens = (if t.is_some() { 1 } else { 0 })
            + levels.iter().map(|l| l.gens.len()).sum::<usize>();
        Ok(Component {
            prime_idx,
            k,
            ring,
            ring1,
            q_minus_1,
            fq_dlog,
            t,
            t_inv,
            levels,
            ngens,
        })
    }

    fn component_relations(field: &Field, comp: &Component) -> Mat {
        let n = comp.ngens;
        let mut rels = Mat::zeros(n, n);
        let mut idx = 0;
        if comp.t.is_some() {
            rels[(0, 0)] = comp.q_minus_1.clone();
            idx = 1;
        }
        for level in &comp.levels {
            for g in &level.gens {
                let sq = comp.ring.mul(field, g, g);
                let d = comp
                    .dlog(field, &sq)
                    .expect("square of a one-unit is a unit");
                for (r, e) in d.iter().enumerate() {
                    rels[(r, idx)] = -e.clone();
                }
                rels[(idx, idx)] += BigInt::from(2);
                idx += 1;
            }
        }
        rels
    }
}

fn log2_exact(q: &BigInt) -> u64 {
    let mut v = q.clone();
    let mut e = 0u64;
    while num_integer::Integer::is_even(&v) {
        v >>= 1;
        e += 1;
    }
    assert!(v.is_one(), "norm of a prime over 2 must be a 2-power");
    e
}

/// Exponent vector of `ideal` over the field's primes above 2; BadModulus
/// when the ideal has support elsewhere.
pub fn factor_over_two(field: &Field, ideal: &IdealHnf) -> Result<Vec<usize>, FieldError> {
    let mut exps = vec![0usize; field.num_primes()];
    for i in 0..field.num_primes() {
        let p = field.prime_ideal(i);
        let mut k = 0usize;
        let mut power = IdealHnf::whole_ring(field.n);
        loop {
            power = field.ideal_mul(&power, p);
            // ideal ⊆ p^{k+1}?
            let contained =
                (0..field.n).all(|j| power.contains(&ideal.basis.column(j)));
            if contained {
                k += 1;
                if k > 64 {
                    return Err(FieldError::BadModulus);
                }
            } else {
                break;
            }
        }
        exps[i] = k;
    }
    let mut recompose = IdealHnf::whole_ring(field.n);
    for (i, &k) in exps.iter().enumerate() {
        recompose = field.ideal_mul(&recompose, &field.ideal_pow(field.prime_ideal(i), k));
    }
    if &recompose != ideal {
        return Err(FieldError::BadModulus);
    }
    Ok(exps)
}
