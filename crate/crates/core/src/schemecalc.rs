//! Symbolic calculus of order-2 group schemes over the ring of integers:
//! Ext-order bookkeeping, the pairwise move rules for adjacent filtration
//! constituents, and the sorting engine that brings a filtration word into
//! canonical block order. Purely symbolic: a word is a certificate-level
//! model of the graded pieces of a composition series.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::rayclass::{TowerReport, TowerStatus};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("Ext-order formula needs s >= 1 (use duality for the other side)")]
    EmptyS,
    #[error("word cannot be sorted: a required quadratic-extension flag is false")]
    UnsortableContext,
    #[error("bad word token: {0}")]
    BadToken(String),
}

/// An order-2 constituent, encoded by the set of primes over 2 dividing
/// its defining divisor rho. The empty set is Z/2Z, the full set is mu2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub mask: u8,
}

impl Constituent {
    pub const Z2: Constituent = Constituent { mask: 0 };

    pub fn mu2(nprimes: usize) -> Constituent {
        Constituent { mask: ((1u16 << nprimes) - 1) as u8 }
    }

    pub fn prime(i: usize) -> Constituent {
        Constituent { mask: 1 << i }
    }

    pub fn is_z2(&self) -> bool {
        self.mask == 0
    }

    pub fn is_mu2(&self, nprimes: usize) -> bool {
        self.mask == Constituent::mu2(nprimes).mask
    }

    /// Cartier dual: the complement divisor (rho * rho-bar = 2).
    pub fn dual(&self, nprimes: usize) -> Constituent {
        Constituent { mask: Constituent::mu2(nprimes).mask ^ self.mask }
    }

    pub fn token(&self, nprimes: usize) -> String {
        if self.is_z2() {
            return "Z2".into();
        }
        if self.is_mu2(nprimes) {
            return "mu2".into();
        }
        let mut s = String::new();
        for i in 0..nprimes {
            if self.mask & (1 << i) != 0 {
                s.push('p');
                s.push_str(&(i + 1).to_string());
            }
        }
        s
    }

    pub fn parse(tok: &str, nprimes: usize) -> Result<Constituent, SchemeError> {
        let t = tok.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "z2" {
            return Ok(Constituent::Z2);
        }
        if lower == "mu2" {
            return Ok(Constituent::mu2(nprimes));
        }
        let mut mask = 0u8;
        let mut chars = lower.chars().peekable();
        while let Some(c) = chars.next() {
            if c != 'p' {
                return Err(SchemeError::BadToken(tok.into()));
            }
            let d = chars
                .next()
                .and_then(|d| d.to_digit(10))
                .ok_or_else(|| SchemeError::BadToken(tok.into()))?;
            if d == 0 || d as usize > nprimes {
                return Err(SchemeError::BadToken(tok.into()));
            }
            mask |= 1 << (d - 1);
        }
        if mask == 0 {
            return Err(SchemeError::BadToken(tok.into()));
        }
        Ok(Constituent { mask })
    }

    pub fn support_size(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

/// Established dichotomy type carried by a rewrite context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CtxDichotomy {
    D1,
    D2,
}

/// The facts about the base field that license rewrites: how many primes
/// over 2, the established dichotomy, and (in the 3-prime case) the two
/// quadratic-extension flags. Under D1 both flags hold automatically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteContext {
    pub nprimes: usize,
    pub dichotomy: CtxDichotomy,
    pub qe1: bool,
    pub qe2: bool,
}

impl RewriteContext {
    pub fn new(nprimes: usize, dichotomy: CtxDichotomy, qe1: bool, qe2: bool) -> Self {
        assert!((1..=3).contains(&nprimes));
        // No quadratic extension of conductor ∞c² at all under D1, so the
        // QE conditions hold vacuously.
        let (qe1, qe2) = if dichotomy == CtxDichotomy::D1 { (true, true) } else { (qe1, qe2) };
        RewriteContext { nprimes, dichotomy, qe1, qe2 }
    }

    /// Canonical block order as positions; lower sorts to the left.
    pub fn canonical_position(&self, c: Constituent) -> usize {
        let order: &[u8] = match self.nprimes {
            1 => &[0b1, 0b0],
            2 => &[0b11, 0b01, 0b10, 0b00],
            3 => &[0b111, 0b011, 0b101, 0b001, 0b110, 0b010, 0b100, 0b000],
            _ => unreachable!(),
        };
        order.iter().position(|&m| m == c.mask).expect("constituent fits context")
    }

    pub fn canonical_blocks(&self) -> Vec<Constituent> {
        match self.nprimes {
            1 => vec![0b1, 0b0],
            2 => vec![0b11, 0b01, 0b10, 0b00],
            3 => vec![0b111, 0b011, 0b101, 0b001, 0b110, 0b010, 0b100, 0b000],
            _ => unreachable!(),
        }
        .into_iter()
        .map(|mask| Constituent { mask })
        .collect()
    }
}

/// Outcome of querying the move rule on an adjacent (sub, quot) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// The governing extension group vanishes: the pair may be swapped.
    Swap,
    /// The nonsplit class re-expresses the pair as (new_sub, new_quot).
    ExceptionalSwap(Constituent, Constituent),
    /// No rule applies (a required QE flag is false, or the pair is
    /// already in canonical order with a possibly nonsplit extension).
    Blocked,
}

/// |Ext^1(G_rho, G_rho')| = 2^(s-1) [M:K], where s counts primes dividing
/// rho but not rho', and M is the maximal elementary 2-extension of
/// conductor ∞(P')² split over those primes (degree supplied by the
/// caller from ray class data).
pub fn ext_order(
    _ctx: &RewriteContext,
    rho: Constituent,
    rho_prime: Constituent,
    m_degree: &BigInt,
) -> Result<BigInt, SchemeError> {
    let s = (rho.mask & !rho_prime.mask).count_ones();
    if s == 0 {
        return Err(SchemeError::EmptyS);
    }
    Ok((BigInt::one() << (s - 1)) * m_degree)
}

/// Move rule for the adjacent pair (sub, quot) = (w\[i\], w\[i+1\]).
/// Swapping moves `quot` one step to the left.
pub fn move_rule(ctx: &RewriteContext, sub: Constituent, quot: Constituent) -> Move {
    assert_ne!(sub, quot, "move rule is for distinct adjacent constituents");
    let n = ctx.nprimes;
    // mu2 moves left past everything; Z/2Z moves right past everything.
    if quot.is_mu2(n) || sub.is_mu2(n) {
        return Move::Swap;
    }
    if sub.is_z2() || quot.is_z2() {
        return Move::Swap;
    }
    match n {
        1 => unreachable!("single-prime words only contain mu2 and Z2"),
        2 => {
            // (sub = p2, quot = p1): Ext^1(G_p1, G_p2) = 0 because the
            // witness modulus carries no split quadratic (D1 or D2 holds).
            if sub.mask == 0b10 && quot.mask == 0b01 {
                Move::Swap
            } else {
                Move::Blocked
            }
        }
        3 => {
            let gate = |flag: bool, mv: Move| if flag { mv } else { Move::Blocked };
            match (sub.mask, quot.mask) {
                // Moving G_{p1p2} left (items 1-5).
                (0b101, 0b011) => gate(ctx.qe2, Move::Swap),
                (0b001, 0b011) => Move::Swap,
                (0b110, 0b011) => gate(ctx.qe1, Move::Swap),
                (0b010, 0b011) => Move::Swap,
                (0b100, 0b011) => gate(
                    ctx.qe2,
                    Move::ExceptionalSwap(
                        Constituent { mask: 0b010 },
                        Constituent { mask: 0b101 },
                    ),
                ),
                // Moving G_{p1p3} left (items 9-12).
                (0b001, 0b101) => Move::Swap,
                (0b110, 0b101) => gate(ctx.qe1, Move::Swap),
                (0b010, 0b101) => gate(
                    ctx.qe1,
                    Move::ExceptionalSwap(
                        Constituent { mask: 0b001 },
                        Constituent { mask: 0b110 },
                    ),
                ),
                (0b100, 0b101) => Move::Swap,
                // Moving G_{p1} left (items 8, 14, 15).
                (0b110, 0b001) => gate(ctx.qe1, Move::Swap),
                (0b010, 0b001) => gate(ctx.qe1, Move::Swap),
                (0b100, 0b001) => gate(ctx.qe1, Move::Swap),
                // Moving G_{p2p3} left (items 7, 13).
                (0b010, 0b110) => Move::Swap,
                (0b100, 0b110) => Move::Swap,
                // Moving G_{p2} left (item 6).
                (0b100, 0b010) => gate(ctx.qe2, Move::Swap),
                _ => Move::Blocked,
            }
        }
        _ => unreachable!(),
    }
}

/// A filtration word: graded pieces listed sub-to-quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationWord {
    pub entries: Vec<Constituent>,
    pub ctx: RewriteContext,
}

impl FiltrationWord {
    pub fn parse(s: &str, ctx: RewriteContext) -> Result<Self, SchemeError> {
        let entries = if s.trim().is_empty() {
            vec![]
        } else {
            s.split(',')
                .map(|tok| Constituent::parse(tok, ctx.nprimes))
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(FiltrationWord { entries, ctx })
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|c| c.token(self.ctx.nprimes))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn is_sorted(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| self.ctx.canonical_position(w[0]) <= self.ctx.canonical_position(w[1]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    pub kind: &'static str,
    pub before: (String, String),
    pub after: (String, String),
}

/// Sort into canonical block order, returning the sorted word and a
/// replayable trace. Terminates: every step strictly increases the
/// potential sum_i (i+1) * position(w_i), which is bounded.
pub fn sort_filtration(
    word: &FiltrationWord,
) -> Result<(FiltrationWord, Vec<TraceStep>), SchemeError> {
    let ctx = word.ctx;
    let mut w = word.entries.clone();
    let mut trace = Vec::new();
    let cap = w.len() * w.len() * 8 + 16;
    let mut steps = 0;
    loop {
        let inv = (0..w.len().saturating_sub(1)).find(|&i| {
            ctx.canonical_position(w[i]) > ctx.canonical_position(w[i + 1])
        });
        let Some(i) = inv else { break };
        let (sub, quot) = (w[i], w[i + 1]);
        match move_rule(&ctx, sub, quot) {
            Move::Swap => {
                w.swap(i, i + 1);
                trace.push(TraceStep {
                    index: i,
                    kind: "swap",
                    before: (sub.token(ctx.nprimes), quot.token(ctx.nprimes)),
                    after: (quot.token(ctx.nprimes), sub.token(ctx.nprimes)),
                });
            }
            Move::ExceptionalSwap(ns, nq) => {
                w[i] = ns;
                w[i + 1] = nq;
                trace.push(TraceStep {
                    index: i,
                    kind: "exceptional",
                    before: (sub.token(ctx.nprimes), quot.token(ctx.nprimes)),
                    after: (ns.token(ctx.nprimes), nq.token(ctx.nprimes)),
                });
            }
            Move::Blocked => return Err(SchemeError::UnsortableContext),
        }
        steps += 1;
        assert!(steps <= cap, "sorting exceeded its termination bound");
    }
    Ok((FiltrationWord { entries: w, ctx }, trace))
}

/// Exponent bound evidence for a canonical block.
#[derive(Clone, Debug)]
pub enum BoundEvidence<'a> {
    /// The witness field equals the base field.
    D1,
    /// A finite tower report covering this block's divisor or its dual.
    Tower(&'a TowerReport),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentBound {
    /// Bounded independently of the level by point counts at a good odd
    /// prime; no numeric value is computed.
    WeilBounded,
    Divides(BigInt),
    Unbounded,
}

/// Exponent bound for the subquotient filtered by copies of `block`.
pub fn exponent_bounds(
    ctx: &RewriteContext,
    block: Constituent,
    evidence: &BoundEvidence,
) -> ExponentBound {
    if block.is_z2() || block.is_mu2(ctx.nprimes) {
        return ExponentBound::WeilBounded;
    }
    match evidence {
        BoundEvidence::D1 => ExponentBound::Divides(BigInt::from(2)),
        BoundEvidence::Tower(t) => match &t.status {
            TowerStatus::Finite { degree, .. } => {
                ExponentBound::Divides(BigInt::from(2) * degree)
            }
            _ => ExponentBound::Unbounded,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx1() -> RewriteContext {
        RewriteContext::new(1, CtxDichotomy::D1, true, true)
    }

    fn ctx2() -> RewriteContext {
        RewriteContext::new(2, CtxDichotomy::D2, true, true)
    }

    fn ctx3(qe1: bool, qe2: bool) -> RewriteContext {
        RewriteContext::new(3, CtxDichotomy::D2, qe1, qe2)
    }

    fn c(mask: u8) -> Constituent {
        Constituent { mask }
    }

    #[test]
    fn token_round_trips() {
        let ctx = ctx3(true, true);
        for mask in 0..8u8 {
            let k = c(mask);
            let tok = k.token(3);
            assert_eq!(Constituent::parse(&tok, 3).unwrap(), k);
        }
        let _ = ctx;
        assert!(Constituent::parse("p4", 3).is_err());
        assert!(Constituent::parse("q1", 3).is_err());
        // In a 2-prime context the full product is mu2.
        assert_eq!(Constituent::parse("p1p2", 2).unwrap(), Constituent::mu2(2));
    }

    #[test]
    fn ext_order_formula() {
        let ctx = ctx3(true, true);
        // s = 1 with M = K: the Ext group vanishes (order 1).
        assert_eq!(
            ext_order(&ctx, c(0b001), c(0b010), &BigInt::one()).unwrap(),
            BigInt::one()
        );
        // rho' = 1 (Z/2Z): order 2^{s-1}.
        assert_eq!(
            ext_order(&ctx, c(0b011), Constituent::Z2, &BigInt::one()).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            ext_order(&ctx, c(0b111), Constituent::Z2, &BigInt::one()).unwrap(),
            BigInt::from(4)
        );
        // Nonsplit exceptional case: order 2.
        assert_eq!(
            ext_order(&ctx, c(0b011), c(0b100), &BigInt::one()).unwrap(),
            BigInt::from(2)
        );
        // s = 0 is out of the formula's range.
        assert_eq!(
            ext_order(&ctx, c(0b001), c(0b011), &BigInt::one()),
            Err(SchemeError::EmptyS)
        );
    }

    #[test]
    fn ext_order_duality() {
        // Ext(G_rho, G_rho') and Ext(G_dual(rho'), G_dual(rho)) have the
        // same S and S', hence the same order for the same M-degree.
        let ctx = ctx3(true, true);
        let m = BigInt::from(4);
        for a in 0..8u8 {
            for b in 0..8u8 {
                let (ra, rb) = (c(a), c(b));
                let lhs = ext_order(&ctx, ra, rb, &m);
                let rhs = ext_order(&ctx, rb.dual(3), ra.dual(3), &m);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn move_rule_examples() {
        // mu2 as quotient moves left unconditionally.
        assert_eq!(move_rule(&ctx2(), c(0b01), Constituent::mu2(2)), Move::Swap);
        assert_eq!(move_rule(&ctx2(), Constituent::mu2(2), c(0b01)), Move::Swap);
        // Exceptional item: (sub p3, quot p1p2) -> (p2, p1p3).
        assert_eq!(
            move_rule(&ctx3(true, true), c(0b100), c(0b011)),
            Move::ExceptionalSwap(c(0b010), c(0b101))
        );
        // Exceptional item: (sub p2, quot p1p3) -> (p1, p2p3).
        assert_eq!(
            move_rule(&ctx3(true, true), c(0b010), c(0b101)),
            Move::ExceptionalSwap(c(0b001), c(0b110))
        );
        // A QE-gated move with its flag false is blocked.
        assert_eq!(move_rule(&ctx3(true, false), c(0b101), c(0b011)), Move::Blocked);
        assert_eq!(move_rule(&ctx3(true, false), c(0b011), c(0b101)), Move::Blocked);
    }

    #[test]
    fn one_prime_sorting() {
        let ctx = ctx1();
        let w = FiltrationWord::parse("Z2,mu2", ctx).unwrap();
        let (sorted, trace) = sort_filtration(&w).unwrap();
        assert_eq!(sorted.render(), "mu2,Z2");
        assert_eq!(trace.len(), 1);
        // Idempotence.
        let (again, trace2) = sort_filtration(&sorted).unwrap();
        assert_eq!(again, sorted);
        assert!(trace2.is_empty());
    }

    #[test]
    fn three_prime_exceptional_chain() {
        let ctx = ctx3(true, true);
        let w = FiltrationWord::parse("p3,p1p2", ctx).unwrap();
        let (sorted, trace) = sort_filtration(&w).unwrap();
        // (p3, p1p2) -> (p2, p1p3) -> (p1, p2p3), a fixed point.
        assert_eq!(sorted.render(), "p1,p2p3");
        assert_eq!(trace.len(), 2);
        assert!(trace.iter().all(|t| t.kind == "exceptional"));
        assert!(sorted.is_sorted());
        // Support multiset (primes counted with multiplicity) is preserved.
        let support = |w: &FiltrationWord| -> [usize; 3] {
            let mut s = [0; 3];
            for e in &w.entries {
                for i in 0..3 {
                    if e.mask & (1 << i) != 0 {
                        s[i] += 1;
                    }
                }
            }
            s
        };
        assert_eq!(support(&w), support(&sorted));
    }

    #[test]
    fn unsortable_without_qe() {
        let ctx = ctx3(false, true);
        let w = FiltrationWord::parse("p2,p1", ctx).unwrap();
        assert_eq!(sort_filtration(&w), Err(SchemeError::UnsortableContext));
    }

    #[test]
    fn two_prime_canonical_order() {
        let ctx = ctx2();
        let w = FiltrationWord::parse("Z2,p2,p1,mu2", ctx).unwrap();
        let (sorted, _) = sort_filtration(&w).unwrap();
        assert_eq!(sorted.render(), "mu2,p1,p2,Z2");
    }

    #[test]
    fn exponent_bound_descriptors() {
        let ctx = ctx3(true, true);
        assert_eq!(
            exponent_bounds(&ctx, Constituent::mu2(3), &BoundEvidence::D1),
            ExponentBound::WeilBounded
        );
        assert_eq!(
            exponent_bounds(&ctx, c(0b001), &BoundEvidence::D1),
            ExponentBound::Divides(BigInt::from(2))
        );
        let finite = TowerReport {
            rho: vec![true, false, false],
            status: TowerStatus::Finite { level: 2, degree: BigInt::from(4) },
            levels: vec![],
        };
        assert_eq!(
            exponent_bounds(&ctx, c(0b001), &BoundEvidence::Tower(&finite)),
            ExponentBound::Divides(BigInt::from(8))
        );
        let stuck = TowerReport {
            rho: vec![true, false, false],
            status: TowerStatus::Inconclusive { cap: 20 },
            levels: vec![],
        };
        assert_eq!(
            exponent_bounds(&ctx, c(0b001), &BoundEvidence::Tower(&stuck)),
            ExponentBound::Unbounded
        );
    }

    #[test]
    fn sorting_terminates_with_increasing_potential() {
        // Exhaustive over all 3-prime words of length <= 4; the measure
        // sum (i+1)*pos must strictly increase at every step.
        let ctx = ctx3(true, true);
        let all: Vec<Constituent> = (0..8u8).map(c).collect();
        let mut words: Vec<Vec<Constituent>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &words {
                for &k in &all {
                    let mut v = w.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            words.extend(next.clone());
            words = {
                let mut seen = std::collections::HashSet::new();
                words.retain(|w| seen.insert(w.clone()));
                words
            };
        }
        let potential = |w: &[Constituent]| -> usize {
            w.iter().enumerate().map(|(i, &k)| (i + 1) * ctx.canonical_position(k)).sum()
        };
        for entries in words {
            let w = FiltrationWord { entries, ctx };
            let (sorted, trace) = sort_filtration(&w).unwrap();
            assert!(sorted.is_sorted());
            // Replay the trace and check the potential increases.
            let mut cur = w.entries.clone();
            let mut pot = potential(&cur);
            for step in &trace {
                cur[step.index] = Constituent::parse(&step.after.0, 3).unwrap();
                cur[step.index + 1] = Constituent::parse(&step.after.1, 3).unwrap();
                let np = potential(&cur);
                assert!(np > pot, "potential must strictly increase");
                pot = np;
            }
            assert_eq!(cur, sorted.entries);
        }
    }
}
