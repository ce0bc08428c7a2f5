//! The interval (dual) Garside structure on [1, w]: left-weighted greedy
//! normal forms with Delta-powers pulled to the left, multiplication and
//! inversion, the Artin group word problem, and a desk-scale probe of the
//! center.
//!
//! Factors are held as twisted pairs tau^t(y) with y kept in the
//! fundamental axis window. Conjugation by w is a lattice automorphism, so
//! all greedy arithmetic (meets, slides, absorption) happens on the small
//! window representatives; the twists are integer bookkeeping.

use crate::coxeter::{Gen, GroupElement, GEN_NAMES};
use crate::error::{CoxError, Result};
use crate::lattice::{IntervalElement, NcLattice};
use std::fmt;

/// A word in the Artin generators and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArtinWord(pub Vec<(Gen, bool)>);

impl ArtinWord {
    /// Lowercase letters are generators, capitals their inverses.
    pub fn parse(s: &str) -> Result<ArtinWord> {
        let mut letters = vec![];
        for ch in s.chars() {
            let letter = match ch {
                'a' => (0, false),
                'b' => (1, false),
                'c' => (2, false),
                'A' => (0, true),
                'B' => (1, true),
                'C' => (2, true),
                _ => return Err(CoxError::BadLetter(ch)),
            };
            letters.push(letter);
        }
        Ok(ArtinWord(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ArtinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &(g, inv) in &self.0 {
            let ch = GEN_NAMES[g];
            if inv {
                write!(f, "{}", ch.to_ascii_uppercase())?;
            } else {
                write!(f, "{ch}")?;
            }
        }
        Ok(())
    }
}

/// A normal-form factor tau^twist(y), with y a window-centered member.
#[derive(Clone)]
pub struct TwistedFactor {
    pub twist: i64,
    pub y: IntervalElement,
}

impl TwistedFactor {
    pub fn rank(&self) -> u8 {
        self.y.rank
    }
}

/// Canonical left-weighted normal form Delta^p x_1 ... x_k with every
/// factor of rank 1 or 2 and meet(rc(x_i), x_{i+1}) = 1 for consecutive
/// factors. Factors are stored as twisted window representatives, which is
/// itself canonical: two Artin group elements are equal iff their
/// delta powers and twisted factor lists agree.
#[derive(Clone)]
pub struct GarsideNormalForm {
    pub delta_power: i64,
    pub factors: Vec<TwistedFactor>,
}

impl PartialEq for GarsideNormalForm {
    fn eq(&self, other: &Self) -> bool {
        self.delta_power == other.delta_power
            && self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(other.factors.iter())
                .all(|(a, b)| a.twist == b.twist && a.y.element == b.y.element)
    }
}
impl Eq for GarsideNormalForm {}

impl fmt::Debug for GarsideNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Delta^{} * {} factors (ranks {:?})",
            self.delta_power,
            self.factors.len(),
            self.factors.iter().map(|x| x.rank()).collect::<Vec<_>>()
        )
    }
}

impl GarsideNormalForm {
    pub fn identity() -> GarsideNormalForm {
        GarsideNormalForm {
            delta_power: 0,
            factors: vec![],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.delta_power == 0 && self.factors.is_empty()
    }

    pub fn total_factor_rank(&self) -> i64 {
        self.factors.iter().map(|x| x.rank() as i64).sum()
    }
}

/// Engine for Garside computations over a fixed lattice.
pub struct GarsideEngine {
    pub lat: NcLattice,
}

impl GarsideEngine {
    pub fn new(lat: NcLattice) -> GarsideEngine {
        GarsideEngine { lat }
    }

    fn ctx(&self) -> &crate::geometry::AxisContext {
        &self.lat.ctx
    }

    fn sys(&self) -> &crate::coxeter::CoxeterSystem {
        &self.lat.ctx.system
    }

    /// iota(s) for a standard generator.
    pub fn simple_member(&self, s: Gen) -> IntervalElement {
        self.lat
            .member(&self.sys().gens()[s].clone())
            .expect("standard generators divide the Coxeter element")
    }

    /// A member built from a product known to have additive rank (so its
    /// reflection length equals its moved rank).
    fn member_rank_additive(&self, g: GroupElement, expected_rank: u8) -> Result<IntervalElement> {
        if g.moved_rank() != expected_rank {
            return Err(CoxError::InvariantViolation(
                "rank additivity failed in normal form arithmetic".into(),
            ));
        }
        match expected_rank {
            0 => Ok(self.lat.identity_member()),
            3 => {
                if g == self.ctx().w {
                    Ok(self.lat.w_member())
                } else {
                    Err(CoxError::InvariantViolation(
                        "rank-three factor differs from the Garside element".into(),
                    ))
                }
            }
            _ => Ok(IntervalElement {
                rank: g.moved_rank(),
                geometry: self.sys().classify(&g)?,
                element: g,
                witness: None,
            }),
        }
    }

    /// tau(u) = w^-1 u w, the Delta-conjugation automorphism.
    pub fn tau(&self, u: &IntervalElement) -> Result<IntervalElement> {
        self.lat.tau(u)
    }

    /// Store tau^twist(y) re-centered into the fundamental window.
    fn centered(&self, twist: i64, y: IntervalElement) -> Result<TwistedFactor> {
        let j = self.lat.window_exponent_of(&y)?;
        if j == 0 {
            return Ok(TwistedFactor { twist, y });
        }
        let z = self.lat.conjugate_member(&y, j)?;
        Ok(TwistedFactor {
            twist: twist - j,
            y: z,
        })
    }

    /// The actual group element of a factor.
    pub fn factor_element(&self, f: &TwistedFactor) -> GroupElement {
        self.ctx().phi_pow(&f.y.element, f.twist)
    }

    /// Materialized members of the factors (mostly for display; the twisted
    /// representation is canonical on its own).
    pub fn factor_members(&self, nf: &GarsideNormalForm) -> Result<Vec<IntervalElement>> {
        nf.factors
            .iter()
            .map(|f| {
                let g = self.factor_element(f);
                self.member_rank_additive(g, f.rank())
            })
            .collect()
    }

    /// Normalize a Delta-power and a list of twisted factors into the
    /// canonical left-weighted form: identities are dropped, full factors
    /// are absorbed into the Delta power (commuted to the left through tau),
    /// and adjacent factors (x, y) with m = meet(rc(x), y) != 1 slide to
    /// (x m, m^-1 y). A worklist tracks positions whose pair can change.
    pub fn normalize_twisted(
        &self,
        delta_power: i64,
        factors: Vec<TwistedFactor>,
    ) -> Result<GarsideNormalForm> {
        let mut p = delta_power;
        let sys = self.sys();
        let mut f: Vec<TwistedFactor> = vec![];
        for x in factors.into_iter() {
            match x.rank() {
                0 => {}
                3 => {
                    p += 1;
                    for y in f.iter_mut() {
                        y.twist += 1;
                    }
                }
                _ => f.push(self.centered(x.twist, x.y)?),
            }
        }
        let mut dirty: std::collections::VecDeque<usize> = (0..f.len()).collect();
        let mut guard = 0u32;
        while let Some(i) = dirty.pop_front() {
            guard += 1;
            if guard > 1_000_000 {
                return Err(CoxError::InvariantViolation(
                    "greedy normalization did not terminate".into(),
                ));
            }
            if i + 1 >= f.len() {
                continue;
            }
            // local coordinates of slot i: the pair is (y1, tau^d(y2))
            let d = f[i + 1].twist - f[i].twist;
            let y2s = self.lat.conjugate_member(&f[i + 1].y, d)?;
            let rc = self.lat.right_complement_unchecked(&f[i].y)?;
            let m = self.lat.meet(&rc, &y2s)?;
            if m.rank == 0 {
                continue;
            }
            let xm = sys.mul(&f[i].y.element, &m.element);
            let my = sys.mul(&sys.inverse(&m.element), &y2s.element);
            let tail_rank = f[i + 1].rank() - m.rank;
            let base_twist = f[i].twist;
            let new_rank = f[i].rank() + m.rank;
            if new_rank == 3 {
                // x m = w is tau-invariant: absorb and twist the prefix
                if xm != self.ctx().w {
                    return Err(CoxError::InvariantViolation(
                        "rank-three factor differs from the Garside element".into(),
                    ));
                }
                p += 1;
                for y in f.iter_mut().take(i) {
                    y.twist += 1;
                }
                let tail = self.member_rank_additive(my, tail_rank)?;
                f.remove(i);
                if tail.rank == 0 {
                    f.remove(i);
                } else {
                    f[i] = self.centered(base_twist, tail)?;
                }
                dirty.clear();
                for k in 0..f.len() {
                    dirty.push_back(k);
                }
                continue;
            }
            let head = self.member_rank_additive(xm, new_rank)?;
            f[i] = self.centered(base_twist, head)?;
            let tail = self.member_rank_additive(my, tail_rank)?;
            if tail.rank == 0 {
                f.remove(i + 1);
            } else {
                f[i + 1] = self.centered(base_twist, tail)?;
            }
            if i > 0 {
                dirty.push_back(i - 1);
            }
            dirty.push_back(i);
            if i + 1 < f.len() {
                dirty.push_back(i + 1);
            }
        }
        Ok(GarsideNormalForm {
            delta_power: p,
            factors: f,
        })
    }

    /// Normalize plain members (twist zero).
    pub fn normalize(
        &self,
        delta_power: i64,
        factors: Vec<IntervalElement>,
    ) -> Result<GarsideNormalForm> {
        self.normalize_twisted(
            delta_power,
            factors
                .into_iter()
                .map(|y| TwistedFactor { twist: 0, y })
                .collect(),
        )
    }

    /// Lift an Artin word to its normal form: positive letters map to their
    /// interval copies, inverse letters to Delta^-1 iota(left complement);
    /// each Delta^-1 commutes to the front, twisting what was accumulated.
    pub fn from_artin_word(&self, word: &ArtinWord) -> Result<GarsideNormalForm> {
        let total_inversions = word.0.iter().filter(|&&(_, inv)| inv).count() as i64;
        let mut seen = 0i64;
        let mut factors: Vec<TwistedFactor> = vec![];
        let sys = self.sys();
        for &(g, inv) in &word.0 {
            let base = if !inv {
                self.simple_member(g)
            } else {
                seen += 1;
                let ws = sys.mul(&self.ctx().w, &sys.gens()[g]);
                self.member_rank_additive(ws, 2)?
            };
            // deltas still to the right of this factor twist it by tau^-d
            let d = total_inversions - seen;
            factors.push(TwistedFactor { twist: -d, y: base });
        }
        self.normalize_twisted(-total_inversions, factors)
    }

    /// Product of two normal forms.
    pub fn multiply(
        &self,
        a: &GarsideNormalForm,
        b: &GarsideNormalForm,
    ) -> Result<GarsideNormalForm> {
        let mut factors: Vec<TwistedFactor> = a
            .factors
            .iter()
            .map(|f| TwistedFactor {
                twist: f.twist + b.delta_power,
                y: f.y.clone(),
            })
            .collect();
        factors.extend(b.factors.iter().cloned());
        self.normalize_twisted(a.delta_power + b.delta_power, factors)
    }

    /// Inverse of a normal form.
    pub fn invert(&self, a: &GarsideNormalForm) -> Result<GarsideNormalForm> {
        // (Delta^p x_1 ... x_k)^-1 = x_k^-1 ... x_1^-1 Delta^-p with
        // iota(x)^-1 = Delta^-1 iota(w x^-1)
        let mut acc = GarsideNormalForm::identity();
        for x in a.factors.iter().rev() {
            let left_local = self.lat.left_complement_unchecked(&x.y)?;
            let piece = GarsideNormalForm {
                delta_power: -1,
                factors: if left_local.rank == 0 {
                    vec![]
                } else {
                    vec![TwistedFactor {
                        twist: x.twist,
                        y: left_local,
                    }]
                },
            };
            acc = self.multiply(&acc, &piece)?;
        }
        let delta_shift = GarsideNormalForm {
            delta_power: -a.delta_power,
            factors: vec![],
        };
        self.multiply(&acc, &delta_shift)
    }

    /// Image of a normal form in the Coxeter group, computed as a sandwich
    /// of w-powers and window representatives.
    pub fn coxeter_projection(&self, nf: &GarsideNormalForm) -> GroupElement {
        let sys = self.sys();
        // w^p * prod tau^{t_i}(y_i)
        //   = w^{p - t_1} y_1 w^{t_1 - t_2} y_2 ... y_k w^{t_k}
        let mut m = match nf.factors.first() {
            None => return self.ctx().w_pow(nf.delta_power),
            Some(f) => self.ctx().w_pow(nf.delta_power - f.twist),
        };
        for (i, f) in nf.factors.iter().enumerate() {
            m = sys.mul(&m, &f.y.element);
            let next_twist = nf
                .factors
                .get(i + 1)
                .map(|g| g.twist)
                .unwrap_or(0);
            m = sys.mul(&m, &self.ctx().w_pow(f.twist - next_twist));
        }
        m
    }

    /// The Artin group word problem: equality of normal forms.
    pub fn word_problem(&self, w1: &ArtinWord, w2: &ArtinWord) -> Result<bool> {
        Ok(self.from_artin_word(w1)? == self.from_artin_word(w2)?)
    }

    /// Check that no power w^n (1 <= n <= n_max) commutes with u; returns
    /// the offending exponent if one does (which would contradict the
    /// triviality of the center).
    pub fn center_probe(&self, u: &IntervalElement, n_max: u32) -> Result<Option<u32>> {
        if u.rank == 0 || u.rank == 3 {
            return Err(CoxError::InvariantViolation(
                "center probe requires a proper interval element".into(),
            ));
        }
        let sys = self.sys();
        for n in 1..=n_max {
            let wn = self.ctx().w_pow(n as i64);
            let conj = sys.mul(&sys.mul(&wn, &u.element), &self.ctx().w_pow(-(n as i64)));
            if conj == u.element {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Left-weightedness of every adjacent factor pair.
    pub fn is_left_weighted(&self, nf: &GarsideNormalForm) -> Result<bool> {
        for pair in nf.factors.windows(2) {
            let d = pair[1].twist - pair[0].twist;
            let y2s = self.lat.conjugate_member(&pair[1].y, d)?;
            let rc = self.lat.right_complement_unchecked(&pair[0].y)?;
            let m = self.lat.meet(&rc, &y2s)?;
            if m.rank != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InstanceConfig;
    use crate::coxeter::CoxeterSystem;
    use crate::geometry::AxisContext;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn engine(m_ab: u32, m_bc: u32, m_ac: u32) -> GarsideEngine {
        let cfg = InstanceConfig::from_triple((m_ab, m_bc, m_ac));
        let ctx = AxisContext::new(CoxeterSystem::new(cfg).unwrap()).unwrap();
        GarsideEngine::new(NcLattice::new(ctx))
    }

    fn nf(e: &GarsideEngine, s: &str) -> GarsideNormalForm {
        e.from_artin_word(&ArtinWord::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn from_word_examples() {
        let e = engine(3, 3, 4);
        let one = nf(&e, "a");
        assert_eq!(one.delta_power, 0);
        assert_eq!(one.factors.len(), 1);
        let members = e.factor_members(&one).unwrap();
        assert_eq!(members[0].element, e.sys().gens()[0]);

        assert!(nf(&e, "aA").is_identity());
        assert!(nf(&e, "Aa").is_identity());

        // braid relator for m(a,b) = 3
        assert!(nf(&e, "abaBAB").is_identity());
        // and m(a,c) = 4
        assert!(nf(&e, "acacCACA").is_identity());
    }

    #[test]
    fn delta_absorption() {
        let e = engine(3, 3, 4);
        // a * bc = w absorbs into the Delta power
        let abc = nf(&e, "abc");
        assert_eq!(abc.delta_power, 1);
        assert!(abc.factors.is_empty());
    }

    #[test]
    fn left_weighted_pair_example() {
        let e = engine(3, 3, 4);
        // rc(a) = bc and meet(bc, a) = 1, so [a, a] is already left-weighted
        let aa = nf(&e, "aa");
        assert_eq!(aa.delta_power, 0);
        assert_eq!(aa.factors.len(), 2);
        assert!(e.is_left_weighted(&aa).unwrap());
    }

    #[test]
    fn tau_laws() {
        let e = engine(3, 3, 4);
        let w = e.lat.w_member();
        assert_eq!(e.tau(&w).unwrap().element, w.element);
        for word in ["a", "b", "c", "ab", "bc"] {
            let u = e
                .lat
                .member(
                    &e.sys()
                        .word_to_element(&crate::coxeter::Word::parse(word).unwrap()),
                )
                .unwrap();
            let tu = e.tau(&u).unwrap();
            assert_eq!(tu.rank, u.rank);
            // iota(u) Delta = Delta iota(tau(u)) as normal forms
            let lhs = e.normalize(0, vec![u.clone(), e.lat.w_member()]).unwrap();
            let rhs = e.normalize(1, vec![tu]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    fn random_word(rng: &mut StdRng, len: usize) -> ArtinWord {
        ArtinWord(
            (0..len)
                .map(|_| (rng.gen_range(0..3usize), rng.gen_bool(0.5)))
                .collect(),
        )
    }

    #[test]
    fn inverse_cancels() {
        let e = engine(3, 3, 4);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..25 {
            let word = random_word(&mut rng, 10);
            let x = e.from_artin_word(&word).unwrap();
            let xinv = e.invert(&x).unwrap();
            let prod = e.multiply(&x, &xinv).unwrap();
            assert!(prod.is_identity(), "word {word}");
        }
    }

    #[test]
    fn normalize_is_idempotent_and_left_weighted() {
        let e = engine(3, 3, 4);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let word = random_word(&mut rng, 12);
            let x = e.from_artin_word(&word).unwrap();
            assert!(e.is_left_weighted(&x).unwrap());
            let renorm = e
                .normalize_twisted(x.delta_power, x.factors.clone())
                .unwrap();
            assert_eq!(renorm, x);
        }
    }

    #[test]
    fn multiplication_respects_coxeter_projection() {
        let e = engine(3, 3, 4);
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let wa = random_word(&mut rng, 8);
            let wb = random_word(&mut rng, 8);
            let a = e.from_artin_word(&wa).unwrap();
            let b = e.from_artin_word(&wb).unwrap();
            let ab = e.multiply(&a, &b).unwrap();
            let lhs = e.coxeter_projection(&ab);
            let rhs = e
                .sys()
                .mul(&e.coxeter_projection(&a), &e.coxeter_projection(&b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn word_problem_examples() {
        let e = engine(3, 3, 4);
        let wp = |x: &str, y: &str| {
            e.word_problem(&ArtinWord::parse(x).unwrap(), &ArtinWord::parse(y).unwrap())
                .unwrap()
        };
        assert!(wp("abA", "abA"));
        assert!(wp("aba", "bab")); // m(a,b) = 3
        assert!(!wp("ab", "ba"));
        // free insertions keep the element
        assert!(wp("abc", "aBbbCcc"));
        assert!(wp("acac", "acaAac"));
    }

    #[test]
    fn garside_exponent_sanity() {
        let e = engine(3, 3, 4);
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let len = rng.gen_range(1..=12);
            let word = ArtinWord(
                (0..len)
                    .map(|_| (rng.gen_range(0..3usize), false))
                    .collect(),
            );
            let x = e.from_artin_word(&word).unwrap();
            assert!(x.delta_power >= 0);
            assert_eq!(
                x.total_factor_rank() + 3 * x.delta_power,
                len as i64,
                "word {word}"
            );
            // projection soundness: the normal form projects onto the image
            // of the word in W
            let mut m = e.sys().identity();
            for &(g, _) in &word.0 {
                m = e.sys().mul(&m, &e.sys().gens()[g]);
            }
            assert_eq!(e.coxeter_projection(&x), m);
        }
    }

    #[test]
    fn center_probe_examples() {
        let e = engine(3, 3, 4);
        let a = e.lat.member(&e.sys().gens()[0].clone()).unwrap();
        assert_eq!(e.center_probe(&a, 5).unwrap(), None);
        let ab = e
            .lat
            .member(
                &e.sys()
                    .word_to_element(&crate::coxeter::Word::parse("ab").unwrap()),
            )
            .unwrap();
        assert_eq!(e.center_probe(&ab, 5).unwrap(), None);
    }

    #[test]
    fn related_words_share_normal_forms() {
        let e = engine(2, 3, 7);
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let base = random_word(&mut rng, 8);
            let mutated = insert_relators(&e, &mut rng, &base, 3);
            assert!(e.word_problem(&base, &mutated).unwrap());
        }
    }

    /// Insert identities (free cancellations and braid relators) at random
    /// positions; the resulting word represents the same group element.
    pub(crate) fn insert_relators(
        e: &GarsideEngine,
        rng: &mut StdRng,
        word: &ArtinWord,
        count: usize,
    ) -> ArtinWord {
        let mut letters = word.0.clone();
        for _ in 0..count {
            let pos = rng.gen_range(0..=letters.len());
            let kind = rng.gen_range(0..2);
            let insert: Vec<(Gen, bool)> = if kind == 0 {
                let g = rng.gen_range(0..3usize);
                let inv = rng.gen_bool(0.5);
                vec![(g, inv), (g, !inv)]
            } else {
                // braid relator prod(s,t;m) prod(t,s;m)^-1 for finite m
                let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
                let labels = &e.sys().config.labels;
                let finite: Vec<(usize, usize, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &(s, t))| match labels[i] {
                        crate::coxeter::Label::Finite(m) => Some((s, t, m)),
                        crate::coxeter::Label::Infinity => None,
                    })
                    .collect();
                let (s, t, m) = finite[rng.gen_range(0..finite.len())];
                let mut v = vec![];
                for i in 0..m {
                    v.push((if i % 2 == 0 { s } else { t }, false));
                }
                for i in (0..m).rev() {
                    v.push((if i % 2 == 0 { s } else { t }, true));
                }
                v
            };
            letters.splice(pos..pos, insert);
        }
        ArtinWord(letters)
    }
}
