//! The noncrossing partition interval [1, w]: membership certificates,
//! the lattice order via moved-space containment, complements, reflections
//! below a rank-two member, meets, joins, and increasing factorizations
//! with respect to the axial ordering.

use crate::coxeter::{GroupElement, IsometryClass};
use crate::error::{CoxError, Result};
use crate::field::{FieldElement, Sign};
use crate::geometry::AxisContext;
use crate::linalg::{self, Vec3};
use std::sync::Arc;

/// A certified member of [1, w], with its reflection length (the rank of
/// its moved space) and cached geometric classification. For translation
/// members a witness reflection below the translation is kept: it certifies
/// that the translation really is a product of two reflections of W.
#[derive(Clone)]
pub struct IntervalElement {
    pub element: GroupElement,
    pub rank: u8,
    pub geometry: IsometryClass,
    pub witness: Option<GroupElement>,
}

impl PartialEq for IntervalElement {
    fn eq(&self, other: &Self) -> bool {
        self.element == other.element
    }
}
impl Eq for IntervalElement {}

impl std::hash::Hash for IntervalElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.element.hash(state);
    }
}

impl std::fmt::Debug for IntervalElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Member(rank {}, {})", self.rank, self.geometry.name())
    }
}

/// Handle for interval computations over a fixed axis context.
pub struct NcLattice {
    pub ctx: Arc<AxisContext>,
}

impl NcLattice {
    pub fn new(ctx: Arc<AxisContext>) -> NcLattice {
        NcLattice { ctx }
    }

    pub fn sys(&self) -> &Arc<crate::coxeter::CoxeterSystem> {
        &self.ctx.system
    }

    pub fn identity_member(&self) -> IntervalElement {
        IntervalElement {
            element: self.sys().identity(),
            rank: 0,
            geometry: IsometryClass::Identity,
            witness: None,
        }
    }

    pub fn w_member(&self) -> IntervalElement {
        let w = self.ctx.w.clone();
        IntervalElement {
            rank: 3,
            geometry: self.sys().classify(&w).expect("w classifies as a glide"),
            element: w,
            witness: None,
        }
    }

    /// Membership test. The reflection length of a member equals the rank
    /// of its moved space, which forces:
    /// rank 0 -> identity; rank 3 -> the element is w itself.
    /// For rank 2 the left complement must be a reflection of W, and the
    /// element itself must be a product of two reflections of W. Rotations
    /// and parabolics always are (their point stabilizer is a dihedral
    /// reflection subgroup); a translation is exactly when some mirror of W
    /// crosses its axis perpendicularly, which is decided by walking one
    /// translation length of the axis. A rank-1 element (a reflection of W)
    /// is a member exactly when its complement passes the rank-2 test:
    /// vertical reflections always do, horizontal ones only sometimes.
    /// The caller either guarantees g is in W or requests a check.
    pub fn in_interval(
        &self,
        g: &GroupElement,
        check_group_membership: bool,
    ) -> Result<Option<IntervalElement>> {
        let sys = self.sys();
        if !sys.is_isometry(g) {
            return Err(CoxError::NotAnIsometry);
        }
        if check_group_membership && !sys.contains(g)? {
            return Ok(None);
        }
        let member = match g.moved_rank() {
            0 => Some(self.identity_member()),
            1 => {
                let geometry = sys.classify(g)?;
                if self.ctx.is_vertical(g)? {
                    // complement is a rotation around an axial vertex
                    Some(IntervalElement {
                        element: g.clone(),
                        rank: 1,
                        geometry,
                        witness: None,
                    })
                } else {
                    // complement is a translation; require it to be a
                    // product of two reflections of W
                    let t = sys.mul(g, &self.ctx.w);
                    match sys.classify(&t)? {
                        IsometryClass::Translation { pole } => self
                            .translation_witness(&t, &pole)?
                            .map(|_| IntervalElement {
                                element: g.clone(),
                                rank: 1,
                                geometry,
                                witness: None,
                            }),
                        other => {
                            return Err(CoxError::InvariantViolation(format!(
                                "complement of a horizontal reflection is a {}",
                                other.name()
                            )))
                        }
                    }
                }
            }
            2 => {
                let left = sys.mul(&self.ctx.w, &sys.inverse(g));
                if left.moved_rank() != 1 {
                    None
                } else {
                    let geometry = sys.classify(g)?;
                    match &geometry {
                        IsometryClass::Rotation { .. } | IsometryClass::Parabolic { .. } => {
                            Some(IntervalElement {
                                element: g.clone(),
                                rank: 2,
                                geometry,
                                witness: None,
                            })
                        }
                        IsometryClass::Translation { pole } => {
                            let witness = self.translation_witness(g, pole)?;
                            witness.map(|wit| IntervalElement {
                                element: g.clone(),
                                rank: 2,
                                geometry: geometry.clone(),
                                witness: Some(wit),
                            })
                        }
                        _ => unreachable!("rank two"),
                    }
                }
            }
            3 => {
                if g == &self.ctx.w {
                    Some(self.w_member())
                } else {
                    None
                }
            }
            _ => unreachable!(),
        };
        Ok(member)
    }

    /// A reflection of W below a translation, if one exists: the mirrors
    /// below t are perpendicular to its axis with feet spaced at half the
    /// translation length, so one translation length of the axis decides.
    /// The search first conjugates the translation into the fundamental
    /// window to keep the gallery walk short.
    fn translation_witness(
        &self,
        t: &GroupElement,
        pole: &Vec3,
    ) -> Result<Option<GroupElement>> {
        let sys = self.sys();
        let z = sys.cross(pole, &self.ctx.axis.pole);
        let j = if sys.norm_sign(&z) == Sign::Negative {
            self.ctx.window_exponent(&sys.sheet_normalize(&z))?
        } else {
            0
        };
        if j != 0 {
            let t2 = self.ctx.phi_pow(t, j);
            let pole2 = linalg::mat_vec(&self.ctx.w_pow(-j).matrix, pole);
            return Ok(self
                .translation_witness_local(&t2, &pole2)?
                .map(|wit| self.ctx.phi_pow(&wit, -j)));
        }
        self.translation_witness_local(t, pole)
    }

    fn translation_witness_local(
        &self,
        t: &GroupElement,
        pole: &Vec3,
    ) -> Result<Option<GroupElement>> {
        let sys = self.sys();
        let axis = sys.translation_axis(t, pole)?;
        let moved = linalg::mat_vec(&t.matrix, &axis.base);
        let crossed = self.ctx.walls_crossed(&axis.base, &moved)?;
        Ok(crossed.into_iter().find(|r| sys.mul(r, t).moved_rank() == 1))
    }

    /// Membership for an element known to be a product of two reflections
    /// of W (so its reflection length is exactly its moved rank): only the
    /// complement certificate is needed.
    pub fn member_of_known_length_two(
        &self,
        g: &GroupElement,
        factor: &GroupElement,
    ) -> Result<Option<IntervalElement>> {
        let sys = self.sys();
        if g.moved_rank() != 2 {
            return Ok(None);
        }
        let left = sys.mul(&self.ctx.w, &sys.inverse(g));
        if left.moved_rank() != 1 {
            return Ok(None);
        }
        debug_assert_eq!(sys.mul(factor, g).moved_rank(), 1);
        Ok(Some(IntervalElement {
            element: g.clone(),
            rank: 2,
            geometry: sys.classify(g)?,
            witness: Some(factor.clone()),
        }))
    }

    /// Certified membership or error.
    pub fn member(&self, g: &GroupElement) -> Result<IntervalElement> {
        self.in_interval(g, false)?.ok_or(CoxError::NotAMember)
    }

    /// The interval order: moved-space containment.
    pub fn leq(&self, u: &IntervalElement, v: &IntervalElement) -> bool {
        if u.rank > v.rank {
            return false;
        }
        if u.rank == v.rank {
            return u.element == v.element;
        }
        if u.rank == 0 || v.rank == 3 {
            return true;
        }
        let mut rows: Vec<Vec3> = v
            .element
            .moved_columns()
            .into_iter()
            .filter(|c| !linalg::vec_is_zero(c))
            .collect();
        let base_rank = linalg::rank(&rows);
        debug_assert_eq!(base_rank, v.rank as usize);
        for c in u.element.moved_columns() {
            rows.push(c);
        }
        linalg::rank(&rows) == base_rank
    }

    /// Left complement w u^-1 and right complement u^-1 w (both members).
    pub fn complements(&self, u: &IntervalElement) -> Result<(IntervalElement, IntervalElement)> {
        let sys = self.sys();
        let left = sys.mul(&self.ctx.w, &sys.inverse(&u.element));
        let right = sys.mul(&sys.inverse(&u.element), &self.ctx.w);
        let lm = self.in_interval(&left, false)?.ok_or_else(|| {
            CoxError::InvariantViolation("left complement fails the certificate".into())
        })?;
        let rm = self.in_interval(&right, false)?.ok_or_else(|| {
            CoxError::InvariantViolation("right complement fails the certificate".into())
        })?;
        if lm.rank != 3 - u.rank || rm.rank != 3 - u.rank {
            return Err(CoxError::InvariantViolation(
                "complement rank is not complementary".into(),
            ));
        }
        Ok((lm, rm))
    }

    pub fn left_complement(&self, u: &IntervalElement) -> Result<IntervalElement> {
        Ok(self.complements(u)?.0)
    }

    pub fn right_complement(&self, u: &IntervalElement) -> Result<IntervalElement> {
        Ok(self.complements(u)?.1)
    }

    /// Complements of a certified member are members; this constructor
    /// skips the certificate re-run (used in normal-form arithmetic where
    /// complements are taken in tight loops).
    pub fn right_complement_unchecked(&self, u: &IntervalElement) -> Result<IntervalElement> {
        let sys = self.sys();
        let right = sys.mul(&sys.inverse(&u.element), &self.ctx.w);
        let rank = 3 - u.rank;
        debug_assert_eq!(right.moved_rank(), rank);
        match rank {
            0 => Ok(self.identity_member()),
            3 => Ok(self.w_member()),
            _ => Ok(IntervalElement {
                rank,
                geometry: sys.classify(&right)?,
                element: right,
                witness: None,
            }),
        }
    }

    pub fn left_complement_unchecked(&self, u: &IntervalElement) -> Result<IntervalElement> {
        let sys = self.sys();
        let left = sys.mul(&self.ctx.w, &sys.inverse(&u.element));
        let rank = 3 - u.rank;
        debug_assert_eq!(left.moved_rank(), rank);
        match rank {
            0 => Ok(self.identity_member()),
            3 => Ok(self.w_member()),
            _ => Ok(IntervalElement {
                rank,
                geometry: sys.classify(&left)?,
                element: left,
                witness: None,
            }),
        }
    }

    /// tau = conjugation by w, restricted to the interval.
    pub fn tau(&self, u: &IntervalElement) -> Result<IntervalElement> {
        self.member(&self.ctx.phi(&u.element))
    }

    /// phi^j(u) as a member; conjugation preserves membership and rank, and
    /// the geometric payload transports covariantly (no re-classification).
    pub fn conjugate_member(&self, u: &IntervalElement, j: i64) -> Result<IntervalElement> {
        if j == 0 {
            return Ok(u.clone());
        }
        match u.rank {
            0 => Ok(self.identity_member()),
            3 => Ok(self.w_member()),
            _ => {
                let wk = self.ctx.w_pow(j);
                let wk_inv = self.ctx.w_pow(-j);
                let sys = self.sys();
                let g = sys.mul(&sys.mul(&wk_inv, &u.element), &wk);
                let transport = |v: &Vec3| linalg::mat_vec(&wk_inv.matrix, v);
                let geometry = match &u.geometry {
                    IsometryClass::Rotation { center } => IsometryClass::Rotation {
                        center: transport(center),
                    },
                    IsometryClass::Parabolic { center } => IsometryClass::Parabolic {
                        center: transport(center),
                    },
                    IsometryClass::Translation { pole } => IsometryClass::Translation {
                        pole: transport(pole),
                    },
                    IsometryClass::Reflection { pole } => IsometryClass::Reflection {
                        pole: transport(pole),
                    },
                    other => other.clone(),
                };
                Ok(IntervalElement {
                    rank: u.rank,
                    geometry,
                    element: g,
                    witness: u
                        .witness
                        .as_ref()
                        .map(|wv| self.ctx.phi_pow(wv, j)),
                })
            }
        }
    }

    /// A timelike point tracking a member's position along the axis: the
    /// fixed point of an elliptic or parabolic member, the crossing of a
    /// translation's axis with the Coxeter axis, the mirror crossing or
    /// perpendicular foot of a reflection.
    fn position_point(&self, u: &IntervalElement) -> Result<Option<Vec3>> {
        let sys = self.sys();
        let point = match &u.geometry {
            IsometryClass::Rotation { center } | IsometryClass::Parabolic { center } => {
                Some(center.clone())
            }
            IsometryClass::Translation { pole } => {
                let z = sys.cross(pole, &self.ctx.axis.pole);
                if sys.norm_sign(&z) == Sign::Negative {
                    Some(sys.sheet_normalize(&z))
                } else {
                    None
                }
            }
            IsometryClass::Reflection { .. } => {
                if self.ctx.is_vertical(&u.element)? {
                    let q = sys.cross(&self.ctx.axis.pole, &u.element.reflection_pole()?);
                    Some(sys.sheet_normalize(&q))
                } else {
                    Some(self.ctx.xi_point(&u.element)?)
                }
            }
            _ => None,
        };
        Ok(point)
    }

    /// The w-power exponent that brings a member's position into the
    /// fundamental axis window. Conjugating by it keeps coordinates small,
    /// which matters inside normal-form arithmetic where factors can sit
    /// far down the axis.
    pub fn window_exponent_of(&self, u: &IntervalElement) -> Result<i64> {
        match self.position_point(u)? {
            None => Ok(0),
            Some(p) => self.ctx.window_exponent(&p),
        }
    }

    /// The reflections below a rank-two member. For rotations around a
    /// finite-order point the full (finite) dihedral fan is returned in fan
    /// order; for parabolics and translations a window of the infinite fan
    /// is returned, translations ordered along the translation axis.
    pub fn reflections_below(&self, u: &IntervalElement, window: u32) -> Result<Vec<GroupElement>> {
        if u.rank != 2 {
            return Err(CoxError::RankMismatch(u.rank));
        }
        match &u.geometry {
            IsometryClass::Rotation { .. } | IsometryClass::Parabolic { .. } => {
                let (seed1, seed2) = self.rotation_seed_factorization(u)?;
                // adjacent mirror steps: next(r) = r u, prev(r) = u r
                let mut fan = vec![seed1.clone(), seed2.clone()];
                let mut cur = seed2;
                let closed = loop {
                    let next = self.sys().mul(&cur, &u.element);
                    debug_assert_eq!(next.moved_rank(), 1);
                    if next == fan[0] {
                        break true;
                    }
                    if fan.len() > 2 * (window as usize) + 2 {
                        break false;
                    }
                    fan.push(next.clone());
                    cur = next;
                };
                if !closed {
                    // parabolic: extend backwards as well
                    let mut prev = fan[0].clone();
                    let mut back = vec![];
                    for _ in 0..window {
                        prev = self.sys().mul(&u.element, &prev);
                        debug_assert_eq!(prev.moved_rank(), 1);
                        back.push(prev.clone());
                    }
                    back.reverse();
                    back.extend(fan);
                    fan = back;
                }
                Ok(fan)
            }
            IsometryClass::Translation { pole } => {
                let t = &u.element;
                let seed = match &u.witness {
                    Some(wit) => wit.clone(),
                    None => self.translation_witness(t, pole)?.ok_or_else(|| {
                        CoxError::InvariantViolation(
                            "translation member without a mirror below it".into(),
                        )
                    })?,
                };
                // next(r) = t r (one mirror forward), prev(r) = r t
                let mut fwd = vec![seed.clone()];
                let mut cur = seed.clone();
                for _ in 0..window {
                    cur = self.sys().mul(t, &cur);
                    debug_assert_eq!(cur.moved_rank(), 1);
                    fwd.push(cur.clone());
                }
                let mut back = vec![];
                let mut cur = seed;
                for _ in 0..window {
                    cur = self.sys().mul(&cur, t);
                    debug_assert_eq!(cur.moved_rank(), 1);
                    back.push(cur.clone());
                }
                back.reverse();
                back.extend(fwd);
                Ok(back)
            }
            _ => Err(CoxError::RankMismatch(u.rank)),
        }
    }

    /// Parameter of the point where a mirror crosses an oriented line.
    pub fn foot_param_on_axis(
        &self,
        axis: &crate::coxeter::OrientedLine,
        r: &GroupElement,
    ) -> Result<FieldElement> {
        let sys = self.sys();
        let n = r.reflection_pole()?;
        let alpha = sys.bilinear(&axis.dir, &n);
        let beta = -&sys.bilinear(&axis.base, &n);
        if alpha.is_zero() {
            return Err(CoxError::InvariantViolation(
                "mirror does not cross the axis transversally".into(),
            ));
        }
        beta.div(&alpha)
    }

    /// The factorization u = r1 r2 from the axial chamber immediately below
    /// the crossing of the left complement (for rotations and parabolics).
    fn rotation_seed_factorization(
        &self,
        u: &IntervalElement,
    ) -> Result<(GroupElement, GroupElement)> {
        let sys = self.sys();
        let left = self.left_complement(u)?;
        let r = left.element;
        if !self.ctx.is_vertical(&r)? {
            return Err(CoxError::InvariantViolation(
                "left complement of an elliptic member is not vertical".into(),
            ));
        }
        let s = self.ctx.crossing_param(&r)?;
        let ch = self.ctx.chamber_at_nudged(&s, false)?;
        let mut walls = ch.walls.clone();
        if walls[0] != r {
            // a perpendicular pair can cross the axis at the same point;
            // commute it to the front
            if walls[1] == r && sys.mul(&walls[0], &walls[1]) == sys.mul(&walls[1], &walls[0]) {
                walls.swap(0, 1);
            } else {
                return Err(CoxError::InvariantViolation(
                    "complement's wall is not first in the pedal order".into(),
                ));
            }
        }
        let prod = sys.mul(&walls[1], &walls[2]);
        if prod != u.element {
            return Err(CoxError::InvariantViolation(
                "chamber walls do not factor the rotation".into(),
            ));
        }
        Ok((walls[1].clone(), walls[2].clone()))
    }

    /// Lattice join.
    pub fn join(&self, u: &IntervalElement, v: &IntervalElement) -> Result<IntervalElement> {
        if self.leq(u, v) {
            return Ok(v.clone());
        }
        if self.leq(v, u) {
            return Ok(u.clone());
        }
        // incomparable from here on
        if u.rank >= 2 || v.rank >= 2 {
            return Ok(self.w_member());
        }
        self.join_reflections(u, v)
    }

    fn join_reflections(
        &self,
        u: &IntervalElement,
        v: &IntervalElement,
    ) -> Result<IntervalElement> {
        // conjugation by w is a lattice automorphism: translate the pair
        // into the fundamental window, join there, translate back
        let j = self.window_exponent_of(u)?;
        if j != 0 {
            let u2 = self.conjugate_member(u, j)?;
            let v2 = self.conjugate_member(v, j)?;
            let m = self.join_reflections_core(&u2, &v2)?;
            return self.conjugate_member(&m, -j);
        }
        self.join_reflections_core(u, v)
    }

    fn join_reflections_core(
        &self,
        u: &IntervalElement,
        v: &IntervalElement,
    ) -> Result<IntervalElement> {
        let sys = self.sys();
        let n1 = u.element.reflection_pole()?;
        let n2 = v.element.reflection_pole()?;
        let p = sys.cross(&n1, &n2);
        if linalg::vec_is_zero(&p) {
            return Err(CoxError::InvariantViolation(
                "distinct reflections with proportional poles".into(),
            ));
        }
        match sys.norm_sign(&p) {
            Sign::Negative | Sign::Zero => {
                // mirrors meet at p (finite or ideal): the join is the unique
                // rotation of the interval around p if p is an axial vertex
                if let Some((ch, i)) = self.ctx.axial_chamber_with_vertex(&p)? {
                    let (j, k) = match i {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let rot = sys.mul(&ch.walls[j], &ch.walls[k]);
                    let member = self.member(&rot)?;
                    if !(self.leq(u, &member) && self.leq(v, &member)) {
                        return Err(CoxError::InvariantViolation(
                            "axial-vertex rotation is not an upper bound".into(),
                        ));
                    }
                    Ok(member)
                } else {
                    Ok(self.w_member())
                }
            }
            Sign::Positive => {
                // disjoint mirrors: candidates along the common perpendicular
                let f1 = sys.sheet_normalize(&sys.cross(&p, &n1));
                let f2 = sys.sheet_normalize(&sys.cross(&p, &n2));
                if sys.norm_sign(&f1) != Sign::Negative || sys.norm_sign(&f2) != Sign::Negative {
                    return Err(CoxError::InvariantViolation(
                        "perpendicular feet of disjoint mirrors are not timelike".into(),
                    ));
                }
                let mut candidates = self.ctx.walls_crossed(&f1, &f2)?;
                candidates.push(v.element.clone());
                for r in candidates {
                    // each candidate product is a product of two reflections
                    // of W, so its reflection length equals its moved rank
                    let pairs = [
                        (sys.mul(&r, &u.element), r.clone()),
                        (sys.mul(&u.element, &r), u.element.clone()),
                    ];
                    for (t_cand, left_factor) in pairs {
                        if t_cand.moved_rank() != 2 {
                            continue;
                        }
                        let Some(member) =
                            self.member_of_known_length_two(&t_cand, &left_factor)?
                        else {
                            continue;
                        };
                        let IsometryClass::Translation { pole } = &member.geometry else {
                            continue;
                        };
                        if !linalg::proportional(pole, &p) {
                            continue;
                        }
                        if self.leq(u, &member) && self.leq(v, &member) {
                            return Ok(member);
                        }
                    }
                }
                Ok(self.w_member())
            }
        }
    }

    /// Lattice meet.
    pub fn meet(&self, u: &IntervalElement, v: &IntervalElement) -> Result<IntervalElement> {
        if self.leq(u, v) {
            return Ok(u.clone());
        }
        if self.leq(v, u) {
            return Ok(v.clone());
        }
        // incomparable: a common lower bound can only be a reflection
        if u.rank <= 1 || v.rank <= 1 {
            return Ok(self.identity_member());
        }
        // translate the pair into the fundamental window first
        let j = self.window_exponent_of(u)?;
        if j != 0 {
            let u2 = self.conjugate_member(u, j)?;
            let v2 = self.conjugate_member(v, j)?;
            let m = self.meet_rank_two(&u2, &v2)?;
            return self.conjugate_member(&m, -j);
        }
        self.meet_rank_two(u, v)
    }

    fn meet_rank_two(&self, u: &IntervalElement, v: &IntervalElement) -> Result<IntervalElement> {
        let lu = rank_two_locus(&u.geometry)?;
        let lv = rank_two_locus(&v.geometry)?;
        let sys = self.sys();
        let n = sys.cross(&lu, &lv);
        if linalg::vec_is_zero(&n) {
            return Err(CoxError::InvariantViolation(
                "distinct rank-two members share their geometric locus".into(),
            ));
        }
        if sys.norm_sign(&n) != Sign::Positive {
            return Ok(self.identity_member());
        }
        let r = sys.reflection_with_pole(&n)?;
        // the mirror passes through both loci by construction, so once r is
        // in W it divides both members, and membership in the interval
        // follows by transitivity (r <= u <= w)
        debug_assert_eq!(sys.mul(&r, &u.element).moved_rank(), 1);
        debug_assert_eq!(sys.mul(&r, &v.element).moved_rank(), 1);
        if !sys.contains(&r)? {
            return Ok(self.identity_member());
        }
        Ok(IntervalElement {
            rank: 1,
            geometry: sys.classify(&r)?,
            element: r,
            witness: None,
        })
    }

    /// The unique factorization of a member into reflections that is
    /// strictly increasing in the axial ordering.
    pub fn increasing_factorization(&self, u: &IntervalElement) -> Result<Vec<GroupElement>> {
        let sys = self.sys();
        match u.rank {
            0 => Ok(vec![]),
            1 => Ok(vec![u.element.clone()]),
            2 => {
                for window in [8u32, 16, 32, 64] {
                    let refs = self.reflections_below(u, window)?;
                    let mut found: Vec<(GroupElement, GroupElement)> = vec![];
                    for x1 in &refs {
                        let x2 = sys.mul(x1, &u.element);
                        debug_assert_eq!(x2.moved_rank(), 1);
                        if self.ctx.precedes(x1, &x2)? && !found.iter().any(|(a, _)| a == x1) {
                            found.push((x1.clone(), x2));
                        }
                    }
                    match found.len() {
                        0 => continue,
                        1 => {
                            let (x1, x2) = found.pop().unwrap();
                            debug_assert_eq!(sys.mul(&x1, &x2), u.element);
                            return Ok(vec![x1, x2]);
                        }
                        _ => {
                            return Err(CoxError::InvariantViolation(
                                "multiple increasing factorizations of a rank-two member".into(),
                            ))
                        }
                    }
                }
                Err(CoxError::WindowTooSmall {
                    window: 64,
                    context: "no increasing factorization found in the mirror window".into(),
                })
            }
            3 => {
                let walls = &self.ctx.base_chamber.walls;
                let mut increasing = vec![];
                let perms: [[usize; 3]; 6] = [
                    [0, 1, 2],
                    [0, 2, 1],
                    [1, 0, 2],
                    [1, 2, 0],
                    [2, 0, 1],
                    [2, 1, 0],
                ];
                for p in perms {
                    let (r1, r2, r3) = (&walls[p[0]], &walls[p[1]], &walls[p[2]]);
                    if sys.mul(&sys.mul(r1, r2), r3) != self.ctx.w {
                        continue;
                    }
                    if self.ctx.precedes(r1, r2)? && self.ctx.precedes(r2, r3)? {
                        increasing.push(vec![r1.clone(), r2.clone(), r3.clone()]);
                    }
                }
                if increasing.len() != 1 {
                    return Err(CoxError::InvariantViolation(format!(
                        "base chamber yields {} increasing factorizations of w, expected 1",
                        increasing.len()
                    )));
                }
                Ok(increasing.pop().unwrap())
            }
            _ => unreachable!(),
        }
    }

    /// All certified members among the elements of a ball.
    pub fn members_in_ball(&self, ball: &crate::coxeter::Ball) -> Result<Vec<IntervalElement>> {
        let mut out = vec![];
        for e in ball.entries() {
            if let Some(m) = self.in_interval(&e.element, false)? {
                out.push(m);
            }
        }
        Ok(out)
    }

    /// The interval reflections found in a ball.
    pub fn interval_reflections_in_ball(
        &self,
        ball: &crate::coxeter::Ball,
    ) -> Result<Vec<IntervalElement>> {
        Ok(self
            .members_in_ball(ball)?
            .into_iter()
            .filter(|m| m.rank == 1)
            .collect())
    }

    /// Member translations whose increasing factorization uses two
    /// horizontal reflections, generated as r * phi^j(r) over horizontal
    /// interval reflections r of the ball with small twisting exponents.
    pub fn horizontally_split_translations(
        &self,
        ball: &crate::coxeter::Ball,
        limit: usize,
    ) -> Result<Vec<(IntervalElement, Vec<GroupElement>)>> {
        let sys = self.sys();
        let mut out = vec![];
        for r in ball.reflections() {
            if self.ctx.is_vertical(&r)? {
                continue;
            }
            for j in 1..=5i64 {
                let r2 = self.ctx.phi_pow(&r, j);
                let t = sys.mul(&r, &r2);
                if t.moved_rank() != 2 {
                    continue;
                }
                let Some(m) = self.member_of_known_length_two(&t, &r)? else {
                    continue;
                };
                if !matches!(m.geometry, IsometryClass::Translation { .. }) {
                    continue;
                }
                let fac = self.increasing_factorization(&m)?;
                if fac.iter().all(|f| !self.ctx.is_vertical(f).unwrap_or(true)) {
                    out.push((m, fac));
                    break;
                }
            }
            if out.len() >= limit {
                break;
            }
        }
        Ok(out)
    }
}

/// The geometric locus used to intersect two rank-two members: the fixed
/// point of a rotation or parabolic, the axis pole of a translation.
pub fn rank_two_locus(geom: &IsometryClass) -> Result<Vec3> {
    match geom {
        IsometryClass::Rotation { center } | IsometryClass::Parabolic { center } => {
            Ok(center.clone())
        }
        IsometryClass::Translation { pole } => Ok(pole.clone()),
        _ => Err(CoxError::RankMismatch(0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InstanceConfig;
    use crate::coxeter::{CoxeterSystem, Label, Word};

    fn lattice(m_ab: u32, m_bc: u32, m_ac: u32) -> NcLattice {
        let cfg = InstanceConfig::from_triple((m_ab, m_bc, m_ac));
        NcLattice::new(AxisContext::new(CoxeterSystem::new(cfg).unwrap()).unwrap())
    }

    fn lattice_inf(m_ab: u32, m_bc: u32) -> NcLattice {
        let cfg = InstanceConfig::new(Label::Finite(m_ab), Label::Finite(m_bc), Label::Infinity);
        NcLattice::new(AxisContext::new(CoxeterSystem::new(cfg).unwrap()).unwrap())
    }

    fn elem(l: &NcLattice, word: &str) -> GroupElement {
        l.sys().word_to_element(&Word::parse(word).unwrap())
    }

    #[test]
    fn membership_examples() {
        let l = lattice(3, 3, 4);
        let id = l.sys().identity();
        assert_eq!(l.in_interval(&id, false).unwrap().unwrap().rank, 0);
        // ab is a rank-two member: w (ab)^-1 = abcba is a reflection
        let ab = elem(&l, "ab");
        let m = l.in_interval(&ab, false).unwrap().unwrap();
        assert_eq!(m.rank, 2);
        let abcba = elem(&l, "abcba");
        assert_eq!(abcba.moved_rank(), 1);
        // ba is not a member
        let ba = elem(&l, "ba");
        assert!(l.in_interval(&ba, false).unwrap().is_none());
    }

    #[test]
    fn leq_examples() {
        let l = lattice(3, 3, 4);
        let a = l.member(&elem(&l, "a")).unwrap();
        let ab = l.member(&elem(&l, "ab")).unwrap();
        assert!(l.leq(&a, &ab));
        assert!(l.leq(&ab, &ab));
        assert!(!l.leq(&ab, &a));
        // every interval reflection is below w; vertical reflections are
        // always members, horizontal ones only when their complement
        // translation splits into two mirrors of W
        let w = l.w_member();
        let ball = l.sys().enumerate_ball(5).unwrap();
        let mut members = 0;
        for r in ball.reflections() {
            if l.ctx.is_vertical(&r).unwrap() {
                assert!(l.in_interval(&r, false).unwrap().is_some());
            }
            if let Some(rm) = l.in_interval(&r, false).unwrap() {
                assert!(l.leq(&rm, &w));
                members += 1;
            }
        }
        assert!(members > 3);
    }

    #[test]
    fn some_horizontal_reflections_are_not_members() {
        // bacab in (3,3,4) is a reflection of W whose complement translation
        // has no mirror of W below it, so it lies outside the interval
        let l = lattice(3, 3, 4);
        let r = elem(&l, "bacab");
        assert_eq!(r.moved_rank(), 1);
        assert!(!l.ctx.is_vertical(&r).unwrap());
        assert!(l.in_interval(&r, false).unwrap().is_none());
        // and its complement translation fails the rank-2 certificate
        let t = l.sys().mul(&r, &l.ctx.w);
        assert_eq!(t.moved_rank(), 2);
        assert!(l.in_interval(&t, false).unwrap().is_none());
    }

    #[test]
    fn complement_examples() {
        let l = lattice(3, 3, 4);
        let w = l.w_member();
        let (lw, rw) = l.complements(&w).unwrap();
        assert!(lw.element.is_identity() && rw.element.is_identity());
        let a = l.member(&elem(&l, "a")).unwrap();
        let (_, right) = l.complements(&a).unwrap();
        assert_eq!(right.element, elem(&l, "bc"));
        // right complement is the phi-image of the left complement
        for word in ["a", "ab", "abcba"] {
            let u = l.member(&elem(&l, word)).unwrap();
            let (left, right) = l.complements(&u).unwrap();
            assert_eq!(l.ctx.phi(&left.element), right.element);
        }
    }

    #[test]
    fn reflections_below_dihedral() {
        let l = lattice(3, 3, 4);
        let ab = l.member(&elem(&l, "ab")).unwrap();
        let refs = l.reflections_below(&ab, 8).unwrap();
        assert_eq!(refs.len(), 3);
        let expected = [elem(&l, "a"), elem(&l, "b"), elem(&l, "aba")];
        for e in &expected {
            assert!(refs.contains(e));
        }
        // consecutive fan products reproduce the rotation
        for pair in refs.windows(2) {
            assert_eq!(l.sys().mul(&pair[0], &pair[1]), ab.element);
        }
    }

    #[test]
    fn reflections_below_pi_rotation() {
        // (2,3,7): m(a,b) = 2, so ab is a rotation by pi with exactly two
        // reflections below it
        let l = lattice(2, 3, 7);
        let ab = l.member(&elem(&l, "ab")).unwrap();
        let refs = l.reflections_below(&ab, 8).unwrap();
        assert_eq!(refs.len(), 2);
        assert!(refs.contains(&elem(&l, "a")));
        assert!(refs.contains(&elem(&l, "b")));
    }

    #[test]
    fn reflections_below_translation() {
        let l = lattice(3, 3, 4);
        // complement of a horizontal reflection is a translation member
        let ball = l.sys().enumerate_ball(6).unwrap();
        let mut tested = 0;
        for r in ball.reflections() {
            if l.ctx.is_vertical(&r).unwrap() {
                continue;
            }
            let Some(rm) = l.in_interval(&r, false).unwrap() else {
                continue;
            };
            let t = l.right_complement(&rm).unwrap();
            assert!(matches!(t.geometry, IsometryClass::Translation { .. }));
            let refs = l.reflections_below(&t, 3).unwrap();
            assert!(refs.len() >= 4);
            for pair in refs.windows(2) {
                // consecutive products recover the translation
                assert_eq!(l.sys().mul(&pair[1], &pair[0]), t.element);
                assert!(l.leq(&l.member(&pair[0]).unwrap(), &t));
            }
            tested += 1;
            if tested >= 3 {
                break;
            }
        }
        assert!(tested > 0);
    }

    #[test]
    fn join_examples() {
        let l = lattice(3, 3, 4);
        let a = l.member(&elem(&l, "a")).unwrap();
        let b = l.member(&elem(&l, "b")).unwrap();
        let join = l.join(&a, &b).unwrap();
        assert_eq!(join.element, elem(&l, "ab"));
        // join with w
        let w = l.w_member();
        assert_eq!(l.join(&a, &w).unwrap().element, w.element);
        // join is an upper bound and minimal among ball upper bounds
        let ball = l.sys().enumerate_ball(7).unwrap();
        let members = l.members_in_ball(&ball).unwrap();
        let refs: Vec<IntervalElement> = l
            .sys()
            .enumerate_ball(4)
            .unwrap()
            .reflections()
            .iter()
            .filter_map(|r| l.in_interval(r, false).unwrap())
            .collect();
        for m1 in refs.iter().take(6) {
            for m2 in refs.iter().take(6) {
                if m1 == m2 {
                    continue;
                }
                let j = l.join(m1, m2).unwrap();
                assert!(l.leq(m1, &j) && l.leq(m2, &j));
                for ub in &members {
                    if l.leq(m1, ub) && l.leq(m2, ub) {
                        assert!(l.leq(&j, ub), "join not minimal");
                    }
                }
            }
        }
    }

    #[test]
    fn join_of_translation_factors_recovers_it() {
        let l = lattice(3, 3, 4);
        let ball = l.sys().enumerate_ball(6).unwrap();
        let mut tested = 0;
        for r in ball.reflections() {
            if l.ctx.is_vertical(&r).unwrap() {
                continue;
            }
            let Some(rm) = l.in_interval(&r, false).unwrap() else {
                continue;
            };
            let t = l.right_complement(&rm).unwrap();
            let fac = l.increasing_factorization(&t).unwrap();
            assert_eq!(fac.len(), 2);
            let m1 = l.member(&fac[0]).unwrap();
            let m2 = l.member(&fac[1]).unwrap();
            let j = l.join(&m1, &m2).unwrap();
            assert_eq!(j.element, t.element);
            tested += 1;
            if tested >= 2 {
                break;
            }
        }
        assert!(tested > 0);
    }

    #[test]
    fn meet_examples() {
        let l = lattice(3, 3, 4);
        let ab = l.member(&elem(&l, "ab")).unwrap();
        let bc = l.member(&elem(&l, "bc")).unwrap();
        let m = l.meet(&ab, &bc).unwrap();
        assert_eq!(m.element, elem(&l, "b"));
        let id = l.identity_member();
        assert_eq!(l.meet(&ab, &id).unwrap().element, id.element);
        assert_eq!(l.meet(&ab, &ab).unwrap().element, ab.element);
    }

    #[test]
    fn increasing_factorization_of_w() {
        for l in [lattice(3, 3, 4), lattice(2, 3, 7), lattice_inf(2, 3)] {
            let w = l.w_member();
            let fac = l.increasing_factorization(&w).unwrap();
            assert_eq!(fac.len(), 3);
            let prod = l.sys().mul(&l.sys().mul(&fac[0], &fac[1]), &fac[2]);
            assert_eq!(prod, w.element);
            assert!(l.ctx.precedes(&fac[0], &fac[1]).unwrap());
            assert!(l.ctx.precedes(&fac[1], &fac[2]).unwrap());
        }
    }

    #[test]
    fn increasing_factorization_of_rotations() {
        let l = lattice(3, 3, 4);
        let ab = l.member(&elem(&l, "ab")).unwrap();
        let fac = l.increasing_factorization(&ab).unwrap();
        assert_eq!(fac.len(), 2);
        assert_eq!(l.sys().mul(&fac[0], &fac[1]), ab.element);
        assert!(l.ctx.precedes(&fac[0], &fac[1]).unwrap());
        // pi rotation: exactly one of the two factorizations is increasing
        let l2 = lattice(2, 3, 7);
        let ab2 = l2.member(&elem(&l2, "ab")).unwrap();
        let fac2 = l2.increasing_factorization(&ab2).unwrap();
        let refs = l2.reflections_below(&ab2, 4).unwrap();
        assert_eq!(refs.len(), 2);
        assert!(l2.ctx.precedes(&fac2[0], &fac2[1]).unwrap());
    }

    #[test]
    fn translation_with_horizontal_factors_straddles_the_axis() {
        let l = lattice(3, 3, 4);
        let ball = l.sys().enumerate_ball(6).unwrap();
        let found = l.horizontally_split_translations(&ball, 3).unwrap();
        assert!(!found.is_empty());
        for (t, fac) in found {
            let IsometryClass::Translation { pole } = &t.geometry else {
                panic!("expected translation");
            };
            let axis = &l.sys().translation_axis(&t.element, pole).unwrap();
            // feet of the two mirrors straddle the crossing with the axis
            let z = l.sys().cross(pole, &l.ctx.axis.pole);
            let z = l.sys().sheet_normalize(&z);
            let zp = l.sys().line_param(axis, &z).unwrap();
            let p1 = l.foot_param_on_axis(axis, &fac[0]).unwrap();
            let p2 = l.foot_param_on_axis(axis, &fac[1]).unwrap();
            let d1 = (&p1 - &zp).sign();
            let d2 = (&p2 - &zp).sign();
            assert_ne!(d1, d2);
            assert_ne!(d1, Sign::Zero);
        }
    }
}
