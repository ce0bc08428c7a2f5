//! Geometry of the Coxeter axis: the axis context, gallery walks along
//! segments, axial chambers and their pedal-ordered wall factorizations,
//! vertical/horizontal classification of reflections, the axial ordering,
//! and the conjugation automorphism phi.

use crate::coxeter::{CoxeterSystem, GroupElement, OrientedLine, Word};
use crate::error::{CoxError, Result};
use crate::field::{FieldElement, Sign};
use crate::linalg::{self, Vec3};
use num_rational::BigRational;
use std::cmp::Ordering;
use std::sync::Arc;

/// An axial chamber g*D together with its walls in pedal-touch order, so
/// that the ordered wall reflections multiply to the Coxeter element.
#[derive(Debug, Clone)]
pub struct AxialChamber {
    /// Chamber = element * D.
    pub element: GroupElement,
    /// Wall reflections (s1, s2, s3) in pedal-touch order: s1 s2 s3 = w.
    pub walls: [GroupElement; 3],
    /// The reflections crossed by the axis segment starting in this chamber,
    /// in crossing order (t1, t2, t3); s1 = t1, s2 = t1 t2 t1, ...
    pub crossings: [GroupElement; 3],
    /// Axis parameters of the three crossing points.
    pub crossing_params: [FieldElement; 3],
}

impl AxialChamber {
    /// The vertices of the chamber: pairwise intersections of its walls,
    /// sheet-normalized. Vertex i is opposite wall i.
    pub fn vertices(&self, ctx: &AxisContext) -> Result<[Vec3; 3]> {
        let sys = &ctx.system;
        let poles: Vec<Vec3> = self
            .walls
            .iter()
            .map(|w| w.reflection_pole())
            .collect::<Result<_>>()?;
        let mut out = vec![];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            let v = sys.cross(&poles[j], &poles[k]);
            if linalg::vec_is_zero(&v) {
                return Err(CoxError::InvariantViolation(
                    "chamber walls do not intersect pairwise".into(),
                ));
            }
            if sys.norm_sign(&v) == Sign::Positive {
                return Err(CoxError::InvariantViolation(
                    "chamber vertex is ultra-ideal".into(),
                ));
            }
            out.push(sys.sheet_normalize(&v));
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    }
}

/// Whether a reflection's fixed line meets the Coxeter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionKind {
    Vertical,
    Horizontal,
}

/// Sort key realizing the axial ordering of reflections: first the vertical
/// reflections crossing above the base chamber (ascending along the axis),
/// then the horizontal ones (descending by the foot of the common
/// perpendicular), then the vertical ones crossing below (ascending).
#[derive(Debug, Clone)]
pub struct AxialOrderKey {
    pub branch: u8,
    pub position: FieldElement,
    pub tiebreak: String,
}

impl AxialOrderKey {
    pub fn compare(&self, other: &AxialOrderKey) -> Ordering {
        match self.branch.cmp(&other.branch) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let diff = &self.position - &other.position;
        let ord = match diff.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        };
        let ord = if self.branch == 1 { ord.reverse() } else { ord };
        match ord {
            Ordering::Equal => self.tiebreak.cmp(&other.tiebreak),
            o => o,
        }
    }
}

/// The Coxeter element, its axis as an oriented line, the base point and
/// base axial chamber, and the fundamental window [x0, w x0) of the axis.
pub struct AxisContext {
    pub system: Arc<CoxeterSystem>,
    pub w: GroupElement,
    pub w_inv: GroupElement,
    /// The axis: pole is the -1 eigenvector of w, base is x0, dir points in
    /// the translation direction of w.
    pub axis: OrientedLine,
    /// w * x0.
    pub w_base: Vec3,
    /// Axis parameter of w * x0 (positive).
    pub window_end: FieldElement,
    /// The base axial chamber containing x0.
    pub base_chamber: AxialChamber,
    /// Whether the base axial chamber is the fundamental chamber.
    pub base_chamber_is_fundamental: bool,
    /// Memoized powers of w (non-negative and negative).
    w_powers: std::sync::Mutex<(Vec<GroupElement>, Vec<GroupElement>)>,
}

impl AxisContext {
    pub fn new(system: Arc<CoxeterSystem>) -> Result<Arc<AxisContext>> {
        let w = system.coxeter_element();
        let w_inv = system.inverse(&w);
        let axis0 = match system.classify(&w)? {
            crate::coxeter::IsometryClass::Glide { axis } => axis,
            other => {
                return Err(CoxError::InvariantViolation(format!(
                    "Coxeter element classified as {}, expected glide",
                    other.name()
                )))
            }
        };
        // w v = -v exactly
        let wv = linalg::mat_vec(&w.matrix, &axis0.pole);
        if wv != linalg::vec_neg(&axis0.pole) {
            return Err(CoxError::InvariantViolation(
                "axis pole is not negated by the Coxeter element".into(),
            ));
        }

        // Base point: nudge along the axis until strictly interior to a
        // chamber (halving steps; only finitely many walls cross nearby).
        let mut base = axis0.base.clone();
        if system.fold_strictly_interior(&base)?.is_none() {
            let mut eps = BigRational::new(1.into(), 1.into());
            let two = BigRational::new(2.into(), 1.into());
            let mut found = false;
            for _ in 0..256 {
                let e = FieldElement::from_rational(system.field(), eps.clone());
                let cand = linalg::vec_add(&axis0.base, &linalg::vec_scale(&e, &axis0.dir));
                if system.norm_sign(&cand) == Sign::Negative
                    && system.fold_strictly_interior(&cand)?.is_some()
                {
                    base = cand;
                    found = true;
                    break;
                }
                eps /= &two;
            }
            if !found {
                return Err(CoxError::InvariantViolation(
                    "could not nudge the axis base point off the walls".into(),
                ));
            }
        }

        // Rebuild the tangent direction at the final base point.
        let moved = linalg::mat_vec(&w.matrix, &base);
        let bb = system.bilinear(&base, &base);
        let mb = system.bilinear(&moved, &base);
        let dir = linalg::vec_sub(
            &linalg::vec_scale(&bb, &moved),
            &linalg::vec_scale(&mb, &base),
        );
        let mut axis = OrientedLine {
            pole: axis0.pole.clone(),
            base,
            dir,
        };
        if system.line_param(&axis, &moved)?.sign() != Sign::Positive {
            axis.dir = linalg::vec_neg(&axis.dir);
        }
        let window_end = system.line_param(&axis, &moved)?;

        let mut ctx = AxisContext {
            system: system.clone(),
            w,
            w_inv,
            axis,
            w_base: moved,
            window_end,
            base_chamber: AxialChamber {
                element: system.identity(),
                walls: [system.identity(), system.identity(), system.identity()],
                crossings: [system.identity(), system.identity(), system.identity()],
                crossing_params: [
                    FieldElement::zero(system.field()),
                    FieldElement::zero(system.field()),
                    FieldElement::zero(system.field()),
                ],
            },
            base_chamber_is_fundamental: false,
            w_powers: std::sync::Mutex::new((vec![], vec![])),
        };
        let base_chamber = ctx.chamber_at_point(&ctx.axis.base.clone())?;
        ctx.base_chamber_is_fundamental = base_chamber.element.is_identity();
        ctx.base_chamber = base_chamber;
        Ok(Arc::new(ctx))
    }

    pub fn base_point(&self) -> &Vec3 {
        &self.axis.base
    }

    /// Conjugation by the Coxeter element: phi(u) = w^-1 u w.
    pub fn phi(&self, g: &GroupElement) -> GroupElement {
        self.system.mul(&self.system.mul(&self.w_inv, g), &self.w)
    }

    pub fn phi_inv(&self, g: &GroupElement) -> GroupElement {
        self.system.mul(&self.system.mul(&self.w, g), &self.w_inv)
    }

    /// w^k, memoized.
    pub fn w_pow(&self, k: i64) -> GroupElement {
        if k == 0 {
            return self.system.identity();
        }
        let mut cache = self.w_powers.lock().unwrap();
        let (pos, neg) = &mut *cache;
        let (list, step, n) = if k > 0 {
            (pos, &self.w, k as usize)
        } else {
            (neg, &self.w_inv, (-k) as usize)
        };
        if list.is_empty() {
            list.push(step.clone());
        }
        while list.len() < n {
            let next = self.system.mul(list.last().unwrap(), step);
            list.push(next);
        }
        list[n - 1].clone()
    }

    /// phi^k(g) = w^-k g w^k.
    pub fn phi_pow(&self, g: &GroupElement, k: i64) -> GroupElement {
        if k == 0 {
            return g.clone();
        }
        let wk = self.w_pow(k);
        let wk_inv = self.w_pow(-k);
        self.system.mul(&self.system.mul(&wk_inv, g), &wk)
    }

    /// Axis parameter of a point lying on the Coxeter plane.
    pub fn axis_param(&self, point: &Vec3) -> Result<FieldElement> {
        self.system.line_param(&self.axis, point)
    }

    pub fn axis_point(&self, param: &FieldElement) -> Vec3 {
        self.system.line_point(&self.axis, param)
    }

    /// Walls separating two timelike points, in crossing order along the
    /// open segment. Walls through the endpoints are crossed by the walk to
    /// make progress but are not reported.
    pub fn walls_crossed(&self, from: &Vec3, to: &Vec3) -> Result<Vec<GroupElement>> {
        Ok(self.walk_segment(from, to)?.0)
    }

    /// Gallery walk from the chamber of `from` to the chamber of `to`;
    /// returns the separating walls in crossing order and the chamber
    /// elements visited (including the first and last).
    pub fn walk_segment(
        &self,
        from: &Vec3,
        to: &Vec3,
    ) -> Result<(Vec<GroupElement>, Vec<GroupElement>)> {
        let sys = &self.system;
        let (word, _) = sys.fold_to_fundamental(from)?;
        let mut g = sys.word_to_element(&word);
        let mut crossed = vec![];
        let mut chambers = vec![g.clone()];
        for _ in 0..100_000u32 {
            let ginv = sys.inverse(&g);
            let yto = linalg::mat_vec(&ginv.matrix, to);
            let yfrom = linalg::mat_vec(&ginv.matrix, from);
            let bto = linalg::mat_vec(sys.gram(), &yto);
            let bfrom = linalg::mat_vec(sys.gram(), &yfrom);
            // violated walls of the current chamber, with crossing ratio
            let mut options: Vec<(FieldElement, String, usize)> = vec![];
            for s in 0..3 {
                if bto[s].sign() == Sign::Negative {
                    let ratio = (-&bfrom[s]).div(&bto[s])?;
                    // ratio = -B(from, n)/B(to, n) >= 0
                    let refl = sys.mul(&sys.mul(&g, &sys.gens()[s]), &ginv);
                    options.push((ratio, refl.canonical_key(), s));
                }
            }
            if options.is_empty() {
                return Ok((crossed, chambers));
            }
            options.sort_by(|a, b| {
                let diff = &a.0 - &b.0;
                match diff.sign() {
                    Sign::Negative => Ordering::Less,
                    Sign::Positive => Ordering::Greater,
                    Sign::Zero => a.1.cmp(&b.1),
                }
            });
            let (ratio, _, s) = options.into_iter().next().unwrap();
            let refl = sys.mul(&sys.mul(&g, &sys.gens()[s]), &sys.inverse(&g));
            g = sys.mul(&g, &sys.gens()[s]);
            // a zero ratio means the wall passes through `from`: cross it to
            // make progress, but it does not separate the open segment
            if ratio.sign() != Sign::Zero {
                crossed.push(refl);
            }
            chambers.push(g.clone());
        }
        Err(CoxError::InvariantViolation(
            "segment walk did not terminate".into(),
        ))
    }

    /// The three reflections whose lines cross the open segment
    /// (x0, w x0) of the axis, in crossing order.
    pub fn segment_crossings(&self) -> Result<[GroupElement; 3]> {
        let crossings = self.walls_crossed(&self.axis.base, &self.w_base)?;
        if crossings.len() != 3 {
            return Err(CoxError::InvariantViolation(format!(
                "axis window crossed {} reflection lines, expected 3",
                crossings.len()
            )));
        }
        Ok([
            crossings[0].clone(),
            crossings[1].clone(),
            crossings[2].clone(),
        ])
    }

    /// The axial chamber whose interior contains the axis point at `param`,
    /// nudging in the positive direction if the point lies on a wall.
    pub fn chamber_at(&self, param: &FieldElement) -> Result<AxialChamber> {
        self.chamber_at_nudged(param, true)
    }

    /// Axial chamber at a parameter, nudging up (true) or down (false) when
    /// the point lies on a wall; the returned chamber's closure contains the
    /// query point.
    pub fn chamber_at_nudged(&self, param: &FieldElement, up: bool) -> Result<AxialChamber> {
        let sys = &self.system;
        let query = self.axis_point(param);
        let mut point = query.clone();
        if sys.norm_sign(&point) != Sign::Negative {
            return Err(CoxError::NotTimelike);
        }
        if sys.fold_strictly_interior(&point)?.is_none() {
            let mut eps = BigRational::new(1.into(), 2.into());
            let two = BigRational::new(2.into(), 1.into());
            let mut found = false;
            for _ in 0..256 {
                let e = FieldElement::from_rational(sys.field(), eps.clone());
                let shift = if up { e } else { -&e };
                let cand = self.axis_point(&(param + &shift));
                if sys.norm_sign(&cand) == Sign::Negative {
                    if let Some((word, _)) = sys.fold_strictly_interior(&cand)? {
                        // the chamber closure must still contain the query point
                        let g = sys.word_to_element(&word);
                        let ginv = sys.inverse(&g);
                        let yq = linalg::mat_vec(&ginv.matrix, &query);
                        let bq = linalg::mat_vec(sys.gram(), &yq);
                        if (0..3).all(|s| bq[s].sign() != Sign::Negative) {
                            point = cand;
                            found = true;
                            break;
                        }
                    }
                }
                eps /= &two;
            }
            if !found {
                return Err(CoxError::InvariantViolation(
                    "could not nudge a wall point into an adjacent chamber".into(),
                ));
            }
        }
        self.chamber_at_point(&point)
    }

    /// Axial chamber containing a strictly interior axis point.
    fn chamber_at_point(&self, point: &Vec3) -> Result<AxialChamber> {
        let sys = &self.system;
        let (word, _) = sys.fold_to_fundamental(point)?;
        let element = sys.word_to_element(&word);
        let moved = linalg::mat_vec(&self.w.matrix, point);
        let crossings_vec = self.walls_crossed(point, &moved)?;
        if crossings_vec.len() != 3 {
            return Err(CoxError::InvariantViolation(format!(
                "axial chamber window crossed {} lines, expected 3",
                crossings_vec.len()
            )));
        }
        let t1 = crossings_vec[0].clone();
        let t2 = crossings_vec[1].clone();
        let t3 = crossings_vec[2].clone();
        // downstream-first composition gives w
        let prod = sys.mul(&sys.mul(&t3, &t2), &t1);
        if prod != self.w {
            return Err(CoxError::InvariantViolation(
                "axis crossings do not compose to the Coxeter element".into(),
            ));
        }
        let s1 = t1.clone();
        let s2 = sys.mul(&sys.mul(&t1, &t2), &t1);
        let t12 = sys.mul(&t1, &t2);
        let s3 = sys.mul(&sys.mul(&t12, &t3), &sys.inverse(&t12));
        let walls = [s1, s2, s3];
        // validate: s1 s2 s3 = w and the walls are the chamber's walls
        let check = sys.mul(&sys.mul(&walls[0], &walls[1]), &walls[2]);
        if check != self.w {
            return Err(CoxError::InvariantViolation(
                "pedal factorization does not reproduce the Coxeter element".into(),
            ));
        }
        let ginv = sys.inverse(&element);
        for wall in &walls {
            let conj = sys.mul(&sys.mul(&ginv, wall), &element);
            if !sys.gens().contains(&conj) {
                return Err(CoxError::InvariantViolation(
                    "pedal factorization reflection is not a chamber wall".into(),
                ));
            }
        }
        let mut params = vec![];
        for t in [&t1, &t2, &t3] {
            params.push(self.crossing_param(t)?);
        }
        Ok(AxialChamber {
            element,
            walls,
            crossings: [t1, t2, t3],
            crossing_params: [params[0].clone(), params[1].clone(), params[2].clone()],
        })
    }

    /// Conjugate an axial chamber by w^k (equivariance along the axis).
    pub fn translate_chamber(&self, ch: &AxialChamber, k: i64) -> Result<AxialChamber> {
        let sys = &self.system;
        let mut wk = sys.identity();
        let step = if k >= 0 { self.w.clone() } else { self.w_inv.clone() };
        for _ in 0..k.unsigned_abs() {
            wk = sys.mul(&wk, &step);
        }
        let wk_inv = sys.inverse(&wk);
        let conj = |g: &GroupElement| sys.mul(&sys.mul(&wk, g), &wk_inv);
        let mut params = vec![];
        for t in &ch.crossings {
            params.push(self.crossing_param(&conj(t))?);
        }
        Ok(AxialChamber {
            element: sys.mul(&wk, &ch.element),
            walls: [conj(&ch.walls[0]), conj(&ch.walls[1]), conj(&ch.walls[2])],
            crossings: [
                conj(&ch.crossings[0]),
                conj(&ch.crossings[1]),
                conj(&ch.crossings[2]),
            ],
            crossing_params: [params[0].clone(), params[1].clone(), params[2].clone()],
        })
    }

    /// The line Fix(r) meets the Coxeter plane in the span of a single
    /// vector, computed as the Lorentzian cross of the axis pole and the
    /// reflection pole.
    fn plane_trace(&self, r: &GroupElement) -> Result<Vec3> {
        let pole = r.reflection_pole()?;
        let q = self.system.cross(&self.axis.pole, &pole);
        if linalg::vec_is_zero(&q) {
            return Err(CoxError::InvariantViolation(
                "reflection line coincides with the Coxeter axis".into(),
            ));
        }
        Ok(q)
    }

    pub fn reflection_kind(&self, r: &GroupElement) -> Result<ReflectionKind> {
        let q = self.plane_trace(r)?;
        match self.system.norm_sign(&q) {
            Sign::Negative => Ok(ReflectionKind::Vertical),
            Sign::Positive => Ok(ReflectionKind::Horizontal),
            Sign::Zero => Err(CoxError::InvariantViolation(
                "reflection line meets the axis at infinity".into(),
            )),
        }
    }

    pub fn is_vertical(&self, r: &GroupElement) -> Result<bool> {
        Ok(self.reflection_kind(r)? == ReflectionKind::Vertical)
    }

    /// Axis parameter where a vertical reflection's line crosses the axis.
    pub fn crossing_param(&self, r: &GroupElement) -> Result<FieldElement> {
        let q = self.plane_trace(r)?;
        if self.system.norm_sign(&q) != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "crossing parameter requested for a horizontal reflection".into(),
            ));
        }
        self.axis_param(&self.system.sheet_normalize(&q))
    }

    /// The point of the axis closest to a horizontal reflection's line: the
    /// foot of the common perpendicular, whose pole is the plane trace.
    pub fn xi_point(&self, r: &GroupElement) -> Result<Vec3> {
        let q = self.plane_trace(r)?;
        if self.system.norm_sign(&q) != Sign::Positive {
            return Err(CoxError::InvariantViolation(
                "xi requested for a vertical reflection".into(),
            ));
        }
        // solve B(alpha x0 + beta d, q) = 0
        let alpha = self.system.bilinear(&self.axis.dir, &q);
        let beta = -&self.system.bilinear(&self.axis.base, &q);
        let foot = linalg::vec_add(
            &linalg::vec_scale(&alpha, &self.axis.base),
            &linalg::vec_scale(&beta, &self.axis.dir),
        );
        if self.system.norm_sign(&foot) != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "perpendicular foot is not timelike".into(),
            ));
        }
        Ok(self.system.sheet_normalize(&foot))
    }

    pub fn xi_param(&self, r: &GroupElement) -> Result<FieldElement> {
        let foot = self.xi_point(r)?;
        self.axis_param(&foot)
    }

    /// Sort key for the axial ordering.
    pub fn axial_key(&self, r: &GroupElement) -> Result<AxialOrderKey> {
        let kind = self.reflection_kind(r)?;
        let (branch, position) = match kind {
            ReflectionKind::Vertical => {
                let s = self.crossing_param(r)?;
                match s.sign() {
                    Sign::Positive => (0u8, s),
                    Sign::Negative => (2u8, s),
                    Sign::Zero => {
                        return Err(CoxError::InvariantViolation(
                            "reflection line passes through the base point".into(),
                        ))
                    }
                }
            }
            ReflectionKind::Horizontal => (1u8, self.xi_param(r)?),
        };
        Ok(AxialOrderKey {
            branch,
            position,
            tiebreak: r.canonical_key(),
        })
    }

    /// The total order on reflections.
    pub fn compare(&self, r1: &GroupElement, r2: &GroupElement) -> Result<Ordering> {
        Ok(self.axial_key(r1)?.compare(&self.axial_key(r2)?))
    }

    pub fn precedes(&self, r1: &GroupElement, r2: &GroupElement) -> Result<bool> {
        Ok(self.compare(r1, r2)? == Ordering::Less)
    }

    /// Decide whether a point (timelike or ideal) is a vertex of some axial
    /// chamber: project onto the axis, take the one or two chambers whose
    /// closure contains the foot, and compare with their vertices.
    pub fn is_axial_vertex(&self, p: &Vec3) -> Result<bool> {
        Ok(self.axial_chamber_with_vertex(p)?.is_some())
    }

    /// The axial chamber having the given point as a vertex, if any, along
    /// with the vertex index (the wall with that index is opposite).
    pub fn axial_chamber_with_vertex(
        &self,
        p: &Vec3,
    ) -> Result<Option<(AxialChamber, usize)>> {
        let sys = &self.system;
        if sys.norm_sign(p) == Sign::Positive {
            return Err(CoxError::SpacelikePoint);
        }
        // B-orthogonal projection onto the Coxeter plane
        let v = &self.axis.pole;
        let pv = sys.bilinear(p, v);
        let vv = sys.bilinear(v, v);
        let foot = linalg::vec_sub(p, &linalg::vec_scale(&pv.div(&vv)?, v));
        if sys.norm_sign(&foot) != Sign::Negative {
            // ideal point aligned with an axis endpoint: in a discrete group
            // a glide endpoint is never a parabolic fixed point, hence never
            // a chamber vertex
            return Ok(None);
        }
        let foot = sys.sheet_normalize(&foot);
        let s = self.axis_param(&foot)?;
        for up in [true, false] {
            let ch = self.chamber_at_nudged(&s, up)?;
            for (i, v) in ch.vertices(self)?.iter().enumerate() {
                if linalg::proportional(v, p) {
                    return Ok(Some((ch, i)));
                }
            }
        }
        Ok(None)
    }

    /// The twist exponent j such that conjugating by w^j moves a point's
    /// axis projection into the fundamental window. Returns 0 for points
    /// aligned with the axis ends.
    pub fn window_exponent(&self, point: &Vec3) -> Result<i64> {
        let sys = &self.system;
        let v = &self.axis.pole;
        let pv = sys.bilinear(point, v);
        let vv = sys.bilinear(v, v);
        let foot = linalg::vec_sub(point, &linalg::vec_scale(&pv.div(&vv)?, v));
        if sys.norm_sign(&foot) != Sign::Negative {
            return Ok(0);
        }
        Ok(self.phi_normalize_point(&foot)?.0)
    }

    /// Axis parameter of a sheet-normalized plane point as an exact ratio
    /// (num, den) with den > 0; avoids field division in comparison loops.
    fn axis_position_pair(&self, p: &Vec3) -> (FieldElement, FieldElement) {
        let sys = &self.system;
        let pb = sys.bilinear(p, &self.axis.base);
        let pd = sys.bilinear(p, &self.axis.dir);
        let bb = sys.bilinear(&self.axis.base, &self.axis.base);
        let dd = sys.bilinear(&self.axis.dir, &self.axis.dir);
        // s = (pd bb) / (pb dd); pb < 0 and bb < 0 on the positive sheet
        let num = -&(&pd * &bb);
        let den = -&(&pb * &dd);
        debug_assert_eq!(den.sign(), Sign::Positive);
        (num, den)
    }

    /// Normalize a timelike axis-plane point into the fundamental window
    /// [x0, w x0): returns (j, w^-j point) with the translated point in the
    /// window.
    pub fn phi_normalize_point(&self, point: &Vec3) -> Result<(i64, Vec3)> {
        let mut p = self.system.sheet_normalize(point);
        let mut j = 0i64;
        for _ in 0..10_000 {
            let (num, den) = self.axis_position_pair(&p);
            if num.sign() == Sign::Negative {
                p = linalg::mat_vec(&self.w.matrix, &p);
                j -= 1;
            } else if (&num - &(&self.window_end * &den)).sign() != Sign::Negative {
                p = linalg::mat_vec(&self.w_inv.matrix, &p);
                j += 1;
            } else {
                return Ok((j, p));
            }
        }
        Err(CoxError::InvariantViolation(
            "window normalization did not terminate".into(),
        ))
    }

    /// All axial chambers whose interior meets the axis segment
    /// [w^-J x0, w^J x0], in order along the axis.
    pub fn chambers_in_window(&self, window: u32) -> Result<Vec<AxialChamber>> {
        let j = window as i64;
        // Chambers between x0 and w x0, then translate.
        let mut period = vec![self.base_chamber.clone()];
        let params = &self.base_chamber.crossing_params;
        for i in 0..2 {
            // a chamber interior lies between distinct consecutive crossings
            if (&params[i + 1] - &params[i]).sign() == Sign::Positive {
                let two = FieldElement::from_int(self.system.field(), 2);
                let mid = (&params[i] + &params[i + 1]).div(&two)?;
                period.push(self.chamber_at(&mid)?);
            }
        }
        let mut out = vec![];
        for k in -j..j {
            for ch in &period {
                out.push(self.translate_chamber(ch, k)?);
            }
        }
        Ok(out)
    }

    /// Orbit classes of axial vertices over a window, under the action of
    /// the cyclic group generated by w. Returns canonical representatives.
    pub fn axial_vertex_orbits(&self, window: u32) -> Result<Vec<Vec3>> {
        let chambers = self.chambers_in_window(window)?;
        let mut reps: Vec<Vec3> = vec![];
        for ch in &chambers {
            for v in ch.vertices(self)?.iter() {
                let canon = self.vertex_orbit_rep(v)?;
                if !reps.iter().any(|r| linalg::proportional(r, &canon)) {
                    reps.push(canon);
                }
            }
        }
        Ok(reps)
    }

    /// Canonical representative of the <w>-orbit of an axial vertex: the
    /// translate whose axis projection lands in the fundamental window.
    pub fn vertex_orbit_rep(&self, vertex: &Vec3) -> Result<Vec3> {
        let sys = &self.system;
        let v = &self.axis.pole;
        let pv = sys.bilinear(vertex, v);
        let vv = sys.bilinear(v, v);
        let foot = linalg::vec_sub(vertex, &linalg::vec_scale(&pv.div(&vv)?, v));
        if sys.norm_sign(&foot) != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "axial vertex projects to an ideal point".into(),
            ));
        }
        let mut p = sys.sheet_normalize(&foot);
        let mut translate = sys.sheet_normalize(vertex);
        for _ in 0..10_000 {
            let (num, den) = self.axis_position_pair(&p);
            if num.sign() == Sign::Negative {
                p = linalg::mat_vec(&self.w.matrix, &p);
                translate = linalg::mat_vec(&self.w.matrix, &translate);
            } else if (&num - &(&self.window_end * &den)).sign() != Sign::Negative {
                p = linalg::mat_vec(&self.w_inv.matrix, &p);
                translate = linalg::mat_vec(&self.w_inv.matrix, &translate);
            } else {
                return Ok(linalg::projective_normalize(
                    &sys.sheet_normalize(&translate),
                ));
            }
        }
        Err(CoxError::InvariantViolation(
            "vertex orbit normalization did not terminate".into(),
        ))
    }

    /// A word for any group element: the gallery word of its action on the
    /// basepoint. Errors if the matrix is not in the group.
    pub fn word_of(&self, g: &GroupElement) -> Result<Word> {
        let sys = &self.system;
        let image = linalg::mat_vec(&g.matrix, sys.basepoint());
        if !sys.on_positive_sheet(&image) {
            return Err(CoxError::NotAMember);
        }
        let (word, _) = sys.fold_to_fundamental(&image)?;
        if &sys.word_to_element(&word) != g {
            return Err(CoxError::NotAMember);
        }
        Ok(word)
    }
}
