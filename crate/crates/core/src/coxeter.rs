//! The rank-three Coxeter system: Gram form, geometric representation as
//! exact 3x3 matrices, isometry classification in the hyperboloid model,
//! gallery folding, membership, and breadth-first enumeration.

use crate::config::InstanceConfig;
use crate::error::{CoxError, Result};
use crate::field::{FieldElement, FieldSpec, Sign};
use crate::linalg::{self, Mat3, Vec3};
use num_rational::BigRational;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A Coxeter label: an integer >= 2 or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Finite(u32),
    Infinity,
}

impl Label {
    pub fn parse(s: &str) -> Result<Label> {
        match s {
            "inf" | "infinity" | "oo" | "∞" => Ok(Label::Infinity),
            _ => {
                let m: u32 = s
                    .parse()
                    .map_err(|_| CoxError::InvalidLabel(s.to_string()))?;
                if m < 2 {
                    return Err(CoxError::InvalidLabel(s.to_string()));
                }
                Ok(Label::Finite(m))
            }
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinity => write!(f, "inf"),
        }
    }
}

/// Generator index: 0 = a, 1 = b, 2 = c.
pub type Gen = usize;

pub const GEN_NAMES: [char; 3] = ['a', 'b', 'c'];

/// A word in the standard generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn parse(s: &str) -> Result<Word> {
        let mut letters = vec![];
        for ch in s.chars() {
            match ch {
                'a' => letters.push(0),
                'b' => letters.push(1),
                'c' => letters.push(2),
                _ => return Err(CoxError::BadLetter(ch)),
            }
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &g in &self.0 {
            write!(f, "{}", GEN_NAMES[g])?;
        }
        Ok(())
    }
}

/// An element of the group in the geometric representation, with the rank
/// of its moved space (the image of g - id) computed on demand and cached.
/// For members of the noncrossing partition interval this rank is the
/// reflection length.
#[derive(Clone)]
pub struct GroupElement {
    pub matrix: Mat3,
    rank_cell: std::sync::OnceLock<u8>,
}

impl GroupElement {
    pub fn from_matrix(matrix: Mat3) -> GroupElement {
        GroupElement {
            matrix,
            rank_cell: std::sync::OnceLock::new(),
        }
    }

    pub fn moved_rank(&self) -> u8 {
        *self.rank_cell.get_or_init(|| {
            let spec = self.matrix[0][0].spec().clone();
            let diff = linalg::mat_sub(&self.matrix, &linalg::identity(&spec));
            linalg::mat_rank(&diff) as u8
        })
    }

    pub fn is_identity(&self) -> bool {
        self.moved_rank() == 0
    }

    /// Columns of (g - id), spanning the moved space.
    pub fn moved_columns(&self) -> Vec<Vec3> {
        let spec = self.matrix[0][0].spec().clone();
        let diff = linalg::mat_sub(&self.matrix, &linalg::identity(&spec));
        (0..3)
            .map(|j| [diff[0][j].clone(), diff[1][j].clone(), diff[2][j].clone()])
            .collect()
    }

    /// The pole (spanning vector of the moved space) of a reflection.
    pub fn reflection_pole(&self) -> Result<Vec3> {
        if self.moved_rank() != 1 {
            return Err(CoxError::NotAReflection);
        }
        let cols = self.moved_columns();
        let col = cols
            .into_iter()
            .find(|c| !linalg::vec_is_zero(c))
            .expect("rank-one matrix has a nonzero column");
        Ok(linalg::projective_normalize(&col))
    }

    /// Canonical serialization of the matrix, usable as a deterministic
    /// tiebreaker and as a dedup key.
    pub fn canonical_key(&self) -> String {
        let mut s = String::new();
        for row in &self.matrix {
            for e in row {
                for c in e.coeffs() {
                    s.push_str(&c.to_string());
                    s.push(',');
                }
                s.push(';');
            }
        }
        s
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}
impl Eq for GroupElement {}

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.matrix.hash(state);
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(rank {})", self.moved_rank())
    }
}

/// A geodesic line with a chosen orientation: `pole` is spacelike and spans
/// the B-orthogonal complement of the line's plane; `base` is a timelike
/// point on the line (positive sheet); `dir` is a tangent at `base` pointing
/// in the positive direction. Points on the line are compared through the
/// parameter beta/alpha of their expression alpha*base + beta*dir.
#[derive(Debug, Clone)]
pub struct OrientedLine {
    pub pole: Vec3,
    pub base: Vec3,
    pub dir: Vec3,
}

/// Classification of an isometry in the hyperboloid model. Translations
/// carry their axis pole; the oriented axis itself is built on demand.
#[derive(Debug, Clone)]
pub enum IsometryClass {
    Identity,
    Reflection { pole: Vec3 },
    Rotation { center: Vec3 },
    Parabolic { center: Vec3 },
    Translation { pole: Vec3 },
    Glide { axis: OrientedLine },
}

impl IsometryClass {
    pub fn name(&self) -> &'static str {
        match self {
            IsometryClass::Identity => "identity",
            IsometryClass::Reflection { .. } => "reflection",
            IsometryClass::Rotation { .. } => "rotation",
            IsometryClass::Parabolic { .. } => "parabolic",
            IsometryClass::Translation { .. } => "translation",
            IsometryClass::Glide { .. } => "glide",
        }
    }
}

/// The built Coxeter system: ground field, Gram matrix, generators, and the
/// canonical interior basepoint with trivial stabilizer.
pub struct CoxeterSystem {
    pub config: InstanceConfig,
    field: Arc<FieldSpec>,
    gram: Mat3,
    gram_inv_cols: Mat3, // inverse of the Gram matrix
    gens: [GroupElement; 3],
    /// Timelike point with B(x0, e_s) = 1 for all s: interior to the
    /// fundamental chamber, trivial stabilizer.
    basepoint: Vec3,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Classify a label triple by the angle sum 1/m1 + 1/m2 + 1/m3 (with
/// 1/inf = 0): below 1 is hyperbolic, equal is affine, above is spherical.
pub fn triple_classification(labels: &[Label; 3]) -> &'static str {
    // compare sum of 1/m to 1 using exact integers
    let vals: Vec<Option<u64>> = labels
        .iter()
        .map(|l| match l {
            Label::Finite(m) => Some(*m as u64),
            Label::Infinity => None,
        })
        .collect();
    let denom: u64 = vals.iter().map(|v| v.unwrap_or(1)).product();
    let num: u64 = vals
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.is_none() {
                return 0;
            }
            let mut t = 1u64;
            for (j, w) in vals.iter().enumerate() {
                if j != i {
                    t *= w.unwrap_or(1);
                }
            }
            t
        })
        .sum();
    match num.cmp(&denom) {
        std::cmp::Ordering::Less => "hyperbolic",
        std::cmp::Ordering::Equal => "affine",
        std::cmp::Ordering::Greater => "spherical",
    }
}

impl CoxeterSystem {
    pub fn new(config: InstanceConfig) -> Result<Arc<CoxeterSystem>> {
        // apply the generator permutation to the roles of a, b, c
        let perm = config.generator_order;
        if {
            let mut sorted = perm;
            sorted.sort_unstable();
            sorted != [0, 1, 2]
        } {
            return Err(CoxError::InvalidLabel(format!(
                "generator order {perm:?} is not a permutation"
            )));
        }
        // m(i,j) after renaming generators: position of the pair {perm[i], perm[j]}
        let orig = config.labels;
        let pair_label = |x: usize, y: usize| -> Label {
            match (x.min(y), x.max(y)) {
                (0, 1) => orig[0],
                (1, 2) => orig[1],
                (0, 2) => orig[2],
                _ => unreachable!(),
            }
        };
        let labels = [
            pair_label(perm[0], perm[1]),
            pair_label(perm[1], perm[2]),
            pair_label(perm[0], perm[2]),
        ];

        let class = triple_classification(&labels);
        if class != "hyperbolic" {
            return Err(CoxError::NotHyperbolic(
                format!("{},{},{}", labels[0], labels[1], labels[2]),
                class,
            ));
        }

        let level = labels
            .iter()
            .filter_map(|l| match l {
                Label::Finite(m) => Some(*m as u64),
                Label::Infinity => None,
            })
            .fold(1u64, lcm)
            .max(2);
        let field = FieldSpec::new(level as u32)?;

        let gram = build_gram(&field, &labels)?;

        // Signature must be (2,1). The trace is 3, so the eigenvalues cannot
        // be all negative; a negative determinant then forces (2,1).
        if linalg::det(&gram).sign() != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "Gram form does not have signature (2,1)".into(),
            ));
        }

        let gram_inv_cols = invert_mat(&gram)?;

        let mut gens_vec = vec![];
        for s in 0..3 {
            gens_vec.push(GroupElement::from_matrix(simple_reflection_matrix(
                &field, &gram, s,
            )));
        }
        let gens: [GroupElement; 3] = [
            gens_vec[0].clone(),
            gens_vec[1].clone(),
            gens_vec[2].clone(),
        ];

        // basepoint: B x = (1,1,1)
        let one = FieldElement::one(&field);
        let basepoint = linalg::solve(&gram, &[one.clone(), one.clone(), one])?;
        if linalg::bilinear(&gram, &basepoint, &basepoint).sign() != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "fundamental chamber does not meet the hyperboloid".into(),
            ));
        }

        let mut cfg = config;
        cfg.labels = labels;
        cfg.generator_order = [0, 1, 2];
        Ok(Arc::new(CoxeterSystem {
            config: cfg,
            field,
            gram,
            gram_inv_cols,
            gens,
            basepoint,
        }))
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn gram(&self) -> &Mat3 {
        &self.gram
    }

    pub fn gens(&self) -> &[GroupElement; 3] {
        &self.gens
    }

    pub fn basepoint(&self) -> &Vec3 {
        &self.basepoint
    }

    pub fn label(&self, s: Gen, t: Gen) -> Label {
        match (s.min(t), s.max(t)) {
            (0, 1) => self.config.labels[0],
            (1, 2) => self.config.labels[1],
            (0, 2) => self.config.labels[2],
            _ => Label::Finite(1),
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::from_matrix(linalg::identity(&self.field))
    }

    pub fn bilinear(&self, u: &Vec3, v: &Vec3) -> FieldElement {
        linalg::bilinear(&self.gram, u, v)
    }

    pub fn norm_sign(&self, v: &Vec3) -> Sign {
        self.bilinear(v, v).sign()
    }

    pub fn cross(&self, u: &Vec3, v: &Vec3) -> Vec3 {
        linalg::mat_vec(&self.gram_inv_cols, &linalg::euclid_cross(u, v))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::from_matrix(linalg::mat_mul(&a.matrix, &b.matrix))
    }

    /// Inverse via the adjugate: group elements have determinant +-1, so
    /// g^-1 = det(g) * adj(g), division-free.
    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let adj = linalg::adjugate(&g.matrix);
        let d = linalg::det(&g.matrix);
        debug_assert!(
            d == FieldElement::one(&self.field) || d == -&FieldElement::one(&self.field)
        );
        let m = if d == FieldElement::one(&self.field) {
            adj
        } else {
            let mut neg = adj;
            for row in neg.iter_mut() {
                for e in row.iter_mut() {
                    *e = -&*e;
                }
            }
            neg
        };
        GroupElement::from_matrix(m)
    }

    pub fn is_isometry(&self, g: &GroupElement) -> bool {
        let gt = linalg::transpose(&g.matrix);
        linalg::mat_mul(&gt, &linalg::mat_mul(&self.gram, &g.matrix)) == self.gram
    }

    pub fn word_to_element(&self, word: &Word) -> GroupElement {
        let mut m = linalg::identity(&self.field);
        for &g in &word.0 {
            m = linalg::mat_mul(&m, &self.gens[g].matrix);
        }
        GroupElement::from_matrix(m)
    }

    /// The fixed Coxeter element w = abc.
    pub fn coxeter_element(&self) -> GroupElement {
        self.word_to_element(&Word(vec![0, 1, 2]))
    }

    /// The reflection with a prescribed spacelike pole:
    /// x -> x - 2 B(x, n)/B(n, n) n.
    pub fn reflection_with_pole(&self, pole: &Vec3) -> Result<GroupElement> {
        let nn = self.bilinear(pole, pole);
        if nn.sign() != Sign::Positive {
            return Err(CoxError::SpacelikePoint);
        }
        let two = FieldElement::from_int(&self.field, 2);
        let scale = two.div(&nn)?;
        let bn = linalg::mat_vec(&self.gram, pole);
        let mut m = linalg::identity(&self.field);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = &m[i][j] - &(&(&scale * &pole[i]) * &bn[j]);
            }
        }
        Ok(GroupElement::from_matrix(m))
    }

    /// Sheet normalization: flip the sign of a timelike (or isotropic,
    /// nonzero) vector so it pairs negatively with the basepoint.
    pub fn sheet_normalize(&self, v: &Vec3) -> Vec3 {
        match self.bilinear(v, &self.basepoint).sign() {
            Sign::Positive => linalg::vec_neg(v),
            _ => v.clone(),
        }
    }

    pub fn on_positive_sheet(&self, v: &Vec3) -> bool {
        self.bilinear(v, &self.basepoint).sign() == Sign::Negative
    }

    /// A timelike K-rational point on the plane B(x, pole) = 0, on the
    /// positive sheet. The restricted form has signature (1,1), so the
    /// minimum of the norm along a line section is negative.
    pub fn timelike_point_on(&self, pole: &Vec3) -> Result<Vec3> {
        // basis of the plane x . (B pole) = 0: crosses of B pole with the
        // coordinate axes (division-free)
        let bn = linalg::mat_vec(&self.gram, pole);
        let mut basis: Vec<Vec3> = vec![];
        for i in 0..3 {
            let mut e = linalg::zero_vec(&self.field);
            e[i] = FieldElement::one(&self.field);
            let c = linalg::euclid_cross(&e, &bn);
            if linalg::vec_is_zero(&c) {
                continue;
            }
            if basis.is_empty() || !linalg::proportional(&basis[0], &c) {
                basis.push(c);
            }
            if basis.len() == 2 {
                break;
            }
        }
        if basis.len() != 2 {
            return Err(CoxError::InvariantViolation(
                "pole-orthogonal plane is not two-dimensional".into(),
            ));
        }
        let y = self.timelike_combination(&basis[0], &basis[1])?;
        Ok(self.sheet_normalize(&y))
    }

    /// A timelike combination of two independent vectors spanning a plane of
    /// signature (1,1). Division-free: the combinations are scaled copies of
    /// the quadratic's vertex.
    pub fn timelike_combination(&self, u1: &Vec3, u2: &Vec3) -> Result<Vec3> {
        let b11 = self.bilinear(u1, u1);
        if b11.sign() == Sign::Negative {
            return Ok(u1.clone());
        }
        let b22 = self.bilinear(u2, u2);
        if b22.sign() == Sign::Negative {
            return Ok(u2.clone());
        }
        let b12 = self.bilinear(u1, u2);
        let y = if b22.is_zero() {
            if b12.is_zero() {
                return Err(CoxError::InvariantViolation(
                    "degenerate plane in timelike search".into(),
                ));
            }
            // scale of u1 + s u2 with s making the norm negative
            let two_b12 = &FieldElement::from_int(&self.field, 2) * &b12;
            let minus = &(-&b11) - &FieldElement::one(&self.field);
            linalg::vec_add(
                &linalg::vec_scale(&two_b12, u1),
                &linalg::vec_scale(&minus, u2),
            )
        } else {
            // scale of the vertex u1 - (b12/b22) u2
            linalg::vec_sub(
                &linalg::vec_scale(&b22, u1),
                &linalg::vec_scale(&b12, u2),
            )
        };
        if self.norm_sign(&y) != Sign::Negative {
            return Err(CoxError::InvariantViolation(
                "timelike search failed: plane has no timelike vectors".into(),
            ));
        }
        Ok(y)
    }

    /// Build an oriented line from a spacelike pole; `mover` fixes the line
    /// setwise and its translation direction orients it.
    pub fn oriented_line(&self, pole: &Vec3, mover: &GroupElement) -> Result<OrientedLine> {
        let base = self.timelike_point_on(pole)?;
        let moved = linalg::mat_vec(&mover.matrix, &base);
        // tangent at base: component of moved orthogonal to base
        let bb = self.bilinear(&base, &base);
        let mb = self.bilinear(&moved, &base);
        let dir = linalg::vec_sub(
            &linalg::vec_scale(&bb, &moved),
            &linalg::vec_scale(&mb, &base),
        );
        if linalg::vec_is_zero(&dir) {
            return Err(CoxError::InvariantViolation(
                "mover fixes the line's base point".into(),
            ));
        }
        let mut line = OrientedLine {
            pole: pole.clone(),
            base,
            dir,
        };
        // the parameter of `moved` has the sign of B(moved, dir)
        if self.bilinear(&moved, &line.dir).sign() != Sign::Positive {
            line.dir = linalg::vec_neg(&line.dir);
        }
        Ok(line)
    }

    /// The oriented axis of a translation with a known pole.
    pub fn translation_axis(&self, t: &GroupElement, pole: &Vec3) -> Result<OrientedLine> {
        self.oriented_line(pole, t)
    }

    /// Parameter of a point of the line's plane: beta/alpha where
    /// point ~ alpha*base + beta*dir with alpha > 0.
    pub fn line_param(&self, line: &OrientedLine, point: &Vec3) -> Result<FieldElement> {
        // Solve the 3x2 system [base dir] (alpha, beta)^T = point using the
        // form: pair with base and dir.
        let bb = self.bilinear(&line.base, &line.base);
        let dd = self.bilinear(&line.dir, &line.dir);
        let pb = self.bilinear(point, &line.base);
        let pd = self.bilinear(point, &line.dir);
        // B(base, dir) = 0 by construction
        let alpha = pb.div(&bb)?;
        let beta = pd.div(&dd)?;
        // consistency: point must lie on the plane
        let recon = linalg::vec_add(
            &linalg::vec_scale(&alpha, &line.base),
            &linalg::vec_scale(&beta, &line.dir),
        );
        if !linalg::proportional(&recon, point) || !recon.eq(point) {
            return Err(CoxError::InvariantViolation(
                "point is not on the line's plane".into(),
            ));
        }
        if alpha.sign() != Sign::Positive {
            return Err(CoxError::InvariantViolation(
                "point is on the wrong side of the projective chart".into(),
            ));
        }
        beta.div(&alpha)
    }

    /// Point of the line at a given parameter.
    pub fn line_point(&self, line: &OrientedLine, param: &FieldElement) -> Vec3 {
        linalg::vec_add(&line.base, &linalg::vec_scale(param, &line.dir))
    }

    /// Classify an isometry of the hyperboloid model.
    pub fn classify(&self, g: &GroupElement) -> Result<IsometryClass> {
        match g.moved_rank() {
            0 => Ok(IsometryClass::Identity),
            1 => Ok(IsometryClass::Reflection {
                pole: g.reflection_pole()?,
            }),
            2 => {
                if linalg::det(&g.matrix).sign() != Sign::Positive {
                    return Err(CoxError::InvariantViolation(
                        "orientation-reversing isometry with two-dimensional moved space".into(),
                    ));
                }
                let spec = self.field.clone();
                let diff = linalg::mat_sub(&g.matrix, &linalg::identity(&spec));
                let p = linalg::kernel_of_rank_two(&diff).ok_or_else(|| {
                    CoxError::InvariantViolation(
                        "rank-two isometry without a line of fixed vectors".into(),
                    )
                })?;
                match self.norm_sign(&p) {
                    Sign::Negative => Ok(IsometryClass::Rotation {
                        center: self.sheet_normalize(&p),
                    }),
                    Sign::Zero => Ok(IsometryClass::Parabolic {
                        center: self.sheet_normalize(&linalg::projective_normalize(&p)),
                    }),
                    Sign::Positive => Ok(IsometryClass::Translation { pole: p }),
                }
            }
            3 => {
                let spec = self.field.clone();
                let mut sum = linalg::mat_sub(&g.matrix, &linalg::identity(&spec));
                // g + id = (g - id) + 2 id
                let two = FieldElement::from_int(&spec, 2);
                for i in 0..3 {
                    sum[i][i] = &sum[i][i] + &two;
                }
                if linalg::mat_rank(&sum) != 2 {
                    return Err(CoxError::InvariantViolation(
                        "moved space is full but the isometry is not a glide".into(),
                    ));
                }
                let pole = linalg::kernel_of_rank_two(&sum).ok_or_else(|| {
                    CoxError::InvariantViolation(
                        "moved space is full but the isometry is not a glide".into(),
                    )
                })?;
                if self.norm_sign(&pole) != Sign::Positive {
                    return Err(CoxError::InvariantViolation(
                        "glide pole is not spacelike".into(),
                    ));
                }
                Ok(IsometryClass::Glide {
                    axis: self.oriented_line(&pole, g)?,
                })
            }
            _ => unreachable!(),
        }
    }

    /// Gallery fold: walk a timelike point on the positive sheet into the
    /// closed fundamental chamber D = { x : B(x, e_s) >= 0 }, flipping any
    /// violated wall. Returns u (as a word) with u^-1 point in D.
    pub fn fold_to_fundamental(&self, point: &Vec3) -> Result<(Word, Vec3)> {
        if self.norm_sign(point) != Sign::Negative {
            return Err(CoxError::NotTimelike);
        }
        if !self.on_positive_sheet(point) {
            return Err(CoxError::WrongSheet);
        }
        let mut y = point.clone();
        let mut letters = vec![];
        for _ in 0..1_000_000u32 {
            let by = linalg::mat_vec(&self.gram, &y);
            let violated = (0..3).find(|&s| by[s].sign() == Sign::Negative);
            match violated {
                None => return Ok((Word(letters), y)),
                Some(s) => {
                    y = linalg::mat_vec(&self.gens[s].matrix, &y);
                    letters.push(s);
                }
            }
        }
        Err(CoxError::InvariantViolation(
            "gallery fold did not terminate".into(),
        ))
    }

    /// Strict interiority: the folded point avoids all three walls.
    pub fn fold_strictly_interior(&self, point: &Vec3) -> Result<Option<(Word, Vec3)>> {
        let (word, y) = self.fold_to_fundamental(point)?;
        let by = linalg::mat_vec(&self.gram, &y);
        if (0..3).all(|s| by[s].sign() == Sign::Positive) {
            Ok(Some((word, y)))
        } else {
            Ok(None)
        }
    }

    /// Membership in W for a B-isometry, by folding the image of the
    /// basepoint and comparing matrices (the basepoint has trivial
    /// stabilizer, so the fold determines the unique candidate).
    pub fn contains(&self, g: &GroupElement) -> Result<bool> {
        if !self.is_isometry(g) {
            return Err(CoxError::NotAnIsometry);
        }
        let image = linalg::mat_vec(&g.matrix, &self.basepoint);
        if !self.on_positive_sheet(&image) {
            return Ok(false);
        }
        let (word, _) = self.fold_to_fundamental(&image)?;
        let u = self.word_to_element(&word);
        Ok(u == *g)
    }

    /// Breadth-first ball of the Cayley graph with exact-matrix dedup.
    pub fn enumerate_ball(&self, radius: u32) -> Result<Ball> {
        let cap = self.config.ball_radius_cap;
        if radius > cap {
            return Err(CoxError::RadiusCapExceeded {
                requested: radius,
                cap,
            });
        }
        let mut index: HashMap<GroupElement, usize> = HashMap::new();
        let mut entries: Vec<BallEntry> = vec![];
        let id = self.identity();
        index.insert(id.clone(), 0);
        entries.push(BallEntry {
            element: id,
            word: Word(vec![]),
        });
        let mut frontier: Vec<usize> = vec![0];
        for _ in 1..=radius {
            let mut next = vec![];
            for &i in &frontier {
                let (elem, word) = (entries[i].element.clone(), entries[i].word.clone());
                for s in 0..3 {
                    let m = linalg::mat_mul(&elem.matrix, &self.gens[s].matrix);
                    let g = GroupElement::from_matrix(m);
                    if !index.contains_key(&g) {
                        let mut w = word.clone();
                        w.0.push(s);
                        let idx = entries.len();
                        index.insert(g.clone(), idx);
                        entries.push(BallEntry { element: g, word: w });
                        next.push(idx);
                    }
                }
            }
            frontier = next;
        }
        Ok(Ball { entries, index })
    }
}

/// BFS ball: elements with shortest words, in BFS (length, discovery) order.
pub struct Ball {
    entries: Vec<BallEntry>,
    index: HashMap<GroupElement, usize>,
}

#[derive(Clone)]
pub struct BallEntry {
    pub element: GroupElement,
    pub word: Word,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn word_of(&self, g: &GroupElement) -> Option<&Word> {
        self.index.get(g).map(|&i| &self.entries[i].word)
    }

    /// The reflections in the ball (moved rank one).
    pub fn reflections(&self) -> Vec<GroupElement> {
        self.entries
            .iter()
            .filter(|e| e.element.moved_rank() == 1)
            .map(|e| e.element.clone())
            .collect()
    }
}

fn build_gram(field: &Arc<FieldSpec>, labels: &[Label; 3]) -> Result<Mat3> {
    let mut gram = linalg::identity(field);
    let half = BigRational::new(1.into(), 2.into());
    let set = |gram: &mut Mat3, i: usize, j: usize, label: Label| -> Result<()> {
        let entry = match label {
            Label::Finite(m) => {
                // -cos(pi/m) = -(2cos(pi/m))/2
                let tc = FieldElement::two_cos_pi_over(field, m)?;
                -&(&FieldElement::from_rational(field, half.clone()) * &tc)
            }
            Label::Infinity => FieldElement::from_int(field, -1),
        };
        gram[i][j] = entry.clone();
        gram[j][i] = entry;
        Ok(())
    };
    set(&mut gram, 0, 1, labels[0])?;
    set(&mut gram, 1, 2, labels[1])?;
    set(&mut gram, 0, 2, labels[2])?;
    Ok(gram)
}

fn simple_reflection_matrix(field: &Arc<FieldSpec>, gram: &Mat3, s: Gen) -> Mat3 {
    // r_s : x -> x - 2 B(x, e_s) e_s; column j of the matrix is r_s(e_j).
    let mut m = linalg::identity(field);
    let two = FieldElement::from_int(field, 2);
    for j in 0..3 {
        // B(e_j, e_s) = gram[j][s]
        m[s][j] = &m[s][j] - &(&two * &gram[j][s]);
    }
    m
}

fn invert_mat(m: &Mat3) -> Result<Mat3> {
    let spec = m[0][0].spec().clone();
    let id = linalg::identity(&spec);
    let mut cols = vec![];
    for j in 0..3 {
        let e = [id[0][j].clone(), id[1][j].clone(), id[2][j].clone()];
        cols.push(linalg::solve(m, &e)?);
    }
    let mut out = linalg::identity(&spec);
    for i in 0..3 {
        for (j, col) in cols.iter().enumerate() {
            out[i][j] = col[i].clone();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn system(m_ab: u32, m_bc: u32, m_ac: u32) -> Arc<CoxeterSystem> {
        CoxeterSystem::new(InstanceConfig::from_triple((m_ab, m_bc, m_ac))).unwrap()
    }

    fn system_inf(m_ab: u32, m_bc: u32) -> Arc<CoxeterSystem> {
        CoxeterSystem::new(InstanceConfig::new(
            Label::Finite(m_ab),
            Label::Finite(m_bc),
            Label::Infinity,
        ))
        .unwrap()
    }

    #[test]
    fn rejects_spherical_and_affine_triples() {
        for (t, kind) in [
            ((2u32, 3u32, 3u32), "spherical"),
            ((2, 3, 4), "spherical"),
            ((2, 3, 5), "spherical"),
            ((2, 3, 6), "affine"),
            ((2, 4, 4), "affine"),
            ((3, 3, 3), "affine"),
            ((2, 2, 7), "spherical"),
        ] {
            let err = CoxeterSystem::new(InstanceConfig::from_triple(t));
            match err {
                Err(CoxError::NotHyperbolic(_, k)) => assert_eq!(k, kind, "{t:?}"),
                Err(other) => panic!("expected non-hyperbolic rejection for {t:?}, got {other}"),
                Ok(_) => panic!("expected rejection for {t:?}"),
            }
        }
    }

    #[test]
    fn gram_entries_match_labels() {
        let sys = system(3, 3, 4);
        let f = sys.field();
        // m(a,b) = 3 -> entry -1/2
        let minus_half =
            FieldElement::from_rational(f, BigRational::new((-1).into(), 2.into()));
        assert_eq!(sys.gram()[0][1], minus_half);
        // diagonal is 1
        assert_eq!(sys.gram()[0][0], FieldElement::one(f));
        // infinite label -> -1, and the signature stays (2,1)
        let sys_inf = system_inf(2, 3);
        assert_eq!(sys_inf.gram()[0][2], FieldElement::from_int(sys_inf.field(), -1));
        assert_eq!(linalg::det(sys_inf.gram()).sign(), Sign::Negative);
    }

    #[test]
    fn gram_signature_certificate() {
        for sys in [system(3, 3, 4), system(2, 3, 7), system_inf(2, 3)] {
            assert_eq!(linalg::det(sys.gram()).sign(), Sign::Negative);
            // principal 2x2 minor on a finite-label pair is positive
            let g = sys.gram();
            let minor = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
            assert_eq!(minor.sign(), Sign::Positive);
        }
    }

    #[test]
    fn generators_are_involutions_preserving_the_form() {
        let sys = system(3, 3, 4);
        for s in 0..3 {
            let g = &sys.gens()[s];
            assert!(sys.is_isometry(g));
            assert_eq!(g.moved_rank(), 1);
            assert!(sys.mul(g, g).is_identity());
        }
    }

    #[test]
    fn braid_relations_hold_exactly() {
        let sys = system(3, 3, 4);
        let ab = sys.word_to_element(&Word::parse("ababab").unwrap()); // (ab)^3
        assert!(ab.is_identity());
        let ac = sys.word_to_element(&Word::parse("acacacac").unwrap()); // (ac)^4
        assert!(ac.is_identity());
        // infinite label: no power collapses
        let sys_inf = system_inf(2, 3);
        let mut g = sys_inf.identity();
        let step = sys_inf.word_to_element(&Word::parse("ac").unwrap());
        for _ in 0..50 {
            g = sys_inf.mul(&g, &step);
            assert!(!g.is_identity());
        }
    }

    #[test]
    fn word_examples() {
        let sys = system(3, 3, 4);
        assert!(sys.word_to_element(&Word::parse("aa").unwrap()).is_identity());
        let w = sys.coxeter_element();
        assert_eq!(w.moved_rank(), 3);
    }

    #[test]
    fn determinant_tracks_word_parity() {
        let sys = system(3, 3, 4);
        let ball = sys.enumerate_ball(4).unwrap();
        let f = sys.field();
        for e in ball.entries() {
            let d = linalg::det(&e.element.matrix);
            let expected = if e.word.len() % 2 == 0 { 1 } else { -1 };
            assert_eq!(d, FieldElement::from_int(f, expected));
            // parity constrains the moved rank
            if e.word.len() % 2 == 0 {
                assert!(e.element.moved_rank() == 0 || e.element.moved_rank() == 2);
            } else {
                assert!(e.element.moved_rank() == 1 || e.element.moved_rank() == 3);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let sys = system(3, 3, 4);
        let a = &sys.gens()[0];
        assert!(matches!(
            sys.classify(a).unwrap(),
            IsometryClass::Reflection { .. }
        ));
        let ab = sys.word_to_element(&Word::parse("ab").unwrap());
        let class = sys.classify(&ab).unwrap();
        match class {
            IsometryClass::Rotation { center } => {
                assert_eq!(sys.norm_sign(&center), Sign::Negative);
            }
            other => panic!("expected rotation, got {other:?}"),
        }
        // parabolic: ac in (2,3,inf)
        let sys_inf = system_inf(2, 3);
        let ac = sys_inf.word_to_element(&Word::parse("ac").unwrap());
        match sys_inf.classify(&ac).unwrap() {
            IsometryClass::Parabolic { center } => {
                assert_eq!(sys_inf.norm_sign(&center), Sign::Zero);
            }
            other => panic!("expected parabolic, got {other:?}"),
        }
        // glide: the Coxeter element
        let w = sys.coxeter_element();
        assert!(matches!(sys.classify(&w).unwrap(), IsometryClass::Glide { .. }));
    }

    #[test]
    fn fold_examples() {
        let sys = system(3, 3, 4);
        // interior point folds to the empty word
        let (word, folded) = sys.fold_to_fundamental(sys.basepoint()).unwrap();
        assert!(word.is_empty());
        assert_eq!(&folded, sys.basepoint());
        // a * x0 folds to the word "a"
        let moved = linalg::mat_vec(&sys.gens()[0].matrix, sys.basepoint());
        let (word, folded) = sys.fold_to_fundamental(&moved).unwrap();
        assert_eq!(word, Word(vec![0]));
        assert_eq!(&folded, sys.basepoint());
        // non-timelike input is rejected
        let f = sys.field();
        let spacelike = [
            FieldElement::one(f),
            FieldElement::zero(f),
            FieldElement::zero(f),
        ];
        assert!(matches!(
            sys.fold_to_fundamental(&spacelike),
            Err(CoxError::NotTimelike)
        ));
    }

    #[test]
    fn fold_recovers_group_elements() {
        let sys = system(3, 3, 4);
        let ball = sys.enumerate_ball(5).unwrap();
        for e in ball.entries() {
            let image = linalg::mat_vec(&e.element.matrix, sys.basepoint());
            let (word, folded) = sys.fold_to_fundamental(&image).unwrap();
            assert_eq!(sys.word_to_element(&word), e.element);
            assert_eq!(&folded, sys.basepoint());
            // gallery distance equals the BFS word length
            assert_eq!(word.len(), e.word.len());
        }
    }

    #[test]
    fn contains_examples() {
        let sys = system(3, 3, 4);
        let g = sys.word_to_element(&Word::parse("abacab").unwrap());
        assert!(sys.contains(&g).unwrap());
        // -identity preserves B but is not in W
        let f = sys.field();
        let mut neg = linalg::identity(f);
        for i in 0..3 {
            neg[i][i] = FieldElement::from_int(f, -1);
        }
        assert!(!sys.contains(&GroupElement::from_matrix(neg)).unwrap());
        // a B-reflection with a non-root pole is not in W
        let third = FieldElement::from_rational(f, BigRational::new(1.into(), 3.into()));
        let pole = [
            FieldElement::one(f),
            third,
            FieldElement::zero(f),
        ];
        let r = sys.reflection_with_pole(&pole).unwrap();
        assert!(sys.is_isometry(&r));
        assert!(!sys.contains(&r).unwrap());
    }

    #[test]
    fn ball_counts() {
        let sys = system(3, 3, 4);
        assert_eq!(sys.enumerate_ball(0).unwrap().len(), 1);
        assert_eq!(sys.enumerate_ball(1).unwrap().len(), 4);
        // no length-two coincidences: 1 + 3 + 6
        assert_eq!(sys.enumerate_ball(2).unwrap().len(), 10);
    }

    #[test]
    fn ball_respects_radius_cap() {
        let mut cfg = InstanceConfig::from_triple((3, 3, 4));
        cfg.ball_radius_cap = 3;
        let sys = CoxeterSystem::new(cfg).unwrap();
        assert!(matches!(
            sys.enumerate_ball(4),
            Err(CoxError::RadiusCapExceeded { .. })
        ));
    }

    #[test]
    fn isometry_invariant_on_ball() {
        for sys in [system(3, 3, 4), system_inf(2, 3)] {
            let ball = sys.enumerate_ball(4).unwrap();
            for e in ball.entries() {
                assert!(sys.is_isometry(&e.element));
            }
        }
    }
}
