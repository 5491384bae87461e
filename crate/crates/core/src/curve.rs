//! Hyperelliptic spectral curves `Y² = E^{2g+1} + s₁E^{2g} + … + s_{2g+1}`.
//!
//! Branch handling: the reference sheet at a point `E` is the product of
//! principal square roots `∏ √(E − e_k)`, which for real `E` beyond all
//! branch points agrees with the germ `Y ~ +E^{g+1/2}` at `E → +∞`.
//!
//! Homology: branch points are ordered into a chain sorted by
//! `(Re, Im)`, so the polyline through them is x-monotone and its links
//! do not cross. Every link `(p, q)` carries the cycle that runs from `p`
//! to `q` on one sheet and back on the other. The sheets of consecutive
//! links are matched by continuing `Y` counter-clockwise around their
//! shared branch point. With that rule adjacent link cycles satisfy
//! `c_k · c_{k+1} = −1`. This makes the intersection form combinatorial.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::poly::{aberth_roots, cubic_roots, Poly};
use crate::scalar::{creal, cx, Cx, Real};

/// Relative floor on pairwise branch-point distance.
pub const DEGENERACY_FLOOR: f64 = 1e-8;
/// Relative floor on the distance of a path from a branch point.
pub const PATH_FLOOR: f64 = 1e-6;

/// Which of the two values of `Y` a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Sheet::Plus => T::one(),
            Sheet::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }

    fn from_sign<T: Real>(s: T) -> Self {
        if s >= T::zero() {
            Sheet::Plus
        } else {
            Sheet::Minus
        }
    }
}

/// Sheet convention tag. Only one convention exists: `Y / E^{g+1/2} → 1`
/// as `E → +∞` along the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRef {
    PositiveRealInfinity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve<T: Real> {
    genus: usize,
    coeffs: Vec<Cx<T>>,
    roots: Vec<Cx<T>>,
    poly: Poly<T>,
    branch_ref: BranchRef,
}

impl<T: Real> SpectralCurve<T> {
    /// Genus-1 curve `Y² = E³ + s₁E² + s₂E + s₃`.
    pub fn from_cubic(coeffs: [Cx<T>; 3]) -> Result<Self> {
        check_finite(&coeffs)?;
        let roots = cubic_roots(coeffs[0], coeffs[1], coeffs[2]).to_vec();
        Self::assemble(coeffs.to_vec(), roots, true)
    }

    /// Genus-2 curve from the five lower coefficients of a monic quintic.
    pub fn from_quintic(coeffs: [Cx<T>; 5]) -> Result<Self> {
        check_finite(&coeffs)?;
        let poly = monic_from_coeffs(&coeffs);
        let roots = aberth_roots(&poly);
        Self::assemble(coeffs.to_vec(), roots, true)
    }

    /// Dispatches on the number of coefficients (3 or 5).
    pub fn from_coeffs(coeffs: &[Cx<T>]) -> Result<Self> {
        match coeffs.len() {
            3 => Self::from_cubic([coeffs[0], coeffs[1], coeffs[2]]),
            5 => Self::from_quintic([coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]]),
            n => Err(Error::InvalidInput(format!("expected 3 or 5 coefficients, got {n}"))),
        }
    }

    /// Real coefficients convenience constructor.
    pub fn from_real_coeffs(coeffs: &[T]) -> Result<Self> {
        Self::from_coeffs(&coeffs.iter().map(|&c| creal(c)).collect::<Vec<_>>())
    }

    /// Curve with the given branch points (3 or 5 of them).
    pub fn from_roots(roots: &[Cx<T>]) -> Result<Self> {
        if roots.len() != 3 && roots.len() != 5 {
            return Err(Error::InvalidInput(format!("expected 3 or 5 roots, got {}", roots.len())));
        }
        check_finite(roots)?;
        let poly = Poly::from_roots(roots);
        let n = roots.len();
        // poly ascending: coefficient of E^{n-k} is s_k.
        let coeffs: Vec<Cx<T>> = (1..=n).map(|k| poly.coeff(n - k)).collect();
        Self::assemble(coeffs, roots.to_vec(), false)
    }

    fn assemble(coeffs: Vec<Cx<T>>, roots: Vec<Cx<T>>, check_residual: bool) -> Result<Self> {
        let n = coeffs.len();
        let genus = (n - 1) / 2;
        let poly = monic_from_coeffs(&coeffs);
        if roots.len() != n {
            return Err(Error::DegenerateCurve("root extraction failed".into()));
        }
        let scale = roots.iter().fold(T::zero(), |m, r| m.max(r.norm()));
        if scale == T::zero() || !scale.is_finite() {
            return Err(Error::DegenerateCurve("all branch points coincide at 0".into()));
        }
        let min_dist = min_pairwise(&roots);
        if min_dist <= T::lit(DEGENERACY_FLOOR) * scale {
            return Err(Error::DegenerateCurve(format!(
                "branch points {:e} apart (scale {:e})",
                min_dist.to_f64_lossy(),
                scale.to_f64_lossy()
            )));
        }
        let unit = scale.max(T::one());
        if check_residual {
            let bound = T::lit(1e-10) * unit.powi(n as i32);
            for r in &roots {
                let res = poly.eval(*r).norm();
                if res > bound {
                    return Err(Error::DegenerateCurve(format!(
                        "root residual {:e} exceeds {:e}",
                        res.to_f64_lossy(),
                        bound.to_f64_lossy()
                    )));
                }
            }
            let rebuilt = Poly::from_roots(&roots);
            for k in 1..=n {
                let d = (rebuilt.coeff(n - k) - coeffs[k - 1]).norm();
                if d > T::lit(1e-10) * unit.powi(k as i32) {
                    return Err(Error::DegenerateCurve(format!("coefficient s{k} not reproduced by roots")));
                }
            }
        }
        Ok(Self { genus, coeffs, roots, poly, branch_ref: BranchRef::PositiveRealInfinity })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `(s₁, …, s_{2g+1})`.
    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn roots(&self) -> &[Cx<T>] {
        &self.roots
    }

    pub fn branch_ref(&self) -> BranchRef {
        self.branch_ref
    }

    /// The monic polynomial `Y²` as a function of `E`.
    pub fn poly(&self) -> &Poly<T> {
        &self.poly
    }

    pub fn monic(&self, e: Cx<T>) -> Cx<T> {
        self.poly.eval(e)
    }

    /// Largest branch-point modulus.
    pub fn scale(&self) -> T {
        self.roots.iter().fold(T::zero(), |m, r| m.max(r.norm()))
    }

    /// `∏_{i<j} (e_i − e_j)²`.
    pub fn discriminant(&self) -> Cx<T> {
        let mut d = creal(T::one());
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                let diff = self.roots[i] - self.roots[j];
                d = d * diff * diff;
            }
        }
        d
    }

    fn tiny(&self) -> T {
        T::lit(1e-10) * self.scale().max(T::one())
    }

    pub fn has_real_coeffs(&self) -> bool {
        let unit = self.scale().max(T::one());
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| c.im.abs() <= T::lit(1e-10) * unit.powi(k as i32 + 1))
    }

    pub fn has_real_roots(&self) -> bool {
        let tiny = self.tiny();
        self.roots.iter().all(|r| r.im.abs() <= tiny)
    }

    /// Real coefficients and a root multiset closed under conjugation.
    pub fn is_conj_symmetric(&self) -> bool {
        if !self.has_real_coeffs() {
            return false;
        }
        let tiny = self.tiny();
        let mut used = vec![false; self.roots.len()];
        for r in &self.roots {
            let target = r.conj();
            let hit = (0..self.roots.len())
                .filter(|&j| !used[j])
                .find(|&j| (self.roots[j] - target).norm() <= tiny);
            match hit {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }

    /// Real roots sorted ascending, if all roots are real.
    pub fn sorted_real_roots(&self) -> Option<Vec<T>> {
        if !self.has_real_roots() {
            return None;
        }
        let mut r: Vec<T> = self.roots.iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Some(r)
    }

    /// Curve with branch points multiplied by `lambda`.
    pub fn scaled(&self, lambda: Cx<T>) -> Result<Self> {
        Self::from_roots(&self.roots.iter().map(|&r| r * lambda).collect::<Vec<_>>())
    }

    /// Complex-conjugate curve.
    pub fn conjugate(&self) -> Result<Self> {
        Self::from_roots(&self.roots.iter().map(|r| r.conj()).collect::<Vec<_>>())
    }

    /// `Y` on the reference sheet: the product of principal square roots.
    pub fn y_principal(&self, e: Cx<T>) -> Cx<T> {
        self.roots.iter().fold(creal(T::one()), |acc, &r| acc * (e - r).sqrt())
    }

    /// Distance from `e` to the nearest branch point, and its index.
    fn nearest_root(&self, e: Cx<T>) -> (usize, T) {
        self.roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (e - r).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .expect("curve has roots")
    }

    /// Continues `Y` along a polyline starting on `start_sheet` (relative to
    /// [`SpectralCurve::y_principal`] at the first vertex). Returns the value
    /// at each vertex.
    pub fn y_along_path(&self, path: &[Cx<T>], start_sheet: Sheet) -> Result<Vec<Cx<T>>> {
        let first = *path
            .first()
            .ok_or_else(|| Error::InvalidInput("empty path".into()))?;
        self.check_path(path)?;
        let y0 = self.y_principal(first) * start_sheet.sign::<T>();
        Ok(self.continue_along(path, y0))
    }

    fn check_path(&self, path: &[Cx<T>]) -> Result<()> {
        let floor = T::lit(PATH_FLOOR) * self.scale();
        let report = |root: usize, d: T| Error::PathTooCloseToBranchPoint {
            root,
            distance: d.to_f64_lossy(),
            floor: floor.to_f64_lossy(),
        };
        if path.len() == 1 {
            let (i, d) = self.nearest_root(path[0]);
            if d <= floor {
                return Err(report(i, d));
            }
        }
        for w in path.windows(2) {
            for (i, &r) in self.roots.iter().enumerate() {
                let d = point_segment_distance(r, w[0], w[1]);
                if d <= floor {
                    return Err(report(i, d));
                }
            }
        }
        Ok(())
    }

    /// Analytic continuation from a known value `y0` at `path[0]`. Steps are
    /// kept below a tenth of the distance to the nearest branch point, so
    /// each factor `√(E − e_k)` turns by less than 0.06 rad per step and the
    /// nearer of `±√P(E)` is the continuation.
    pub(crate) fn continue_along(&self, path: &[Cx<T>], y0: Cx<T>) -> Vec<Cx<T>> {
        let mut out = Vec::with_capacity(path.len());
        out.push(y0);
        let mut y = y0;
        let frac = T::lit(0.1);
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = (b - a).norm();
            let mut t = T::zero();
            while t < len {
                let here = a + (b - a) * (t / len);
                let (_, d) = self.nearest_root(here);
                let step = (d * frac).min(len - t);
                t = if len - t <= step { len } else { t + step };
                let next = if t >= len { b } else { a + (b - a) * (t / len) };
                let cand = self.monic(next).sqrt();
                y = if (cand - y).norm() <= (cand + y).norm() { cand } else { -cand };
            }
            out.push(y);
        }
        out
    }

    /// Geometry and branch data of the link cycle joining two branch points.
    pub fn segment(&self, from: usize, to: usize, sheet: Sheet) -> SegmentFrame<T> {
        let p = self.roots[from];
        let q = self.roots[to];
        let mid = (p + q) * T::lit(0.5);
        let half = (q - p) * T::lit(0.5);
        let others = self
            .roots
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != from && *k != to)
            .map(|(_, &r)| {
                let d = mid - r;
                let unit = d / d.norm();
                // A direction on the negative real axis up to rounding gets
                // the angle +π, so the square root does not flip with noise.
                let mut arg = unit.arg();
                if T::PI() - arg.abs() <= T::lit(1e-12) {
                    arg = T::PI();
                }
                (r, unit.conj(), Cx::from_polar(T::one(), arg * T::lit(0.5)))
            })
            .collect();
        SegmentFrame { from, to, mid, half, sheet, others }
    }

    /// Distance from the open link `(from, to)` to the other branch points,
    /// checked against the path floor.
    pub(crate) fn check_segment(&self, from: usize, to: usize) -> Result<()> {
        let floor = T::lit(PATH_FLOOR) * self.scale();
        for (i, &r) in self.roots.iter().enumerate() {
            if i == from || i == to {
                continue;
            }
            let d = point_segment_distance(r, self.roots[from], self.roots[to]);
            if d <= floor {
                return Err(Error::PathTooCloseToBranchPoint {
                    root: i,
                    distance: d.to_f64_lossy(),
                    floor: floor.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// Chain order of the branch points used for the homology basis.
    fn chain(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.roots.len()).collect();
        idx.sort_by(|&a, &b| {
            let (x, y) = (self.roots[a], self.roots[b]);
            x.re.partial_cmp(&y.re)
                .unwrap_or(Ordering::Equal)
                .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
        });
        // Real parts that agree up to rounding (a conjugate pair, say) are
        // ordered by imaginary part so the chain does not depend on noise.
        let tiny = self.tiny();
        for _ in 0..idx.len() {
            for k in 0..idx.len() - 1 {
                let (x, y) = (self.roots[idx[k]], self.roots[idx[k + 1]]);
                if (x.re - y.re).abs() <= tiny && x.im > y.im {
                    idx.swap(k, k + 1);
                }
            }
        }
        idx
    }

    /// Sheets of successive chain links, matched by counter-clockwise
    /// continuation around each shared branch point. The first link is on
    /// the `Plus` sheet of its own frame.
    fn chain_sheets(&self, chain: &[usize]) -> Vec<Sheet> {
        let mut sheets = vec![Sheet::Plus];
        for k in 1..chain.len() - 1 {
            let (ip, iq, ir) = (chain[k - 1], chain[k], chain[k + 1]);
            let (p, q, r) = (self.roots[ip], self.roots[iq], self.roots[ir]);
            let mut radius = (p - q).norm().min((r - q).norm());
            for (i, &e) in self.roots.iter().enumerate() {
                if i != iq {
                    radius = radius.min((e - q).norm());
                }
            }
            radius = radius * T::lit(0.25);
            let alpha = (p - q).arg();
            let beta = (r - q).arg();
            let tau = T::TAU();
            let mut sweep = (beta - alpha) % tau;
            if sweep <= T::zero() {
                sweep = sweep + tau;
            }
            let steps = 96usize;
            let arc: Vec<Cx<T>> = (0..=steps)
                .map(|j| {
                    let ang = alpha + sweep * T::from_usize(j).expect("step") / T::from_usize(steps).expect("steps");
                    q + Cx::from_polar(radius, ang)
                })
                .collect();
            let prev = self.segment(ip, iq, sheets[k - 1]);
            let ya = prev.y_at(arc[0]);
            let yb = *self.continue_along(&arc, ya).last().expect("non-empty arc");
            let next = self.segment(iq, ir, Sheet::Plus);
            let ratio = yb / next.y_at(arc[steps]);
            sheets.push(Sheet::from_sign(ratio.re));
        }
        sheets
    }

    /// Canonical homology basis `[A₁…A_g, B₁…B_g]`.
    ///
    /// Genus 1: for three real branch points `E₀<E₁<E₂` the A-cycle
    /// encircles `[E₁,E₂]` and B joins `[E₀,E₁]`; for a conjugation-symmetric
    /// curve `{r, a±bi}` the A-cycle encircles the vertical segment joining
    /// `a±bi`; otherwise A encircles the shorter chain link. Genus 2: chain
    /// links `c₀…c₃` give `A₁=c₁, A₂=c₃, B₁=c₀, B₂=c₀+c₂`.
    pub fn canonical_homology_basis(&self) -> Vec<Cycle> {
        let chain = self.chain();
        let sheets = self.chain_sheets(&chain);
        let link = |k: usize, weight: i32| Segment {
            from: chain[k],
            to: chain[k + 1],
            link: k,
            sheet: sheets[k],
            weight,
        };
        let cyc = |kind, index, segments| Cycle { kind, index, segments };
        if self.genus == 1 {
            let a_link = self.genus1_a_link(&chain);
            if a_link == 1 {
                vec![cyc(CycleKind::A, 1, vec![link(1, 1)]), cyc(CycleKind::B, 1, vec![link(0, 1)])]
            } else {
                vec![cyc(CycleKind::A, 1, vec![link(0, 1)]), cyc(CycleKind::B, 1, vec![link(1, -1)])]
            }
        } else {
            vec![
                cyc(CycleKind::A, 1, vec![link(1, 1)]),
                cyc(CycleKind::A, 2, vec![link(3, 1)]),
                cyc(CycleKind::B, 1, vec![link(0, 1)]),
                cyc(CycleKind::B, 2, vec![link(0, 1), link(2, 1)]),
            ]
        }
    }

    fn genus1_a_link(&self, chain: &[usize]) -> usize {
        if self.has_real_roots() {
            return 1;
        }
        let tiny = self.tiny();
        if self.is_conj_symmetric() {
            for k in 0..2 {
                let (p, q) = (self.roots[chain[k]], self.roots[chain[k + 1]]);
                if (p - q.conj()).norm() <= tiny && p.im.abs() > tiny {
                    return k;
                }
            }
        }
        let l0 = (self.roots[chain[1]] - self.roots[chain[0]]).norm();
        let l1 = (self.roots[chain[2]] - self.roots[chain[1]]).norm();
        if l1 <= l0 {
            1
        } else {
            0
        }
    }
}

/// Link geometry `E(θ) = mid + half·cos θ`, `θ ∈ [0, π]`, running from
/// `roots[to]` (θ = 0) to `roots[from]` (θ = π). On the open link
/// `Y = s·i·half·sin θ·R(E)` where `R² = ∏_{other} (E − e_k)` uses square
/// roots rotated so that each factor is continuous along the link.
#[derive(Debug, Clone)]
pub struct SegmentFrame<T: Real> {
    pub from: usize,
    pub to: usize,
    pub mid: Cx<T>,
    pub half: Cx<T>,
    pub sheet: Sheet,
    others: Vec<(Cx<T>, Cx<T>, Cx<T>)>,
}

impl<T: Real> SegmentFrame<T> {
    /// `R(E)`, continuous along the open link.
    pub fn r_factor(&self, e: Cx<T>) -> Cx<T> {
        self.others
            .iter()
            .fold(creal(T::one()), |acc, &(r, rot, half_rot)| acc * ((e - r) * rot).sqrt() * half_rot)
    }

    pub fn point(&self, theta: T) -> Cx<T> {
        self.mid + self.half * theta.cos()
    }

    /// `Y` at parameter `θ` on this link's sheet.
    pub fn y_at_theta(&self, theta: T) -> Cx<T> {
        let e = self.point(theta);
        cx(T::zero(), self.sheet.sign::<T>()) * self.half * theta.sin() * self.r_factor(e)
    }

    /// `Y` at a point `e` assumed to lie on the open link.
    pub fn y_at(&self, e: Cx<T>) -> Cx<T> {
        let c = ((e - self.mid) / self.half).re.max(-T::one()).min(T::one());
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        cx(T::zero(), self.sheet.sign::<T>()) * self.half * s * self.r_factor(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleKind {
    A,
    B,
}

/// One chain link traversed by a cycle, with its homology weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    /// Position of the link in the chain.
    pub link: usize,
    pub sheet: Sheet,
    pub weight: i32,
}

/// A cycle as an integer combination of chain-link cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub kind: CycleKind,
    /// 1-based index.
    pub index: usize,
    pub segments: Vec<Segment>,
}

impl Cycle {
    /// Orientation-reversed cycle.
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        for s in &mut c.segments {
            s.weight = -s.weight;
        }
        c
    }
}

/// Intersection number of two cycles from the same basis, computed from
/// the chain rule `c_k · c_{k+1} = −1`.
pub fn intersection(a: &Cycle, b: &Cycle) -> i32 {
    let mut total = 0;
    for s in &a.segments {
        for t in &b.segments {
            let pair = if t.link == s.link + 1 {
                -1
            } else if s.link == t.link + 1 {
                1
            } else {
                0
            };
            total += s.weight * t.weight * pair;
        }
    }
    total
}

fn monic_from_coeffs<T: Real>(coeffs: &[Cx<T>]) -> Poly<T> {
    let n = coeffs.len();
    let mut asc: Vec<Cx<T>> = (0..n).map(|k| coeffs[n - 1 - k]).collect();
    asc.push(creal(T::one()));
    Poly::new(asc)
}

fn check_finite<T: Real>(v: &[Cx<T>]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite value".into()))
    }
}

fn min_pairwise<T: Real>(roots: &[Cx<T>]) -> T {
    let mut m = T::infinity();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            m = m.min((roots[i] - roots[j]).norm());
        }
    }
    m
}

pub(crate) fn point_segment_distance<T: Real>(x: Cx<T>, a: Cx<T>, b: Cx<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == T::zero() {
        return (x - a).norm();
    }
    let t = ((x - a) * ab.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (x - (a + ab * t)).norm()
}
