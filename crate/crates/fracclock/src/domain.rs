//! Bounded domains represented by their Dirichlet eigenpairs.
//!
//! Intervals (0, M) and boxes carry closed-form sine eigenfunctions; a table
//! domain wraps user-supplied eigenpairs and is checked for plausibility at
//! registration (positive nondecreasing eigenvalues, orthonormality by
//! quadrature, boundary vanishing).

use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma::sinpi;

use std::sync::{Arc, Mutex};

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A user-registered eigenpair for a table domain.
#[derive(Clone)]
pub struct TableMode {
    pub lambda: f64,
    pub phi: PointFn,
    pub sup_norm: f64,
}

#[derive(Clone)]
pub enum DomainKind {
    /// The interval (0, length).
    Interval { length: f64 },
    /// The box `(0, sides[0]) x ... x (0, sides[d-1])`.
    Box { sides: Vec<f64> },
    /// User-supplied eigenpairs over a product of intervals.
    Table { bounds: Vec<(f64, f64)>, modes: Vec<TableMode> },
}

#[derive(Clone)]
pub struct DomainSpec {
    kind: DomainKind,
}

impl DomainSpec {
    pub fn interval(length: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::parameter(format!(
                "interval domain: length must be positive, got {length}"
            )));
        }
        Ok(DomainSpec { kind: DomainKind::Interval { length } })
    }

    pub fn box_domain(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::parameter("box domain: need at least one side"));
        }
        for &s in &sides {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::parameter(format!(
                    "box domain: all side lengths must be positive, got {s}"
                )));
            }
        }
        if sides.len() == 1 {
            return Self::interval(sides[0]);
        }
        Ok(DomainSpec { kind: DomainKind::Box { sides } })
    }

    /// Register user-supplied eigenpairs. Eigenvalues must be positive and
    /// nondecreasing; sampled pairs are checked orthonormal by quadrature to
    /// 1e-6 and eigenfunctions must vanish on the boundary to 1e-10.
    pub fn table(bounds: Vec<(f64, f64)>, modes: Vec<TableMode>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 3 {
            return Err(Error::parameter(
                "table domain: bounds must cover 1 to 3 dimensions",
            ));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::parameter("table domain: invalid bounds"));
            }
        }
        if modes.is_empty() {
            return Err(Error::parameter("table domain: no eigenpairs supplied"));
        }
        let mut prev = 0.0;
        for (i, m) in modes.iter().enumerate() {
            if !m.lambda.is_finite() || m.lambda <= 0.0 || m.lambda < prev {
                return Err(Error::parameter(format!(
                    "table domain: eigenvalues must be positive and nondecreasing (mode {i})"
                )));
            }
            prev = m.lambda;
        }
        let spec = DomainSpec { kind: DomainKind::Table { bounds, modes } };
        spec.check_table_registration()?;
        Ok(spec)
    }

    fn check_table_registration(&self) -> Result<()> {
        let modes = self.eigenpairs(self.mode_capacity().min(6))?;
        for b in self.boundary_points(4) {
            for m in &modes {
                let v = m.phi(&b).abs();
                if v > 1e-10 {
                    return Err(Error::parameter(format!(
                        "table domain: eigenfunction {} does not vanish on the boundary (|phi|={v:.2e})",
                        m.index
                    )));
                }
            }
        }
        for i in 0..modes.len() {
            for j in i..modes.len() {
                let inner = integrate_box(
                    &self.bounds(),
                    &[4; 3][..self.dim()],
                    &|x| modes[i].phi(x) * modes[j].phi(x),
                    1e-8,
                )?;
                let expect = if i == j { 1.0 } else { 0.0 };
                if (inner - expect).abs() > 1e-6 {
                    return Err(Error::parameter(format!(
                        "table domain: modes {} and {} are not orthonormal (<phi_i, phi_j> = {inner:.3e})",
                        modes[i].index, modes[j].index
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::Interval { .. } => 1,
            DomainKind::Box { sides } => sides.len(),
            DomainKind::Table { bounds, .. } => bounds.len(),
        }
    }

    /// Coordinate bounds of the (product) domain.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            DomainKind::Interval { length } => vec![(0.0, *length)],
            DomainKind::Box { sides } => sides.iter().map(|&s| (0.0, s)).collect(),
            DomainKind::Table { bounds, .. } => bounds.clone(),
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Number of modes available without further work (usize::MAX when the
    /// spectrum is generated on demand).
    pub fn mode_capacity(&self) -> usize {
        match &self.kind {
            DomainKind::Table { modes, .. } => modes.len(),
            _ => usize::MAX,
        }
    }

    pub fn is_interior(&self, x: &[f64]) -> bool {
        let b = self.bounds();
        x.len() == b.len() && x.iter().zip(&b).all(|(&xi, &(lo, hi))| lo < xi && xi < hi)
    }

    pub fn is_on_boundary(&self, x: &[f64], tol: f64) -> bool {
        let b = self.bounds();
        x.len() == b.len()
            && x.iter()
                .zip(&b)
                .all(|(&xi, &(lo, hi))| xi >= lo - tol && xi <= hi + tol)
            && x.iter()
                .zip(&b)
                .any(|(&xi, &(lo, hi))| (xi - lo).abs() <= tol || (xi - hi).abs() <= tol)
    }

    /// Deterministic sample of boundary points (face centers plus sweeps of
    /// one coordinate per face).
    pub fn boundary_points(&self, per_face: usize) -> Vec<Vec<f64>> {
        let b = self.bounds();
        let d = b.len();
        let mut out = Vec::new();
        let center: Vec<f64> = b.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        for face_dim in 0..d {
            for &wall in &[b[face_dim].0, b[face_dim].1] {
                let mut p = center.clone();
                p[face_dim] = wall;
                out.push(p.clone());
                if d > 1 {
                    let sweep = (face_dim + 1) % d;
                    for k in 1..=per_face {
                        let frac = k as f64 / (per_face + 1) as f64;
                        let mut q = p.clone();
                        q[sweep] = b[sweep].0 + frac * (b[sweep].1 - b[sweep].0);
                        out.push(q);
                    }
                } else {
                    // 1-d: the endpoints are the whole boundary.
                }
            }
        }
        out
    }

    /// First `count` Dirichlet eigenmodes, eigenvalues nondecreasing, ties
    /// broken by lexicographic multi-index.
    pub fn eigenpairs(&self, count: usize) -> Result<Vec<EigenMode>> {
        if count == 0 {
            return Err(Error::parameter("eigenpairs: count must be >= 1"));
        }
        match &self.kind {
            DomainKind::Interval { length } => {
                let lengths: Arc<[f64]> = Arc::from(vec![*length]);
                Ok((1..=count)
                    .map(|n| EigenMode::product(n, lengths.clone(), vec![n as u32]))
                    .collect())
            }
            DomainKind::Box { sides } => {
                let lengths: Arc<[f64]> = Arc::from(sides.clone());
                let d = sides.len();
                let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
                let mut bound = (std::f64::consts::PI / min_side).powi(2)
                    * ((count as f64).powf(2.0 / d as f64) + d as f64)
                    * 4.0;
                loop {
                    let mut indices: Vec<Vec<u32>> = Vec::new();
                    enumerate_indices(sides, bound, &mut vec![], &mut indices);
                    if indices.len() >= count {
                        let mut with_lambda: Vec<(f64, Vec<u32>)> = indices
                            .into_iter()
                            .map(|idx| (box_lambda(sides, &idx), idx))
                            .collect();
                        with_lambda.sort_by(|a, b| {
                            a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
                        });
                        return Ok(with_lambda
                            .into_iter()
                            .take(count)
                            .enumerate()
                            .map(|(i, (_, idx))| {
                                EigenMode::product(i + 1, lengths.clone(), idx)
                            })
                            .collect());
                    }
                    bound *= 2.0;
                }
            }
            DomainKind::Table { modes, .. } => {
                if modes.len() < count {
                    return Err(Error::Capacity(format!(
                        "table domain holds {} modes, {} requested",
                        modes.len(),
                        count
                    )));
                }
                Ok(modes
                    .iter()
                    .take(count)
                    .enumerate()
                    .map(|(i, m)| EigenMode {
                        index: i + 1,
                        lambda: m.lambda,
                        shape: ModeShape::Table { phi: m.phi.clone(), sup: m.sup_norm },
                    })
                    .collect())
            }
        }
    }
}

fn box_lambda(sides: &[f64], idx: &[u32]) -> f64 {
    idx.iter()
        .zip(sides)
        .map(|(&n, &l)| (n as f64 * std::f64::consts::PI / l).powi(2))
        .sum()
}

fn enumerate_indices(sides: &[f64], bound: f64, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let dim = prefix.len();
    if dim == sides.len() {
        out.push(prefix.clone());
        return;
    }
    let used: f64 = prefix
        .iter()
        .zip(sides)
        .map(|(&n, &l)| (n as f64 * std::f64::consts::PI / l).powi(2))
        .sum();
    let mut n = 1u32;
    loop {
        let lam = used + (n as f64 * std::f64::consts::PI / sides[dim]).powi(2);
        if lam > bound {
            break;
        }
        prefix.push(n);
        enumerate_indices(sides, bound, prefix, out);
        prefix.pop();
        n += 1;
    }
}

#[derive(Clone)]
enum ModeShape {
    Product { lengths: Arc<[f64]>, indices: Vec<u32> },
    Table { phi: PointFn, sup: f64 },
}

/// One Dirichlet eigenpair: index, eigenvalue, and eigenfunction evaluator.
#[derive(Clone)]
pub struct EigenMode {
    pub index: usize,
    pub lambda: f64,
    shape: ModeShape,
}

impl EigenMode {
    fn product(index: usize, lengths: Arc<[f64]>, indices: Vec<u32>) -> Self {
        let lambda = indices
            .iter()
            .zip(lengths.iter())
            .map(|(&n, &l)| (n as f64 * std::f64::consts::PI / l).powi(2))
            .sum();
        EigenMode { index, lambda, shape: ModeShape::Product { lengths, indices } }
    }

    /// Evaluate the eigenfunction. Product modes vanish exactly on the
    /// boundary (sin evaluated in units of pi).
    pub fn phi(&self, x: &[f64]) -> f64 {
        match &self.shape {
            ModeShape::Product { lengths, indices } => {
                let mut v = 1.0;
                for ((&n, &l), &xi) in indices.iter().zip(lengths.iter()).zip(x.iter()) {
                    // n * (xi / l), not (n xi) / l: the ratio is exact at
                    // the walls, so the boundary zeros stay exact for
                    // every mode index.
                    v *= (2.0 / l).sqrt() * sinpi(n as f64 * (xi / l));
                }
                v
            }
            ModeShape::Table { phi, .. } => phi(x),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.shape {
            ModeShape::Product { lengths, .. } => {
                lengths.iter().map(|&l| (2.0 / l).sqrt()).product()
            }
            ModeShape::Table { sup, .. } => *sup,
        }
    }

    /// Multi-index for product modes; used to pick oscillation-aware panel
    /// counts in the coefficient quadrature.
    fn oscillation(&self) -> Vec<usize> {
        match &self.shape {
            ModeShape::Product { indices, .. } => {
                indices.iter().map(|&n| n as usize).collect()
            }
            ModeShape::Table { .. } => vec![],
        }
    }
}

/// Initial datum: a pointwise evaluator plus a write-once cache of its
/// eigenfunction coefficients.
#[derive(Clone)]
pub struct InitialCondition {
    f: PointFn,
    cache: Arc<Mutex<Vec<f64>>>,
}

impl InitialCondition {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        InitialCondition { f: Arc::new(f), cache: Arc::new(Mutex::new(Vec::new())) }
    }

    pub fn from_arc(f: PointFn) -> Self {
        InitialCondition { f, cache: Arc::new(Mutex::new(Vec::new())) }
    }

    /// Zero datum.
    pub fn zero() -> Self {
        Self::new(|_| 0.0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// First `count` coefficients f_bar(n) = int_D phi_n f dx, computed by
    /// adaptive quadrature (absolute tolerance 1e-11 on intervals, 1e-8 on
    /// boxes) and cached; repeated calls only extend the cache.
    pub fn coefficients(&self, domain: &DomainSpec, count: usize) -> Result<Vec<f64>> {
        {
            let cache = self.cache.lock().expect("coefficient cache poisoned");
            if cache.len() >= count {
                return Ok(cache[..count].to_vec());
            }
        }
        let modes = domain.eigenpairs(count)?;
        let have = self.cache.lock().expect("coefficient cache poisoned").len();
        let mut fresh = Vec::new();
        for mode in modes.iter().skip(have) {
            fresh.push(mode_coefficient(domain, &self.f, mode)?);
        }
        let mut cache = self.cache.lock().expect("coefficient cache poisoned");
        if cache.len() == have {
            cache.extend_from_slice(&fresh);
        }
        Ok(cache[..count].to_vec())
    }
}

/// Coefficient of one mode, with oscillation-aware panels (one panel per
/// sign-change cell of the sine factor).
fn mode_coefficient(domain: &DomainSpec, f: &PointFn, mode: &EigenMode) -> Result<f64> {
    let bounds = domain.bounds();
    let dim = bounds.len();
    let abs_tol = if dim == 1 { 1e-11 } else { 1e-8 };
    let osc = mode.oscillation();
    let panels: Vec<usize> = (0..dim)
        .map(|i| osc.get(i).copied().unwrap_or(8).max(1))
        .collect();
    let phi = mode.clone();
    integrate_box(&bounds, &panels, &|x| phi.phi(x) * f(x), abs_tol)
}

/// Iterated adaptive quadrature over a product of intervals, splitting each
/// axis into `panels[k]` cells first. Rejects non-finite integrand samples.
pub(crate) fn integrate_box(
    bounds: &[(f64, f64)],
    panels: &[usize],
    f: &dyn Fn(&[f64]) -> f64,
    abs_tol: f64,
) -> Result<f64> {
    use std::cell::Cell;
    let poisoned: Cell<bool> = Cell::new(false);
    let value = integrate_box_inner(bounds, panels, f, abs_tol, &mut Vec::new(), &poisoned)?;
    if poisoned.get() {
        return Err(Error::Input(
            "integrand produced a non-finite sample".into(),
        ));
    }
    Ok(value)
}

#[allow(clippy::ptr_arg)]
fn integrate_box_inner(
    bounds: &[(f64, f64)],
    panels: &[usize],
    f: &dyn Fn(&[f64]) -> f64,
    abs_tol: f64,
    point: &mut Vec<f64>,
    poisoned: &std::cell::Cell<bool>,
) -> Result<f64> {
    let depth = point.len();
    let (lo, hi) = bounds[depth];
    let cells = panels.get(depth).copied().unwrap_or(1).max(1);
    let cell_tol = abs_tol / cells as f64;
    let mut total = 0.0;
    for c in 0..cells {
        let a = lo + (hi - lo) * c as f64 / cells as f64;
        let b = lo + (hi - lo) * (c + 1) as f64 / cells as f64;
        let point_cell = std::cell::RefCell::new(point.clone());
        let integrand = |x: f64| -> f64 {
            let mut p = point_cell.borrow_mut();
            p.push(x);
            let v = if p.len() == bounds.len() {
                let v = f(&p);
                if !v.is_finite() {
                    poisoned.set(true);
                    0.0
                } else {
                    v
                }
            } else {
                // Inner dimensions get a tighter tolerance so the error
                // budget is dominated by the outermost axis.
                match integrate_box_inner(bounds, panels, f, cell_tol * 0.1, &mut p, poisoned) {
                    Ok(v) => v,
                    Err(_) => {
                        poisoned.set(true);
                        0.0
                    }
                }
            };
            p.pop();
            v
        };
        let q = quad::integrate_with_budget(&integrand, a, b, cell_tol, 1e-12, 2000)?;
        total += q.value;
    }
    Ok(total)
}

/// Named built-in initial data, defined relative to the domain geometry.
pub fn named_initial_condition(name: &str, domain: &DomainSpec) -> Result<InitialCondition> {
    let bounds = domain.bounds();
    for &(lo, _) in &bounds {
        if lo != 0.0 {
            return Err(Error::parameter(
                "named initial conditions are defined for domains anchored at 0",
            ));
        }
    }
    let sides: Vec<f64> = bounds.iter().map(|&(_, hi)| hi).collect();
    match name {
        "sine" | "product-sine" => Ok(InitialCondition::new(move |x: &[f64]| {
            x.iter()
                .zip(&sides)
                .map(|(&xi, &l)| sinpi(xi / l))
                .product()
        })),
        "bump" => Ok(InitialCondition::new(move |x: &[f64]| {
            // C-infinity bump scaled to unit sup, vanishing with all
            // derivatives at the boundary.
            x.iter()
                .zip(&sides)
                .map(|(&xi, &l)| {
                    if xi <= 0.0 || xi >= l {
                        0.0
                    } else {
                        (4.0 / (l * l) - 1.0 / (xi * (l - xi))).exp()
                    }
                })
                .product()
        })),
        "polynomial" => Ok(InitialCondition::new(move |x: &[f64]| {
            x.iter().zip(&sides).map(|(&xi, &l)| xi * (l - xi)).product()
        })),
        other => Err(Error::parameter(format!(
            "unknown initial condition `{other}` (expected sine, product-sine, bump, or polynomial)"
        ))),
    }
}
