//! Persistence of sublevel filtrations: interval decompositions, Betti
//! curves, and lifetime sums.
//!
//! Deaths come from the standard column reduction of the filtration-ordered
//! boundary matrix over GF(2). Degree-zero classes and the creator/destroyer
//! split of edges are handled by a union-find sweep instead of reducing the
//! vertex-edge matrix, which matters at lattice scale.

use num_rational::BigRational;
use num_traits::Zero;

use rustc_hash::FxHashMap;

use crate::cube::ElementaryCube;
use crate::filtration::Filtration;

/// A birth/death pair. Essential classes (alive at the end of the
/// filtration) carry `death = 1.0` and count as present at every
/// `t >= birth`, including `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistenceInterval {
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
}

impl PersistenceInterval {
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    /// Whether the class is alive at `t`: `[birth, death)` for paired
    /// intervals, `[birth, 1]` for essential ones.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && (t < self.death || (self.essential && t <= 1.0))
    }
}

/// The degree-`q` persistence diagram of a filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    pub q: usize,
    pub intervals: Vec<PersistenceInterval>,
    /// Paired classes born and killed at the same value; they are dropped
    /// from `intervals` but tallied here for auditing.
    pub zero_length_discarded: u64,
}

impl PersistenceDiagram {
    /// Number of classes alive at `t`; equals the Betti number of the
    /// sublevel set at `t`.
    pub fn betti_at(&self, t: f64) -> u64 {
        self.intervals.iter().filter(|iv| iv.alive_at(t)).count() as u64
    }

    pub fn essential_count(&self) -> usize {
        self.intervals.iter().filter(|iv| iv.essential).count()
    }
}

/// Right-continuous integer step function `t -> beta_q(X(t))` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiCurve {
    pub q: usize,
    points: Vec<(f64, u64)>,
}

impl BettiCurve {
    /// Breakpoints `(t, value)` with strictly increasing `t`; the curve is 0
    /// before the first breakpoint and constant after the last.
    pub fn points(&self) -> &[(f64, u64)] {
        &self.points
    }

    pub fn value_at(&self, t: f64) -> u64 {
        match self.points.binary_search_by(|probe| probe.0.total_cmp(&t)) {
            Ok(i) => self.points[i].1,
            Err(0) => 0,
            Err(i) => self.points[i - 1].1,
        }
    }

    pub fn from_diagram(diagram: &PersistenceDiagram) -> BettiCurve {
        let mut events: Vec<(f64, i64)> = Vec::with_capacity(diagram.intervals.len() * 2);
        for iv in &diagram.intervals {
            events.push((iv.birth, 1));
            if !iv.essential {
                events.push((iv.death, -1));
            }
        }
        events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<(f64, u64)> = Vec::new();
        let mut level: i64 = 0;
        let mut i = 0;
        while i < events.len() {
            let t = events[i].0;
            let mut delta = 0;
            while i < events.len() && events[i].0 == t {
                delta += events[i].1;
                i += 1;
            }
            if delta != 0 {
                level += delta;
                debug_assert!(level >= 0);
                points.push((t, level as u64));
            }
        }
        BettiCurve { q: diagram.q, points }
    }

    /// Exact integral over `[0, 1]` in rational arithmetic. Every `f64`
    /// breakpoint is a dyadic rational, so no rounding occurs.
    pub fn integral(&self) -> BigRational {
        let mut acc = BigRational::zero();
        let one = BigRational::from_float(1.0).expect("finite");
        for (i, &(t, value)) in self.points.iter().enumerate() {
            let start = BigRational::from_float(t).expect("finite birth");
            let end = match self.points.get(i + 1) {
                Some(&(next, _)) => BigRational::from_float(next).expect("finite"),
                None => one.clone(),
            };
            acc += (end - start) * BigRational::from_integer(value.into());
        }
        acc
    }
}

/// Total lifetime of degree-`q` classes, kept as an exact rational.
#[derive(Clone, Debug, PartialEq)]
pub struct LifetimeSum {
    pub q: usize,
    pub value: BigRational,
}

impl LifetimeSum {
    pub fn to_f64(&self) -> f64 {
        let num = self.value.numer();
        let den = self.value.denom();
        // Dyadic denominators make this exact for realistic magnitudes.
        num_traits::ToPrimitive::to_f64(num).unwrap_or(f64::NAN)
            / num_traits::ToPrimitive::to_f64(den).unwrap_or(f64::NAN)
    }
}

/// Sum of interval lengths, exact.
pub fn lifetime_sum_from_diagram(diagram: &PersistenceDiagram) -> LifetimeSum {
    let mut acc = BigRational::zero();
    for iv in &diagram.intervals {
        let birth = BigRational::from_float(iv.birth).expect("finite birth");
        let death = BigRational::from_float(iv.death).expect("finite death");
        acc += death - birth;
    }
    LifetimeSum { q: diagram.q, value: acc }
}

/// Integral of the Betti curve over `[0, 1]`, exact. Agrees with
/// `lifetime_sum_from_diagram` identically.
pub fn lifetime_sum_from_curve(curve: &BettiCurve) -> LifetimeSum {
    LifetimeSum { q: curve.q, value: curve.integral() }
}

/// Computes the degree-`q` persistence diagram of a filtration.
pub fn persistence_diagram(filtration: &Filtration, q: usize) -> PersistenceDiagram {
    let d = filtration.window().dim();
    assert!(q < d, "persistence degree must satisfy 0 <= q < d");
    let reducer = Reducer::new(filtration);
    reducer.diagram(q)
}

/// Betti curve in degree `q`, derived from the interval decomposition.
pub fn betti_curve(filtration: &Filtration, q: usize) -> BettiCurve {
    BettiCurve::from_diagram(&persistence_diagram(filtration, q))
}

/// Per-dimension view of a filtration with local cell indices.
struct DimCells {
    births: Vec<f64>,
    index: FxHashMap<ElementaryCube, u32>,
}

struct Reducer<'a> {
    filtration: &'a Filtration,
    dims: Vec<DimCells>,
}

impl<'a> Reducer<'a> {
    fn new(filtration: &'a Filtration) -> Self {
        let d = filtration.window().dim();
        let mut dims: Vec<DimCells> = (0..=d)
            .map(|_| DimCells { births: Vec::new(), index: FxHashMap::default() })
            .collect();
        // Filtration order restricted to one dimension is still a valid
        // reduction order: pairings only relate consecutive dimensions.
        for cell in filtration.cells() {
            let slot = &mut dims[cell.cube.dim()];
            slot.index.insert(cell.cube, slot.births.len() as u32);
            slot.births.push(cell.birth);
        }
        Self { filtration, dims }
    }

    fn diagram(&self, q: usize) -> PersistenceDiagram {
        let mut intervals = Vec::new();
        let mut discarded = 0u64;

        // Which q-cells create a class, and when paired, when they die.
        let creators: Vec<bool> = match q {
            0 => vec![true; self.dims[0].births.len()],
            1 => self.edge_creators(),
            _ => self.creators_by_reduction(q),
        };

        if q == 0 {
            let (pairs, essential) = self.zero_dim_pairs();
            for (birth, death) in pairs {
                if birth == death {
                    discarded += 1;
                } else {
                    intervals.push(PersistenceInterval { birth, death, essential: false });
                }
            }
            for birth in essential {
                intervals.push(PersistenceInterval { birth, death: 1.0, essential: true });
            }
        } else {
            let mut paired = vec![false; self.dims[q].births.len()];
            for (low, col) in self.reduce_boundary(q + 1) {
                let birth = self.dims[q].births[low as usize];
                let death = self.dims[q + 1].births[col as usize];
                paired[low as usize] = true;
                if birth == death {
                    discarded += 1;
                } else {
                    intervals.push(PersistenceInterval { birth, death, essential: false });
                }
            }
            for (i, &creator) in creators.iter().enumerate() {
                if creator && !paired[i] {
                    intervals.push(PersistenceInterval {
                        birth: self.dims[q].births[i],
                        death: 1.0,
                        essential: true,
                    });
                }
            }
        }

        intervals.sort_unstable_by(|a, b| {
            a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death))
        });
        PersistenceDiagram { q, intervals, zero_length_discarded: discarded }
    }

    /// Union-find sweep over vertices and edges in filtration order.
    /// Returns merge pairs (elder rule) and the births of surviving
    /// components.
    fn zero_dim_pairs(&self) -> (Vec<(f64, f64)>, Vec<f64>) {
        let mut uf = UnionFind::new(&self.dims[0].births);
        for cell in self.filtration.cells() {
            if cell.cube.dim() != 1 {
                continue;
            }
            let (u, v) = self.edge_endpoints(&cell.cube);
            uf.union(u, v, cell.birth);
        }
        uf.finish()
    }

    /// An edge creates a 1-class exactly when its endpoints are already
    /// connected at the time it arrives.
    fn edge_creators(&self) -> Vec<bool> {
        let mut creators = vec![false; self.dims[1].births.len()];
        let mut uf = UnionFind::new(&self.dims[0].births);
        for cell in self.filtration.cells() {
            if cell.cube.dim() != 1 {
                continue;
            }
            let (u, v) = self.edge_endpoints(&cell.cube);
            if !uf.union(u, v, cell.birth) {
                creators[self.dims[1].index[&cell.cube] as usize] = true;
            }
        }
        creators
    }

    fn edge_endpoints(&self, edge: &ElementaryCube) -> (u32, u32) {
        let faces = edge.boundary_faces();
        debug_assert_eq!(faces.len(), 2);
        (self.dims[0].index[&faces[0]], self.dims[0].index[&faces[1]])
    }

    /// Creator flags for `q >= 2` via plain GF(2) column reduction of the
    /// degree-`q` boundary matrix: a column that reduces to zero creates.
    fn creators_by_reduction(&self, q: usize) -> Vec<bool> {
        let nq = self.dims[q].births.len();
        let mut creators = vec![false; nq];
        let columns = self.columns_of(q);
        let mut pivot_of: FxHashMap<u32, usize> = FxHashMap::default();
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(nq);
        for (j, mut col) in columns.into_iter().enumerate() {
            loop {
                match col.last() {
                    None => {
                        creators[j] = true;
                        break;
                    }
                    Some(&low) => match pivot_of.get(&low) {
                        None => {
                            pivot_of.insert(low, j);
                            break;
                        }
                        Some(&other) => col = xor_sorted(&col, &reduced[other]),
                    },
                }
            }
            reduced.push(col);
        }
        creators
    }

    /// Standard reduction of the degree-`k` boundary matrix; yields
    /// `(low row, column)` pairs for columns that do not reduce to zero.
    fn reduce_boundary(&self, k: usize) -> Vec<(u32, u32)> {
        let columns = self.columns_of(k);
        let mut pivot_of: FxHashMap<u32, usize> = FxHashMap::default();
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
        let mut pairs = Vec::new();
        for (j, mut col) in columns.into_iter().enumerate() {
            loop {
                match col.last() {
                    None => break,
                    Some(&low) => match pivot_of.get(&low) {
                        None => {
                            pivot_of.insert(low, j);
                            pairs.push((low, j as u32));
                            break;
                        }
                        Some(&other) => col = xor_sorted(&col, &reduced[other]),
                    },
                }
            }
            reduced.push(col);
        }
        pairs
    }

    /// Columns of the degree-`k` boundary matrix in filtration order, with
    /// rows as local `(k-1)`-cell indices sorted ascending.
    fn columns_of(&self, k: usize) -> Vec<Vec<u32>> {
        if k == 0 || k > self.filtration.window().dim() {
            return Vec::new();
        }
        let mut columns = vec![Vec::new(); self.dims[k].births.len()];
        for cell in self.filtration.cells() {
            if cell.cube.dim() != k {
                continue;
            }
            let j = self.dims[k].index[&cell.cube] as usize;
            let mut rows: Vec<u32> = cell
                .cube
                .boundary_faces()
                .iter()
                .map(|face| self.dims[k - 1].index[face])
                .collect();
            rows.sort_unstable();
            columns[j] = rows;
        }
        columns
    }
}

/// Symmetric difference of two ascending index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Union-find over vertices with the elder rule: on a merge, the component
/// whose creator was born later dies.
struct UnionFind {
    parent: Vec<u32>,
    // (birth, local index) of the eldest creator vertex of each root.
    elder: Vec<(f64, u32)>,
    pairs: Vec<(f64, f64)>,
}

impl UnionFind {
    fn new(births: &[f64]) -> Self {
        Self {
            parent: (0..births.len() as u32).collect(),
            elder: births.iter().copied().zip(0..births.len() as u32).collect(),
            pairs: Vec::new(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns true when the edge merged two components (a destroyer edge).
    fn union(&mut self, u: u32, v: u32, edge_birth: f64) -> bool {
        let ru = self.find(u);
        let rv = self.find(v);
        if ru == rv {
            return false;
        }
        let eu = self.elder[ru as usize];
        let ev = self.elder[rv as usize];
        // Lower (birth, index) survives.
        let (survivor, victim, victim_elder) =
            if (eu.0, eu.1) <= (ev.0, ev.1) { (ru, rv, ev) } else { (rv, ru, eu) };
        self.parent[victim as usize] = survivor;
        self.pairs.push((victim_elder.0, edge_birth));
        true
    }

    fn finish(mut self) -> (Vec<(f64, f64)>, Vec<f64>) {
        let mut essential = Vec::new();
        for x in 0..self.parent.len() as u32 {
            if self.find(x) == x {
                essential.push(self.elder[x as usize].0);
            }
        }
        (self.pairs, essential)
    }
}
