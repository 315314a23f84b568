//! Six-component complex vector fields sampled in frequency space.
//!
//! Components 0..3 hold the velocity transform, 3..6 the micro-rotation
//! transform. A field is stored either on a centered cubic lattice (FFT
//! ordering) or as tensor Gauss nodes over a list of axis-aligned cubes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{tensor_nodes, Box3, GaussLegendre};

pub type Amp6 = [Complex64; 6];

pub const ZERO_AMP: Amp6 = [Complex64::ZERO; 6];

/// Centered cubic frequency lattice in FFT storage order: along each axis the
/// slot m holds the signed index k = m for m < n/2 and k = m - n otherwise,
/// at frequency xi = k * h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGrid {
    pub n: usize,
    pub h: f64,
}

impl LatticeGrid {
    pub fn new(n: usize, h: f64) -> Self {
        assert!(n >= 2 && h > 0.0);
        LatticeGrid { n, h }
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable |xi| along an axis (the negative end).
    pub fn half_extent(&self) -> f64 {
        (self.n / 2) as f64 * self.h
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    #[inline]
    pub fn signed_index(&self, m: usize) -> i64 {
        if m < self.n.div_ceil(2) {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn index(&self, m: [usize; 3]) -> usize {
        (m[0] * self.n + m[1]) * self.n + m[2]
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let m2 = idx % self.n;
        let rest = idx / self.n;
        [rest / self.n, rest % self.n, m2]
    }

    #[inline]
    pub fn k_vec(&self, idx: usize) -> [i64; 3] {
        let m = self.multi_index(idx);
        [
            self.signed_index(m[0]),
            self.signed_index(m[1]),
            self.signed_index(m[2]),
        ]
    }

    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let k = self.k_vec(idx);
        [
            k[0] as f64 * self.h,
            k[1] as f64 * self.h,
            k[2] as f64 * self.h,
        ]
    }

    /// Storage index of -k, the Hermitian partner.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let m = self.multi_index(idx);
        let flip = |mi: usize| if mi == 0 { 0 } else { self.n - mi };
        self.index([flip(m[0]), flip(m[1]), flip(m[2])])
    }

    /// True when the slot is an unpaired Nyquist plane (even n only).
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        if self.n % 2 != 0 {
            return false;
        }
        let half = (self.n / 2) as i64;
        self.k_vec(idx).iter().any(|&k| k == -half)
    }
}

/// An axis-aligned cube support in frequency space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    pub center: [f64; 3],
    pub half_side: f64,
}

impl Cube {
    pub fn as_box(&self) -> Box3 {
        Box3::cube(self.center, self.half_side)
    }
}

/// Tensor Gauss quadrature representation over disjoint cubes. Node layout
/// is cube-major, then lexicographic over the (sub-panel, Gauss index) grid
/// per axis; the layout is a pure function of the geometry and orders.
#[derive(Debug, Clone)]
pub struct CubeQuadSet {
    pub cubes: Vec<Cube>,
    pub gauss_order: usize,
    pub panels: usize,
    nodes: Vec<([f64; 3], f64)>,
}

impl CubeQuadSet {
    pub fn new(cubes: Vec<Cube>, gauss_order: usize, panels: usize) -> Self {
        let rule = GaussLegendre::new(gauss_order);
        let mut nodes = Vec::new();
        for cube in &cubes {
            nodes.extend(tensor_nodes(&cube.as_box(), &rule, panels));
        }
        CubeQuadSet {
            cubes,
            gauss_order,
            panels,
            nodes,
        }
    }

    pub fn nodes(&self) -> &[([f64; 3], f64)] {
        &self.nodes
    }

    pub fn nodes_per_cube(&self) -> usize {
        let per_axis = self.gauss_order * self.panels.max(1);
        per_axis * per_axis * per_axis
    }

    /// Index of the node at the mirrored position -xi, when the cube list
    /// contains the mirrored cube.
    pub fn mirror_index(&self, idx: usize) -> Option<usize> {
        let per_cube = self.nodes_per_cube();
        let cube_i = idx / per_cube;
        let local = idx % per_cube;
        let c = &self.cubes[cube_i];
        let target = [-c.center[0], -c.center[1], -c.center[2]];
        let mirror_cube = self.cubes.iter().position(|d| {
            d.half_side == c.half_side
                && (0..3).all(|a| (d.center[a] - target[a]).abs() < 1e-12)
        })?;
        let per_axis = self.gauss_order * self.panels.max(1);
        let i2 = local % per_axis;
        let rest = local / per_axis;
        let (i0, i1) = (rest / per_axis, rest % per_axis);
        let rev = |i: usize| per_axis - 1 - i;
        Some(mirror_cube * per_cube + (rev(i0) * per_axis + rev(i1)) * per_axis + rev(i2))
    }
}

#[derive(Debug, Clone)]
pub enum Representation {
    Lattice(LatticeGrid),
    CubeQuad(CubeQuadSet),
}

/// Frequency-space field: one 6-vector of complex amplitudes per sample.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub rep: Representation,
    pub values: Vec<Amp6>,
    /// Declared real-valued in physical space (Hermitian symmetry expected).
    pub real_symmetric: bool,
    /// Declared divergence-free in the velocity components.
    pub div_free: bool,
}

impl SpectralField {
    pub fn zeros_lattice(grid: LatticeGrid) -> Self {
        SpectralField {
            values: vec![ZERO_AMP; grid.len()],
            rep: Representation::Lattice(grid),
            real_symmetric: false,
            div_free: false,
        }
    }

    pub fn from_fn_lattice(grid: LatticeGrid, mut f: impl FnMut([f64; 3]) -> Amp6) -> Self {
        let mut field = Self::zeros_lattice(grid);
        for idx in 0..grid.len() {
            field.values[idx] = f(grid.xi(idx));
        }
        field
    }

    pub fn from_fn_cubes(set: CubeQuadSet, mut f: impl FnMut([f64; 3]) -> Amp6) -> Self {
        let values = set.nodes().iter().map(|&(xi, _)| f(xi)).collect();
        SpectralField {
            rep: Representation::CubeQuad(set),
            values,
            real_symmetric: false,
            div_free: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lattice(&self) -> Result<LatticeGrid> {
        match &self.rep {
            Representation::Lattice(g) => Ok(*g),
            Representation::CubeQuad(_) => Err(Error::UnsupportedRepresentation {
                expected: "lattice",
            }),
        }
    }

    pub fn cube_quad(&self) -> Result<&CubeQuadSet> {
        match &self.rep {
            Representation::CubeQuad(s) => Ok(s),
            Representation::Lattice(_) => Err(Error::UnsupportedRepresentation {
                expected: "cube-quadrature",
            }),
        }
    }

    /// Frequencies in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let rep = &self.rep;
        (0..self.len()).map(move |idx| match rep {
            Representation::Lattice(g) => g.xi(idx),
            Representation::CubeQuad(s) => s.nodes()[idx].0,
        })
    }

    /// Quadrature weight of sample `idx` for L^p integrals over frequency.
    #[inline]
    pub fn weight(&self, idx: usize) -> f64 {
        match &self.rep {
            Representation::Lattice(g) => g.cell_volume(),
            Representation::CubeQuad(s) => s.nodes()[idx].1,
        }
    }

    /// Euclidean magnitude of the stored 6-vector.
    #[inline]
    pub fn amp_norm(&self, idx: usize) -> f64 {
        self.values[idx]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_amp(&self) -> f64 {
        (0..self.len()).fold(0.0, |m, i| m.max(self.amp_norm(i)))
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            for x in v.iter_mut() {
                *x *= c;
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// Adds `c * other`; representations must match sample-for-sample.
    pub fn axpy(&mut self, c: Complex64, other: &SpectralField) {
        assert_eq!(self.len(), other.len(), "field layouts differ");
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            for (x, y) in v.iter_mut().zip(w) {
                *x += c * y;
            }
        }
    }

    /// Max deviation from value(-xi) = conj(value(xi)), or None when the
    /// representation has no mirror sample for some node.
    pub fn hermitian_residual(&self) -> Option<f64> {
        let mut worst = 0.0f64;
        match &self.rep {
            Representation::Lattice(g) => {
                for idx in 0..self.len() {
                    let other = g.conjugate_index(idx);
                    for c in 0..6 {
                        let d = self.values[idx][c] - self.values[other][c].conj();
                        worst = worst.max(d.norm());
                    }
                }
                Some(worst)
            }
            Representation::CubeQuad(s) => {
                for idx in 0..self.len() {
                    let other = s.mirror_index(idx)?;
                    for c in 0..6 {
                        let d = self.values[idx][c] - self.values[other][c].conj();
                        worst = worst.max(d.norm());
                    }
                }
                Some(worst)
            }
        }
    }

    /// Max |xi . u(xi)| over stored samples (not normalized).
    pub fn divergence_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (idx, xi) in self.frequencies().enumerate() {
            let v = &self.values[idx];
            let div = xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2];
            worst = worst.max(div.norm());
        }
        worst
    }

    /// Dyadic dilation: replaces f(xi) by f(2^-k xi) * 2^(-3k), realized
    /// exactly by scaling the sample geometry.
    pub fn dilate(&self, k: i32) -> Self {
        let s = (k as f64).exp2();
        let amp = (-3.0 * k as f64).exp2();
        let rep = match &self.rep {
            Representation::Lattice(g) => Representation::Lattice(LatticeGrid::new(g.n, g.h * s)),
            Representation::CubeQuad(set) => {
                let cubes = set
                    .cubes
                    .iter()
                    .map(|c| Cube {
                        center: [c.center[0] * s, c.center[1] * s, c.center[2] * s],
                        half_side: c.half_side * s,
                    })
                    .collect();
                Representation::CubeQuad(CubeQuadSet::new(cubes, set.gauss_order, set.panels))
            }
        };
        let values = self
            .values
            .iter()
            .map(|v| {
                let mut w = *v;
                for x in w.iter_mut() {
                    *x *= amp;
                }
                w
            })
            .collect();
        SpectralField {
            rep,
            values,
            real_symmetric: self.real_symmetric,
            div_free: self.div_free,
        }
    }
}
