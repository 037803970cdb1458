//! Cut-cell measures of grid regions: volume, relative perimeter,
//! wetting area, anisotropic perimeter, and the isoperimetric check.
//!
//! Cells are split into Kuhn simplices (2 triangles, 6 tetrahedra) and
//! every quantity is computed exactly for the simplexwise-linear
//! interpolant of the level function: volumes are second-order accurate,
//! reconstructed interfaces first-order. The interface is the zero set
//! inside the cone; the wall face of a half-space grid is measured
//! separately as the wetting area.

use crate::cone::ConeKind;
use crate::error::{input_err, Error, Result};
use crate::gauge::{wulff_sector_volume, GaugeSpec, VolumeMethod};
use crate::grid::RegionSpec;

pub(crate) mod clip {
    //! Clipping of a linear function's negative part on a simplex.
    //! Local coordinates throughout; callers scale by powers of the grid
    //! spacing.

    /// Negative-side area/volume with centroid, plus the zero-set facet.
    #[derive(Debug, Clone, Copy)]
    pub struct TriClip {
        pub area: f64,
        pub centroid: [f64; 2],
        pub segment: Option<[[f64; 2]; 2]>,
    }

    #[derive(Debug, Clone, Copy)]
    pub struct TetClip {
        pub volume: f64,
        pub centroid: [f64; 3],
        /// Up to two triangles of the zero set.
        pub facets: [Option<[[f64; 3]; 3]>; 2],
    }

    fn lerp2(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
        [
            a[0] + t * (b[0] - a[0]),
            a[1] + t * (b[1] - a[1]),
            a[2] + t * (b[2] - a[2]),
        ]
    }

    /// Crossing parameter on an edge whose endpoint values have opposite
    /// strict/non-strict signs (`va < 0 <= vb` or vice versa).
    fn cross_t(va: f64, vb: f64) -> f64 {
        va / (va - vb)
    }

    fn tri_area(p: &[[f64; 2]; 3]) -> f64 {
        0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
            .abs()
    }

    fn tri_centroid(p: &[[f64; 2]; 3]) -> [f64; 2] {
        [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
        ]
    }

    fn tet_volume(p: &[[f64; 3]; 4]) -> f64 {
        let a = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
        let b = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
        let c = [p[3][0] - p[0][0], p[3][1] - p[0][1], p[3][2] - p[0][2]];
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        det.abs() / 6.0
    }

    fn tet_centroid(p: &[[f64; 3]; 4]) -> [f64; 3] {
        let mut c = [0.0; 3];
        for q in p {
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci += qi * 0.25;
            }
        }
        c
    }

    /// Negative part of the linear interpolant on a triangle.
    pub fn clip_tri(p: &[[f64; 2]; 3], v: &[f64; 3]) -> TriClip {
        let neg: Vec<usize> = (0..3).filter(|&i| v[i] < 0.0).collect();
        match neg.len() {
            0 => TriClip {
                area: 0.0,
                centroid: [0.0; 2],
                segment: None,
            },
            3 => TriClip {
                area: tri_area(p),
                centroid: tri_centroid(p),
                segment: None,
            },
            1 => {
                let a = neg[0];
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                let qb = lerp2(p[a], p[b], cross_t(v[a], v[b]));
                let qc = lerp2(p[a], p[c], cross_t(v[a], v[c]));
                let tri = [p[a], qb, qc];
                TriClip {
                    area: tri_area(&tri),
                    centroid: tri_centroid(&tri),
                    segment: Some([qb, qc]),
                }
            }
            _ => {
                // two negative vertices: quad a-b-q_bc-q_ac
                let (a, b) = (neg[0], neg[1]);
                let c = 3 - a - b;
                let qac = lerp2(p[a], p[c], cross_t(v[a], v[c]));
                let qbc = lerp2(p[b], p[c], cross_t(v[b], v[c]));
                let t1 = [p[a], p[b], qbc];
                let t2 = [p[a], qbc, qac];
                let (a1, a2) = (tri_area(&t1), tri_area(&t2));
                let (c1, c2) = (tri_centroid(&t1), tri_centroid(&t2));
                let area = a1 + a2;
                let centroid = if area > 0.0 {
                    [
                        (a1 * c1[0] + a2 * c2[0]) / area,
                        (a1 * c1[1] + a2 * c2[1]) / area,
                    ]
                } else {
                    [0.0; 2]
                };
                TriClip {
                    area,
                    centroid,
                    segment: Some([qac, qbc]),
                }
            }
        }
    }

    /// Negative part of the linear interpolant on a tetrahedron.
    pub fn clip_tet(p: &[[f64; 3]; 4], v: &[f64; 4]) -> TetClip {
        let neg: Vec<usize> = (0..4).filter(|&i| v[i] < 0.0).collect();
        match neg.len() {
            0 => TetClip {
                volume: 0.0,
                centroid: [0.0; 3],
                facets: [None, None],
            },
            4 => TetClip {
                volume: tet_volume(p),
                centroid: tet_centroid(p),
                facets: [None, None],
            },
            1 => {
                let (tet, facet) = corner_tet(p, v, neg[0]);
                TetClip {
                    volume: tet_volume(&tet),
                    centroid: tet_centroid(&tet),
                    facets: [Some(facet), None],
                }
            }
            3 => {
                // complement of the positive corner
                let pos = (0..4).find(|&i| v[i] >= 0.0).unwrap();
                let (tet, facet) = corner_tet(p, v, pos);
                let full = tet_volume(p);
                let cut = tet_volume(&tet);
                let volume = (full - cut).max(0.0);
                let cf = tet_centroid(p);
                let cc = tet_centroid(&tet);
                let centroid = if volume > 0.0 {
                    [
                        (full * cf[0] - cut * cc[0]) / volume,
                        (full * cf[1] - cut * cc[1]) / volume,
                        (full * cf[2] - cut * cc[2]) / volume,
                    ]
                } else {
                    [0.0; 3]
                };
                TetClip {
                    volume,
                    centroid,
                    facets: [Some(facet), None],
                }
            }
            _ => {
                // wedge between two negative and two positive vertices
                let (a, b) = (neg[0], neg[1]);
                let pos: Vec<usize> = (0..4).filter(|&i| v[i] >= 0.0).collect();
                let (c, d) = (pos[0], pos[1]);
                let qac = lerp3(p[a], p[c], cross_t(v[a], v[c]));
                let qad = lerp3(p[a], p[d], cross_t(v[a], v[d]));
                let qbc = lerp3(p[b], p[c], cross_t(v[b], v[c]));
                let qbd = lerp3(p[b], p[d], cross_t(v[b], v[d]));
                // prism (a, qac, qad | b, qbc, qbd)
                let tets = [
                    [p[a], qac, qad, p[b]],
                    [qac, qad, p[b], qbc],
                    [qad, p[b], qbc, qbd],
                ];
                let mut volume = 0.0;
                let mut centroid = [0.0; 3];
                for t in &tets {
                    let w = tet_volume(t);
                    let tc = tet_centroid(t);
                    volume += w;
                    for (ci, tci) in centroid.iter_mut().zip(&tc) {
                        *ci += w * tci;
                    }
                }
                if volume > 0.0 {
                    for ci in centroid.iter_mut() {
                        *ci /= volume;
                    }
                }
                TetClip {
                    volume,
                    centroid,
                    facets: [Some([qac, qad, qbd]), Some([qac, qbd, qbc])],
                }
            }
        }
    }

    /// Sub-tet cut off at vertex `a`, with the cut triangle.
    fn corner_tet(p: &[[f64; 3]; 4], v: &[f64; 4], a: usize) -> ([[f64; 3]; 4], [[f64; 3]; 3]) {
        let others: Vec<usize> = (0..4).filter(|&i| i != a).collect();
        let q: Vec<[f64; 3]> = others
            .iter()
            .map(|&j| lerp3(p[a], p[j], cross_t(v[a], v[j])))
            .collect();
        ([p[a], q[0], q[1], q[2]], [q[0], q[1], q[2]])
    }

    /// Vertex of a sub-simplex of the negative part: either an original
    /// simplex vertex or the zero crossing of an edge.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum VRef {
        Node(usize),
        Cross(usize, usize),
    }

    /// Decomposition of the negative part of a triangle into
    /// sub-triangles over the vertex references.
    pub fn decompose_tri_neg(v: &[f64; 3]) -> Vec<[VRef; 3]> {
        use VRef::*;
        let neg: Vec<usize> = (0..3).filter(|&i| v[i] < 0.0).collect();
        match neg.len() {
            0 => vec![],
            3 => vec![[Node(0), Node(1), Node(2)]],
            1 => {
                let a = neg[0];
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                vec![[Node(a), Cross(a, b), Cross(a, c)]]
            }
            _ => {
                let (a, b) = (neg[0], neg[1]);
                let c = 3 - a - b;
                vec![
                    [Node(a), Node(b), Cross(b, c)],
                    [Node(a), Cross(b, c), Cross(a, c)],
                ]
            }
        }
    }

    /// Decomposition of the negative part of a tetrahedron into
    /// sub-tetrahedra. Prism-shaped parts use the standard 3-tet split.
    pub fn decompose_tet_neg(v: &[f64; 4]) -> Vec<[VRef; 4]> {
        use VRef::*;
        let neg: Vec<usize> = (0..4).filter(|&i| v[i] < 0.0).collect();
        match neg.len() {
            0 => vec![],
            4 => vec![[Node(0), Node(1), Node(2), Node(3)]],
            1 => {
                let a = neg[0];
                let rest: Vec<usize> = (0..4).filter(|&i| i != a).collect();
                vec![[
                    Node(a),
                    Cross(a, rest[0]),
                    Cross(a, rest[1]),
                    Cross(a, rest[2]),
                ]]
            }
            3 => {
                // prism between the negative face and the cut triangle
                let d = (0..4).find(|&i| v[i] >= 0.0).unwrap();
                let rest: Vec<usize> = (0..4).filter(|&i| i != d).collect();
                let (a, b, c) = (rest[0], rest[1], rest[2]);
                let (za, zb, zc) = (Cross(a, d), Cross(b, d), Cross(c, d));
                vec![
                    [Node(a), Node(b), Node(c), za],
                    [Node(b), Node(c), za, zb],
                    [Node(c), za, zb, zc],
                ]
            }
            _ => {
                // wedge between two negative vertices and the cut quad
                let (a, b) = (neg[0], neg[1]);
                let pos: Vec<usize> = (0..4).filter(|&i| v[i] >= 0.0).collect();
                let (c, d) = (pos[0], pos[1]);
                let (v0, v1, v2) = (Node(a), Cross(a, c), Cross(a, d));
                let (v3, v4, v5) = (Node(b), Cross(b, c), Cross(b, d));
                vec![[v0, v1, v2, v3], [v1, v2, v3, v4], [v2, v3, v4, v5]]
            }
        }
    }

    pub fn tri_facet_area(f: &[[f64; 3]; 3]) -> f64 {
        let u = [f[1][0] - f[0][0], f[1][1] - f[0][1], f[1][2] - f[0][2]];
        let w = [f[2][0] - f[0][0], f[2][1] - f[0][1], f[2][2] - f[0][2]];
        let c = [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ];
        0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }

    pub fn seg_length(s: &[[f64; 2]; 2]) -> f64 {
        let dx = s[1][0] - s[0][0];
        let dy = s[1][1] - s[0][1];
        (dx * dx + dy * dy).sqrt()
    }
}

/// Kuhn triangles of the unit square: vertex index paths over the corner
/// array [v00, v10, v01, v11].
pub(crate) const TRIS_2D: [[usize; 3]; 2] = [[0, 1, 3], [0, 2, 3]];
pub(crate) const TRI_COORDS: [[[f64; 2]; 3]; 2] = [
    [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]],
    [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
];

/// Axis permutations of the six Kuhn tetrahedra of the unit cube.
const PERMS_3D: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn tet_corner_indices(perm: &[usize; 3]) -> [usize; 4] {
    let mut out = [0usize; 4];
    let mut bits = 0usize;
    for (k, &axis) in perm.iter().enumerate() {
        bits |= 1 << axis;
        out[k + 1] = bits;
    }
    out
}

fn tet_coords(perm: &[usize; 3]) -> [[f64; 3]; 4] {
    let idx = tet_corner_indices(perm);
    let mut out = [[0.0; 3]; 4];
    for (k, bits) in idx.iter().enumerate() {
        for axis in 0..3 {
            out[k][axis] = ((bits >> axis) & 1) as f64;
        }
    }
    out
}

/// The six Kuhn tetrahedra of the unit cube: corner indices into the
/// [v000, v100, v010, v110, v001, v101, v011, v111] array, local vertex
/// coordinates, and the axis permutation of the vertex path.
pub(crate) fn kuhn_tets() -> &'static [([usize; 4], [[f64; 3]; 4], [usize; 3]); 6] {
    use std::sync::OnceLock;
    static TETS: OnceLock<[([usize; 4], [[f64; 3]; 4], [usize; 3]); 6]> = OnceLock::new();
    TETS.get_or_init(|| {
        let mut out = [([0; 4], [[0.0; 3]; 4], [0; 3]); 6];
        for (slot, perm) in out.iter_mut().zip(&PERMS_3D) {
            *slot = (tet_corner_indices(perm), tet_coords(perm), *perm);
        }
        out
    })
}

/// Aggregate measures of a region.
#[derive(Debug, Clone, Copy)]
pub struct RegionMeasures {
    pub volume: f64,
    pub perimeter: f64,
    pub wetting: f64,
    pub anisotropic: Option<f64>,
}

/// Volume of the region's sublevel set inside the cone.
pub fn grid_volume(region: &RegionSpec) -> Result<f64> {
    Ok(region_measures(region, None)?.volume)
}

/// Area of the reconstructed interface inside the cone (the wall
/// excluded).
pub fn relative_perimeter(region: &RegionSpec) -> Result<f64> {
    let phi = region.phi();
    if phi.iter().all(|&v| v == 0.0) {
        return input_err("degenerate level function: identically zero");
    }
    Ok(region_measures(region, None)?.perimeter)
}

/// Measure of the region's trace on the wall. Zero for a full-space
/// grid, where there is no wall.
pub fn wetting_perimeter(region: &RegionSpec) -> Result<f64> {
    Ok(region_measures(region, None)?.wetting)
}

/// Interface integral of the gauge of the outward normal.
pub fn anisotropic_perimeter(region: &RegionSpec, gauge: &GaugeSpec) -> Result<f64> {
    let phi = region.phi();
    if phi.iter().all(|&v| v == 0.0) {
        return input_err("degenerate level function: identically zero");
    }
    let m = region_measures(region, Some(gauge))?;
    Ok(m.anisotropic.unwrap())
}

/// One sweep computing volume, perimeter, wetting area, and (when a
/// gauge is supplied) the anisotropic perimeter.
pub fn region_measures(region: &RegionSpec, gauge: Option<&GaugeSpec>) -> Result<RegionMeasures> {
    let grid = region.grid();
    if let Some(g) = gauge {
        if g.dim() != grid.dim() {
            return input_err(format!(
                "gauge dimension {} differs from grid dimension {}",
                g.dim(),
                grid.dim()
            ));
        }
    }
    match grid.dim() {
        2 => measures_2d(region, gauge),
        3 => measures_3d(region, gauge),
        d => Err(Error::Unsupported(format!("dim {d} grids"))),
    }
}

fn measures_2d(region: &RegionSpec, gauge: Option<&GaugeSpec>) -> Result<RegionMeasures> {
    let grid = region.grid();
    let phi = region.phi();
    let h = grid.spacing();
    let nx = grid.nodes_along(0);
    let ny = grid.nodes_along(1);
    let mut volume = 0.0;
    let mut perimeter = 0.0;
    let mut aniso = 0.0;
    let mut fnu = [0.0f64; 2];
    for iy in 0..ny - 1 {
        let wall_row = iy == 0 && grid.cone().kind == ConeKind::HalfSpace;
        for ix in 0..nx - 1 {
            let base = iy * nx + ix;
            let cv = [phi[base], phi[base + 1], phi[base + nx], phi[base + nx + 1]];
            let cmin = cv.iter().cloned().fold(f64::INFINITY, f64::min);
            let cmax = cv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if cmin >= 0.0 {
                continue;
            }
            if cmax < 0.0 {
                volume += h * h;
                continue;
            }
            for (tri, coords) in TRIS_2D.iter().zip(&TRI_COORDS) {
                let v = [cv[tri[0]], cv[tri[1]], cv[tri[2]]];
                let c = clip::clip_tri(coords, &v);
                volume += c.area * h * h;
                if let Some(seg) = c.segment {
                    // drop zero-set pieces that lie in the wall itself
                    if wall_row && seg[0][1] <= 0.0 && seg[1][1] <= 0.0 {
                        continue;
                    }
                    let len = clip::seg_length(&seg) * h;
                    perimeter += len;
                    if let Some(g) = gauge {
                        // gradient of the Kuhn interpolant: successive
                        // differences along the vertex path
                        let grad = if coords[1][0] == 1.0 {
                            [v[1] - v[0], v[2] - v[1]]
                        } else {
                            [v[2] - v[1], v[1] - v[0]]
                        };
                        let gn = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
                        fnu[0] = grad[0] / gn;
                        fnu[1] = grad[1] / gn;
                        aniso += g.eval_unchecked(&fnu) * len;
                    }
                }
            }
        }
    }
    let wetting = wetting_2d(region);
    Ok(RegionMeasures {
        volume,
        perimeter,
        wetting,
        anisotropic: gauge.map(|_| aniso),
    })
}

fn wetting_2d(region: &RegionSpec) -> f64 {
    let grid = region.grid();
    if grid.cone().kind != ConeKind::HalfSpace {
        return 0.0;
    }
    let phi = region.phi();
    let h = grid.spacing();
    let nx = grid.nodes_along(0);
    let mut wet = 0.0;
    for ix in 0..nx - 1 {
        let (a, b) = (phi[ix], phi[ix + 1]);
        wet += h * negative_fraction(a, b);
    }
    wet
}

fn negative_fraction(a: f64, b: f64) -> f64 {
    match (a < 0.0, b < 0.0) {
        (true, true) => 1.0,
        (true, false) => a / (a - b),
        (false, true) => b / (b - a),
        (false, false) => 0.0,
    }
}

fn measures_3d(region: &RegionSpec, gauge: Option<&GaugeSpec>) -> Result<RegionMeasures> {
    let grid = region.grid();
    let phi = region.phi();
    let h = grid.spacing();
    let nx = grid.nodes_along(0);
    let ny = grid.nodes_along(1);
    let nz = grid.nodes_along(2);
    let tets: Vec<([usize; 4], [[f64; 3]; 4], [usize; 3])> = PERMS_3D
        .iter()
        .map(|perm| (tet_corner_indices(perm), tet_coords(perm), *perm))
        .collect();
    let mut volume = 0.0;
    let mut perimeter = 0.0;
    let mut aniso = 0.0;
    let mut fnu = [0.0f64; 3];
    for iz in 0..nz - 1 {
        let wall_slab = iz == 0 && grid.cone().kind == ConeKind::HalfSpace;
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let base = (iz * ny + iy) * nx + ix;
                let cv = [
                    phi[base],
                    phi[base + 1],
                    phi[base + nx],
                    phi[base + nx + 1],
                    phi[base + nx * ny],
                    phi[base + nx * ny + 1],
                    phi[base + nx * ny + nx],
                    phi[base + nx * ny + nx + 1],
                ];
                let cmin = cv.iter().cloned().fold(f64::INFINITY, f64::min);
                let cmax = cv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if cmin >= 0.0 {
                    continue;
                }
                if cmax < 0.0 {
                    volume += h * h * h;
                    continue;
                }
                for (corners, coords, perm) in &tets {
                    let v = [cv[corners[0]], cv[corners[1]], cv[corners[2]], cv[corners[3]]];
                    let c = clip::clip_tet(coords, &v);
                    volume += c.volume * h * h * h;
                    if c.facets[0].is_none() {
                        continue;
                    }
                    let mut grad = [0.0f64; 3];
                    grad[perm[0]] = v[1] - v[0];
                    grad[perm[1]] = v[2] - v[1];
                    grad[perm[2]] = v[3] - v[2];
                    let gn = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
                    let fval = gauge.map(|g| {
                        fnu[0] = grad[0] / gn;
                        fnu[1] = grad[1] / gn;
                        fnu[2] = grad[2] / gn;
                        g.eval_unchecked(&fnu)
                    });
                    for facet in c.facets.iter().flatten() {
                        if wall_slab
                            && facet[0][2] <= 0.0
                            && facet[1][2] <= 0.0
                            && facet[2][2] <= 0.0
                        {
                            continue;
                        }
                        let area = clip::tri_facet_area(facet) * h * h;
                        perimeter += area;
                        if let Some(f) = fval {
                            aniso += f * area;
                        }
                    }
                }
            }
        }
    }
    let wetting = wetting_3d(region);
    Ok(RegionMeasures {
        volume,
        perimeter,
        wetting,
        anisotropic: gauge.map(|_| aniso),
    })
}

fn wetting_3d(region: &RegionSpec) -> f64 {
    let grid = region.grid();
    if grid.cone().kind != ConeKind::HalfSpace {
        return 0.0;
    }
    let phi = region.phi();
    let h = grid.spacing();
    let nx = grid.nodes_along(0);
    let ny = grid.nodes_along(1);
    let mut wet = 0.0;
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let base = iy * nx + ix;
            let cv = [phi[base], phi[base + 1], phi[base + nx], phi[base + nx + 1]];
            if cv.iter().all(|&v| v >= 0.0) {
                continue;
            }
            if cv.iter().all(|&v| v < 0.0) {
                wet += h * h;
                continue;
            }
            for (tri, coords) in TRIS_2D.iter().zip(&TRI_COORDS) {
                let v = [cv[tri[0]], cv[tri[1]], cv[tri[2]]];
                wet += clip::clip_tri(coords, &v).area * h * h;
            }
        }
    }
    wet
}

/// Result of the relative isoperimetric check.
#[derive(Debug, Clone, Copy)]
pub struct IsoperimetricReport {
    /// Anisotropic perimeter over volume^((n-1)/n).
    pub ratio: f64,
    /// Sharp constant n * kappa^(1/n).
    pub bound: f64,
    /// ratio - bound; negative values beyond the discretization
    /// tolerance indicate a violation.
    pub slack: f64,
    pub volume: f64,
    pub perimeter_f: f64,
    pub kappa: f64,
}

/// Checks the relative isoperimetric inequality for the region.
pub fn isoperimetric_check(region: &RegionSpec, gauge: &GaugeSpec) -> Result<IsoperimetricReport> {
    let n = region.grid().dim();
    let m = region_measures(region, Some(gauge))?;
    if m.volume <= 0.0 {
        return input_err("empty region in isoperimetric check");
    }
    let sc = wulff_sector_volume(gauge, &region.grid().cone(), VolumeMethod::Analytic)?;
    let nf = n as f64;
    let ratio = m.anisotropic.unwrap() / m.volume.powf((nf - 1.0) / nf);
    let bound = nf * sc.kappa.powf(1.0 / nf);
    Ok(IsoperimetricReport {
        ratio,
        bound,
        slack: ratio - bound,
        volume: m.volume,
        perimeter_f: m.anisotropic.unwrap(),
        kappa: sc.kappa,
    })
}
