//! Construction, validation and text I/O of the 2D vertical-slice mesh.
//!
//! The fluid domain is the rectangle `[-L, L] × [-h0, 0]` minus the
//! half-submerged circular body `x² + z² ≤ r², z ≤ 0`. Boundary vertices are
//! placed explicitly with graded spacing (`≤ h/2` on the body and control
//! boundaries, `≤ h` elsewhere), constrained in a Delaunay triangulation and
//! the interior is filled by Delaunay refinement with a uniform area bound.
//! Boundary edges therefore coincide exactly with the placed chain segments,
//! which pins tags and outward normals by construction.

use spade::{
    ConstrainedDelaunayTriangulation, HasPosition, InsertionError, Point2, RefinementParameters,
    Triangulation,
};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("meshing failure: {0}")]
    MeshingFailure(String),
    #[error("mesh file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Boundary classification of the slice domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Free air-water interface Γ_f.
    FreeSurface,
    /// Controlled air-water interface Γ_c.
    ControlSurface,
    /// Rigid sea bottom Γ_r.
    Bottom,
    /// Wetted body surface Γ_g.
    Body,
    /// Artificial truncation lines Γ_e.
    Truncation,
}

impl BoundaryTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryTag::FreeSurface => "FreeSurface",
            BoundaryTag::ControlSurface => "ControlSurface",
            BoundaryTag::Bottom => "Bottom",
            BoundaryTag::Body => "Body",
            BoundaryTag::Truncation => "Truncation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "FreeSurface" => Some(BoundaryTag::FreeSurface),
            "ControlSurface" => Some(BoundaryTag::ControlSurface),
            "Bottom" => Some(BoundaryTag::Bottom),
            "Body" => Some(BoundaryTag::Body),
            "Truncation" => Some(BoundaryTag::Truncation),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tagged boundary edge with its unit outward normal (out of the fluid).
#[derive(Debug, Clone)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
    pub normal: [f64; 2],
}

/// Triangulated slice domain with tagged boundary.
///
/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

/// Parameters of the slice domain.
#[derive(Debug, Clone, Copy)]
pub struct SliceGeometryConfig {
    /// Water depth h0 [m].
    pub depth: f64,
    /// Half-width L of the truncated domain [m].
    pub half_width: f64,
    /// Body radius r [m].
    pub body_radius: f64,
    /// Horizontal reach c of the control surface beyond the body edge [m].
    pub control_extent: f64,
    /// Target mesh size h [m].
    pub mesh_size: f64,
}

impl SliceGeometryConfig {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let &Self {
            depth,
            half_width,
            body_radius,
            control_extent,
            mesh_size,
        } = self;
        if !(depth > body_radius && body_radius > 0.0) {
            return Err(GeometryError::InvalidGeometry(format!(
                "need depth > body_radius > 0 (got depth={depth}, body_radius={body_radius})"
            )));
        }
        if control_extent <= 0.0 {
            return Err(GeometryError::InvalidGeometry(
                "empty control region: control_extent must be positive".into(),
            ));
        }
        if half_width <= body_radius + control_extent {
            return Err(GeometryError::InvalidGeometry(format!(
                "need half_width > body_radius + control_extent \
                 (got {half_width} <= {body_radius} + {control_extent})"
            )));
        }
        if !(mesh_size > 0.0 && mesh_size < body_radius) {
            return Err(GeometryError::InvalidGeometry(format!(
                "need 0 < mesh_size < body_radius (got mesh_size={mesh_size})"
            )));
        }
        Ok(())
    }
}

struct ChainSegment {
    points: Vec<[f64; 2]>,
    tag: BoundaryTag,
}

fn line_points(from: [f64; 2], to: [f64; 2], spacing: f64) -> Vec<[f64; 2]> {
    let len = ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt();
    let n = (len / spacing).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            [
                from[0] + t * (to[0] - from[0]),
                from[1] + t * (to[1] - from[1]),
            ]
        })
        .collect()
}

/// Lower half-circle from (r, 0) to (-r, 0), traversed so the fluid stays on
/// the left.
fn arc_points(radius: f64, spacing: f64) -> Vec<[f64; 2]> {
    let arc_len = std::f64::consts::PI * radius;
    let n = (arc_len / spacing).ceil().max(4.0) as usize;
    (0..=n)
        .map(|i| {
            let theta = -std::f64::consts::PI * i as f64 / n as f64;
            let (s, c) = theta.sin_cos();
            if i == 0 {
                [radius, 0.0]
            } else if i == n {
                [-radius, 0.0]
            } else {
                [radius * c, radius * s]
            }
        })
        .collect()
}

/// Variants sharing one mesher: the full slice, the slice without the body,
/// and the plain channel (whole surface free or covered).
enum DomainKind {
    Slice,
    NoBody,
    Channel { covered: bool },
}

fn build_mesh(cfg: &SliceGeometryConfig, kind: DomainKind) -> Result<Mesh2D, GeometryError> {
    match kind {
        DomainKind::Channel { .. } => {
            if !(cfg.depth > 0.0
                && cfg.half_width > 0.0
                && cfg.mesh_size > 0.0
                && cfg.mesh_size < cfg.depth
                && cfg.mesh_size < cfg.half_width)
            {
                return Err(GeometryError::InvalidGeometry(
                    "channel needs 0 < mesh_size < min(depth, half_width)".into(),
                ));
            }
        }
        _ => cfg.validate()?,
    }
    let h = cfg.mesh_size;
    let fine = h / 2.0;
    let l = cfg.half_width;
    let h0 = cfg.depth;
    let r = cfg.body_radius;
    let outer = r + cfg.control_extent;

    // counterclockwise chain around the fluid (fluid on the left)
    let mut segments: Vec<ChainSegment> = Vec::new();
    segments.push(ChainSegment {
        points: line_points([-l, -h0], [l, -h0], h),
        tag: BoundaryTag::Bottom,
    });
    segments.push(ChainSegment {
        points: line_points([l, -h0], [l, 0.0], h),
        tag: BoundaryTag::Truncation,
    });
    match kind {
        DomainKind::Slice | DomainKind::NoBody => {
            segments.push(ChainSegment {
                points: line_points([l, 0.0], [outer, 0.0], h),
                tag: BoundaryTag::FreeSurface,
            });
            segments.push(ChainSegment {
                points: line_points([outer, 0.0], [r, 0.0], fine),
                tag: BoundaryTag::ControlSurface,
            });
            if matches!(kind, DomainKind::Slice) {
                segments.push(ChainSegment {
                    points: arc_points(r, fine),
                    tag: BoundaryTag::Body,
                });
            } else {
                segments.push(ChainSegment {
                    points: line_points([r, 0.0], [-r, 0.0], h),
                    tag: BoundaryTag::FreeSurface,
                });
            }
            segments.push(ChainSegment {
                points: line_points([-r, 0.0], [-outer, 0.0], fine),
                tag: BoundaryTag::ControlSurface,
            });
            segments.push(ChainSegment {
                points: line_points([-outer, 0.0], [-l, 0.0], h),
                tag: BoundaryTag::FreeSurface,
            });
        }
        DomainKind::Channel { covered } => {
            let tag = if covered {
                BoundaryTag::ControlSurface
            } else {
                BoundaryTag::FreeSurface
            };
            let spacing = if covered { fine } else { h };
            segments.push(ChainSegment {
                points: line_points([l, 0.0], [-l, 0.0], spacing),
                tag,
            });
        }
    }
    segments.push(ChainSegment {
        points: line_points([-l, 0.0], [-l, -h0], h),
        tag: BoundaryTag::Truncation,
    });

    // flatten into a closed loop; adjacent segments share endpoints
    let mut chain: Vec<[f64; 2]> = Vec::new();
    let mut edge_tags: Vec<BoundaryTag> = Vec::new();
    for seg in &segments {
        for (i, p) in seg.points.iter().enumerate() {
            if i == 0 {
                if let Some(last) = chain.last() {
                    debug_assert!((last[0] - p[0]).abs() + (last[1] - p[1]).abs() < 1e-12);
                    continue;
                }
            }
            chain.push(*p);
        }
        for _ in 0..seg.points.len() - 1 {
            edge_tags.push(seg.tag);
        }
    }
    // the loop closes on the first vertex: drop the duplicate closing point
    if let (Some(&first), Some(&last)) = (chain.first(), chain.last()) {
        if (first[0] - last[0]).abs() + (first[1] - last[1]).abs() < 1e-12 {
            chain.pop();
        }
    }
    debug_assert_eq!(chain.len(), edge_tags.len());

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(chain.len());
    for p in &chain {
        let handle = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e: InsertionError| GeometryError::MeshingFailure(format!("{e:?}")))?;
        handles.push(handle);
    }
    if cdt.num_vertices() != chain.len() {
        return Err(GeometryError::MeshingFailure(
            "duplicate boundary vertices".into(),
        ));
    }
    let nb = chain.len();
    for i in 0..nb {
        cdt.add_constraint(handles[i], handles[(i + 1) % nb]);
    }
    // The body notch needs no closing constraint: the waterline gap between
    // (−r, 0) and (r, 0) is a convex-hull edge, so the half-disk hole is
    // reachable from the hull without crossing the constraint loop and is
    // classified as an outer region by the refinement.

    let max_area = 3.0_f64.sqrt() / 4.0 * h * h;
    // generous vertex budget: the default (10× boundary count) is too tight
    // for interior fills of slender domains
    let vertex_budget = (8.0 * (2.0 * l * h0) / max_area) as usize + 10_000;
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .keep_constraint_edges()
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(vertex_budget);
    let refinement = cdt.refine(params);
    if !refinement.refinement_complete {
        return Err(GeometryError::MeshingFailure(
            "refinement did not complete".into(),
        ));
    }
    let excluded: std::collections::BTreeSet<usize> = refinement
        .excluded_faces
        .iter()
        .map(|f| f.index())
        .collect();

    let mut vertices = vec![[0.0; 2]; cdt.num_vertices()];
    for v in cdt.vertices() {
        let p = v.position();
        vertices[v.index()] = [p.x, p.y];
    }
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.index()) {
            continue;
        }
        let vs = face.vertices();
        triangles.push([vs[0].index(), vs[1].index(), vs[2].index()]);
    }
    if triangles.is_empty() {
        return Err(GeometryError::MeshingFailure("no interior faces".into()));
    }
    for t in &triangles {
        if triangle_area(&vertices, t) < 1e-14 {
            return Err(GeometryError::MeshingFailure(
                "degenerate triangle below 1e-14 m²".into(),
            ));
        }
    }

    // boundary edges of the kept mesh must be exactly the chain segments
    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &triangles {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (e.0.min(e.1), e.0.max(e.1));
            *edge_count.entry(key).or_insert(0) += 1;
        }
    }
    let mut boundary_edges = Vec::with_capacity(nb);
    for i in 0..nb {
        let a = handles[i].index();
        let b = handles[(i + 1) % nb].index();
        let key = (a.min(b), a.max(b));
        if edge_count.get(&key) != Some(&1) {
            return Err(GeometryError::MeshingFailure(format!(
                "chain segment {i} is not a boundary edge of the triangulation"
            )));
        }
        let pa = vertices[a];
        let pb = vertices[b];
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        // fluid on the left of a→b, so outward is the right-hand normal
        let normal = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
        boundary_edges.push(BoundaryEdge {
            vertices: [a, b],
            tag: edge_tags[i],
            normal,
        });
    }
    let n_boundary: usize = edge_count.values().filter(|&&c| c == 1).count();
    if n_boundary != nb {
        return Err(GeometryError::MeshingFailure(format!(
            "{} boundary edges in triangulation, {} tagged",
            n_boundary, nb
        )));
    }

    Ok(Mesh2D {
        vertices,
        triangles,
        boundary_edges,
    })
}

/// Builds the slice mesh with the half-submerged body.
pub fn build_slice_mesh(cfg: &SliceGeometryConfig) -> Result<Mesh2D, GeometryError> {
    build_mesh(cfg, DomainKind::Slice)
}

/// Builds the slice mesh with the body removed (the control intervals keep
/// their tags; the waterline span becomes free surface).
pub fn build_open_slice_mesh(cfg: &SliceGeometryConfig) -> Result<Mesh2D, GeometryError> {
    build_mesh(cfg, DomainKind::NoBody)
}

/// Builds a plain rectangular channel `[-L, L] × [-h0, 0]`, its whole surface
/// either free or covered by the control device.
pub fn build_channel_mesh(
    half_width: f64,
    depth: f64,
    mesh_size: f64,
    covered: bool,
) -> Result<Mesh2D, GeometryError> {
    let cfg = SliceGeometryConfig {
        depth,
        half_width,
        // unused by the channel construction
        body_radius: 0.0,
        control_extent: 0.0,
        mesh_size,
    };
    build_mesh(&cfg, DomainKind::Channel { covered })
}

pub fn triangle_area(vertices: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh2D {
    pub fn boundary_edges_tagged(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        let a = self.vertices[e.vertices[0]];
        let b = self.vertices[e.vertices[1]];
        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
    }

    pub fn tag_length(&self, tag: BoundaryTag) -> f64 {
        self.boundary_edges_tagged(tag)
            .map(|e| self.edge_length(e))
            .sum()
    }

    /// Plain-text export: `v x z`, `t i j k`, `b i j TAG` lines, 1-based.
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "t {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        for e in &self.boundary_edges {
            writeln!(
                w,
                "b {} {} {}",
                e.vertices[0] + 1,
                e.vertices[1] + 1,
                e.tag
            )?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii mesh text")
    }

    /// Parses the plain-text format; outward normals are recomputed from the
    /// adjacent triangle of each boundary edge.
    pub fn from_text(text: &str) -> Result<Self, GeometryError> {
        let mut vertices: Vec<[f64; 2]> = Vec::new();
        let mut triangles: Vec<[usize; 3]> = Vec::new();
        let mut raw_edges: Vec<([usize; 2], BoundaryTag)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let kind = it.next().unwrap();
            let parse_err = |message: &str| GeometryError::Parse {
                line: lineno + 1,
                message: message.to_string(),
            };
            match kind {
                "v" => {
                    let x: f64 = it
                        .next()
                        .ok_or_else(|| parse_err("missing x"))?
                        .parse()
                        .map_err(|_| parse_err("bad x"))?;
                    let z: f64 = it
                        .next()
                        .ok_or_else(|| parse_err("missing z"))?
                        .parse()
                        .map_err(|_| parse_err("bad z"))?;
                    vertices.push([x, z]);
                }
                "t" => {
                    let mut idx = [0usize; 3];
                    for slot in &mut idx {
                        let i: usize = it
                            .next()
                            .ok_or_else(|| parse_err("missing triangle index"))?
                            .parse()
                            .map_err(|_| parse_err("bad triangle index"))?;
                        if i == 0 {
                            return Err(parse_err("indices are 1-based"));
                        }
                        *slot = i - 1;
                    }
                    triangles.push(idx);
                }
                "b" => {
                    let mut idx = [0usize; 2];
                    for slot in &mut idx {
                        let i: usize = it
                            .next()
                            .ok_or_else(|| parse_err("missing edge index"))?
                            .parse()
                            .map_err(|_| parse_err("bad edge index"))?;
                        if i == 0 {
                            return Err(parse_err("indices are 1-based"));
                        }
                        *slot = i - 1;
                    }
                    let tag = BoundaryTag::parse(
                        it.next().ok_or_else(|| parse_err("missing boundary tag"))?,
                    )
                    .ok_or_else(|| parse_err("unknown boundary tag"))?;
                    raw_edges.push((idx, tag));
                }
                _ => return Err(parse_err("unknown record type")),
            }
        }
        let nv = vertices.len();
        for t in &triangles {
            if t.iter().any(|&i| i >= nv) {
                return Err(GeometryError::Parse {
                    line: 0,
                    message: "triangle index out of range".into(),
                });
            }
        }
        // adjacency for normal reconstruction
        let mut edge_to_tri: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edge_to_tri
                    .entry((e.0.min(e.1), e.0.max(e.1)))
                    .or_default()
                    .push(ti);
            }
        }
        let mut boundary_edges = Vec::with_capacity(raw_edges.len());
        for ([a, b], tag) in raw_edges {
            if a >= nv || b >= nv {
                return Err(GeometryError::Parse {
                    line: 0,
                    message: "boundary edge index out of range".into(),
                });
            }
            let key = (a.min(b), a.max(b));
            let tris = edge_to_tri.get(&key).map(Vec::as_slice).unwrap_or(&[]);
            if tris.len() != 1 {
                return Err(GeometryError::Parse {
                    line: 0,
                    message: format!(
                        "boundary edge ({},{}) adjacent to {} triangles",
                        a + 1,
                        b + 1,
                        tris.len()
                    ),
                });
            }
            let t = &triangles[tris[0]];
            let opposite = t
                .iter()
                .copied()
                .find(|&v| v != a && v != b)
                .expect("triangle has a third vertex");
            let pa = vertices[a];
            let pb = vertices[b];
            let po = vertices[opposite];
            let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
            let mut normal = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
            let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            if normal[0] * (po[0] - mid[0]) + normal[1] * (po[1] - mid[1]) > 0.0 {
                normal = [-normal[0], -normal[1]];
            }
            boundary_edges.push(BoundaryEdge {
                vertices: [a, b],
                tag,
                normal,
            });
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_edges,
        })
    }
}

/// Diagnostics produced by [`validate_mesh`].
#[derive(Debug, Clone)]
pub struct MeshReport {
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub n_boundary_edges: usize,
    pub min_area: f64,
    /// Minimum of 2·inradius/circumradius over all triangles (1 = equilateral).
    pub min_quality: f64,
    pub surface_on_zero: bool,
    pub bottom_consistent: bool,
    pub control_intervals: usize,
    pub normals_outward_unit: bool,
    pub coverage_complete: bool,
    pub edges_single_triangle: bool,
    pub failures: Vec<String>,
}

impl MeshReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for MeshReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "vertices {} | triangles {} | boundary edges {}",
            self.n_vertices, self.n_triangles, self.n_boundary_edges
        )?;
        writeln!(
            f,
            "min area {:.3e} | min quality {:.3}",
            self.min_area, self.min_quality
        )?;
        writeln!(
            f,
            "surface on z=0: {} | bottom consistent: {} | control intervals: {}",
            self.surface_on_zero, self.bottom_consistent, self.control_intervals
        )?;
        writeln!(
            f,
            "normals outward/unit: {} | coverage complete: {} | edges on single triangle: {}",
            self.normals_outward_unit, self.coverage_complete, self.edges_single_triangle
        )?;
        if self.failures.is_empty() {
            writeln!(f, "all checks passed")
        } else {
            for fail in &self.failures {
                writeln!(f, "FAIL: {fail}")?;
            }
            Ok(())
        }
    }
}

/// Report-only verification of all mesh invariants.
pub fn validate_mesh(mesh: &Mesh2D) -> MeshReport {
    let mut failures = Vec::new();
    let mut min_area = f64::INFINITY;
    let mut min_quality = f64::INFINITY;
    for t in &mesh.triangles {
        let area = triangle_area(&mesh.vertices, t);
        min_area = min_area.min(area);
        let [a, b, c] = [
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        ];
        let la = ((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt();
        let lb = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
        let lc = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let s = 0.5 * (la + lb + lc);
        let r_in = area.abs() / s;
        let r_circ = la * lb * lc / (4.0 * area.abs());
        min_quality = min_quality.min(2.0 * r_in / r_circ);
    }
    if min_area <= 0.0 {
        failures.push("non-positive triangle orientation/area".into());
    }

    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &mesh.triangles {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *edge_count.entry((e.0.min(e.1), e.0.max(e.1))).or_insert(0) += 1;
        }
    }
    let mut edges_single_triangle = true;
    let mut declared: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for e in &mesh.boundary_edges {
        let key = (
            e.vertices[0].min(e.vertices[1]),
            e.vertices[0].max(e.vertices[1]),
        );
        *declared.entry(key).or_insert(0) += 1;
        match edge_count.get(&key) {
            Some(&1) => {}
            other => {
                edges_single_triangle = false;
                failures.push(format!(
                    "tagged edge {:?} adjacent to {:?} triangles",
                    e.vertices,
                    other.copied().unwrap_or(0)
                ));
            }
        }
    }
    let mut coverage_complete = true;
    for (&key, &count) in &edge_count {
        if count == 1 && !declared.contains_key(&key) {
            coverage_complete = false;
            failures.push(format!("untagged boundary edge {key:?}"));
        }
    }
    if declared.values().any(|&c| c > 1) {
        coverage_complete = false;
        failures.push("duplicate boundary tags on one edge".into());
    }

    // surface/bottom placement
    let mut surface_on_zero = true;
    for e in mesh.boundary_edges.iter().filter(|e| {
        matches!(
            e.tag,
            BoundaryTag::FreeSurface | BoundaryTag::ControlSurface
        )
    }) {
        for &v in &e.vertices {
            if mesh.vertices[v][1].abs() > 1e-12 {
                surface_on_zero = false;
            }
        }
    }
    if !surface_on_zero {
        failures.push("surface edges off z = 0 beyond 1e-12".into());
    }
    let bottom_z: Vec<f64> = mesh
        .boundary_edges_tagged(BoundaryTag::Bottom)
        .flat_map(|e| e.vertices.iter().map(|&v| mesh.vertices[v][1]))
        .collect();
    let bottom_consistent = bottom_z
        .iter()
        .all(|&z| (z - bottom_z.first().copied().unwrap_or(0.0)).abs() <= 1e-12);
    if !bottom_consistent {
        failures.push("bottom edges not on a single depth".into());
    }

    // control connectivity: count connected chains of ControlSurface edges
    let control_edges: Vec<&BoundaryEdge> = mesh
        .boundary_edges_tagged(BoundaryTag::ControlSurface)
        .collect();
    let control_intervals = {
        let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in control_edges.iter().enumerate() {
            for &v in &e.vertices {
                adjacency.entry(v).or_default().push(i);
            }
        }
        let mut seen = vec![false; control_edges.len()];
        let mut components = 0;
        for start in 0..control_edges.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                if seen[i] {
                    continue;
                }
                seen[i] = true;
                for &v in &control_edges[i].vertices {
                    for &other in &adjacency[&v] {
                        if !seen[other] {
                            stack.push(other);
                        }
                    }
                }
            }
        }
        components
    };

    // normals: unit, perpendicular, pointing away from the adjacent triangle
    let mut tri_of_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (e.0.min(e.1), e.0.max(e.1));
            if edge_count[&key] == 1 {
                tri_of_edge.insert(key, ti);
            }
        }
    }
    let mut normals_outward_unit = true;
    for e in &mesh.boundary_edges {
        let key = (
            e.vertices[0].min(e.vertices[1]),
            e.vertices[0].max(e.vertices[1]),
        );
        let n = e.normal;
        let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
        if (len - 1.0).abs() > 1e-12 {
            normals_outward_unit = false;
            failures.push(format!("non-unit normal on edge {:?}", e.vertices));
            continue;
        }
        let pa = mesh.vertices[e.vertices[0]];
        let pb = mesh.vertices[e.vertices[1]];
        let tangent = [pb[0] - pa[0], pb[1] - pa[1]];
        if (n[0] * tangent[0] + n[1] * tangent[1]).abs() > 1e-9 * mesh.edge_length(e) {
            normals_outward_unit = false;
            failures.push(format!("normal not perpendicular on edge {:?}", e.vertices));
            continue;
        }
        if let Some(&ti) = tri_of_edge.get(&key) {
            let t = mesh.triangles[ti];
            let opposite = t.iter().copied().find(|&v| !e.vertices.contains(&v));
            if let Some(o) = opposite {
                let po = mesh.vertices[o];
                let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
                if n[0] * (po[0] - mid[0]) + n[1] * (po[1] - mid[1]) > 0.0 {
                    normals_outward_unit = false;
                    failures.push(format!("inward normal on edge {:?}", e.vertices));
                }
            }
        }
    }

    if control_intervals != 2 && !control_edges.is_empty() {
        failures.push(format!(
            "control surface forms {control_intervals} intervals (expected 2)"
        ));
    }

    MeshReport {
        n_vertices: mesh.vertices.len(),
        n_triangles: mesh.triangles.len(),
        n_boundary_edges: mesh.boundary_edges.len(),
        min_area,
        min_quality,
        surface_on_zero,
        bottom_consistent,
        control_intervals,
        normals_outward_unit,
        coverage_complete,
        edges_single_triangle,
        failures,
    }
}

// spade's HasPosition is implemented for Point2 already; nothing extra needed,
// but keep the import used.
#[allow(dead_code)]
fn _position_marker<P: HasPosition>() {}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_config() -> SliceGeometryConfig {
        SliceGeometryConfig {
            depth: 2.5,
            half_width: 4.0,
            body_radius: 0.5,
            control_extent: 0.5,
            mesh_size: 0.1,
        }
    }

    #[test]
    fn reference_slice_mesh_is_valid() {
        let mesh = build_slice_mesh(&reference_config()).unwrap();
        let report = validate_mesh(&mesh);
        assert!(report.passes(), "{report}");
        assert_eq!(report.control_intervals, 2);

        // Γ_c spans [-1,-0.5] ∪ [0.5,1]
        let mut xs: Vec<f64> = mesh
            .boundary_edges_tagged(BoundaryTag::ControlSurface)
            .flat_map(|e| e.vertices.iter().map(|&v| mesh.vertices[v][0]))
            .collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs.first().copied().unwrap(), -1.0);
        assert_eq!(xs.last().copied().unwrap(), 1.0);
        assert!(xs.iter().all(|&x| (0.5..=1.0).contains(&x.abs())));

        // grading: Γ_g and Γ_c edge lengths ≤ h/2
        for e in mesh
            .boundary_edges
            .iter()
            .filter(|e| matches!(e.tag, BoundaryTag::Body | BoundaryTag::ControlSurface))
        {
            assert!(mesh.edge_length(e) <= 0.05 + 1e-12);
        }
    }

    #[test]
    fn rejects_empty_control_region() {
        let cfg = SliceGeometryConfig {
            control_extent: 0.0,
            ..reference_config()
        };
        assert!(matches!(
            build_slice_mesh(&cfg),
            Err(GeometryError::InvalidGeometry(_))
        ));
    }

    #[test]
    fn refinement_increases_vertex_count_and_keeps_invariants() {
        let coarse = build_slice_mesh(&reference_config()).unwrap();
        let fine = build_slice_mesh(&SliceGeometryConfig {
            mesh_size: 0.05,
            ..reference_config()
        })
        .unwrap();
        assert!(fine.vertices.len() > coarse.vertices.len());
        assert!(validate_mesh(&fine).passes());

        // interval endpoints are exact under refinement
        for mesh in [&coarse, &fine] {
            let mut xs: Vec<f64> = mesh
                .boundary_edges_tagged(BoundaryTag::ControlSurface)
                .flat_map(|e| e.vertices.iter().map(|&v| mesh.vertices[v][0]))
                .collect();
            xs.sort_by(f64::total_cmp);
            assert_eq!(xs.first().copied().unwrap(), -1.0);
            assert_eq!(xs.last().copied().unwrap(), 1.0);
        }
    }

    #[test]
    fn surface_length_complements_body_waterline() {
        let cfg = reference_config();
        let mesh = build_slice_mesh(&cfg).unwrap();
        let total = mesh.tag_length(BoundaryTag::FreeSurface)
            + mesh.tag_length(BoundaryTag::ControlSurface);
        let expected = 2.0 * cfg.half_width - 2.0 * cfg.body_radius;
        assert!((total - expected).abs() < 1e-10 * cfg.half_width);
    }

    #[test]
    fn flipped_normal_is_detected() {
        let mut mesh = build_slice_mesh(&reference_config()).unwrap();
        mesh.boundary_edges[0].normal[0] *= -1.0;
        mesh.boundary_edges[0].normal[1] *= -1.0;
        let report = validate_mesh(&mesh);
        assert!(!report.normals_outward_unit);
        assert!(!report.passes());
    }

    #[test]
    fn untagged_boundary_edge_is_detected() {
        let mut mesh = build_slice_mesh(&reference_config()).unwrap();
        mesh.boundary_edges.pop();
        let report = validate_mesh(&mesh);
        assert!(!report.coverage_complete);
        assert!(!report.passes());
    }

    #[test]
    fn text_round_trip_preserves_mesh_and_normals() {
        let mesh = build_slice_mesh(&reference_config()).unwrap();
        let text = mesh.to_text();
        let back = Mesh2D::from_text(&text).unwrap();
        assert_eq!(back.vertices.len(), mesh.vertices.len());
        assert_eq!(back.triangles, mesh.triangles);
        assert_eq!(back.boundary_edges.len(), mesh.boundary_edges.len());
        for (a, b) in mesh.boundary_edges.iter().zip(&back.boundary_edges) {
            assert_eq!(a.vertices, b.vertices);
            assert_eq!(a.tag, b.tag);
            assert!((a.normal[0] - b.normal[0]).abs() < 1e-12);
            assert!((a.normal[1] - b.normal[1]).abs() < 1e-12);
        }
        assert!(validate_mesh(&back).passes());
    }

    #[test]
    fn channel_mesh_has_uniform_surface_tag() {
        let covered = build_channel_mesh(6.0, 2.5, 0.2, true).unwrap();
        assert!(covered
            .boundary_edges
            .iter()
            .all(|e| e.tag != BoundaryTag::FreeSurface));
        assert!(covered.tag_length(BoundaryTag::ControlSurface) > 11.9);
        let open = build_channel_mesh(6.0, 2.5, 0.2, false).unwrap();
        assert_eq!(open.tag_length(BoundaryTag::ControlSurface), 0.0);
    }

    #[test]
    fn open_slice_keeps_control_band_without_body() {
        let mesh = build_open_slice_mesh(&reference_config()).unwrap();
        assert_eq!(mesh.tag_length(BoundaryTag::Body), 0.0);
        let report = validate_mesh(&mesh);
        assert!(report.passes(), "{report}");
        let surface = mesh.tag_length(BoundaryTag::FreeSurface)
            + mesh.tag_length(BoundaryTag::ControlSurface);
        assert!((surface - 8.0).abs() < 1e-10);
    }
}
