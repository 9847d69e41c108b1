//! Control-surface discretizations: the P1 control space, the membrane (P2
//! trace) and plate (Hermite) displacement spaces, and the third-order tensor
//! contractions that make the passive state operators affine in the controls.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

use super::{quad, shape, FemError, P2Space};
use crate::geometry::{BoundaryTag, Mesh2D};
use crate::linalg::SparseCols;
use crate::wave::WaveEnvironment;

/// One control-surface edge, oriented left→right.
#[derive(Debug, Clone)]
pub struct CtrlElem {
    /// Control (P1 vertex) DOFs: left, right.
    pub ctrl: [usize; 2],
    /// Potential trace DOFs: left vertex, right vertex, midpoint.
    pub pot: [usize; 3],
    pub x_left: f64,
    pub len: f64,
}

/// A maximal connected run of control-surface edges.
#[derive(Debug, Clone)]
pub struct ControlInterval {
    /// Control DOFs left→right (shared vertices, so elements + 1 entries).
    pub ctrl_dofs: Vec<usize>,
    pub elements: Vec<CtrlElem>,
}

/// Piecewise-linear control space on Γ_c.
#[derive(Debug, Clone)]
pub struct ControlSpace {
    pub intervals: Vec<ControlInterval>,
    pub n_dofs: usize,
    /// x coordinate of each control DOF.
    pub coords: Vec<f64>,
}

impl ControlSpace {
    pub fn build(mesh: &Mesh2D, space: &P2Space) -> Result<Self, FemError> {
        // orient each control edge by x and group into connected intervals
        let mut edges: Vec<([usize; 2], [usize; 3])> = Vec::new();
        for edge in mesh.boundary_edges_tagged(BoundaryTag::ControlSurface) {
            let [a, b] = edge.vertices;
            for &v in &edge.vertices {
                if mesh.vertices[v][1].abs() > 1e-12 {
                    return Err(FemError::AssemblyFailure(
                        "control edge off the z = 0 surface".into(),
                    ));
                }
            }
            let (left, right) = if mesh.vertices[a][0] <= mesh.vertices[b][0] {
                (a, b)
            } else {
                (b, a)
            };
            let mid = space
                .midpoint_dof(a, b)
                .ok_or_else(|| FemError::AssemblyFailure("dangling control edge".into()))?;
            edges.push(([left, right], [left, right, mid]));
        }
        edges.sort_by(|x, y| {
            mesh.vertices[x.0[0]][0]
                .partial_cmp(&mesh.vertices[y.0[0]][0])
                .unwrap()
        });

        let mut intervals = Vec::new();
        let mut coords = Vec::new();
        let mut n_dofs = 0usize;
        let mut current: Vec<([usize; 2], [usize; 3])> = Vec::new();
        let flush = |chain: &[([usize; 2], [usize; 3])],
                     n_dofs: &mut usize,
                     coords: &mut Vec<f64>,
                     intervals: &mut Vec<ControlInterval>| {
            if chain.is_empty() {
                return;
            }
            let mut ctrl_dofs = Vec::with_capacity(chain.len() + 1);
            let mut vertex_dof: BTreeMap<usize, usize> = BTreeMap::new();
            let mut elements = Vec::with_capacity(chain.len());
            for &([l, r], pot) in chain {
                for v in [l, r] {
                    vertex_dof.entry(v).or_insert_with(|| {
                        let id = *n_dofs;
                        *n_dofs += 1;
                        coords.push(0.0);
                        ctrl_dofs.push(id);
                        id
                    });
                }
                let (cl, cr) = (vertex_dof[&l], vertex_dof[&r]);
                let x_left = /* mesh vertex coordinate */ 0.0; // set below
                elements.push(CtrlElem {
                    ctrl: [cl, cr],
                    pot,
                    x_left,
                    len: 0.0,
                });
            }
            intervals.push(ControlInterval {
                ctrl_dofs,
                elements,
            });
        };
        for i in 0..edges.len() {
            if !current.is_empty() {
                let prev_right = current.last().unwrap().0[1];
                if edges[i].0[0] != prev_right {
                    flush(&current, &mut n_dofs, &mut coords, &mut intervals);
                    current.clear();
                }
            }
            current.push(edges[i]);
        }
        flush(&current, &mut n_dofs, &mut coords, &mut intervals);

        // fill geometry now that numbering is fixed
        let mut result = Self {
            intervals,
            n_dofs,
            coords,
        };
        for interval in &mut result.intervals {
            for elem in &mut interval.elements {
                let xl = space.coords[elem.pot[0]][0];
                let xr = space.coords[elem.pot[1]][0];
                elem.x_left = xl;
                elem.len = xr - xl;
                result.coords[elem.ctrl[0]] = xl;
                result.coords[elem.ctrl[1]] = xr;
                if elem.len <= 0.0 {
                    return Err(FemError::AssemblyFailure(
                        "control elements not ordered by x".into(),
                    ));
                }
            }
        }
        Ok(result)
    }
}

/// Which passive device the displacement space models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    Membrane,
    Plate,
}

/// One displacement DOF on Γ_c: nodal value, or (plate only) nodal slope.
#[derive(Debug, Clone, Copy)]
pub struct EtaDof {
    pub x: f64,
    pub slope: bool,
}

/// Control-contracted operator tensors of one passive device.
///
/// `stiffness[k]`/`mass[k]` hold the sparse slice of the third-order tensor
/// against control basis function k; contracting with a control vector sums
/// the slices. For `u ≡ 1` the stiffness contraction reduces to the plain
/// (tension or bending) operator on Γ_c and the mass contraction to the plain
/// boundary mass.
pub struct ControlTensors {
    pub kind: DeviceKind,
    pub eta_dim: usize,
    pub eta_dofs: Vec<EtaDof>,
    pub stiffness: Vec<Vec<(usize, usize, f64)>>,
    pub mass: Vec<Vec<(usize, usize, f64)>>,
    /// Potential-trace coupling ∫ φᵢ θⱼ on Γ_c (n × eta_dim).
    pub coupling: SparseCols,
    /// Incident load ∫ φⁱ θⱼ on Γ_c.
    pub incident_load: Vec<Complex64>,
}

impl ControlTensors {
    fn contract(slices: &[Vec<(usize, usize, f64)>], weights: &[f64], dim: usize) -> DMatrix<f64> {
        assert_eq!(slices.len(), weights.len());
        let mut out = DMatrix::zeros(dim, dim);
        for (slice, &w) in slices.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for &(i, j, v) in slice {
                out[(i, j)] += w * v;
            }
        }
        out
    }

    /// `𝔸u` (membrane) or `𝕃u` (plate).
    pub fn contract_stiffness(&self, u: &[f64]) -> DMatrix<f64> {
        Self::contract(&self.stiffness, u, self.eta_dim)
    }

    /// `𝔹v`.
    pub fn contract_mass(&self, v: &[f64]) -> DMatrix<f64> {
        Self::contract(&self.mass, v, self.eta_dim)
    }

    /// Device operator `𝔸u + ρg·𝔹v` as a complex block.
    pub fn device_block(&self, u: &[f64], v: &[f64], rho: f64, g: f64) -> DMatrix<Complex64> {
        let m = self.contract_stiffness(u) + self.contract_mass(v) * (rho * g);
        m.map(|x| Complex64::new(x, 0.0))
    }

    fn gradient(
        slices: &[Vec<(usize, usize, f64)>],
        mu: &[Complex64],
        eta: &[Complex64],
    ) -> Vec<f64> {
        slices
            .iter()
            .map(|slice| {
                slice
                    .iter()
                    .map(|&(i, j, v)| (mu[i].conj() * eta[j] * v).re)
                    .sum()
            })
            .collect()
    }

    /// Per-control-DOF contraction `Re(μ† 𝔸ₖ η)` (or `𝕃ₖ`).
    pub fn gradient_stiffness(&self, mu: &[Complex64], eta: &[Complex64]) -> Vec<f64> {
        Self::gradient(&self.stiffness, mu, eta)
    }

    /// Per-control-DOF contraction `Re(μ† 𝔹ₖ η)`.
    pub fn gradient_mass(&self, mu: &[Complex64], eta: &[Complex64]) -> Vec<f64> {
        Self::gradient(&self.mass, mu, eta)
    }
}

/// Assembles the membrane tensors: P2 displacement trace on Γ_c, tension
/// slices `(𝔸)ₖ = ∫ θ'ᵢ θ'ⱼ ψₖ`, mass slices `(𝔹)ₖ = ∫ θᵢ θⱼ ψₖ`.
pub fn assemble_membrane_tensors(
    mesh: &Mesh2D,
    ops: &super::AssembledOperators,
    env: &WaveEnvironment,
) -> Result<ControlTensors, FemError> {
    assemble_device(mesh, ops, env, DeviceKind::Membrane)
}

/// Assembles the plate tensors: C¹ Hermite displacement on Γ_c, bending
/// slices `(𝕃)ₖ = ∫ θ''ᵢ θ''ⱼ ψₖ`, mass slices as for the membrane.
pub fn assemble_plate_tensor(
    mesh: &Mesh2D,
    ops: &super::AssembledOperators,
    env: &WaveEnvironment,
) -> Result<ControlTensors, FemError> {
    assemble_device(mesh, ops, env, DeviceKind::Plate)
}

fn assemble_device(
    _mesh: &Mesh2D,
    ops: &super::AssembledOperators,
    env: &WaveEnvironment,
    kind: DeviceKind,
) -> Result<ControlTensors, FemError> {
    let control = &ops.control;
    let space = &ops.space;
    let n = space.n_dofs;
    let l = control.n_dofs;
    if l == 0 {
        return Err(FemError::AssemblyFailure(
            "mesh has no control surface".into(),
        ));
    }

    // displacement numbering per interval, in x order
    let mut eta_dofs: Vec<EtaDof> = Vec::new();
    // per interval element: local→global eta dofs
    let mut elem_eta: Vec<Vec<Vec<usize>>> = Vec::new();
    for interval in &control.intervals {
        let mut per_elem = Vec::with_capacity(interval.elements.len());
        match kind {
            DeviceKind::Membrane => {
                // v0 m0 v1 m1 v2 ...
                let base = eta_dofs.len();
                for (i, elem) in interval.elements.iter().enumerate() {
                    let left = base + 2 * i;
                    let mid = base + 2 * i + 1;
                    let right = base + 2 * i + 2;
                    per_elem.push(vec![left, right, mid]);
                    eta_dofs.push(EtaDof {
                        x: elem.x_left,
                        slope: false,
                    });
                    eta_dofs.push(EtaDof {
                        x: elem.x_left + elem.len / 2.0,
                        slope: false,
                    });
                    if i + 1 == interval.elements.len() {
                        eta_dofs.push(EtaDof {
                            x: elem.x_left + elem.len,
                            slope: false,
                        });
                    }
                }
            }
            DeviceKind::Plate => {
                // (value, slope) per vertex
                let base = eta_dofs.len();
                for (i, elem) in interval.elements.iter().enumerate() {
                    let vl = base + 2 * i;
                    let sl = base + 2 * i + 1;
                    let vr = base + 2 * (i + 1);
                    let sr = base + 2 * (i + 1) + 1;
                    per_elem.push(vec![vl, sl, vr, sr]);
                    eta_dofs.push(EtaDof {
                        x: elem.x_left,
                        slope: false,
                    });
                    eta_dofs.push(EtaDof {
                        x: elem.x_left,
                        slope: true,
                    });
                    if i + 1 == interval.elements.len() {
                        eta_dofs.push(EtaDof {
                            x: elem.x_left + elem.len,
                            slope: false,
                        });
                        eta_dofs.push(EtaDof {
                            x: elem.x_left + elem.len,
                            slope: true,
                        });
                    }
                }
            }
        }
        elem_eta.push(per_elem);
    }
    let eta_dim = eta_dofs.len();

    let mut stiffness: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); l];
    let mut mass: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); l];
    let mut coupling = SparseCols::new(n, eta_dim);
    let mut incident_load = vec![Complex64::default(); eta_dim];

    for (iv, interval) in control.intervals.iter().enumerate() {
        for (ie, elem) in interval.elements.iter().enumerate() {
            let len = elem.len;
            let eta_ids = &elem_eta[iv][ie];
            let nvals_dim = eta_ids.len();
            for &(t, w) in quad::GAUSS_5.iter() {
                let psi = shape::p1_line(t);
                let phi2 = shape::p2_line(t);
                let x = elem.x_left + t * len;
                let phi_inc = env.incident_potential(x, 0.0);
                let (vals, derivs): (Vec<f64>, Vec<f64>) = match kind {
                    DeviceKind::Membrane => {
                        let v = shape::p2_line(t);
                        let d = shape::p2_line_deriv(t);
                        (v.to_vec(), d.iter().map(|g| g / len).collect())
                    }
                    DeviceKind::Plate => {
                        let v = shape::hermite(t, len);
                        let dd = shape::hermite_dd(t, len);
                        (v.to_vec(), dd.to_vec())
                    }
                };
                for c in 0..2 {
                    let wc = w * len * psi[c];
                    if wc == 0.0 {
                        continue;
                    }
                    let k = elem.ctrl[c];
                    for i in 0..nvals_dim {
                        for jj in 0..nvals_dim {
                            stiffness[k].push((eta_ids[i], eta_ids[jj], wc * derivs[i] * derivs[jj]));
                            mass[k].push((eta_ids[i], eta_ids[jj], wc * vals[i] * vals[jj]));
                        }
                    }
                }
                for i in 0..3 {
                    for jj in 0..nvals_dim {
                        coupling.push(elem.pot[i], eta_ids[jj], w * len * phi2[i] * vals[jj]);
                    }
                }
                for jj in 0..nvals_dim {
                    incident_load[eta_ids[jj]] += phi_inc * (w * len * vals[jj]);
                }
            }
        }
    }
    coupling.compress();

    Ok(ControlTensors {
        kind,
        eta_dim,
        eta_dofs,
        stiffness,
        mass,
        coupling,
        incident_load,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::geometry::{build_channel_mesh, build_slice_mesh, SliceGeometryConfig};

    fn setup() -> (Mesh2D, super::super::AssembledOperators, WaveEnvironment) {
        let mesh = build_slice_mesh(&SliceGeometryConfig {
            depth: 2.5,
            half_width: 4.0,
            body_radius: 0.5,
            control_extent: 0.5,
            mesh_size: 0.25,
        })
        .unwrap();
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        let ops = assemble(&mesh, &env).unwrap();
        (mesh, ops, env)
    }

    #[test]
    fn control_space_has_two_intervals_with_shared_vertices() {
        let (_, ops, _) = setup();
        assert_eq!(ops.control.intervals.len(), 2);
        for interval in &ops.control.intervals {
            assert_eq!(interval.ctrl_dofs.len(), interval.elements.len() + 1);
            for pair in interval.elements.windows(2) {
                assert_eq!(pair[0].ctrl[1], pair[1].ctrl[0]);
                assert!((pair[0].x_left + pair[0].len - pair[1].x_left).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn membrane_unit_contraction_matches_plain_p2_operators() {
        let (mesh, ops, env) = setup();
        let tensors = assemble_membrane_tensors(&mesh, &ops, &env).unwrap();
        let ones = vec![1.0; ops.control.n_dofs];
        let zeros = vec![0.0; ops.control.n_dofs];
        let stiff = tensors.contract_stiffness(&ones);
        let mass = tensors.contract_mass(&ones);
        assert!(tensors.contract_stiffness(&zeros).amax() == 0.0);

        // hand-assembled plain 1D P2 operators, element matrices from
        // symbolic integration: K = 1/(3ℓ)·[[7,1,-8],[1,7,-8],[-8,-8,16]],
        // M = ℓ/30·[[4,-1,2],[-1,4,2],[2,2,16]]
        let mut k_ref = DMatrix::<f64>::zeros(tensors.eta_dim, tensors.eta_dim);
        let mut m_ref = DMatrix::<f64>::zeros(tensors.eta_dim, tensors.eta_dim);
        let mut offset = 0;
        for interval in &ops.control.intervals {
            for (i, elem) in interval.elements.iter().enumerate() {
                let ids = [offset + 2 * i, offset + 2 * i + 2, offset + 2 * i + 1];
                let l = elem.len;
                let ke = [
                    [7.0, 1.0, -8.0],
                    [1.0, 7.0, -8.0],
                    [-8.0, -8.0, 16.0],
                ];
                let me = [
                    [4.0, -1.0, 2.0],
                    [-1.0, 4.0, 2.0],
                    [2.0, 2.0, 16.0],
                ];
                for r in 0..3 {
                    for c in 0..3 {
                        k_ref[(ids[r], ids[c])] += ke[r][c] / (3.0 * l);
                        m_ref[(ids[r], ids[c])] += me[r][c] * l / 30.0;
                    }
                }
            }
            offset += 2 * interval.elements.len() + 1;
        }
        assert!((stiff - k_ref).amax() < 1e-10);
        assert!((mass - m_ref).amax() < 1e-12);
    }

    #[test]
    fn control_stiffness_matches_textbook_tridiagonal_on_uniform_interval() {
        // covered channel: a single uniform control interval
        let mesh = build_channel_mesh(2.0, 1.0, 0.5, true).unwrap();
        let env = WaveEnvironment::with_period(1.2, 1.0, 1.0).unwrap();
        let ops = assemble(&mesh, &env).unwrap();
        assert_eq!(ops.control.intervals.len(), 1);
        let elems = &ops.control.intervals[0].elements;
        let h = elems[0].len;
        for e in elems {
            assert!((e.len - h).abs() < 1e-12);
        }
        let l = ops.control.n_dofs;
        let mut dense = DMatrix::<f64>::zeros(l, l);
        for (r, c, v) in ops.a_c.iter() {
            dense[(r, c)] = v;
        }
        for (i, &d) in ops.control.intervals[0].ctrl_dofs.iter().enumerate() {
            let expected = if i == 0 || i + 1 == l { 1.0 / h } else { 2.0 / h };
            assert!((dense[(d, d)] - expected).abs() < 1e-12);
        }
        for pair in elems.windows(1) {
            let e = &pair[0];
            assert!((dense[(e.ctrl[0], e.ctrl[1])] + 1.0 / h).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_contraction_is_linear_and_symmetric() {
        let (mesh, ops, env) = setup();
        let tensors = assemble_membrane_tensors(&mesh, &ops, &env).unwrap();
        let l = ops.control.n_dofs;
        let u: Vec<f64> = (0..l).map(|i| 1.0 + 0.3 * (i as f64).sin()).collect();
        let du: Vec<f64> = (0..l).map(|i| 0.2 * (2.1 * i as f64).cos()).collect();
        let sum: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + b).collect();
        let m1 = tensors.contract_stiffness(&sum);
        let m2 = tensors.contract_stiffness(&u) + tensors.contract_stiffness(&du);
        assert!((m1 - m2).amax() < 1e-12);
        let m = tensors.contract_stiffness(&u);
        assert!((m.clone() - m.transpose()).amax() < 1e-13);
        let b = tensors.contract_mass(&u);
        assert!((b.clone() - b.transpose()).amax() < 1e-13);
    }

    #[test]
    fn plate_unit_contraction_reproduces_beam_element_pattern() {
        let (mesh, ops, env) = setup();
        let tensors = assemble_plate_tensor(&mesh, &ops, &env).unwrap();
        let ones = vec![1.0; ops.control.n_dofs];
        let bend = tensors.contract_stiffness(&ones);
        // first element of the first interval touches dofs 0..4 exclusively
        // through its left end: classical beam stiffness entries
        let l0 = ops.control.intervals[0].elements[0].len;
        let want = [
            (0, 0, 12.0 / l0.powi(3)),
            (0, 1, 6.0 / l0.powi(2)),
            (1, 1, 4.0 / l0),
            (0, 2, -12.0 / l0.powi(3)),
            (0, 3, 6.0 / l0.powi(2)),
            (1, 2, -6.0 / l0.powi(2)),
            (1, 3, 2.0 / l0),
        ];
        for (i, j, v) in want {
            assert!(
                (bend[(i, j)] - v).abs() < 1e-9 * v.abs(),
                "entry ({i},{j}): {} want {v}",
                bend[(i, j)]
            );
        }
        assert!((bend.clone() - bend.transpose()).amax() < 1e-10);
    }

    #[test]
    fn plate_bending_annihilates_rigid_and_tilt_modes() {
        let (mesh, ops, env) = setup();
        let tensors = assemble_plate_tensor(&mesh, &ops, &env).unwrap();
        let u: Vec<f64> = (0..ops.control.n_dofs)
            .map(|i| 1.0 + 0.5 * (i as f64 * 0.7).sin())
            .collect();
        let bend = tensors.contract_stiffness(&u);
        let ones: Vec<f64> = tensors
            .eta_dofs
            .iter()
            .map(|d| if d.slope { 0.0 } else { 1.0 })
            .collect();
        let tilt: Vec<f64> = tensors
            .eta_dofs
            .iter()
            .map(|d| if d.slope { 1.0 } else { d.x })
            .collect();
        let scale = bend.amax();
        for v in [ones, tilt] {
            let r = &bend * DMatrix::from_column_slice(v.len(), 1, &v);
            assert!(r.amax() < 1e-11 * scale.max(1.0), "residual {}", r.amax());
        }
    }

    #[test]
    fn membrane_coupling_row_sums_match_boundary_mass() {
        let (mesh, ops, env) = setup();
        let tensors = assemble_membrane_tensors(&mesh, &ops, &env).unwrap();
        let ones = vec![1.0; ops.space.n_dofs];
        let c_c_row_sums = ops.c_c.matvec(&ones);
        let row_sums = tensors.coupling.row_sums();
        for i in 0..ops.space.n_dofs {
            assert!((c_c_row_sums[i] - row_sums[i]).abs() < 1e-12);
        }
    }
}
