//! Shape functions: quadratic triangles for the potential, quadratic and
//! linear 1D bases on boundary edges, Hermite cubics for the plate.

/// P2 triangle basis at barycentric (l0, l1, l2).
/// DOF order: three vertices, then midpoints (01), (12), (20).
#[allow(dead_code)]
pub fn p2_tri(l: [f64; 3]) -> [f64; 6] {
    let [l0, l1, l2] = l;
    [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    ]
}

/// Gradients of the P2 triangle basis with respect to (l1, l2); l0 = 1−l1−l2.
pub fn p2_tri_grad(l: [f64; 3]) -> [[f64; 2]; 6] {
    let [l0, l1, l2] = l;
    [
        [1.0 - 4.0 * l0, 1.0 - 4.0 * l0],
        [4.0 * l1 - 1.0, 0.0],
        [0.0, 4.0 * l2 - 1.0],
        [4.0 * (l0 - l1), -4.0 * l1],
        [4.0 * l2, 4.0 * l1],
        [-4.0 * l2, 4.0 * (l0 - l2)],
    ]
}

/// 1D P2 basis on the unit interval; DOF order: left end, right end, midpoint.
pub fn p2_line(t: f64) -> [f64; 3] {
    [
        (1.0 - t) * (1.0 - 2.0 * t),
        t * (2.0 * t - 1.0),
        4.0 * t * (1.0 - t),
    ]
}

/// d/dt of [`p2_line`].
pub fn p2_line_deriv(t: f64) -> [f64; 3] {
    [4.0 * t - 3.0, 4.0 * t - 1.0, 4.0 - 8.0 * t]
}

/// 1D P1 basis on the unit interval.
pub fn p1_line(t: f64) -> [f64; 2] {
    [1.0 - t, t]
}

/// Hermite cubic basis on an element of length `len`, evaluated at t = x/len.
/// DOF order: value left, slope left, value right, slope right.
pub fn hermite(t: f64, len: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        1.0 - 3.0 * t2 + 2.0 * t3,
        len * (t - 2.0 * t2 + t3),
        3.0 * t2 - 2.0 * t3,
        len * (t3 - t2),
    ]
}

/// Second derivatives d²/dx² of [`hermite`].
pub fn hermite_dd(t: f64, len: f64) -> [f64; 4] {
    [
        (12.0 * t - 6.0) / (len * len),
        (6.0 * t - 4.0) / len,
        (6.0 - 12.0 * t) / (len * len),
        (6.0 * t - 2.0) / len,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_tri_partition_of_unity_and_kronecker() {
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        for (i, &l) in nodes.iter().enumerate() {
            let vals = p2_tri(l);
            for (j, v) in vals.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
        let sum: f64 = p2_tri([0.3, 0.23, 0.47]).iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn p2_line_matches_finite_difference() {
        let h = 1e-6;
        for t in [0.13, 0.5, 0.92] {
            let d = p2_line_deriv(t);
            let fd: Vec<f64> = (0..3)
                .map(|i| (p2_line(t + h)[i] - p2_line(t - h)[i]) / (2.0 * h))
                .collect();
            for i in 0..3 {
                assert!((d[i] - fd[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn hermite_interpolates_value_and_slope() {
        let len = 0.37;
        let at = |t: f64| hermite(t, len);
        // value dofs
        assert!((at(0.0)[0] - 1.0).abs() < 1e-14);
        assert!((at(1.0)[2] - 1.0).abs() < 1e-14);
        // slope dofs: d/dx at the ends
        let h = 1e-7;
        let d_left: f64 = (at(h)[1] - at(0.0)[1]) / (h * len);
        let d_right: f64 = (at(1.0)[3] - at(1.0 - h)[3]) / (h * len);
        assert!((d_left - 1.0).abs() < 1e-6);
        assert!((d_right - 1.0).abs() < 1e-6);
        // affine functions have zero curvature
        for t in [0.1, 0.6] {
            let dd = hermite_dd(t, len);
            let along = dd[0] * 1.0 + dd[1] * 0.0 + dd[2] * 1.0 + dd[3] * 0.0; // η = 1
            assert!(along.abs() < 1e-12);
            let lin = dd[0] * 0.0 + dd[1] * 1.0 + dd[2] * len + dd[3] * 1.0; // η = x
            assert!(lin.abs() < 1e-12);
        }
    }
}
