//! Fixed quadrature rules, exact for every polynomial integrand assembled in
//! this crate (degree 5 on triangles, degree 9 on edges).

/// 7-point degree-5 rule on the reference triangle, weights normalized to 1.
/// Points in barycentric coordinates (L0, L1, L2).
pub const TRIANGLE_7: [([f64; 3], f64); 7] = {
    const A: f64 = 0.059_715_871_789_77;
    const B: f64 = 0.470_142_064_105_115;
    const WA: f64 = 0.132_394_152_788_506;
    const C: f64 = 0.797_426_985_353_087;
    const D: f64 = 0.101_286_507_323_456;
    const WC: f64 = 0.125_939_180_544_827;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A, B, B], WA),
        ([B, A, B], WA),
        ([B, B, A], WA),
        ([C, D, D], WC),
        ([D, C, D], WC),
        ([D, D, C], WC),
    ]
};

/// 5-point Gauss–Legendre rule on [0, 1], weights summing to 1.
pub const GAUSS_5: [(f64, f64); 5] = {
    const X1: f64 = 0.906_179_845_938_664;
    const X2: f64 = 0.538_469_310_105_683;
    const W1: f64 = 0.236_926_885_056_189;
    const W2: f64 = 0.478_628_670_499_366;
    const W0: f64 = 0.568_888_888_888_889;
    [
        ((1.0 - X1) / 2.0, W1 / 2.0),
        ((1.0 - X2) / 2.0, W2 / 2.0),
        (0.5, W0 / 2.0),
        ((1.0 + X2) / 2.0, W2 / 2.0),
        ((1.0 + X1) / 2.0, W1 / 2.0),
    ]
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_integrates_degree_five() {
        // ∫ L0^a L1^b L2^c over ref triangle = a! b! c! 2! / (a+b+c+2)! · area·2
        // with weights normalized to the area, check a few monomials.
        let exact = |a: u32, b: u32, c: u32| {
            let fact = |n: u32| (1..=n).map(|v| v as f64).product::<f64>().max(1.0);
            fact(a) * fact(b) * fact(c) * 2.0 / fact(a + b + c + 2)
        };
        for (a, b, c) in [(0, 0, 0), (2, 2, 1), (5, 0, 0), (3, 2, 0), (1, 1, 3)] {
            let approx: f64 = TRIANGLE_7
                .iter()
                .map(|&(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                .sum();
            let want = exact(a, b, c) / exact(0, 0, 0);
            assert!(
                (approx - want).abs() < 1e-14,
                "monomial {a},{b},{c}: {approx} vs {want}"
            );
        }
    }

    #[test]
    fn gauss_rule_integrates_degree_nine() {
        for p in 0..=9 {
            let approx: f64 = GAUSS_5.iter().map(|&(x, w)| w * x.powi(p)).sum();
            let want = 1.0 / (p as f64 + 1.0);
            assert!((approx - want).abs() < 1e-14, "x^{p}: {approx} vs {want}");
        }
    }
}
