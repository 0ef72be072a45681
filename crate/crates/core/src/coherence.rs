//! Coherence measures in the computational (σ_z product) basis.

use crate::linalg::{entropy_of_spectrum, matrix_entropy, DensityMatrix};
use crate::{Error, Result};

/// Sum of the moduli of the off-diagonal elements.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

/// Square root of the quantum Jensen–Shannon divergence between `ρ` and its
/// diagonal part, with entropies in bits.
pub fn jsd_coherence(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    let diag = m.diagonal_part();
    let mix = (m + &diag).scale_real(0.5);
    let populations: Vec<f64> = (0..m.dim()).map(|i| diag[(i, i)].re).collect();
    let radicand =
        matrix_entropy(&mix)? - 0.5 * (matrix_entropy(m)? + entropy_of_spectrum(&populations)?);
    if radicand < -1e-9 {
        return Err(Error::InvariantViolation(format!(
            "Jensen–Shannon divergence {radicand:e} is negative"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace_b, CMatrix};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn plus() -> DensityMatrix {
        DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn diagonal_states_are_incoherent() {
        let rho = DensityMatrix::new(CMatrix::diagonal(&[0.7, 0.3])).unwrap();
        assert_eq!(l1_coherence(&rho), 0.0);
        assert_eq!(jsd_coherence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn plus_state_values() {
        assert!((l1_coherence(&plus()) - 1.0).abs() < 1e-15);
        // (ρ + I/2)/2 has spectrum {3/4, 1/4}
        let oracle = (2.0 - 0.75 * 3f64.log2() - 0.5).sqrt();
        let v = jsd_coherence(&plus()).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.5579).abs() < 1e-3);
    }

    #[test]
    fn two_qubit_product_coherence() {
        let rho = DensityMatrix::product(&plus(), &plus()).unwrap();
        assert!((l1_coherence(&rho) - 3.0).abs() < 1e-14);
        let a = partial_trace_b(&rho).unwrap();
        assert!((l1_coherence(&a) - 1.0).abs() < 1e-14);
    }

    fn random_state(v: [f64; 3], scale: f64) -> DensityMatrix {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-12);
        let r = scale / n.max(1.0);
        DensityMatrix::from_bloch([v[0] * r, v[1] * r, v[2] * r]).unwrap()
    }

    fn rotate(rho: &DensityMatrix, phases: &[f64]) -> DensityMatrix {
        let m = rho.matrix();
        let mut out = m.clone();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                out[(i, j)] = m[(i, j)] * Complex64::from_polar(1.0, phases[i] - phases[j]);
            }
        }
        DensityMatrix::new(out).unwrap()
    }

    proptest! {
        #[test]
        fn invariant_under_phase_rotations(
            v in prop::array::uniform3(-1.0f64..1.0),
            scale in 0.0f64..1.0,
            phases in prop::array::uniform2(0.0f64..std::f64::consts::TAU),
        ) {
            let rho = random_state(v, scale);
            let rot = rotate(&rho, &phases);
            prop_assert!((l1_coherence(&rho) - l1_coherence(&rot)).abs() < 1e-12);
            prop_assert!((jsd_coherence(&rho).unwrap() - jsd_coherence(&rot).unwrap()).abs() < 1e-7);
        }

        #[test]
        fn two_qubit_invariance_and_nonnegativity(
            a in prop::array::uniform3(-1.0f64..1.0),
            b in prop::array::uniform3(-1.0f64..1.0),
            phases in prop::array::uniform4(0.0f64..std::f64::consts::TAU),
        ) {
            let rho = DensityMatrix::product(&random_state(a, 0.9), &random_state(b, 0.8)).unwrap();
            let rot = rotate(&rho, &phases);
            let c = jsd_coherence(&rho).unwrap();
            prop_assert!(c >= 0.0);
            prop_assert!((c - jsd_coherence(&rot).unwrap()).abs() < 1e-7);
            prop_assert!((l1_coherence(&rho) - l1_coherence(&rot)).abs() < 1e-12);
        }

        #[test]
        fn vanish_only_without_off_diagonals(
            v in prop::array::uniform3(-1.0f64..1.0),
            scale in 0.0f64..1.0,
        ) {
            let rho = random_state(v, scale);
            let off = rho.matrix()[(0, 1)].norm();
            let l1 = l1_coherence(&rho);
            let js = jsd_coherence(&rho).unwrap();
            // the divergence is quadratic in the off-diagonal, so it drops
            // below rounding sooner than l1 does
            if off > 1e-10 {
                prop_assert!(l1 > 0.0);
            }
            if off > 1e-6 {
                prop_assert!(js > 0.0);
            } else if off <= 1e-10 {
                prop_assert!(l1 < 1e-9 && js < 1e-4);
            }
        }
    }
}
