use super::{FractionalHomomorphism, PromiseFractionalPolymorphism};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, OperationTable};

/// The product measure over `g ∘ h`, where
/// `(g ∘ h)(a¹,…,aᵐ) = g(h(a¹),…,h(aᵐ))`. Input weights are taken from
/// `omega`.
pub fn compose_sampling_fpol(
    chi: &FractionalHomomorphism,
    omega: &PromiseFractionalPolymorphism,
) -> Result<PromiseFractionalPolymorphism> {
    if chi.output != omega.input {
        return Err(Error::DomainMismatch(
            "homomorphism output is not the polymorphism input domain".into(),
        ));
    }
    let n = chi.input.len();
    let m = omega.arity;
    let c = omega.output.len();
    let mut entries = Vec::with_capacity(chi.measure.len() * omega.output_measure.len());
    let mut image = vec![0; m];
    for (h, wh) in chi.measure.iter() {
        for (g, wg) in omega.output_measure.iter() {
            let table = OperationTable::from_fn(n, c, m, |t| {
                for (slot, &a) in image.iter_mut().zip(t) {
                    *slot = h.apply(&[a]);
                }
                g.apply(&image)
            })?;
            entries.push((table, wh * wg));
        }
    }
    PromiseFractionalPolymorphism::new(
        m,
        chi.input.clone(),
        omega.output.clone(),
        omega.input_weights.clone(),
        FiniteMeasure::new(entries)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, ExtendedRational};
    use crate::structure::{PromiseTemplate, Signature, ValuedStructure};
    use crate::theory::{check_block_symmetry, check_promise_fpol, BlockPartition};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identity_chi_keeps_omega() {
        let l = labels(&["0", "1"]);
        let parity = OperationTable::from_fn(2, 2, 3, |x| x.iter().sum::<usize>() % 2).unwrap();
        let omega = PromiseFractionalPolymorphism::with_uniform_inputs(
            3,
            l.clone(),
            l.clone(),
            FiniteMeasure::point_mass(parity),
        )
        .unwrap();
        let out = compose_sampling_fpol(&FractionalHomomorphism::identity(l), &omega).unwrap();
        assert_eq!(out, omega);
    }

    #[test]
    fn point_masses_compose() {
        let l = labels(&["0", "1"]);
        let swap = OperationTable::new(2, 2, 1, vec![1, 0]).unwrap();
        let chi = FractionalHomomorphism::new(l.clone(), l.clone(), FiniteMeasure::point_mass(swap)).unwrap();
        let and = OperationTable::from_fn(2, 2, 2, |x| x[0] & x[1]).unwrap();
        let omega = PromiseFractionalPolymorphism::with_uniform_inputs(2, l.clone(), l, FiniteMeasure::point_mass(and))
            .unwrap();
        let out = compose_sampling_fpol(&chi, &omega).unwrap();
        let nor = OperationTable::from_fn(2, 2, 2, |x| (1 - x[0]) & (1 - x[1])).unwrap();
        assert_eq!(out.output_measure, FiniteMeasure::point_mass(nor));
    }

    #[test]
    fn two_by_two_products_pass_the_check() {
        // Γ1 = Γ2: f(x,y) = |x - y| on {0,1}; Δ_d = Γ1 pulled back along the
        // half/half mixture of id and swap (both preserve |x - y|).
        let sig = Signature::new([("f", 2)]).unwrap();
        let l = labels(&["0", "1"]);
        let gamma = ValuedStructure::from_fn(sig, l.clone(), |_, t| int(t[0].abs_diff(t[1]) as i64).into()).unwrap();
        let id = OperationTable::identity(2);
        let swap = OperationTable::new(2, 2, 1, vec![1, 0]).unwrap();
        let chi = FractionalHomomorphism::new(
            l.clone(),
            l.clone(),
            FiniteMeasure::new([(id, rat(1, 2)), (swap, rat(1, 2))]).unwrap(),
        )
        .unwrap();
        let p0 = OperationTable::projection(2, 2, 0);
        let p1 = OperationTable::projection(2, 2, 1);
        let omega = PromiseFractionalPolymorphism::with_uniform_inputs(
            2,
            l.clone(),
            l,
            FiniteMeasure::uniform([p0, p1]).unwrap(),
        )
        .unwrap();
        let out = compose_sampling_fpol(&chi, &omega).unwrap();
        assert_eq!(out.output_measure.len(), 4);
        let total: ExtendedRational = out
            .output_measure
            .iter()
            .map(|(_, w)| ExtendedRational::from(w.clone()))
            .sum();
        assert_eq!(total, int(1).into());
        assert!(
            check_promise_fpol(&out, &PromiseTemplate::diagonal(gamma))
                .unwrap()
                .holds
        );
        let p = BlockPartition::from_sizes(&[1, 1]).unwrap();
        assert!(out.output_measure.support().all(|g| check_block_symmetry(g, &p)));
    }

    #[test]
    fn domain_mismatch() {
        let chi = FractionalHomomorphism::identity(labels(&["a", "b"]));
        let l = labels(&["0", "1"]);
        let omega = PromiseFractionalPolymorphism::with_uniform_inputs(
            1,
            l.clone(),
            l,
            FiniteMeasure::point_mass(OperationTable::identity(2)),
        )
        .unwrap();
        assert!(matches!(
            compose_sampling_fpol(&chi, &omega),
            Err(Error::DomainMismatch(_))
        ));
    }
}
