use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use torus_squeeze::numerics::{gcd_all, IntMat};
use torus_squeeze::unimodular::{check_contract, complete_with_trace, completion_bound, unimodular_complete};

/// Independent completion by column Euclid on the row vector, with no entry bound.
fn euclid_completion(p: &[BigInt]) -> IntMat {
    let n = p.len();
    let mut row = p.to_vec();
    let mut u = IntMat::identity(n);
    loop {
        let nz: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        if nz.len() == 1 {
            let j = nz[0];
            if j != 0 {
                // swap columns 0 and j, negating one to keep det 1
                for i in 0..n {
                    let a = u.get(i, 0).clone();
                    let b = u.get(i, j).clone();
                    u.set(i, 0, b);
                    u.set(i, j, -a);
                }
                row.swap(0, j);
                row[j] = -row[j].clone();
            }
            if row[0].is_negative() {
                u.neg_col(0);
                u.neg_col(1);
                row[0] = -row[0].clone();
            }
            return u;
        }
        let piv = *nz.iter().min_by_key(|&&j| row[j].abs()).unwrap();
        for &j in &nz {
            if j != piv {
                let q = row[j].div_floor(&row[piv]);
                let step = &q * &row[piv];
                row[j] -= step;
                for i in 0..n {
                    let v = u.get(i, j) - &q * u.get(i, piv);
                    u.set(i, j, v);
                }
            }
        }
    }
}

fn coprime_tuple(n: usize) -> impl Strategy<Value = Vec<BigInt>> {
    proptest::collection::vec((-10_000i64..=10_000).prop_filter("nonzero", |x| *x != 0), n)
        .prop_map(|v| v.into_iter().map(BigInt::from).collect::<Vec<_>>())
        .prop_filter("coprime", |v| gcd_all(v).is_one())
}

fn dims() -> impl Strategy<Value = Vec<BigInt>> {
    (2usize..=6).prop_flat_map(coprime_tuple)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn completion_contract(p in dims()) {
        let a = unimodular_complete(&p).unwrap();
        prop_assert_eq!(a.det().unwrap(), BigInt::one());
        let mut e1 = vec![BigInt::zero(); p.len()];
        e1[0] = BigInt::one();
        prop_assert_eq!(a.vec_mul(&p).unwrap(), e1.clone());
        prop_assert!(a.max_abs() <= completion_bound(&p));

        let oracle = euclid_completion(&p);
        prop_assert_eq!(oracle.det().unwrap(), BigInt::one());
        prop_assert_eq!(oracle.vec_mul(&p).unwrap(), e1);
    }

    #[test]
    fn trace_invariants(p in (3usize..=6).prop_flat_map(coprime_tuple)) {
        let tr = complete_with_trace(&p).unwrap();
        for m in [&tr.bprime, &tr.base, &tr.reducer, &tr.result] {
            prop_assert_eq!(m.det().unwrap(), BigInt::one());
        }
        let q = &tr.normalized_p;
        let mut e1 = vec![BigInt::zero(); p.len()];
        e1[0] = BigInt::one();
        prop_assert_eq!(tr.base.vec_mul(q).unwrap(), e1);
        // B S = target
        let bs = tr.base.mul(&tr.scaffold).unwrap();
        for k in 0..p.len() {
            for i in 0..p.len() {
                let want = if k == 0 { BigInt::zero() } else if i == 0 { -&q[k] } else if i == k { q[0].clone() } else { BigInt::zero() };
                prop_assert_eq!(bs.get(i, k), &want);
            }
        }
        check_contract(&p, &tr.result).unwrap();
    }

    #[test]
    fn completion_with_zero_entries(mut p in (3usize..=6).prop_flat_map(coprime_tuple), zero_at in 0usize..6) {
        let idx = zero_at % p.len();
        p[idx] = BigInt::zero();
        prop_assume!(gcd_all(&p).is_one());
        let a = unimodular_complete(&p).unwrap();
        check_contract(&p, &a).unwrap();
    }
}
