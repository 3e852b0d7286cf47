//! Property tests for the exact linear algebra kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use skein_tori::matrix::IntMat;
use skein_tori::zlattice::{kernel_mod, row_hnf_with_transform, snf, snf_invariants, Lattice};

fn small_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMat> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c).prop_map(move |data| {
            IntMat::from_fn(r, c, |i, j| BigInt::from(data[i * c + j]))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn snf_transforms_and_chain(m in small_matrix(6, 20)) {
        let s = snf(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.det().abs(), BigInt::one());
        prop_assert_eq!(s.v.det().abs(), BigInt::one());
        let inv = snf_invariants(&m);
        for w in inv.windows(2) {
            prop_assert!(w[1].mod_floor(&w[0]).is_zero());
        }
    }

    #[test]
    fn hnf_transform_is_unimodular(m in small_matrix(6, 20)) {
        let (h, u) = row_hnf_with_transform(&m);
        prop_assert_eq!(u.mul(&m), h);
        prop_assert_eq!(u.det().abs(), BigInt::one());
    }

    #[test]
    fn kernel_mod_matches_enumeration(
        m in small_matrix(3, 6),
        n in 2u32..=6,
    ) {
        let modulus = BigInt::from(n);
        let lat = kernel_mod(&m, &modulus);
        let r = m.nrows();
        // exhaustive enumeration over Z_n^r
        let total = (n as u64).pow(r as u32);
        let mut count = 0u64;
        for code in 0..total {
            let mut k = Vec::with_capacity(r);
            let mut c = code;
            for _ in 0..r {
                k.push(BigInt::from(c % n as u64));
                c /= n as u64;
            }
            let prod = IntMat::row_vector(&k).mul(&m);
            let ok = (0..m.ncols()).all(|j| prod[(0, j)].mod_floor(&modulus).is_zero());
            let member = lat.contains(&k);
            prop_assert_eq!(ok, member);
            if ok {
                count += 1;
            }
        }
        prop_assert_eq!(BigInt::from(count), lat.order_mod(&modulus));
    }

    #[test]
    fn lattice_sum_contains_parts(m1 in small_matrix(4, 9), m2 in small_matrix(4, 9)) {
        prop_assume!(m1.ncols() == m2.ncols());
        let a = Lattice::from_generators(m1.ncols(), &m1);
        let b = Lattice::from_generators(m2.ncols(), &m2);
        let s = a.sum(&b);
        prop_assert!(s.contains_lattice(&a));
        prop_assert!(s.contains_lattice(&b));
        if let (Some(ia), Some(is_)) = (a.index_in_ambient(), s.index_in_ambient()) {
            prop_assert!(is_ <= ia);
            prop_assert!(ia.mod_floor(&is_).is_zero());
        }
    }
}
