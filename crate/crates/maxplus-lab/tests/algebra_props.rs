//! Property tests for the max-plus algebra layer: semifield axioms,
//! the vector-space axioms of the function space, the lattice
//! decomposition identities, order coherence, and format round-trips.
//!
//! Scalar values come in two flavours: arbitrary finite doubles where
//! the identity under test is exact for any floats (everything built
//! from max alone), and dyadic-lattice values where `⊗`-sums must be
//! exact for the identity to hold bitwise.

use proptest::prelude::*;

use maxplus_lab::quotient::FiniteMaxVector;
use maxplus_lab::scalar::MaxScalar;
use maxplus_lab::space::{dist, dist_via_lattice, Grid, GridFunction, Norm};

fn any_scalar() -> impl Strategy<Value = MaxScalar> {
    prop_oneof![
        1 => Just(MaxScalar::Bottom),
        8 => (-1e12f64..1e12).prop_map(MaxScalar::num),
    ]
}

/// Values on the lattice 2⁻²⁰·ℤ, where f64 addition is exact.
fn dyadic_scalar() -> impl Strategy<Value = MaxScalar> {
    prop_oneof![
        1 => Just(MaxScalar::Bottom),
        8 => (-(1i64 << 21)..(1i64 << 21))
            .prop_map(|k| MaxScalar::num(k as f64 / (1u64 << 20) as f64)),
    ]
}

fn dyadic_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(
        (-(1i64 << 21)..(1i64 << 21)).prop_map(|k| k as f64 / (1u64 << 20) as f64),
        n,
    )
}

proptest! {
    #[test]
    fn oplus_assoc_comm_idem(a in any_scalar(), b in any_scalar(), c in any_scalar()) {
        prop_assert_eq!(a.oplus(b), b.oplus(a));
        prop_assert_eq!(a.oplus(b).oplus(c), a.oplus(b.oplus(c)));
        prop_assert_eq!(a.oplus(a), a);
        prop_assert_eq!(a.oplus(MaxScalar::Bottom), a);
    }

    #[test]
    fn otimes_comm_unit_absorb(a in any_scalar(), b in any_scalar()) {
        prop_assert_eq!(a.otimes(b), b.otimes(a));
        prop_assert_eq!(a.otimes(MaxScalar::UNIT), a);
        prop_assert_eq!(a.otimes(MaxScalar::Bottom), MaxScalar::Bottom);
    }

    #[test]
    fn otimes_assoc_on_dyadics(a in dyadic_scalar(), b in dyadic_scalar(), c in dyadic_scalar()) {
        prop_assert_eq!(a.otimes(b).otimes(c), a.otimes(b.otimes(c)));
    }

    #[test]
    fn distributivity_exact_for_all_floats(a in any_scalar(), x in any_scalar(), y in any_scalar()) {
        // a ⊗ (x ⊕ y) = (a ⊗ x) ⊕ (a ⊗ y): monotone rounding makes this
        // exact even for non-dyadic doubles.
        prop_assert_eq!(a.otimes(x.oplus(y)), a.otimes(x).oplus(a.otimes(y)));
        // (a ⊕ b) ⊗ x = (a ⊗ x) ⊕ (b ⊗ x) with b := y.
        prop_assert_eq!(a.oplus(y).otimes(x), a.otimes(x).oplus(y.otimes(x)));
    }

    #[test]
    fn order_is_oplus_order(a in any_scalar(), b in any_scalar()) {
        prop_assert_eq!(a.leq(b), a.oplus(b) == b);
        // Total on the extended line: a ⪯ b or b ⪯ a.
        prop_assert!(a.leq(b) || b.leq(a));
    }

    #[test]
    fn scalar_text_round_trip(a in any_scalar()) {
        let back: MaxScalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn function_space_axioms(
        xs in dyadic_values(33),
        ys in dyadic_values(33),
        zs in dyadic_values(33),
        a in dyadic_scalar(),
        b in dyadic_scalar(),
    ) {
        let grid = Grid::new(0.0, 1.0, 33, false).unwrap();
        let f = GridFunction::from_f64_values(&grid, &xs).unwrap();
        let g = GridFunction::from_f64_values(&grid, &ys).unwrap();
        let h = GridFunction::from_f64_values(&grid, &zs).unwrap();
        let zero = GridFunction::all_bottom(&grid);

        // Commutativity, associativity, idempotency, neutral element.
        prop_assert_eq!(f.pw_oplus(&g).unwrap(), g.pw_oplus(&f).unwrap());
        prop_assert_eq!(
            f.pw_oplus(&g).unwrap().pw_oplus(&h).unwrap(),
            f.pw_oplus(&g.pw_oplus(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(f.pw_oplus(&f).unwrap(), f.clone());
        prop_assert_eq!(f.pw_oplus(&zero).unwrap(), f.clone());

        // Scalar action: units, absorption, associativity,
        // distributivity over both additions.
        prop_assert_eq!(f.pw_otimes(MaxScalar::UNIT), f.clone());
        prop_assert!(f.pw_otimes(MaxScalar::Bottom).is_all_bottom());
        prop_assert_eq!(zero.pw_otimes(a), zero.clone());
        prop_assert_eq!(
            f.pw_otimes(a).pw_otimes(b),
            f.pw_otimes(a.otimes(b))
        );
        prop_assert_eq!(
            f.pw_oplus(&g).unwrap().pw_otimes(a),
            f.pw_otimes(a).pw_oplus(&g.pw_otimes(a)).unwrap()
        );
        prop_assert_eq!(
            f.pw_otimes(a.oplus(b)),
            f.pw_otimes(a).pw_oplus(&f.pw_otimes(b)).unwrap()
        );
    }

    #[test]
    fn lattice_identities_bitwise(
        xs in dyadic_values(48),
        ys in dyadic_values(48),
    ) {
        let grid = Grid::new(-1.0, 1.0, 48, false).unwrap();
        let f = GridFunction::from_f64_values(&grid, &xs).unwrap();
        let g = GridFunction::from_f64_values(&grid, &ys).unwrap();

        // (f1): pos − neg = f, exactly.
        let (pos, neg, abs) = f.lattice_decompose().unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let p = pos.get(i).value().unwrap();
            let n = neg.get(i).value().unwrap();
            prop_assert_eq!(p - n, x);
            prop_assert_eq!(p + n, abs.get(i).value().unwrap());
        }

        // (f2): f ⊕ g = g + (f−g)⁺ = f + (g−f)⁺, exactly on dyadics.
        let join = f.pw_oplus(&g).unwrap();
        let (pos_fg, _, _) = f.sub(&g).unwrap().lattice_decompose().unwrap();
        let (pos_gf, _, _) = g.sub(&f).unwrap().lattice_decompose().unwrap();
        for i in 0..grid.len() {
            let j = join.get(i).value().unwrap();
            prop_assert_eq!(ys[i] + pos_fg.get(i).value().unwrap(), j);
            prop_assert_eq!(xs[i] + pos_gf.get(i).value().unwrap(), j);
        }

        // (f3): the two distance routes agree bit-for-bit (this holds
        // for arbitrary doubles, a fortiori here).
        for norm in [Norm::L1, Norm::Sup] {
            let d1 = dist(&f, &g, norm).unwrap();
            let d2 = dist_via_lattice(&f, &g, norm).unwrap();
            prop_assert_eq!(d1.to_bits(), d2.to_bits());
        }

        // Standard order coincides with pointwise ≤.
        let pointwise = xs.iter().zip(&ys).all(|(x, y)| x <= y);
        prop_assert_eq!(f.leq(&g).unwrap(), pointwise);
        prop_assert_eq!(f.pw_oplus(&g).unwrap() == g, pointwise);
    }

    #[test]
    fn grid_function_format_round_trip(
        xs in proptest::collection::vec(
            prop_oneof![4 => -1e15f64..1e15, 1 => Just(f64::NEG_INFINITY)],
            16,
        ),
    ) {
        let grid = Grid::new(-2.0, 2.0, 16, true).unwrap();
        let f = GridFunction::from_f64_values(&grid, &xs).unwrap();
        let text = maxplus_lab::io::format_grid_function(&f);
        let back = maxplus_lab::io::parse_grid_function(&text).unwrap();
        prop_assert_eq!(&back, &f);
        // Bit-exact, not just equal.
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert_eq!(a.to_f64().to_bits(), b.to_f64().to_bits());
        }
    }

    #[test]
    fn finite_vector_format_round_trip(
        xs in proptest::collection::vec(
            prop_oneof![4 => -1e9f64..1e9, 1 => Just(f64::NEG_INFINITY)],
            1..12,
        ),
    ) {
        let v = FiniteMaxVector::from_f64(&xs).unwrap();
        let back: FiniteMaxVector = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
    }
}
