//! The max-plus semifield and the discretized function space: scalar
//! operations, pointwise lattice structure, and the three decomposition
//! identities relating ⊕/⊗ to the ordinary vector-space operations.
//!
//! ```bash
//! cargo run --example maxplus_basics
//! ```

use maxplus_lab::space::{dist, dist_via_lattice, Grid, GridFunction, Norm};
use maxplus_lab::MaxScalar;

fn main() -> maxplus_lab::Result<()> {
    // Scalars: ⊕ is max with -inf neutral, ⊗ is + with -inf absorbing.
    let a = MaxScalar::num(3.0);
    let bottom = MaxScalar::BOTTOM;
    println!("3 ⊕ -inf = {}", a.oplus(bottom));
    println!("3 ⊗ -inf = {}", a.otimes(bottom));
    println!("2 ⊗ 3    = {}", MaxScalar::num(2.0).otimes(a));
    println!("-inf ⪯ -7: {}", bottom.leq(MaxScalar::num(-7.0)));

    // Grid functions: f(x) = x and g(x) = −x join to |x|.
    let grid = Grid::new(-1.0, 1.0, 8, false)?;
    let f = GridFunction::from_fn(&grid, |x| x)?;
    let g = GridFunction::from_fn(&grid, |x| -x)?;
    let joined = f.pw_oplus(&g)?;
    println!("\n(f ⊕ g)(x) for f=x, g=-x:");
    for (i, v) in joined.values().iter().enumerate() {
        println!("  x = {:+.3}: {}", grid.center(i), v);
    }

    // Lattice decomposition f = pos − neg, abs = pos + neg.
    let (pos, neg, abs) = f.lattice_decompose()?;
    println!("\nnorms: |f|_L1 = {}, |f|_sup = {}", abs.norm_l1()?, abs.norm_sup()?);
    println!("pos(0.5-cell) = {}, neg = {}", pos.get(6), neg.get(6));

    // The two distance routes agree bit-for-bit.
    let d1 = dist(&f, &g, Norm::L1)?;
    let d2 = dist_via_lattice(&f, &g, Norm::L1)?;
    println!("\ndirect distance  {d1:?}");
    println!("lattice identity {d2:?}");
    assert_eq!(d1.to_bits(), d2.to_bits());

    // The standard order is pointwise: f ⪯ f ⊕ g.
    assert!(f.leq(&joined)?);
    println!("\nf ⪯ f ⊕ g confirmed");
    Ok(())
}
