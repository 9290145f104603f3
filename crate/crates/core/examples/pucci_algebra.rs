//! Pucci extremal operators on a random symmetric matrix, and the
//! coefficient that attains the supremum.
//!
//! ```bash
//! cargo run --example pucci_algebra
//! ```

use pucci_lab::matrix::{eig_sym, SymmetricMatrix};
use pucci_lab::pucci::{optimal_coefficient_for, pucci_minus, pucci_plus, EllipticityPair};

fn main() -> pucci_lab::Result<()> {
    let m = SymmetricMatrix::from_rows(&[&[1.0, -2.0, 0.5], &[-2.0, -3.0, 0.0], &[0.5, 0.0, 2.0]])?;
    let pair = EllipticityPair::new(1.0, 4.0)?;

    let plus = pucci_plus(&m, pair)?;
    let minus = pucci_minus(&m, pair)?;
    println!("eigenvalues     {:?}", eig_sym(&m)?.values);
    println!("M+(M)           {plus:.6}");
    println!("M-(M)           {minus:.6}");
    println!("-M+(-M)         {:.6}", -pucci_plus(&m.scale(-1.0), pair)?);

    let a = optimal_coefficient_for(&m, pair)?;
    println!("Tr(A* M)        {:.6}", a.trace_product(&m));
    println!("spectrum of A*  {:?}", eig_sym(&a)?.values);
    Ok(())
}
