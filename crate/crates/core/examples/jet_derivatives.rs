//! Exact partial derivatives of an expression through order-3 jets.

use curvlab::{parse, Jet};

fn main() -> curvlab::Result<()> {
    let f = parse("x1^2*x2 + sin(x1*x2)", 2)?;
    let x = Jet::seed(&[2.0, 3.0], 3)?;
    let y = f.evaluate(&x)?;
    println!("f        = {f}");
    println!("f(2, 3)  = {}", y.value());
    for alpha in [[1u8, 0], [0, 1], [2, 0], [1, 1], [0, 2], [2, 1], [1, 2]] {
        println!("d^{alpha:?} f = {:.12}", y.derivative(&alpha).unwrap());
    }
    let fx = y.partial(0)?;
    println!(
        "df/dx1 as a jet of order {}: gradient {:?}",
        fx.order(),
        fx.gradient()
    );
    Ok(())
}
