//! Parsing, canonical printing and error reporting of chart expressions.

use curvlab::parse;

fn main() {
    for src in [
        "4/(1+x1^2+x2^2)^2",
        "-x1^2 + 2*x2*(x3 - 1)",
        "sqrt(1 - x1^2 - x2^2)^(-3)",
        "exp(-pi*x1) * cos(x2)",
    ] {
        let e = parse(src, 3).expect("valid expression");
        println!(
            "{src:<30} -> {e}   depth {}, arity {}",
            e.depth(),
            e.arity()
        );
        println!(
            "{:<30}    at (0.1, 0.2, 0.3): {}",
            "",
            e.eval_f64(&[0.1, 0.2, 0.3]).unwrap()
        );
    }
    for bad in ["x1 + * x2", "x4 + 1", "tan(x1)", "x1^0.3", "log(x1 - 1)"] {
        match parse(bad, 3).and_then(|e| e.eval_f64(&[0.5, 0.0, 0.0])) {
            Ok(v) => println!("{bad:<30} -> {v}"),
            Err(err) => println!("{bad:<30} -> error: {err}"),
        }
    }
}
