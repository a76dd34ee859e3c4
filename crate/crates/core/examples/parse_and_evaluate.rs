//! Parse expressions, evaluate them, and instantiate registered families.
//!
//!     cargo run --example parse_and_evaluate -- "exp(2*x)+1" 0.5

use hhverify::funcspec::{self, FamilySpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "x^2 + exp(-x)".to_string());
    let x: f64 = args.next().map(|s| s.parse().expect("x must be a number")).unwrap_or(1.0);

    let f = match funcspec::parse(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{text}\n{}^ {e}", " ".repeat(e.offset()));
            std::process::exit(2);
        }
    };
    println!("parsed:    {f}");
    match f.evaluate(x) {
        Ok(v) => println!("f({x}) = {v}"),
        Err(e) => println!("f({x}) failed: {e}"),
    }

    for spec in [
        FamilySpec::new("const", [("c", 0.5)]),
        FamilySpec::new("exp_linear", [("k", 2.0)]),
        FamilySpec::new("exp_affine", [("c", 1.5), ("k", -1.0)]),
        FamilySpec::new("poly_shift", [("p", 2.0), ("q", 1.0)]),
    ] {
        let g = spec.instantiate().unwrap();
        println!("{spec:<28} = {g:<28} f({x}) = {:.12}", g.evaluate(x).unwrap());
    }

    // positivity is checked at evaluation time, not parse time
    let h = funcspec::parse("x - 1").unwrap();
    println!("x - 1 at 0.5: {}", h.evaluate(0.5).unwrap_err());
}
