//! Sampled membership checks for the m- and (alpha,m)-logarithmically
//! convex classes, with re-verification of the reported witness.

use hhverify::classify::{self, ClassParams, ClassifyOptions};
use hhverify::funcspec;

fn show(name: &str, f: &funcspec::FunctionExpr, upper: f64, params: ClassParams) {
    let opts = ClassifyOptions::default();
    let r = classify::check_alpha_m_log_convex(f, upper, params, &opts).unwrap();
    print!("{name:<8} alpha={:<4} m={:<4} on [0,{upper}]: {:<20}", params.alpha(), params.m(), r.label());
    match r.worst_violation {
        None => println!("({} samples)", r.samples),
        Some(v) => {
            let (lhs, rhs) = classify::evaluate_triple(f, params, v.x, v.y, v.t).unwrap();
            println!("x={:.4} y={:.4} t={:.4}: {lhs:.6} > {rhs:.6}", v.x, v.y, v.t);
        }
    }
}

fn main() {
    let p = |alpha, m| ClassParams::new(alpha, m).unwrap();
    let exp = funcspec::parse("exp(x)").unwrap();
    let half = funcspec::parse("0.5").unwrap();
    let two = funcspec::parse("2").unwrap();
    let bump = funcspec::parse("x^2+1").unwrap();

    show("exp(x)", &exp, 2.0, p(1.0, 0.5));
    show("exp(x)", &exp, 2.0, p(0.5, 1.0));
    show("0.5", &half, 2.0, p(0.5, 0.5));
    // constants above 1 fail once m < 1: 2 > 2^(t + m(1-t))
    show("2", &two, 2.0, p(1.0, 0.7));
    show("x^2+1", &bump, 2.0, p(1.0, 1.0));
}
