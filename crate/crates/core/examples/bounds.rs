//! Both sides of each inequality for one function, and the dr2 chain.
//!
//!     cargo run --example bounds -- "exp(x^2)" 0 1 0.8 0.6

use hhverify::bounds::{self, Variant};
use hhverify::classify::ClassParams;
use hhverify::funcspec;
use hhverify::quadrature::Interval;
use hhverify::verify::{self, Theorem, VerifyOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = args.first().map(String::as_str).unwrap_or("exp(x^2)");
    let num = |i: usize, default: f64| args.get(i).map(|s| s.parse().unwrap()).unwrap_or(default);
    let (a, b, alpha, m) = (num(1, 0.0), num(2, 1.0), num(3, 0.8), num(4, 0.6));

    let f = funcspec::parse(text).unwrap();
    let iv = Interval::new(a, b).unwrap();
    let params = ClassParams::new(alpha, m).unwrap();

    let chain = bounds::chain_dr2(&f, iv, 1e-12).unwrap();
    println!("dr2 chain for {f} on [{a}, {b}]");
    for term in &chain.terms {
        println!("  {:<24} {:.15}", term.label, term.value);
    }

    println!("\n{:<5} {:<10} {:>16} {:>16} {:>12}  verdict", "thm", "variant", "lhs", "rhs", "margin");
    let opts = VerifyOptions::default();
    for theorem in Theorem::ALL {
        let variants: &[Variant] = if theorem.has_variants() { &[Variant::Printed, Variant::Corrected] } else { &[Variant::Corrected] };
        for &variant in variants {
            let r = verify::verify_theorem(theorem, variant, &f, iv, params, &opts);
            let fmt = |v: Option<f64>| v.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into());
            println!(
                "{:<5} {:<10} {:>16} {:>16} {:>12}  {} (hypothesis {:?})",
                theorem.name(),
                r.variant.name(),
                fmt(r.lhs),
                fmt(r.rhs),
                r.margin.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into()),
                r.verdict.name(),
                r.hypothesis.status
            );
        }
    }
}
