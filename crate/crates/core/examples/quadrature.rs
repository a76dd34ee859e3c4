//! Adaptive Simpson on a few integrands, showing the error estimate against
//! known values and the cost of tightening the tolerance.

use hhverify::funcspec;
use hhverify::quadrature::{self, Interval};

fn main() {
    let cases = [
        ("exp(x)", 0.0, 1.0, std::f64::consts::E - 1.0),
        ("1/(1+x^2)", 0.0, 1.0, std::f64::consts::FRAC_PI_4),
        ("sqrt(x+1)", 0.0, 1.0, 2.0 / 3.0 * (2.0 * std::f64::consts::SQRT_2 - 1.0)),
        ("x*exp(-x^2)+1", 0.0, 3.0, 3.0 + 0.5 * (1.0 - (-9.0f64).exp())),
    ];
    for (text, a, b, exact) in cases {
        let f = funcspec::parse(text).unwrap();
        let iv = Interval::new(a, b).unwrap();
        println!("{text} on [{a}, {b}]");
        for tol in [1e-6, 1e-9, 1e-12] {
            let r = quadrature::integrate(|x| f.evaluate(x), iv, tol).unwrap();
            println!(
                "  tol {tol:.0e}: value {:.15}  err_est {:.1e}  actual {:.1e}  evals {:>6}{}",
                r.value,
                r.err_est,
                (r.value - exact).abs(),
                r.evals,
                if r.converged { "" } else { "  (not converged)" }
            );
        }
    }
}
