//! The square-root bounds as printed fail for a constant function; the
//! corrected forms hold with equality.

use hhverify::bounds::Variant;
use hhverify::classify::ClassParams;
use hhverify::funcspec;
use hhverify::quadrature::Interval;
use hhverify::verify::{self, Theorem, VerifyOptions};

fn main() {
    let f = funcspec::parse("0.5").unwrap();
    let iv = Interval::new(0.0, 1.0).unwrap();
    let params = ClassParams::new(1.0, 1.0).unwrap();
    let opts = VerifyOptions::default();
    for theorem in [Theorem::Eq22, Theorem::Eq42] {
        for variant in [Variant::Printed, Variant::Corrected] {
            let r = verify::verify_theorem(theorem, variant, &f, iv, params, &opts);
            println!(
                "{theorem} {:<9}: lhs {:.3} rhs {:.3} margin {:+.3} -> {} (hypothesis {:?})",
                variant.name(),
                r.lhs.unwrap(),
                r.rhs.unwrap(),
                r.margin.unwrap(),
                r.verdict.name(),
                r.hypothesis.status
            );
        }
    }
}
